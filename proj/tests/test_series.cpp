#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ydk/series.hpp"

using namespace ydk;

namespace {

TruncationConfig desk() {
    TruncationConfig c;
    c.hbar_max = 2;
    c.lambda_total_max = 2;
    c.dynamical_dim = 1;
    c.t_pos_max = 3;
    c.t_neg_max = 3;
    c.z_order_max = 3;
    return c;
}

Series random_series(const TruncationConfig& cfg, std::mt19937& rng, int nterms,
                     int t_range_lo = -3, int t_range_hi = 3, int lambda_max = -1) {
    if (lambda_max < 0) lambda_max = cfg.lambda_total_max;
    std::uniform_int_distribution<int> h(0, cfg.hbar_max), l(0, lambda_max),
        t(t_range_lo, t_range_hi), num(-9, 9), den(1, 7);
    Series s(cfg);
    for (int i = 0; i < nterms; ++i) {
        ExpVec e(cfg.num_vars(), 0);
        e[0] = h(rng);
        e[cfg.lambda_index(1)] = l(rng);
        e[cfg.t_index(1)] = t(rng);
        e[cfg.t_index(2)] = t(rng);
        s.add_term(e, Rat(num(rng), den(rng)));
    }
    return s;
}

} // namespace

TEST_CASE("product truncates difference of squares") {
    auto cfg = desk();
    auto h = Series::var(cfg, cfg.hbar_index());
    auto one = Series::constant(cfg, 1);
    CHECK((one + h) * (one - h) == one - h * h);
}

TEST_CASE("laurent unit in t1") {
    auto cfg = desk();
    auto t1 = Series::var(cfg, cfg.t_index(1));
    auto t1inv = Series::var(cfg, cfg.t_index(1), -1);
    CHECK(t1 * t1inv == Series::constant(cfg, 1));
}

TEST_CASE("binomial cube truncated at lambda total degree 2") {
    auto cfg = desk();
    auto l = Series::var(cfg, cfg.lambda_index(1));
    auto one = Series::constant(cfg, 1);
    auto lhs = (one + l).pow(3);
    auto rhs = one + l * Rat(3) + l * l * Rat(3); // cubic term dropped
    CHECK(lhs == rhs);
}

TEST_CASE("config mismatch raises") {
    auto cfg = desk();
    auto cfg2 = desk();
    cfg2.hbar_max = 5;
    CHECK_THROWS_AS(Series::constant(cfg, 1) * Series::constant(cfg2, 1), ConfigError);
}

TEST_CASE("expand_kernel geometric series at P=3") {
    auto cfg = desk();
    auto k = expand_kernel(cfg, 1, 1, 2, -1, KernelRegion::t_inner);
    Series want(cfg);
    for (int j = 0; j < 3; ++j) {
        ExpVec e(cfg.num_vars(), 0);
        e[cfg.t_index(2)] = j;
        e[cfg.t_index(1)] = -j - 1;
        want.add_term(e, 1);
    }
    CHECK(k == want);
}

TEST_CASE("expand_kernel z-large at Z=2") {
    auto cfg = desk();
    cfg.z_order_max = 2;
    auto k = expand_kernel(cfg, 1, 1, 2, 0, KernelRegion::z_large);
    auto z1 = Series::var(cfg, cfg.z_index(0), -1);
    auto z2 = Series::var(cfg, cfg.z_index(0), -2);
    auto t1 = Series::var(cfg, cfg.t_index(1));
    auto t2 = Series::var(cfg, cfg.t_index(2));
    CHECK(k == z1 + (t2 - t1) * z2);
}

TEST_CASE("expand_kernel with no second variable") {
    auto cfg = desk();
    auto k = expand_kernel(cfg, 1, 1, -1, -1, KernelRegion::t_inner);
    CHECK(k == Series::var(cfg, cfg.t_index(1), -1));
}

TEST_CASE("kernel times pole is one up to the truncation tail") {
    auto cfg = desk();
    auto k = expand_kernel(cfg, 1, 1, 2, -1, KernelRegion::t_inner);
    auto t1 = Series::var(cfg, cfg.t_index(1));
    auto t2 = Series::var(cfg, cfg.t_index(2));
    auto prod = k * (t1 - t2);
    // all retained coefficients of 1 - prod sit in the truncated tail t2^P t1^{-P}
    auto err = Series::constant(cfg, 1) - prod;
    for (const auto& [e, c] : err.terms()) {
        CHECK(e[cfg.t_index(2)] == cfg.t_neg_max);
        CHECK(e[cfg.t_index(1)] == -cfg.t_neg_max);
    }
}

TEST_CASE("series_exp basics") {
    auto cfg = desk();
    auto h = Series::var(cfg, cfg.hbar_index());
    auto want = Series::constant(cfg, 1) + h + h * h * Rat(1, 2);
    CHECK(series_exp(h) == want);
    CHECK(series_exp(Series::zero(cfg)) == Series::constant(cfg, 1));
    auto t = Series::var(cfg, cfg.t_index(0));
    auto a = h * t;
    CHECK(series_exp(a) * series_exp(-a) == Series::constant(cfg, 1));
    CHECK_THROWS_AS(series_exp(t), NilpotencyError);
}

TEST_CASE("exp is a homomorphism on commuting scalars") {
    auto cfg = desk();
    std::mt19937 rng(7);
    for (int rep = 0; rep < 5; ++rep) {
        auto h = Series::var(cfg, cfg.hbar_index());
        // t-degrees kept small so no Laurent-window truncation interferes
        auto a = random_series(cfg, rng, 4, -1, 1) * h;
        auto b = random_series(cfg, rng, 4, -1, 1) * h;
        CHECK(series_exp(a + b) == series_exp(a) * series_exp(b));
    }
}

TEST_CASE("partial derivatives") {
    TruncationConfig cfg = desk();
    cfg.dynamical_dim = 2;
    auto l1 = Series::var(cfg, cfg.lambda_index(1));
    auto l2 = Series::var(cfg, cfg.lambda_index(2));
    CHECK((l1 * l1).partial(1) == l1 * Rat(2));
    CHECK(l2.partial(1) == Series::zero(cfg));
    CHECK((l1 * l2).partial(1).partial(2) == Series::constant(cfg, 1));
    CHECK((l1 * l2).partial(2).partial(1) == Series::constant(cfg, 1));
    CHECK_THROWS_AS(l1.partial(3), IndexError);
}

TEST_CASE("partial satisfies Leibniz on random series") {
    auto cfg = desk();
    std::mt19937 rng(11);
    auto l = Series::var(cfg, cfg.lambda_index(1));
    for (int rep = 0; rep < 8; ++rep) {
        // lambda-degrees kept below the bound: the derivative of a truncated
        // lambda^3 term would otherwise re-enter the retained window
        auto a = random_series(cfg, rng, 5, -3, 3, 1);
        auto b = random_series(cfg, rng, 5, -3, 3, 1);
        CHECK((a * b).partial(1) == a.partial(1) * b + a * b.partial(1));
    }
}

TEST_CASE("ring axioms on random sparse series") {
    auto cfg = desk();
    std::mt19937 rng(3);
    for (int rep = 0; rep < 8; ++rep) {
        // one-sided t-degree ranges keep the truncation set an ideal
        int lo = (rep % 2) ? 0 : -cfg.t_neg_max;
        int hi = (rep % 2) ? cfg.t_pos_max : 0;
        auto a = random_series(cfg, rng, 4, lo, hi);
        auto b = random_series(cfg, rng, 4, lo, hi);
        auto c = random_series(cfg, rng, 4, lo, hi);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a * b == b * a);
        CHECK(a + b == b + a);
    }
}

TEST_CASE("taylor shift t -> t+z") {
    auto cfg = desk();
    cfg.z_modes[0] = ZMode::positive_powers;
    auto t = Series::var(cfg, cfg.t_index(0));
    auto z = Series::var(cfg, cfg.z_index(0));
    CHECK((t * t).taylor_shift_t(0, 0) == t * t + t * z * Rat(2) + z * z);
    CHECK(Series::constant(cfg, 1).taylor_shift_t(0, 0) == Series::constant(cfg, 1));

    // t^3 shifted, then truncated to t-degree <= 2: only the binomial tail survives
    TruncationConfig small = cfg;
    small.t_pos_max = 2;
    auto got = (t * t * t).taylor_shift_t(0, 0).truncated(small);
    auto ts = Series::var(small, small.t_index(0));
    auto zs = Series::var(small, small.z_index(0));
    CHECK(got == ts * ts * zs * Rat(3) + ts * zs * zs * Rat(3) + zs * zs * zs);

    // z = 0 slice of the shifted polynomial recovers the original
    auto poly = t * t + t * Rat(5);
    auto back = poly.taylor_shift_t(0, 0);
    Series z0(cfg);
    for (const auto& [e, c] : back.terms())
        if (e[cfg.z_index(0)] == 0) z0.add_term(e, c);
    CHECK(z0 == poly);

    auto tinv = Series::var(cfg, cfg.t_index(0), -1);
    CHECK_THROWS_AS(tinv.taylor_shift_t(0, 0), ExpansionError);
}

TEST_CASE("canonical serialization is ordered and stable") {
    auto cfg = desk();
    auto h = Series::var(cfg, cfg.hbar_index());
    auto t1 = Series::var(cfg, cfg.t_index(1));
    auto s = t1 * Rat(1, 2) + h * h - Series::constant(cfg, 3);
    CHECK(s.str() == "-3 + 1/2*t1 + 1*hbar^2");
    CHECK(Series::zero(cfg).str() == "0");
}
