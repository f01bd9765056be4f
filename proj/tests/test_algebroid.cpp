#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ydk/algebroid.hpp"

using namespace ydk;

namespace {

TruncationConfig base_cfg(int n_lambda, int d_pos, int p_neg, int l_total, int h) {
    TruncationConfig cfg;
    cfg.dynamical_dim = n_lambda;
    cfg.t_pos_max = d_pos;
    cfg.t_neg_max = p_neg;
    cfg.lambda_total_max = l_total;
    cfg.hbar_max = h;
    cfg.z_order_max = 0;
    cfg.z_pos_max = 0;
    return cfg;
}

SplittingData pole_fixture(const CotangentLie& d) {
    const int f = 2;
    TruncationConfig ext = base_cfg(1, 2, 2, 2, 0);
    return generate_splitting(d, {LoopElement::single(ext, f, -1)}, ext);
}

bool check_named(const VerificationReport& r, const std::string& name, bool want_pass) {
    for (const auto& c : r.checks())
        if (c.name == name) return c.pass == want_pass;
    return false;
}

void dump_failures(const VerificationReport& r) {
    for (const auto& c : r.checks())
        if (!c.pass) MESSAGE(c.name << ": " << c.details);
}

} // namespace

TEST_CASE("target map is the hbar-shift of the base coordinate") {
    CotangentLie d(LieData::sl2());
    SplittingData s = pole_fixture(d);
    TruncationConfig ext = base_cfg(1, 2, 2, 2, 2);
    AlgebroidCtx c(LieData::sl2(), s, ext);
    const TruncationConfig& cfg = c.config();
    Series l1 = Series::var(cfg, cfg.lambda_index(1));
    Series hb = Series::var(cfg, 0);

    // s(lambda_1) is the scalar itself
    CHECK(c.s_map(l1) == EnvElement::from_word(c.grand(), {}, l1));
    // t(lambda_1) = lambda_1 + hbar * omega_1-letter, exactly
    EnvElement want = EnvElement::from_word(c.grand(), {}, l1);
    want.add_term({(int16_t)c.letter_id(0)}, hb);
    CHECK(c.t_map(l1) == want);
    // constants are fixed by both base maps
    Series k = Series::constant(cfg, Rat(7, 3));
    CHECK(c.t_map(k) == c.s_map(k));

    // pairing oracle: <t(r), e^{hbar y}> equals the Taylor flow of r along y
    Series r = l1 * l1 + l1 * Rat(2);
    for (int j : {0, c.minus_rank() - 1}) {
        std::vector<Series> y(c.minus_rank(), Series::zero(cfg));
        y[j] = Series::constant(cfg, Rat(2, 5));
        CHECK(c.pair(c.t_map(r), c.grouplike(y)) == c.shift_flow(y, 1, r));
    }
}

TEST_CASE("groupoid coproduct: unit, duality against products, first order") {
    CotangentLie d(LieData::sl2());
    TruncationConfig cfg0 = base_cfg(0, 2, 3, 0, 2);
    SplittingData s = trivial_splitting(d, cfg0, 3);
    TruncationConfig ext = base_cfg(0, 2, 3, 0, 2);
    AlgebroidCtx c(LieData::sl2(), s, ext);
    const TruncationConfig& cfg = c.config();
    std::vector<EnvOps*> legs{&c.ops(), &c.ops()};

    CHECK(c.groupoid_coproduct(EnvElement::unit(c.grand())) == Tensor::unit(legs));

    // duality: <Delta f, e^{hbar y1} (x) e^{hbar y2}> = <f, e^{hbar y1} e^{hbar y2}>
    std::vector<Series> y1(c.minus_rank(), Series::zero(cfg));
    std::vector<Series> y2 = y1;
    y1[0] = Series::constant(cfg, 1);
    y1[2] = Series::constant(cfg, Rat(-1, 2));
    y2[1] = Series::constant(cfg, Rat(3, 4));
    EnvElement f = c.mul(c.letter(0), c.letter(1));
    CHECK(c.eval_letters(c.groupoid_coproduct(f), {y1, y2}) ==
          c.pair(f, c.mops().mul(c.grouplike(y1), c.grouplike(y2))));

    // first-order layer on the pole-free fixture, against the raw structure
    // constants: with [b_k, b_l] = sum_j f^j_{kl} b_j in the complement and the
    // evaluation convention <g1 (x) g2, u1 (x) u2> = g1(u1 g2(u2)), duality
    // determines Delta(D_j) = D_j(x)1 + 1(x)D_j + hbar sum_{k<l} f^j_{kl}
    // D_k (x) D_l + O(hbar^2).
    for (int j : {0, 4}) {
        Tensor D = c.groupoid_coproduct(c.letter(j));
        Tensor layer1(legs);
        for (auto& [key, cc] : D.terms()) {
            Series c1 = Series::zero(cfg);
            for (auto& [e, v] : cc.terms())
                if (e[0] == 1) {
                    ExpVec e2 = e;
                    e2[0] = 0;
                    c1.add_term(e2, v);
                }
            if (!c1.is_zero()) layer1.add_term(key, c1);
        }
        Tensor want(legs);
        for (int k = 0; k < c.minus_rank(); ++k)
            for (int l = k + 1; l < c.minus_rank(); ++l) {
                long drops = 0;
                MixedElement br =
                    mixed_bracket(d, c.minus_basis(k), c.minus_basis(l), &drops);
                auto sp = c.split(br);
                CHECK(sp.plus.is_zero());
                if (sp.minus_coeff[j].is_zero()) continue;
                want += Tensor::pure(legs, {c.letter(k), c.letter(l)}) * sp.minus_coeff[j];
            }
        CHECK(layer1 == want);
    }
}

TEST_CASE("takeuchi identity holds exactly on a mixed word") {
    CotangentLie d(LieData::sl2());
    SplittingData s = pole_fixture(d);
    TruncationConfig ext = base_cfg(1, 2, 2, 2, 2);
    AlgebroidCtx c(LieData::sl2(), s, ext);
    const TruncationConfig& cfg = c.config();
    std::vector<EnvOps*> legs{&c.ops(), &c.ops()};
    Series l1 = Series::var(cfg, cfg.lambda_index(1));
    EnvElement un = EnvElement::unit(c.grand());

    EnvElement h = c.current(0, 0); // e t^0
    Tensor D = c.canonicalize(c.coproduct(h));
    Tensor lhs = c.canonicalize(c.mul(D, Tensor::pure(legs, {c.s_map(l1), un})));
    Tensor rhs = c.canonicalize(c.mul(D, Tensor::pure(legs, {un, c.t_map(l1)})));
    CHECK(lhs == rhs);
}

TEST_CASE("full verification on the pole-free fixture includes the plain-limit match") {
    TruncationConfig cfg0 = base_cfg(0, 2, 3, 0, 2);
    CotangentLie d(LieData::sl2());
    SplittingData s = trivial_splitting(d, cfg0, 3);
    TruncationConfig ext = base_cfg(0, 2, 3, 0, 2);
    auto rep = verify_hopf_algebroid(LieData::sl2(), s, ext);
    dump_failures(rep);
    CHECK(rep.all_passed());
    CHECK(check_named(rep, "plain_limit_coproduct", true));
    CHECK(check_named(rep, "plain_limit_shift_trivial", true));
}

TEST_CASE("full verification on the generated one-pole fixture") {
    CotangentLie d(LieData::sl2());
    SplittingData s = pole_fixture(d);
    TruncationConfig ext = base_cfg(1, 2, 2, 2, 2);
    auto rep = verify_hopf_algebroid(LieData::sl2(), s, ext);
    dump_failures(rep);
    CHECK(rep.all_passed());
}

TEST_CASE("unvalidated data is rejected") {
    CotangentLie d(LieData::sl2());
    TruncationConfig cfg0 = base_cfg(0, 2, 3, 0, 2);
    SplittingData s = trivial_splitting(d, cfg0, 3);
    s.validated = false;
    CHECK_THROWS_AS(AlgebroidCtx(LieData::sl2(), s, cfg0), PreconditionError);
}

TEST_CASE("coproduct refuses complement generators, pairing refuses non-letters") {
    CotangentLie d(LieData::sl2());
    TruncationConfig cfg0 = base_cfg(0, 2, 3, 0, 2);
    SplittingData s = trivial_splitting(d, cfg0, 3);
    AlgebroidCtx c(LieData::sl2(), s, cfg0);
    EnvElement minus = EnvElement::generator(c.grand(), c.minus_id(0));
    CHECK_THROWS_AS(c.coproduct(minus), PreconditionError);
    CHECK_THROWS_AS(c.groupoid_coproduct(c.current(0, 0)), PreconditionError);
    std::vector<Series> y(c.minus_rank(), Series::zero(c.config()));
    CHECK_THROWS_AS(c.pair(c.current(0, 0), c.grouplike(y)), AlgebraError);
}
