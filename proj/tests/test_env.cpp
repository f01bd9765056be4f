#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ydk/tensor.hpp"

using namespace ydk;

namespace {

TruncationConfig wide() {
    TruncationConfig c;
    c.t_pos_max = 8;
    c.t_neg_max = 8;
    return c;
}

EnvElement gen(const Envelope* env, int basis, int deg) {
    int id = env->find_loop(basis, deg);
    REQUIRE(id >= 0);
    return EnvElement::generator(env, id);
}

EnvElement random_word(const Envelope* env, std::mt19937& rng, int maxlen,
                       const std::vector<int>& pool) {
    std::uniform_int_distribution<int> len(0, maxlen);
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    int n = len(rng);
    Word w;
    for (int i = 0; i < n; ++i) w.push_back((int16_t)pool[pick(rng)]);
    EnvOps ops(env);
    return ops.normalize_word(w);
}

} // namespace

TEST_CASE("straightening: (f t^-1)(e t^0) = (e t^0)(f t^-1) - h t^-1") {
    auto cfg = wide();
    CotangentLie d(LieData::sl2());
    auto env = Envelope::loop_envelope("UgK", &d, cfg, -3, 3, [&](int b) { return d.is_g(b); });
    EnvOps ops(env.get());
    const int e = 0, h = 1, f = 2;
    auto lhs = ops.mul(gen(env.get(), f, -1), gen(env.get(), e, 0));
    int ie = env->find_loop(e, 0), iff = env->find_loop(f, -1), ih = env->find_loop(h, -1);
    REQUIRE(ie > iff); // positive-degree generators outrank negative-degree ones
    EnvElement want(env.get());
    want.add_term({(int16_t)ie, (int16_t)iff}, Series::constant(cfg, 1));
    want.add_term({(int16_t)ih}, Series::constant(cfg, -1));
    CHECK(lhs == want);
}

TEST_CASE("tangent generator and dynamical coefficient: D1*l1 = l1*D1 + 1") {
    auto cfg = wide();
    CotangentLie d(LieData::sl2());
    auto env = Envelope::loop_envelope("UG", &d, cfg, -2, 2, [&](int b) { return d.is_g(b); },
                                       /*with_tangent=*/true);
    EnvOps ops(env.get());
    auto D1 = EnvElement::generator(env.get(), env->find_tangent(1));
    Series l1 = Series::var(cfg, cfg.lambda_index(1));
    auto lhs = ops.mul(D1, EnvElement::unit(env.get()) * l1);
    auto want = D1 * l1 + EnvElement::unit(env.get());
    CHECK(lhs == want);
    // and the counit picks up the derivative: eps(D1*l1) = 1
    CHECK(lhs.counit() == Series::constant(cfg, 1));
    CHECK(D1.counit() == Series::zero(cfg));
}

TEST_CASE("associativity on random words (window wide enough for no drops)") {
    auto cfg = wide();
    CotangentLie d(LieData::sl2());
    auto env = Envelope::loop_envelope("UG", &d, cfg, -2, 2, [&](int b) { return true; },
                                       /*with_tangent=*/true);
    long before = env->dropped();
    EnvOps ops(env.get());
    std::vector<int> pool;
    for (int b = 0; b < d.dim(); ++b)
        for (int deg = -1; deg <= 1; ++deg) pool.push_back(env->find_loop(b, deg));
    pool.push_back(env->find_tangent(1));
    std::mt19937 rng(7);
    Series l1 = Series::var(cfg, cfg.lambda_index(1));
    for (int rep = 0; rep < 12; ++rep) {
        auto a = random_word(env.get(), rng, 2, pool);
        auto b = random_word(env.get(), rng, 2, pool) * (Series::constant(cfg, 1) + l1);
        auto c = random_word(env.get(), rng, 2, pool);
        CHECK(ops.mul(ops.mul(a, b), c) == ops.mul(a, ops.mul(b, c)));
    }
    CHECK(env->dropped() == before);
}

TEST_CASE("PBW normal form: weakly decreasing words, permutation-stable leading term") {
    auto cfg = wide();
    CotangentLie d(LieData::sl2());
    auto env = Envelope::loop_envelope("UgO", &d, cfg, 0, 1, [&](int b) { return d.is_g(b); });
    EnvOps ops(env.get());
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> pick(0, env->num_gens() - 1);
    for (int rep = 0; rep < 40; ++rep) {
        Word w;
        int n = 1 + rep % 4;
        for (int i = 0; i < n; ++i) w.push_back((int16_t)pick(rng));
        auto nf = ops.normalize_word(w);
        for (auto& [word, c] : nf.terms())
            for (size_t i = 0; i + 1 < word.size(); ++i) CHECK(word[i] >= word[i + 1]);
        Word sorted = w;
        std::sort(sorted.rbegin(), sorted.rend());
        CHECK(nf.terms().count(sorted) == 1);
        CHECK(nf.terms().at(sorted) == Series::constant(cfg, 1));
        // any permutation normalizes to the same element as the sorted word
        Word shuf = w;
        std::shuffle(shuf.begin(), shuf.end(), rng);
        CHECK(ops.normalize_word(shuf) - nf == ops.normalize_word(shuf) - nf); // well-formed
        auto diff = ops.normalize_word(shuf) - ops.normalize_word(w);
        for (auto& [word, c] : diff.terms()) CHECK(word.size() < w.size());
    }
}

TEST_CASE("primitive coproduct: squares and coassociativity") {
    auto cfg = wide();
    CotangentLie d(LieData::sl2());
    auto env = Envelope::loop_envelope("UgK", &d, cfg, -2, 2, [&](int b) { return d.is_g(b); });
    EnvOps ops(env.get());
    auto x = gen(env.get(), 0, 1); // e t^1
    auto x2 = ops.mul(x, x);
    auto t = Tensor::pure({&ops}, {x2}).coproduct_leg(0);
    auto u = EnvElement::unit(env.get());
    auto want = Tensor::pure({&ops, &ops}, {x2, u}) + Tensor::pure({&ops, &ops}, {x, x}) * Rat(2) +
                Tensor::pure({&ops, &ops}, {u, x2});
    CHECK(t == want);

    std::mt19937 rng(3);
    std::vector<int> pool;
    for (int b = 0; b < 3; ++b)
        for (int deg = -1; deg <= 1; ++deg) pool.push_back(env->find_loop(b, deg));
    for (int rep = 0; rep < 6; ++rep) {
        auto a = random_word(env.get(), rng, 3, pool);
        auto ta = Tensor::pure({&ops}, {a});
        CHECK(ta.coproduct_leg(0).coproduct_leg(0) == ta.coproduct_leg(0).coproduct_leg(1));
        // counit axioms
        CHECK(ta.coproduct_leg(0).counit_leg(0, -1) == ta);
        CHECK(ta.coproduct_leg(0).counit_leg(1, -1) == ta);
    }
}

TEST_CASE("coproduct is an algebra map; group-likes are exponentials") {
    auto cfg = wide();
    CotangentLie d(LieData::sl2());
    auto env = Envelope::loop_envelope("UgK", &d, cfg, -2, 2, [&](int b) { return d.is_g(b); });
    EnvOps ops(env.get());
    auto a = ops.mul(gen(env.get(), 0, 1), gen(env.get(), 2, -1));
    auto b = ops.mul(gen(env.get(), 1, 0), gen(env.get(), 0, -2));
    auto ta = Tensor::pure({&ops}, {a});
    auto tb = Tensor::pure({&ops}, {b});
    CHECK(ta.mul(tb).coproduct_leg(0) == ta.coproduct_leg(0).mul(tb.coproduct_leg(0)));

    Series hb = Series::var(cfg, cfg.hbar_index());
    auto x = (gen(env.get(), 0, 1) + gen(env.get(), 1, -1) * Rat(3)) * hb;
    auto gx = ops.exp_nilpotent(x);
    auto dg = Tensor::pure({&ops}, {gx}).coproduct_leg(0);
    CHECK(dg == Tensor::pure({&ops, &ops}, {gx, gx}));
}

TEST_CASE("triangular factorization round-trips") {
    auto cfg = wide();
    CotangentLie d(LieData::sl2());
    auto env = Envelope::loop_envelope("UgK", &d, cfg, -3, 3, [&](int b) { return d.is_g(b); });
    EnvOps ops(env.get());
    auto is_pos = [&](int id) { return env->gen(id).t_deg >= 0; };
    Splitter sp(ops, is_pos);
    std::mt19937 rng(5);
    std::vector<int> pool;
    for (int b = 0; b < 3; ++b)
        for (int deg = -1; deg <= 1; ++deg) pool.push_back(env->find_loop(b, deg));
    for (int rep = 0; rep < 8; ++rep) {
        auto u = ops.mul(random_word(env.get(), rng, 2, pool), random_word(env.get(), rng, 2, pool));
        auto parts = sp.split(u);
        EnvElement back(env.get());
        for (auto& [p, c] : parts) {
            for (auto g : p.first) CHECK(is_pos(g));
            for (auto g : p.second) CHECK(!is_pos(g));
            back += ops.mul(EnvElement::from_word(env.get(), p.first, Series::constant(cfg, 1)),
                            EnvElement::from_word(env.get(), p.second, c));
        }
        CHECK(back == u);
    }
}

namespace {

// matched-pair actions from the factorization with positive parts on the left:
// h.a = sum a_i h_i gives h|>a = sum eps(h_i) a_i and h<|a = sum eps(a_i) h_i
std::pair<EnvElement, EnvElement> actions(EnvOps& ops, Splitter& sp, const EnvElement& h,
                                          const EnvElement& a) {
    auto prod = ops.mul(h, a);
    auto parts = sp.split(prod);
    EnvElement rhd(ops.env()), lhd(ops.env());
    for (auto& [p, c] : parts) {
        if (p.second.empty())
            rhd += EnvElement::from_word(ops.env(), p.first, c);
        if (p.first.empty())
            lhd += EnvElement::from_word(ops.env(), p.second, c);
    }
    return {rhd, lhd}; // (h |> a, h <| a)
}

} // namespace

TEST_CASE("matched pair: leg symmetry of the crossed actions") {
    auto cfg = wide();
    CotangentLie d(LieData::sl2());
    auto env = Envelope::loop_envelope("UgK", &d, cfg, -4, 4, [&](int b) { return d.is_g(b); });
    EnvOps ops(env.get());
    auto is_pos = [&](int id) { return env->gen(id).t_deg >= 0; };
    Splitter sp(ops, is_pos);
    std::mt19937 rng(13);
    std::vector<int> neg_pool, pos_pool;
    for (int b = 0; b < 3; ++b) {
        neg_pool.push_back(env->find_loop(b, -1));
        neg_pool.push_back(env->find_loop(b, -2));
        pos_pool.push_back(env->find_loop(b, 0));
        pos_pool.push_back(env->find_loop(b, 1));
    }
    for (int rep = 0; rep < 6; ++rep) {
        auto h = random_word(env.get(), rng, 2, neg_pool);
        auto a = random_word(env.get(), rng, 2, pos_pool);
        auto dh = Tensor::pure({&ops}, {h}).coproduct_leg(0);
        auto da = Tensor::pure({&ops}, {a}).coproduct_leg(0);
        // sum (h1 <| a1) (x) (h2 |> a2) must equal sum (h2 <| a2) (x) (h1 |> a1)
        Tensor lhs({&ops, &ops}), rhs({&ops, &ops});
        for (auto& [kh, ch] : dh.terms())
            for (auto& [ka, ca] : da.terms()) {
                auto h1 = dh.leg_element(0, kh[0]), h2 = dh.leg_element(1, kh[1]);
                auto a1 = da.leg_element(0, ka[0]), a2 = da.leg_element(1, ka[1]);
                auto [r11, l11] = actions(ops, sp, h1, a1);
                auto [r22, l22] = actions(ops, sp, h2, a2);
                auto [r12, l12] = actions(ops, sp, h1, a2);
                auto [r21, l21] = actions(ops, sp, h2, a1);
                lhs += Tensor::pure({&ops, &ops}, {l11, r22}) * (ch * ca);
                rhs += Tensor::pure({&ops, &ops}, {l22, r11}) * (ch * ca);
            }
        CHECK(lhs == rhs);
    }
}

TEST_CASE("dual pairing: permanents of residue pairings") {
    TruncationConfig cfg;
    cfg.t_neg_max = cfg.t_pos_max + 1;
    CotangentLie d(LieData::sl2());
    auto S = Envelope::loop_envelope("S", &d, cfg, 0, 3, [&](int b) { return d.is_gstar(b); });
    auto U = Envelope::loop_envelope("Uneg", &d, cfg, -4, -1, [&](int b) { return d.is_g(b); });
    EnvOps sops(S.get()), uops(U.get());
    const int e = 0, h = 1, es = 3, hs = 4;
    auto f1 = sops.mul(gen(S.get(), es, 0), gen(S.get(), hs, 1));
    auto u1 = uops.mul(gen(U.get(), e, -1), gen(U.get(), h, -2));
    CHECK(dual_pair(f1, u1) == Series::constant(cfg, 1));
    auto f2 = sops.mul(gen(S.get(), es, 0), gen(S.get(), es, 0));
    auto u2 = uops.mul(gen(U.get(), e, -1), gen(U.get(), e, -1));
    CHECK(dual_pair(f2, u2) == Series::constant(cfg, 2));
    CHECK(dual_pair(f2, u1) == Series::zero(cfg));
    CHECK(dual_pair(f1, uops.mul(gen(U.get(), e, -2), gen(U.get(), h, -2))) == Series::zero(cfg));
    // length mismatch pairs to zero
    CHECK(dual_pair(f1, gen(U.get(), e, -1)) == Series::zero(cfg));
}

TEST_CASE("dual pairing is nondegenerate on degree <= 2") {
    TruncationConfig cfg;
    cfg.t_pos_max = 1;
    cfg.t_neg_max = 2;
    CotangentLie d(LieData::sl2());
    auto S = Envelope::loop_envelope("S", &d, cfg, 0, 1, [&](int b) { return d.is_gstar(b); });
    auto U = Envelope::loop_envelope("Uneg", &d, cfg, -2, -1, [&](int b) { return d.is_g(b); });
    EnvOps sops(S.get()), uops(U.get());
    // collect all monomials / words of degree exactly 2
    std::vector<EnvElement> fs, us;
    for (int i = 0; i < S->num_gens(); ++i)
        for (int j = i; j < S->num_gens(); ++j)
            fs.push_back(sops.mul(EnvElement::generator(S.get(), i),
                                  EnvElement::generator(S.get(), j)));
    for (int i = 0; i < U->num_gens(); ++i)
        for (int j = i; j < U->num_gens(); ++j)
            us.push_back(uops.mul(EnvElement::generator(U.get(), i),
                                  EnvElement::generator(U.get(), j)));
    REQUIRE(fs.size() == us.size());
    // pairing matrix is diagonal (after matching duals) with nonzero entries
    for (size_t i = 0; i < fs.size(); ++i) {
        int nonzero = 0;
        for (size_t j = 0; j < us.size(); ++j)
            if (!(dual_pair(fs[i], us[j]) == Series::zero(cfg))) ++nonzero;
        CHECK(nonzero == 1);
    }
}

TEST_CASE("transport between envelopes preserves normal forms") {
    auto cfg = wide();
    CotangentLie d(LieData::sl2());
    auto small = Envelope::loop_envelope("UgO", &d, cfg, 0, 2, [&](int b) { return d.is_g(b); });
    auto big = Envelope::loop_envelope("UgK", &d, cfg, -3, 3, [&](int b) { return d.is_g(b); });
    EnvOps sops(small.get()), bops(big.get());
    auto a = sops.mul(gen(small.get(), 2, 0), gen(small.get(), 0, 1));
    auto moved = sops.transport(a, bops);
    auto direct = bops.mul(gen(big.get(), 2, 0), gen(big.get(), 0, 1));
    CHECK(moved == direct);
}
