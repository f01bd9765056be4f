#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <map>

#include "ydk/lie.hpp"

using namespace ydk;

namespace {

TruncationConfig desk() {
    TruncationConfig c;
    return c;
}

// 3x3 traceless matrices; brackets computed from matrix commutators and fed
// in as structure constants, so LieData's Jacobi validation certifies them.
LieData sl3_from_matrices() {
    using M = std::array<std::array<Rat, 3>, 3>;
    auto unit = [](int i, int j) {
        M m{};
        m[i][j] = 1;
        return m;
    };
    std::vector<M> basis;
    std::vector<std::string> labels;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) {
                basis.push_back(unit(i, j));
                labels.push_back("E" + std::to_string(i + 1) + std::to_string(j + 1));
            }
    for (int i = 0; i < 2; ++i) {
        M m{};
        m[i][i] = 1;
        m[i + 1][i + 1] = -1;
        basis.push_back(m);
        labels.push_back("H" + std::to_string(i + 1));
    }
    auto mul = [](const M& a, const M& b) {
        M r{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
        return r;
    };
    // expand a traceless matrix in the basis: off-diagonal entries are direct,
    // diagonal = x*H1 + y*H2 with x = m00, y = -m22
    auto expand = [&](const M& m) {
        std::vector<Rat> v(8, 0);
        int idx = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) v[idx++] = m[i][j];
        v[6] = m[0][0];
        v[7] = -m[2][2];
        return v;
    };
    const int d = 8;
    std::vector<std::vector<std::vector<Rat>>> c(d, std::vector<std::vector<Rat>>(d, std::vector<Rat>(d, 0)));
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            M ab = mul(basis[a], basis[b]);
            M ba = mul(basis[b], basis[a]);
            M br{};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) br[i][j] = ab[i][j] - ba[i][j];
            c[a][b] = expand(br);
        }
    return LieData(labels, std::move(c));
}

} // namespace

TEST_CASE("sl2 fixture accepted with standard relations") {
    auto g = LieData::sl2();
    CHECK(g.dim() == 3);
    // [h,e] = 2e, [h,f] = -2f, [e,f] = h
    CHECK(g.bracket(1, 0) == SparseVec{{0, 2}});
    CHECK(g.bracket(1, 2) == SparseVec{{2, -2}});
    CHECK(g.bracket(0, 2) == SparseVec{{1, 1}});
}

TEST_CASE("antisymmetry violation rejected") {
    auto mk = [](bool corrupt) {
        std::vector<std::vector<std::vector<Rat>>> c(2, std::vector<std::vector<Rat>>(2, std::vector<Rat>(2, 0)));
        c[0][1][0] = 1;
        c[1][0][0] = corrupt ? 1 : -1;
        return LieData({"x", "y"}, std::move(c));
    };
    CHECK_THROWS_AS(mk(true), StructureError);
    CHECK_NOTHROW(mk(false)); // 2-dim non-abelian algebra passes
}

TEST_CASE("jacobi violation rejected") {
    // antisymmetric but non-Jacobi 3-dim table: [x,y]=z, [y,z]=x, [x,z]=x
    std::vector<std::vector<std::vector<Rat>>> c(3, std::vector<std::vector<Rat>>(3, std::vector<Rat>(3, 0)));
    c[0][1][2] = 1;
    c[1][0][2] = -1;
    c[1][2][0] = 1;
    c[2][1][0] = -1;
    c[0][2][0] = 1;
    c[2][0][0] = -1;
    CHECK_THROWS_AS(LieData({"x", "y", "z"}, std::move(c)), StructureError);
}

TEST_CASE("sl3 via matrix commutators accepted") { CHECK_NOTHROW(sl3_from_matrices()); }

TEST_CASE("cotangent bracket: coadjoint action on sl2 duals") {
    CotangentLie d(LieData::sl2());
    const int e = 0, h = 1, f = 2, es = 3, hs = 4, fs = 5;
    // oracle: (x . phi)(y) = -phi([x,y]) evaluated over y in {e,h,f}
    auto oracle = [&](int x, int phi_dual) {
        SparseVec r;
        for (int y = 0; y < 3; ++y) {
            Rat v = 0;
            for (auto& [k, c] : d.g().bracket(x, y))
                if (k == phi_dual - 3) v -= c;
            if (v != 0) r.emplace_back(y + 3, v);
        }
        return r;
    };
    for (int x = 0; x < 3; ++x)
        for (int p = 3; p < 6; ++p) {
            auto got = d.bracket(x, p);
            auto want = oracle(x, p);
            std::map<int, Rat> a(got.begin(), got.end()), b(want.begin(), want.end());
            CHECK(a == b);
        }
    CHECK(d.bracket(e, es) == SparseVec{{hs, 2}});
    CHECK(d.bracket(e, fs) == SparseVec{});
    CHECK(d.bracket(hs, fs) == SparseVec{}); // g* abelian
    CHECK(d.bracket(f, h) == SparseVec{{f, 2}});
}

TEST_CASE("pairing and casimir invariance over the full basis") {
    CotangentLie d(LieData::sl2());
    for (int a = 0; a < d.dim(); ++a)
        for (int b = 0; b < d.dim(); ++b) {
            CHECK(d.pairing(a, b) == d.pairing(b, a));
            CHECK(d.pairing(a, b) == (d.dual_index(a) == b ? 1 : 0));
        }
    // ad-invariance is asserted in the constructor; spot-check one instance
    // by hand: [e (x) 1 + 1 (x) e, C] = 0 summed over basis legs
    std::map<std::pair<int, int>, Rat> acc;
    for (auto& [l, r] : d.casimir()) {
        for (auto& [k, c] : d.bracket(0, l)) acc[{k, r}] += c;
        for (auto& [k, c] : d.bracket(0, r)) acc[{l, k}] += c;
    }
    for (auto& [_, c] : acc) CHECK(c == 0);
}

TEST_CASE("residue pairing on loop elements") {
    auto cfg = desk();
    CotangentLie d(LieData::sl2());
    const int h = 1, hs = 4, es = 3, f = 2;
    auto hs_t2 = LoopElement::single(cfg, hs, 2);
    CHECK(residue_pair(d, hs_t2, LoopElement::single(cfg, h, -3)) ==
          Series::constant(cfg, 1));
    CHECK(residue_pair(d, hs_t2, LoopElement::single(cfg, h, -2)) == Series::zero(cfg));
    CHECK(residue_pair(d, LoopElement::single(cfg, es, 0), LoopElement::single(cfg, f, -1)) ==
          Series::zero(cfg));
}

TEST_CASE("residue pairing is perfect between g* t^k and g t^{-k-1}") {
    auto cfg = desk();
    cfg.t_neg_max = cfg.t_pos_max + 1; // t^{-k-1} needs pole room D+1
    CotangentLie d(LieData::sl2());
    std::vector<LoopElement> fs, xs;
    for (int k = 0; k <= cfg.t_pos_max; ++k)
        for (int a = 0; a < 3; ++a) {
            fs.push_back(LoopElement::single(cfg, d.dual_index(a), k));
            xs.push_back(LoopElement::single(cfg, a, -k - 1));
        }
    for (size_t i = 0; i < fs.size(); ++i)
        for (size_t j = 0; j < xs.size(); ++j) {
            auto p = residue_pair(d, fs[i], xs[j]);
            if (i == j)
                CHECK(p == Series::constant(cfg, 1));
            else
                CHECK(p == Series::zero(cfg));
        }
}

TEST_CASE("loop bracket is degree-additive and windows are audited") {
    auto cfg = desk();
    CotangentLie d(LieData::sl2());
    const int e = 0, h = 1;
    auto a = LoopElement::single(cfg, h, 2);
    auto b = LoopElement::single(cfg, e, 1);
    CHECK(loop_bracket(d, a, b) == LoopElement::single(cfg, e, 3, Rat(2)));
    long dropped = 0;
    auto c = LoopElement::single(cfg, e, 3);
    auto out = loop_bracket(d, a, c, &dropped); // degree 5 > D=3
    CHECK(out.is_zero());
    CHECK(dropped > 0);
}

TEST_CASE("loop bracket satisfies jacobi within the window") {
    auto cfg = desk();
    CotangentLie d(LieData::sl2());
    std::vector<LoopElement> els = {
        LoopElement::single(cfg, 0, -1), LoopElement::single(cfg, 1, 0),
        LoopElement::single(cfg, 2, 1), LoopElement::single(cfg, 4, 0)};
    for (auto& x : els)
        for (auto& y : els)
            for (auto& z : els) {
                auto j = loop_bracket(d, loop_bracket(d, x, y), z) +
                         loop_bracket(d, loop_bracket(d, y, z), x) +
                         loop_bracket(d, loop_bracket(d, z, x), y);
                CHECK(j.is_zero());
            }
}
