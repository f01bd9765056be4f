#pragma once

// Structure constants of a Lie algebra g, the cotangent Lie algebra
// d = g |x g* (coadjoint semidirect product, g* an abelian ideal), dual bases,
// the Casimir two-tensor, the pairing <,>_d, and loop-algebra elements.

#include <string>
#include <vector>

#include "ydk/series.hpp"

namespace ydk {

// Sparse vector over a basis; entries (basis index, coefficient).
using SparseVec = std::vector<std::pair<int, Rat>>;

class LieData {
  public:
    // c[a][b] = bracket [I_a, I_b] as a dense coefficient row. Validates
    // antisymmetry and Jacobi on construction.
    LieData(std::vector<std::string> labels, std::vector<std::vector<std::vector<Rat>>> c);

    static LieData sl2(); // basis (e, h, f): [h,e]=2e, [h,f]=-2f, [e,f]=h

    int dim() const { return (int)labels_.size(); }
    const std::string& label(int a) const { return labels_.at(a); }
    const Rat& c(int a, int b, int k) const { return c_[a][b][k]; }
    SparseVec bracket(int a, int b) const;

  private:
    std::vector<std::string> labels_;
    std::vector<std::vector<std::vector<Rat>>> c_;
};

// Basis layout of d: indices 0..d-1 are I_a in g, d..2d-1 are the duals I^a.
class CotangentLie {
  public:
    explicit CotangentLie(LieData g);

    const LieData& g() const { return g_; }
    int gdim() const { return g_.dim(); }
    int dim() const { return 2 * g_.dim(); }
    bool is_g(int i) const { return i < gdim(); }
    bool is_gstar(int i) const { return i >= gdim(); }
    int dual_index(int a) const { return a < gdim() ? a + gdim() : a - gdim(); }
    std::string label(int i) const;

    SparseVec bracket(int a, int b) const; // full d-bracket on basis elements
    Rat pairing(int a, int b) const;       // <,>_d
    // Casimir C = sum_a (I_a (x) I^a + I^a (x) I_a), as (left index, right index) pairs.
    std::vector<std::pair<int, int>> casimir() const;

  private:
    void validate() const; // ad-invariance of C and of the pairing
    LieData g_;
    std::vector<std::vector<SparseVec>> table_;
};

// Finite sum of (d-basis index, t-degree, coefficient in (hbar, lambda)).
// The t-degree window is the config's [-P, D]; bracket terms pushed outside it
// are dropped and counted in *dropped (the quotient by the truncation ideal).
struct LoopTerm {
    int basis;
    int t_deg;
    Series coeff;
};

class LoopElement {
  public:
    LoopElement() = default;
    explicit LoopElement(const TruncationConfig& cfg) : cfg_(cfg) {}
    static LoopElement single(const TruncationConfig& cfg, int basis, int t_deg,
                              const Series& coeff);
    static LoopElement single(const TruncationConfig& cfg, int basis, int t_deg,
                              const Rat& coeff = 1);

    const TruncationConfig& config() const { return cfg_; }
    const std::vector<LoopTerm>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }

    void add(int basis, int t_deg, const Series& coeff); // normalizing, truncating
    LoopElement operator+(const LoopElement& o) const;
    LoopElement operator-(const LoopElement& o) const;
    LoopElement operator-() const;
    LoopElement operator*(const Series& s) const;
    LoopElement operator*(const Rat& s) const;
    bool operator==(const LoopElement& o) const;
    LoopElement partial(int alpha) const;
    std::string str(const CotangentLie& d) const;

  private:
    TruncationConfig cfg_;
    std::vector<LoopTerm> t_; // sorted by (basis, t_deg), nonzero coeffs
};

LoopElement loop_bracket(const CotangentLie& d, const LoopElement& a, const LoopElement& b,
                         long* dropped = nullptr);

// res_{t=0} <f, x>_d with the hbar-rescaled convention:
// <f t^k, x t^{-k-1}> = <f, x>_d.
Series residue_pair(const CotangentLie& d, const LoopElement& f, const LoopElement& x);

} // namespace ydk
