#pragma once

// Tensor powers of envelopes with componentwise multiplication.
//
// A term is a list of per-leg keys plus a central Series coefficient.
// Scalars involving the dynamical variables are not central across legs with
// tangent generators, so each leg key carries its own left lambda-monomial;
// the shared coefficient is kept lambda-free.

#include "ydk/env.hpp"

namespace ydk {

struct LegKey {
    Word w;                    // normal-form word in the leg's envelope
    std::vector<int32_t> lam;  // left lambda-monomial exponents (size N or empty)
    auto operator<=>(const LegKey&) const = default;
};

using TensorKey = std::vector<LegKey>;

class Tensor {
  public:
    Tensor() = default;
    explicit Tensor(std::vector<EnvOps*> legs);
    static Tensor unit(std::vector<EnvOps*> legs);
    // Pure tensor of already-normal elements.
    static Tensor pure(std::vector<EnvOps*> legs, const std::vector<EnvElement>& factors);

    int arity() const { return (int)legs_.size(); }
    const std::vector<EnvOps*>& legs() const { return legs_; }
    const std::map<TensorKey, Series>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }

    // c may carry lambda; its lambda-part is folded into leg lambda_home's key.
    void add_term(const TensorKey& k, const Series& c, int lambda_home = 0);

    Tensor operator+(const Tensor& o) const;
    Tensor operator-(const Tensor& o) const;
    Tensor operator-() const;
    Tensor& operator+=(const Tensor& o);
    Tensor operator*(const Series& c) const; // central scalar only
    Tensor operator*(const Rat& c) const;
    bool operator==(const Tensor& o) const;
    bool operator!=(const Tensor& o) const { return !(*this == o); }

    Tensor mul(const Tensor& o) const; // componentwise leg products
    Tensor exp_nilpotent() const;
    Tensor inverse() const; // for unit + nilpotent tensors (Neumann series)

    // Result leg j is source leg perm[j].
    Tensor permuted(const std::vector<int>& perm) const;
    // Places leg i of *this at position pos[i] of a larger tensor, units elsewhere.
    Tensor embedded(std::vector<EnvOps*> big_legs, const std::vector<int>& pos) const;
    // Counit on leg i; the leg's lambda-monomial moves to leg `attach`
    // (attach < 0 requires it to be trivial).
    Tensor counit_leg(int i, int attach) const;
    // Primitive coproduct on leg i (children at i, i+1; lambda to the left child).
    Tensor coproduct_leg(int i) const;

    EnvElement leg_element(int i, const LegKey& k) const; // lambda^lam * word
    EnvElement as_element() const;                        // arity-1 only
    std::string str() const;

  private:
    const TruncationConfig& cfg() const;
    std::vector<EnvOps*> legs_;
    std::map<TensorKey, Series> t_;
};

// Groups the monomials of c by lambda-exponents: list of (lambda exponents,
// lambda-free part).
std::vector<std::pair<std::vector<int32_t>, Series>> split_lambda(const Series& c);

} // namespace ydk
