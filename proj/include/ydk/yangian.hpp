#pragma once

// The truncated Yangian of the cotangent current algebra: the smash product of
// U(g[t]-currents) with the symmetric algebra on dual currents, its coproduct
// (conjugation by the canonical mixed exponential on the U side, duality
// against reversed products on the S side), the shift automorphism, and the
// spectral R-matrix.
//
// All objects are computed in internally widened windows (degree bound D_int,
// auxiliary pole depth, widened z-windows) and compared after clipping to the
// externally requested truncation; see clip_series / clip_tensor.

#include <optional>

#include "ydk/tensor.hpp"

namespace ydk {

// Zeroes every monomial not admitted by `ext` (layout must match cfg).
Series clip_series(const Series& s, const TruncationConfig& ext);

class YangianCtx {
  public:
    YangianCtx(LieData g, const TruncationConfig& ext);

    const CotangentLie& lie() const { return d_; }
    const TruncationConfig& ext() const { return ext_; }
    const TruncationConfig& internal() const { return int_; }
    int degree_bound() const { return D_; }          // external generator degree
    int internal_degree() const { return Dint_; }

    const Envelope* yangian() const { return Y_.get(); }
    EnvOps& yops() { return *yops_; }
    EnvOps& dops() { return *dops_; }

    // generators of the smash algebra
    EnvElement current(int basis, int deg);       // g-current in Y
    EnvElement dual_current(int basis, int deg);  // g*-current in Y (basis in g)
    Series hbar() const;

    // classical layer (legs: full d-current envelope, internal windows)
    Tensor gamma();                                // C/(t1-t2), |t2| < |t1|
    Tensor cobracket(int basis, int deg);          // [x(t1)(x)1 + 1(x)x(t2), gamma]
    Tensor classical_cybe_defect();                // zero iff CYBE holds (clipped)
    Tensor clip_d2(const Tensor& t) const;         // clip 2-leg d-current tensor

    // quantum layer
    Tensor e_gamma();                              // exp(hbar gamma'), legs (aux, Y)
    const Tensor& coproduct_gen(int id);           // Delta on a Y generator
    Tensor coproduct(const EnvElement& y);         // algebra-map extension
    Tensor coproduct_leg(const Tensor& t, int leg);
    Tensor counit_leg(const Tensor& t, int leg);
    EnvElement tau_z(const EnvElement& y, int zwhich, bool negate);
    Tensor tau_z_leg(const Tensor& t, int leg, int zwhich, bool negate);
    // R_s at argument +-(z_a - z_b) for |z_a| >> |z_b| (zb_which = -1 for a
    // single variable); legs (Y, Y)
    Tensor r_spectral(int za_which, int zb_which, bool negate);
    Tensor r_gamma(int zwhich);                    // (R_s(-z)^(21))^(-1) R_s(z)

    // clip a pure Y-tensor (any arity) to the external window
    Tensor clip_y(const Tensor& t) const;

    // identity checks; each returns the defect (zero tensor iff the identity
    // holds in the clipped external window)
    Tensor cobracket_gate_defect(int basis, int deg); // (Delta - Delta^op - hbar delta)(x)
    Tensor coassoc_defect(const EnvElement& y);
    Tensor counit_defect(const EnvElement& y);
    Tensor hom_defect(const EnvElement& a, const EnvElement& b);
    Tensor intertwiner_defect(const EnvElement& y); // tau_z (x) 1 twisted conjugation
    Tensor qybe_defect();                           // legs (Y,Y,Y), z1 >> z2 >> z3

  private:
    Tensor collapse(const Tensor& t); // (aux, Y) -> (Y, Y), asserts window collapse
    Tensor coproduct_s_gen(int id);
    bool gen_in_ext(const Envelope* env, int id) const;

    CotangentLie d_;
    TruncationConfig ext_, int_;
    int D_, H_, Dint_, depth_;
    std::shared_ptr<Envelope> Y_, aux_, neg_, ud_;
    std::unique_ptr<EnvOps> yops_, auxops_, negops_, dops_;
    std::unique_ptr<Splitter> auxsplit_; // negative-part projection in aux_
    std::optional<Tensor> eg_, eginv_;
    std::map<int, Tensor> cop_;
};

} // namespace ydk
