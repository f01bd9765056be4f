#pragma once

// The quantized Hopf algebroid attached to a dynamical splitting.
//
// The total algebra is generated over the base ring R = Q[[lambda]] by
//   - the "plus half": non-negative g-currents and the base derivations
//     d_alpha (a smash product T_R |x g(O)[[lambda]]),
//   - the "dual letters": the symmetric algebra on the graded dual of the
//     complement half cut out by the splitting (one letter D_j per complement
//     basis element, the dual basis of {nabla_alpha} u {non-pivot graph
//     images}),
// with cross relations [x, D-monomial] given by the dual action of the plus
// half.  The base ring embeds twice: the source map s(r) = r is scalar, the
// target map t(r) is the lambda -> lambda + hbar*omega Taylor shift.  The
// coproduct is conjugation of the primitive coproduct by an explicit two-leg
// exponential tensor (kernel part x shift part), and restricts to the
// groupoid coproduct (duality against products) on the letters.  Every axiom
// is verified exactly inside the truncation window; all windowing losses are
// audited drop counts.

#include <optional>

#include "ydk/splitting.hpp"
#include "ydk/tensor.hpp"

namespace ydk {

// Element of the Lie algebra T_R |x g(K)[[lambda]]: coefficients of the base
// derivations plus a loop current (g-valued in all uses here).
struct MixedElement {
    std::vector<Series> tangent;
    LoopElement loop;

    static MixedElement zero(const TruncationConfig& cfg, int n);
    MixedElement operator+(const MixedElement& o) const;
    MixedElement operator-(const MixedElement& o) const;
    MixedElement operator*(const Series& c) const;
    bool is_zero() const;
};

// Bracket in T_R |x g(K): vector-field bracket on the tangent part, derivative
// actions both ways, loop bracket on the currents. Window losses counted.
MixedElement mixed_bracket(const CotangentLie& d, const MixedElement& a, const MixedElement& b,
                           long* dropped = nullptr);

class AlgebroidCtx {
  public:
    // Requires a validated splitting. The working window keeps the splitting's
    // lambda/t windows and adopts ext's hbar order.
    AlgebroidCtx(LieData g, const SplittingData& s, const TruncationConfig& ext);

    const CotangentLie& lie() const { return d_; }
    const SplittingData& splitting() const { return s_; }
    const TruncationConfig& ext() const { return ext_; }
    const TruncationConfig& config() const { return cfg_; }
    int hbar_order() const { return H_; }
    int letter_cap() const { return scap_; }

    // --- generator tables --------------------------------------------------
    int minus_rank() const { return M_; }   // complement basis size
    int nabla_count() const { return N_; }  // base directions
    const MixedElement& minus_basis(int j) const { return mb_.at(j); }

    const Envelope* grand() const { return genv_.get(); }
    EnvOps& ops() { return *gops_; }
    // Widened-hbar copy of the grand envelope, used to build hbar-adic
    // arguments for the duality pairing with enough precision for the strip.
    const Envelope* grand_wide() const { return genv_w_.get(); }
    EnvOps& wops() { return *gops_w_; }
    EnvElement widen(const EnvElement& u) const;   // grand -> wide (lossless)
    EnvElement narrow(const EnvElement& u) const;  // wide -> grand (truncates)
    const Envelope* minus_env() const { return menv_.get(); }
    EnvOps& mops() { return *mops_; }

    int current_id(int basis, int t_deg) const;
    int tangent_id(int alpha) const;  // alpha in 1..N
    int minus_id(int j) const { return minus_base_ + j; }
    int letter_id(int j) const { return letter_base_ + j; }
    bool is_letter(int id) const { return id >= letter_base_; }
    bool is_minus(int id) const { return id >= minus_base_ && id < letter_base_; }
    bool is_plus(int id) const { return id < minus_base_; }

    EnvElement current(int basis, int t_deg) const;
    EnvElement tangent(int alpha) const;
    EnvElement letter(int j) const;
    // Concrete dual current I^a t^k expanded over the letters.
    EnvElement dual_current(int basis, int t_deg) const;
    // Letter j re-expanded over concrete dual currents: coefficient of
    // I^a t^k at flat index k*gdim + a.
    std::vector<Series> letter_to_dual(int j) const;

    // Truncation to the letter-degree cap (a two-sided ideal).
    EnvElement clip(const EnvElement& u) const;
    Tensor clip(const Tensor& t) const;
    EnvElement mul(const EnvElement& a, const EnvElement& b);
    Tensor mul(const Tensor& a, const Tensor& b);

    // --- splitting of Lie elements over the complement basis ----------------
    struct SplitResult {
        std::vector<Series> minus_coeff;  // over the complement basis
        MixedElement plus;                // regular remainder
        long dropped = 0;                 // residues outside the stored domain
    };
    SplitResult split(const MixedElement& z) const;
    // Plus part as a Lie-degree-one grand element.
    EnvElement plus_embed(const MixedElement& p) const;
    // Full element as a grand Lie-degree-one element (complement + plus parts).
    EnvElement lie_embed(const MixedElement& z, long* dropped = nullptr) const;
    MixedElement minus_mixed(const std::vector<Series>& coeff) const;

    // --- base maps and pairing ----------------------------------------------
    EnvElement s_map(const Series& r) const;
    EnvElement t_map(const Series& r);
    // <f, u>: pure-letter grand element against a complement-envelope element.
    Series pair(const EnvElement& f, const EnvElement& u) const;
    // Same pairing against a grand-envelope element (plus letters pair to 0).
    Series pair_grand(const EnvElement& f, const EnvElement& u) const;
    // e^{hbar y}, y = sum coeff_j b_j, in the complement envelope.
    EnvElement grouplike(const std::vector<Series>& coeff);
    // e^{sign * hbar * psi(y)} applied to r (the base flow of y).
    Series shift_flow(const std::vector<Series>& coeff, int sign, const Series& r) const;

    // --- coproducts ----------------------------------------------------------
    // Groupoid coproduct of a pure-letter element (duality against products).
    Tensor groupoid_coproduct(const EnvElement& f);
    const Tensor& coproduct_gen(int id);  // plus generators and letters
    Tensor coproduct(const EnvElement& h);
    Tensor coproduct_leg(const Tensor& t, int leg);
    // Balanced normal form of an Upsilon tensor: legs 0..A-2 lambda-free,
    // lambda crossed rightward through the target-map Taylor shift.
    Tensor canonicalize(const Tensor& t);
    // Balanced normal form for plain U(G) tensor squares: lambda moved leftward
    // by straightening (a (x) r b = a r (x) b).
    Tensor canonicalize_bar(const Tensor& t);

    // --- exponential tensors -------------------------------------------------
    const Tensor& kernel_tensor();     // exp(hbar * graph-kernel)
    const Tensor& shift_tensor();      // exp(hbar * sum d_alpha (x) omega_alpha)
    const Tensor& embedding_tensor();  // product of the two
    const Tensor& embedding_inverse();

    // T(e^{hbar y}) for a two-leg tensor with pure-letter second legs; st
    // applies the e^{-hbar psi(y)} correction of the source/target structure.
    EnvElement eval_grouplike(const Tensor& T, const std::vector<Series>& coeff, bool st);
    // Two-leg tensor against an arbitrary element of the grand envelope.
    EnvElement eval_element(const Tensor& T, const EnvElement& u);
    // Pure-letter tensor of any arity against e^{hbar y_1} (x) ... (x) e^{hbar y_n}
    // (nested source/target fold).
    Series eval_letters(const Tensor& T, const std::vector<std::vector<Series>>& ys);
    // Tensor with legs (grand, letters, letters) against a pair of group-likes.
    EnvElement eval_mixed3(const Tensor& T, const std::vector<Series>& y1,
                           const std::vector<Series>& y2);

    // --- counit / anchor -----------------------------------------------------
    Series anchor(const EnvElement& h, const Series& r) const;  // psi(h)(r)
    Series counit(const EnvElement& h) const;                   // psi(h)(1)

    // The plus component of Ad(e^{-hbar y}) x: matched-pair right action,
    // computed independently in the Lie algebra.
    MixedElement right_action_oracle(const MixedElement& x, const std::vector<Series>& coeff) const;

    // Unit vectors plus a few generic rational (and one lambda-weighted)
    // combinations over the complement basis.
    std::vector<std::vector<Series>> spanning_set() const;

    long dropped() const;

  private:
    friend VerificationReport verify_base_maps(AlgebroidCtx& c);
    void build_minus_basis();
    void build_envelopes();
    WordCombo dual_action_combo(int plus_gen, int j, long* drops);
    EnvElement rhd_word(int comp_key_kind, int comp_a, int comp_b, const Word& w);
    EnvElement rhd(const MixedElement& p, const EnvElement& u);
    Series psi_apply(const MixedElement& p, const Series& r) const;
    Tensor coproduct_plus_gen(int id);
    void ensure_gram_inverse() const;
    bool is_pivot_coord(int basis, int k) const;
    LoopElement pm_full(int basis, int k) const; // full graph representative
    int minus_index(int basis, int k) const;     // complement index of a coord

    CotangentLie d_;
    SplittingData s_;
    TruncationConfig ext_, cfg_;
    // Widened hbar window for the complement envelope: the duality pairing
    // divides by hbar^{word length}, so products of group-likes must be carried
    // to hbar order H + letter cap to be faithful at order H after the strip.
    TruncationConfig mcfg_;
    int H_ = 0, scap_ = 0, N_ = 0, M_ = 0, depth_ = 0, dg_ = 0;
    int tangent_base_ = 0, minus_base_ = 0, letter_base_ = 0;
    std::vector<MixedElement> mb_;               // complement basis elements
    std::vector<std::pair<int, int>> mb_coord_;  // (-1,alpha) or (basis,k)
    std::vector<LoopElement> xi_, omega_;        // re-truncated splitting data
    std::map<std::pair<int, int>, LoopElement> proj_;
    std::vector<std::pair<int, int>> pivots_;
    std::shared_ptr<Envelope> menv_, genv_, genv_w_;
    std::unique_ptr<EnvOps> mops_, gops_, gops_w_;
    std::map<std::tuple<int, int, int, Word>, EnvElement> rhd_memo_;
    std::map<int, Tensor> cop_;
    std::optional<Tensor> kernel_, shift_, embed_, embed_inv_;
    std::optional<EnvElement> tshift_check_;
    mutable std::optional<std::vector<std::vector<Series>>> gram_inv_;
    mutable long dropped_ = 0;
};

// Check families. Each returns a named pass/fail report; structural
// impossibilities (membership failures of asserted facts) throw
// InternalInvariantError, windows too small to represent the target shift
// throw TruncationError.
VerificationReport verify_base_maps(AlgebroidCtx& c);
VerificationReport verify_groupoid_coproduct(AlgebroidCtx& c);
VerificationReport verify_embedding_tensors(AlgebroidCtx& c);
VerificationReport verify_algebroid_coproduct(AlgebroidCtx& c);
VerificationReport verify_algebroid_axioms(AlgebroidCtx& c);

// All of the above merged; when the splitting is trivial (N = 0) additionally
// compares the coproduct with the plain quantized-current-algebra coproduct.
VerificationReport verify_hopf_algebroid(const LieData& g, const SplittingData& s,
                                         const TruncationConfig& ext);

} // namespace ydk
