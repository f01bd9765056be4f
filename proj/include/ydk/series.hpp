#pragma once

// Exact sparse multivariate truncated Laurent/power series over Q.
//
// Fixed variable universe, laid out in canonical order:
//   [0]                hbar
//   [1 .. N]           lambda_1 .. lambda_N   (N = dynamical_dim)
//   [N+1 .. N+4]       t, t1, t2, t3          (spectral-local, Laurent)
//   [N+5 .. N+9]       z, z1, z2, z3, w       (spectral-global)
//
// Exponent vectors are compared lexicographically in this layout, so map
// iteration order *is* the canonical serialization order.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "ydk/errors.hpp"

namespace ydk {

using Rat = mpq_class;
using ExpVec = std::vector<int32_t>;

enum class ZMode { positive_powers, inverse_powers };

enum class KernelRegion {
    t_inner,  // |t_j| < |t_i|:   1/(t_i - t_j)     -> sum t_j^k t_i^{-k-1}
    z_large,  // z dominant:      1/(t_i - t_j + z) -> sum (t_j - t_i)^k z^{-k-1}
};

struct TruncationConfig {
    int hbar_max = 2;         // H
    int lambda_total_max = 2; // L (total degree)
    int dynamical_dim = 1;    // N
    int t_pos_max = 3;        // D (per t-variable)
    int t_neg_max = 3;        // P (max pole order per t-variable)
    int z_order_max = 3;      // Z (pole bound / expansion order per z-variable)
    int z_pos_max = -1;       // positive-power bound per z-variable; -1 = max(D, Z)
    std::array<ZMode, 5> z_modes{ZMode::inverse_powers, ZMode::inverse_powers,
                                 ZMode::inverse_powers, ZMode::inverse_powers,
                                 ZMode::inverse_powers};

    int num_vars() const { return dynamical_dim + 10; }
    int hbar_index() const { return 0; }
    int lambda_index(int alpha) const; // alpha in 1..N
    int t_index(int which) const;      // which in 0..3 -> t,t1,t2,t3
    int z_index(int which) const;      // which in 0..4 -> z,z1,z2,z3,w
    bool is_lambda(int idx) const { return idx >= 1 && idx <= dynamical_dim; }
    bool is_t(int idx) const { return idx > dynamical_dim && idx <= dynamical_dim + 4; }
    bool is_z(int idx) const { return idx > dynamical_dim + 4 && idx < num_vars(); }
    int effective_z_pos() const { return z_pos_max >= 0 ? z_pos_max : std::max(t_pos_max, z_order_max); }

    std::string var_name(int idx) const;
    bool admits(const ExpVec& e) const; // monomial within all bounds?
    bool operator==(const TruncationConfig&) const = default;
};

class Series {
  public:
    Series() = default;
    explicit Series(const TruncationConfig& cfg) : cfg_(cfg) {}

    static Series zero(const TruncationConfig& cfg) { return Series(cfg); }
    static Series constant(const TruncationConfig& cfg, const Rat& c);
    static Series monomial(const TruncationConfig& cfg, const ExpVec& e, const Rat& c);
    static Series var(const TruncationConfig& cfg, int idx, int power = 1);

    const TruncationConfig& config() const { return cfg_; }
    const std::map<ExpVec, Rat>& terms() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    Rat coeff(const ExpVec& e) const;
    Rat constant_term() const;

    void add_term(const ExpVec& e, const Rat& c); // truncating
    Series& operator+=(const Series& o);
    Series& operator-=(const Series& o);
    Series operator+(const Series& o) const;
    Series operator-(const Series& o) const;
    Series operator-() const;
    Series operator*(const Series& o) const;
    Series& operator*=(const Series& o) { return *this = *this * o; }
    Series operator*(const Rat& s) const;
    Series& operator*=(const Rat& s);
    bool operator==(const Series& o) const;
    bool operator!=(const Series& o) const { return !(*this == o); }

    // Re-truncate term-by-term into another config with the same dynamical_dim.
    Series truncated(const TruncationConfig& cfg) const;

    Series partial(int alpha) const;             // d/d lambda_alpha
    Series exp_nilpotent() const;                // requires hbar/lambda-positive monomials
    Series pow(int n) const;
    // Substitute t_which -> t_which + z_which (binomial expansion, truncating).
    Series taylor_shift_t(int t_which, int z_which) const;

    std::string str() const; // canonical text form
    friend Series series_exp(const Series& a) { return a.exp_nilpotent(); }

  private:
    void check_same_config(const Series& o) const;
    TruncationConfig cfg_;
    std::map<ExpVec, Rat> c_;
};

Series expand_kernel(const TruncationConfig& cfg, const Rat& numerator, int t_i_which,
                     int t_j_which /* -1 for absent */, int z_which /* -1 for absent */,
                     KernelRegion region);

std::string rat_str(const Rat& r);
Rat rat_parse(const std::string& s);

// FNV-1a over the canonical string; used for cache keys.
uint64_t fnv1a(const std::string& s);

} // namespace ydk
