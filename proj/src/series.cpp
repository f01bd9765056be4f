#include "ydk/series.hpp"

#include <sstream>

namespace ydk {

int TruncationConfig::lambda_index(int alpha) const {
    if (alpha < 1 || alpha > dynamical_dim)
        throw IndexError("lambda index " + std::to_string(alpha) + " out of range 1.." +
                         std::to_string(dynamical_dim));
    return alpha;
}

int TruncationConfig::t_index(int which) const {
    if (which < 0 || which > 3) throw IndexError("t variable selector out of range");
    return dynamical_dim + 1 + which;
}

int TruncationConfig::z_index(int which) const {
    if (which < 0 || which > 4) throw IndexError("z variable selector out of range");
    return dynamical_dim + 5 + which;
}

std::string TruncationConfig::var_name(int idx) const {
    static const char* tn[4] = {"t", "t1", "t2", "t3"};
    static const char* zn[5] = {"z", "z1", "z2", "z3", "w"};
    if (idx == 0) return "hbar";
    if (is_lambda(idx)) return "lambda_" + std::to_string(idx);
    if (is_t(idx)) return tn[idx - dynamical_dim - 1];
    if (is_z(idx)) return zn[idx - dynamical_dim - 5];
    throw IndexError("variable index out of range");
}

bool TruncationConfig::admits(const ExpVec& e) const {
    if ((int)e.size() != num_vars()) throw ConfigError("exponent vector has wrong length");
    if (e[0] < 0 || e[0] > hbar_max) return false;
    int ltot = 0;
    for (int i = 1; i <= dynamical_dim; ++i) {
        if (e[i] < 0) return false;
        ltot += e[i];
    }
    if (ltot > lambda_total_max) return false;
    for (int i = dynamical_dim + 1; i <= dynamical_dim + 4; ++i)
        if (e[i] < -t_neg_max || e[i] > t_pos_max) return false;
    for (int i = dynamical_dim + 5; i < num_vars(); ++i) {
        ZMode m = z_modes[i - dynamical_dim - 5];
        int lo = (m == ZMode::positive_powers) ? 0 : -z_order_max;
        if (e[i] < lo || e[i] > effective_z_pos()) return false;
    }
    return true;
}

Series Series::constant(const TruncationConfig& cfg, const Rat& c) {
    return monomial(cfg, ExpVec(cfg.num_vars(), 0), c);
}

Series Series::monomial(const TruncationConfig& cfg, const ExpVec& e, const Rat& c) {
    Series s(cfg);
    s.add_term(e, c);
    return s;
}

Series Series::var(const TruncationConfig& cfg, int idx, int power) {
    if (idx < 0 || idx >= cfg.num_vars()) throw IndexError("variable index out of range");
    ExpVec e(cfg.num_vars(), 0);
    e[idx] = power;
    return monomial(cfg, e, 1);
}

Rat Series::coeff(const ExpVec& e) const {
    auto it = c_.find(e);
    return it == c_.end() ? Rat(0) : it->second;
}

Rat Series::constant_term() const { return coeff(ExpVec(cfg_.num_vars(), 0)); }

void Series::add_term(const ExpVec& e, const Rat& c0) {
    Rat c = c0;
    c.canonicalize(); // GMP comparisons need canonical form
    if (c == 0) return;
    if (!cfg_.admits(e)) return; // truncation ideal
    auto [it, fresh] = c_.try_emplace(e, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) c_.erase(it);
    }
}

void Series::check_same_config(const Series& o) const {
    if (!(cfg_ == o.cfg_)) throw ConfigError("series configs differ");
}

Series& Series::operator+=(const Series& o) {
    check_same_config(o);
    for (const auto& [e, c] : o.c_) add_term(e, c);
    return *this;
}

Series& Series::operator-=(const Series& o) {
    check_same_config(o);
    for (const auto& [e, c] : o.c_) add_term(e, -c);
    return *this;
}

Series Series::operator+(const Series& o) const {
    Series r = *this;
    r += o;
    return r;
}

Series Series::operator-(const Series& o) const {
    Series r = *this;
    r -= o;
    return r;
}

Series Series::operator-() const {
    Series r(cfg_);
    for (const auto& [e, c] : c_) r.c_.emplace(e, -c);
    return r;
}

Series Series::operator*(const Series& o) const {
    check_same_config(o);
    Series r(cfg_);
    const int n = cfg_.num_vars();
    ExpVec e(n);
    for (const auto& [ea, ca] : c_)
        for (const auto& [eb, cb] : o.c_) {
            for (int i = 0; i < n; ++i) e[i] = ea[i] + eb[i];
            r.add_term(e, ca * cb);
        }
    return r;
}

Series Series::operator*(const Rat& s) const {
    Series r = *this;
    r *= s;
    return r;
}

Series& Series::operator*=(const Rat& s) {
    if (s == 0) {
        c_.clear();
        return *this;
    }
    for (auto& [e, c] : c_) c *= s;
    return *this;
}

bool Series::operator==(const Series& o) const {
    check_same_config(o);
    return c_ == o.c_;
}

Series Series::truncated(const TruncationConfig& cfg) const {
    if (cfg.dynamical_dim != cfg_.dynamical_dim)
        throw ConfigError("cannot re-truncate across different dynamical dimensions");
    Series r(cfg);
    for (const auto& [e, c] : c_) r.add_term(e, c);
    return r;
}

Series Series::partial(int alpha) const {
    int idx = cfg_.lambda_index(alpha);
    Series r(cfg_);
    for (const auto& [e, c] : c_) {
        if (e[idx] == 0) continue;
        ExpVec d = e;
        d[idx] -= 1;
        r.add_term(d, c * e[idx]);
    }
    return r;
}

Series Series::pow(int n) const {
    Series r = Series::constant(cfg_, 1);
    for (int i = 0; i < n; ++i) r = r * *this;
    return r;
}

Series Series::exp_nilpotent() const {
    for (const auto& [e, c] : c_) {
        int deg = e[0];
        for (int i = 1; i <= cfg_.dynamical_dim; ++i) deg += e[i];
        if (deg == 0)
            throw NilpotencyError("exp argument has a monomial with zero hbar/lambda degree");
    }
    Series r = Series::constant(cfg_, 1);
    Series inc = Series::constant(cfg_, 1);
    for (int k = 1; !inc.is_zero(); ++k) {
        inc = inc * *this;
        inc *= Rat(1, k);
        r += inc;
    }
    return r;
}

Series Series::taylor_shift_t(int t_which, int z_which) const {
    int ti = cfg_.t_index(t_which);
    int zi = cfg_.z_index(z_which);
    Series r(cfg_);
    for (const auto& [e, c] : c_) {
        int d = e[ti];
        if (d < 0) throw ExpansionError("taylor_shift_t on a Laurent tail");
        // (t+z)^d
        Rat binom = 1;
        for (int j = d; j >= 0; --j) {
            ExpVec m = e;
            m[ti] = j;
            m[zi] += d - j;
            r.add_term(m, c * binom);
            if (j > 0) binom = binom * j / (d - j + 1);
        }
    }
    return r;
}

Series expand_kernel(const TruncationConfig& cfg, const Rat& numerator, int t_i_which,
                     int t_j_which, int z_which, KernelRegion region) {
    Series r(cfg);
    const int ti = cfg.t_index(t_i_which);
    switch (region) {
    case KernelRegion::t_inner: {
        if (z_which >= 0) throw ExpansionError("t_inner region has no z variable");
        if (t_j_which < 0) { // 1/t_i
            ExpVec e(cfg.num_vars(), 0);
            e[ti] = -1;
            r.add_term(e, numerator);
            return r;
        }
        const int tj = cfg.t_index(t_j_which);
        for (int k = 0; k + 1 <= cfg.t_neg_max && k <= cfg.t_pos_max; ++k) {
            ExpVec e(cfg.num_vars(), 0);
            e[tj] = k;
            e[ti] = -k - 1;
            r.add_term(e, numerator);
        }
        return r;
    }
    case KernelRegion::z_large: {
        if (z_which < 0) throw ExpansionError("z_large region needs a z variable");
        const int zi = cfg.z_index(z_which);
        if (cfg.z_modes[zi - cfg.dynamical_dim - 5] != ZMode::inverse_powers)
            throw ExpansionError("z_large expansion needs inverse-powers mode");
        // 1/(t_i - t_j + z) = sum_k (t_j - t_i)^k z^{-k-1}
        Series diff(cfg);
        {
            ExpVec e(cfg.num_vars(), 0);
            if (t_j_which >= 0) {
                e[cfg.t_index(t_j_which)] = 1;
                diff.add_term(e, 1);
                e[cfg.t_index(t_j_which)] = 0;
            }
            e[ti] = 1;
            diff.add_term(e, -1);
        }
        Series p = Series::constant(cfg, numerator);
        for (int k = 0; k + 1 <= cfg.z_order_max; ++k) {
            Series zz = Series::var(cfg, zi, -k - 1);
            r += p * zz;
            p = p * diff;
            if (p.is_zero()) break;
        }
        return r;
    }
    }
    throw ExpansionError("unsupported pole/region pair");
}

std::string rat_str(const Rat& r) {
    std::ostringstream os;
    os << r.get_num();
    if (r.get_den() != 1) os << "/" << r.get_den();
    return os.str();
}

Rat rat_parse(const std::string& s) {
    Rat r;
    if (r.set_str(s, 10) != 0) throw ConfigError("bad rational literal: " + s);
    r.canonicalize();
    return r;
}

std::string Series::str() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : c_) {
        if (!first) os << " + ";
        first = false;
        os << rat_str(c);
        for (int i = 0; i < (int)e.size(); ++i) {
            if (e[i] == 0) continue;
            os << "*" << cfg_.var_name(i);
            if (e[i] != 1) os << "^" << e[i];
        }
    }
    return os.str();
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace ydk
