#include "ydk/tensor.hpp"

#include <sstream>

namespace ydk {

std::vector<std::pair<std::vector<int32_t>, Series>> split_lambda(const Series& c) {
    const auto& cfg = c.config();
    std::map<std::vector<int32_t>, Series> groups;
    for (auto& [e, v] : c.terms()) {
        std::vector<int32_t> lam(cfg.dynamical_dim);
        ExpVec rest = e;
        for (int a = 1; a <= cfg.dynamical_dim; ++a) {
            lam[a - 1] = e[cfg.lambda_index(a)];
            rest[cfg.lambda_index(a)] = 0;
        }
        auto [it, fresh] = groups.try_emplace(lam, Series::zero(cfg));
        it->second.add_term(rest, v);
    }
    return {groups.begin(), groups.end()};
}

Tensor::Tensor(std::vector<EnvOps*> legs) : legs_(std::move(legs)) {
    if (legs_.empty()) throw ConfigError("tensor needs at least one leg");
}

const TruncationConfig& Tensor::cfg() const { return legs_.front()->env()->config(); }

Tensor Tensor::unit(std::vector<EnvOps*> legs) {
    Tensor t(std::move(legs));
    TensorKey k(t.arity());
    for (auto& lk : k) lk.lam.assign(t.cfg().dynamical_dim, 0);
    t.add_term(k, Series::constant(t.cfg(), 1));
    return t;
}

Tensor Tensor::pure(std::vector<EnvOps*> legs, const std::vector<EnvElement>& factors) {
    Tensor t(std::move(legs));
    if ((int)factors.size() != t.arity()) throw ConfigError("pure tensor arity mismatch");
    Tensor acc = unit(t.legs_);
    for (int i = 0; i < t.arity(); ++i) {
        Tensor next(t.legs_);
        for (auto& [k, c] : acc.terms())
            for (auto& [w, cw] : factors[i].terms()) {
                TensorKey nk = k;
                nk[i].w = w;
                next.add_term(nk, c * cw, i);
            }
        acc = next;
    }
    return acc;
}

void Tensor::add_term(const TensorKey& k, const Series& c, int lambda_home) {
    if (c.is_zero()) return;
    if ((int)k.size() != arity()) throw ConfigError("tensor key arity mismatch");
    for (auto& [lam, cc] : split_lambda(c)) {
        TensorKey nk = k;
        if ((int)nk[lambda_home].lam.size() != (int)lam.size())
            nk[lambda_home].lam.assign(lam.size(), 0);
        bool nonzero = false;
        for (size_t a = 0; a < lam.size(); ++a) {
            nk[lambda_home].lam[a] += lam[a];
            if (nk[lambda_home].lam[a] != 0) nonzero = true;
        }
        (void)nonzero;
        auto it = t_.find(nk);
        if (it == t_.end()) {
            t_.emplace(nk, cc);
        } else {
            it->second += cc;
            if (it->second.is_zero()) t_.erase(it);
        }
    }
}

Tensor Tensor::operator+(const Tensor& o) const {
    Tensor r = *this;
    r += o;
    return r;
}

Tensor& Tensor::operator+=(const Tensor& o) {
    if (legs_.empty()) legs_ = o.legs_;
    if (!o.t_.empty() && legs_ != o.legs_) throw AlgebraError("tensor leg mismatch");
    for (auto& [k, c] : o.t_) add_term(k, c);
    return *this;
}

Tensor Tensor::operator-(const Tensor& o) const { return *this + (-o); }

Tensor Tensor::operator-() const {
    Tensor r = *this;
    for (auto& [k, c] : r.t_) c = -c;
    return r;
}

Tensor Tensor::operator*(const Series& c) const {
    for (auto& [e, v] : c.terms())
        for (int a = 1; a <= c.config().dynamical_dim; ++a)
            if (e[c.config().lambda_index(a)] != 0)
                throw AlgebraError("scalar with dynamical variables is not central");
    Tensor r(legs_);
    for (auto& [k, v] : t_) r.add_term(k, v * c);
    return r;
}

Tensor Tensor::operator*(const Rat& c) const {
    Tensor r(legs_);
    for (auto& [k, v] : t_) r.add_term(k, v * c);
    return r;
}

bool Tensor::operator==(const Tensor& o) const {
    if (t_.empty() && o.t_.empty()) return true;
    if (legs_ != o.legs_) throw AlgebraError("tensor leg mismatch");
    return t_ == o.t_;
}

EnvElement Tensor::leg_element(int i, const LegKey& k) const {
    const auto& c = legs_[i]->env()->config();
    ExpVec e(c.num_vars(), 0);
    for (size_t a = 0; a < k.lam.size(); ++a) e[c.lambda_index((int)a + 1)] = k.lam[a];
    return EnvElement::from_word(legs_[i]->env(), k.w, Series::monomial(c, e, 1));
}

Tensor Tensor::mul(const Tensor& o) const {
    if (is_zero() || o.is_zero()) return Tensor(legs_.empty() ? o.legs_ : legs_);
    if (legs_ != o.legs_) throw AlgebraError("tensor leg mismatch");
    const int hmax = cfg().hbar_max;
    auto min_h = [](const Series& s) {
        int m = INT32_MAX;
        for (auto& [e, v] : s.terms()) m = std::min(m, (int)e[0]);
        return m;
    };
    std::vector<std::pair<int, const std::pair<const TensorKey, Series>*>> rhs;
    rhs.reserve(o.t_.size());
    for (auto& kv : o.t_) rhs.emplace_back(min_h(kv.second), &kv);
    Tensor r(legs_);
    for (auto& [k1, c1] : t_) {
        const int h1 = min_h(c1);
        for (auto& [h2, kv2] : rhs) {
            if (h1 + h2 > hmax) continue;
            const auto& k2 = kv2->first;
            const auto& c2 = kv2->second;
            Series c12 = c1 * c2;
            if (c12.is_zero()) continue;
            // partial keys with accumulated central coefficient
            std::vector<std::pair<TensorKey, Series>> acc = {{TensorKey{}, c12}};
            for (int i = 0; i < arity(); ++i) {
                EnvElement p = legs_[i]->mul(leg_element(i, k1[i]), leg_element(i, k2[i]));
                std::vector<std::pair<TensorKey, Series>> next;
                for (auto& [w, cw] : p.terms())
                    for (auto& [lam, cen] : split_lambda(cw))
                        for (auto& [pk, pc] : acc) {
                            TensorKey nk = pk;
                            nk.push_back(LegKey{w, lam});
                            next.emplace_back(std::move(nk), pc * cen);
                        }
                acc = std::move(next);
                if (acc.empty()) break;
            }
            for (auto& [k, c] : acc) r.add_term(k, c);
        }
    }
    return r;
}

Tensor Tensor::exp_nilpotent() const {
    Tensor r = unit(legs_);
    Tensor p = r;
    const int kmax = 64;
    for (int k = 1; k <= kmax; ++k) {
        p = p.mul(*this) * Rat(1, k);
        if (p.is_zero()) return r;
        r += p;
    }
    throw NilpotencyError("tensor exponential did not terminate");
}

Tensor Tensor::inverse() const {
    Tensor u = unit(legs_);
    Tensor n = *this - u;
    Tensor r = u;
    Tensor p = u;
    const int kmax = 64;
    for (int k = 1; k <= kmax; ++k) {
        p = p.mul(n) * Rat(-1);
        if (p.is_zero()) return r;
        r += p;
    }
    throw NilpotencyError("tensor is not unit + nilpotent");
}

Tensor Tensor::permuted(const std::vector<int>& perm) const {
    if ((int)perm.size() != arity()) throw ConfigError("permutation arity mismatch");
    std::vector<EnvOps*> nl(arity());
    for (int j = 0; j < arity(); ++j) nl[j] = legs_[perm[j]];
    Tensor r(nl);
    for (auto& [k, c] : t_) {
        TensorKey nk(arity());
        for (int j = 0; j < arity(); ++j) nk[j] = k[perm[j]];
        r.add_term(nk, c);
    }
    return r;
}

Tensor Tensor::embedded(std::vector<EnvOps*> big_legs, const std::vector<int>& pos) const {
    if ((int)pos.size() != arity()) throw ConfigError("embedding arity mismatch");
    for (int i = 0; i < arity(); ++i)
        if (big_legs.at(pos[i]) != legs_[i]) throw AlgebraError("embedding leg mismatch");
    Tensor r(big_legs);
    for (auto& [k, c] : t_) {
        TensorKey nk(big_legs.size());
        for (auto& lk : nk) lk.lam.assign(cfg().dynamical_dim, 0);
        for (int i = 0; i < arity(); ++i) nk[pos[i]] = k[i];
        r.add_term(nk, c);
    }
    return r;
}

Tensor Tensor::counit_leg(int i, int attach) const {
    std::vector<EnvOps*> nl;
    for (int j = 0; j < arity(); ++j)
        if (j != i) nl.push_back(legs_[j]);
    Tensor r(nl);
    for (auto& [k, c] : t_) {
        if (!k[i].w.empty()) continue;
        bool lam_trivial = true;
        for (auto v : k[i].lam) lam_trivial &= (v == 0);
        if (!lam_trivial && attach < 0)
            throw AlgebraError("counit leg carries dynamical scalar with nowhere to attach");
        TensorKey nk;
        for (int j = 0; j < arity(); ++j)
            if (j != i) nk.push_back(k[j]);
        if (!lam_trivial) {
            int at = attach - (attach > i ? 1 : 0);
            if ((int)nk[at].lam.size() != (int)k[i].lam.size())
                nk[at].lam.assign(k[i].lam.size(), 0);
            for (size_t a = 0; a < k[i].lam.size(); ++a) nk[at].lam[a] += k[i].lam[a];
        }
        r.add_term(nk, c);
    }
    return r;
}

Tensor Tensor::coproduct_leg(int i) const {
    std::vector<EnvOps*> nl;
    for (int j = 0; j < arity(); ++j) {
        nl.push_back(legs_[j]);
        if (j == i) nl.push_back(legs_[j]);
    }
    Tensor r(nl);
    std::vector<EnvOps*> pairlegs = {legs_[i], legs_[i]};
    for (auto& [k, c] : t_) {
        Tensor cur = Tensor::unit(pairlegs);
        {
            // lambda-monomial of the leg goes to the left child
            Tensor seeded(pairlegs);
            for (auto& [pk, pc] : cur.terms()) {
                TensorKey nk = pk;
                nk[0].lam = k[i].lam;
                seeded.add_term(nk, pc);
            }
            cur = seeded;
        }
        for (auto g : k[i].w) {
            EnvElement ge = EnvElement::generator(legs_[i]->env(), g);
            EnvElement un = EnvElement::unit(legs_[i]->env());
            Tensor prim = Tensor::pure(pairlegs, {ge, un}) + Tensor::pure(pairlegs, {un, ge});
            cur = cur.mul(prim);
        }
        for (auto& [pk, pc] : cur.terms()) {
            TensorKey nk;
            for (int j = 0; j < arity(); ++j) {
                if (j == i) {
                    nk.push_back(pk[0]);
                    nk.push_back(pk[1]);
                } else {
                    nk.push_back(k[j]);
                }
            }
            r.add_term(nk, pc * c);
        }
    }
    return r;
}

EnvElement Tensor::as_element() const {
    if (arity() != 1) throw AlgebraError("as_element requires arity 1");
    EnvElement r(legs_[0]->env());
    for (auto& [k, c] : t_) r += leg_element(0, k[0]) * c;
    return r;
}

std::string Tensor::str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [k, c] : t_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.str() << ")*[";
        for (int i = 0; i < arity(); ++i) {
            if (i) os << " (x) ";
            bool lam_trivial = true;
            for (auto v : k[i].lam) lam_trivial &= (v == 0);
            if (!lam_trivial) {
                os << "l^(";
                for (size_t a = 0; a < k[i].lam.size(); ++a) os << (a ? "," : "") << k[i].lam[a];
                os << ")";
            }
            if (k[i].w.empty()) {
                if (lam_trivial) os << "1";
            } else {
                for (size_t j = 0; j < k[i].w.size(); ++j)
                    os << (j || !lam_trivial ? "." : "") << legs_[i]->env()->gen(k[i].w[j]).name;
            }
        }
        os << "]";
    }
    return os.str();
}

} // namespace ydk
