#include "ydk/env.hpp"

#include <sstream>

namespace ydk {

namespace {

void check_same_env(const Envelope* a, const Envelope* b) {
    if (a != b)
        throw AlgebraError(std::string("envelope mismatch: ") + (a ? a->tag() : "null") + " vs " +
                           (b ? b->tag() : "null"));
}

} // namespace

Envelope::Envelope(std::string tag, const CotangentLie* d, TruncationConfig cfg,
                   std::vector<GenDef> gens, std::function<WordCombo(int, int, long*)> bracket,
                   std::function<std::vector<Series>(int)> anchor)
    : tag_(std::move(tag)), d_(d), cfg_(cfg), gens_(std::move(gens)) {
    const int n = (int)gens_.size();
    brackets_.assign(n, std::vector<WordCombo>(n));
    anchors_.assign(n, {});
    for (int i = 0; i < n; ++i) anchors_[i] = anchor ? anchor(i) : std::vector<Series>{};
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            brackets_[i][j] = bracket ? bracket(i, j, &dropped_) : WordCombo{};
            for (auto& [w, s] : brackets_[i][j]) brackets_[j][i].emplace_back(w, -s);
        }
}

std::shared_ptr<Envelope> Envelope::loop_envelope(std::string tag, const CotangentLie* d,
                                                  const TruncationConfig& cfg, int deg_lo,
                                                  int deg_hi, std::function<bool(int)> basis_filter,
                                                  bool with_tangent) {
    std::vector<GenDef> gens;
    for (int deg = deg_lo; deg <= deg_hi; ++deg)
        for (int b = 0; b < d->dim(); ++b)
            if (basis_filter(b)) {
                GenDef g;
                g.kind = GenKind::loop;
                g.basis = b;
                g.t_deg = deg;
                g.name = d->label(b) + "@t^" + std::to_string(deg);
                gens.push_back(g);
            }
    if (with_tangent)
        for (int a = 1; a <= cfg.dynamical_dim; ++a) {
            GenDef g;
            g.kind = GenKind::tangent;
            g.alpha = a;
            g.name = "D" + std::to_string(a);
            gens.push_back(g);
        }
    auto env = std::make_shared<Envelope>(
        std::move(tag), d, cfg, gens,
        [d, cfg, gens](int i, int j, long* dropped) {
            WordCombo out;
            const GenDef& gi = gens[i];
            const GenDef& gj = gens[j];
            if (gi.kind != GenKind::loop || gj.kind != GenKind::loop) return out;
            int deg = gi.t_deg + gj.t_deg;
            for (auto& [k, c] : d->bracket(gi.basis, gj.basis)) {
                int id = -1;
                for (size_t m = 0; m < gens.size(); ++m)
                    if (gens[m].kind == GenKind::loop && gens[m].basis == k &&
                        gens[m].t_deg == deg) {
                        id = (int)m;
                        break;
                    }
                if (id < 0) {
                    ++*dropped;
                    continue;
                }
                out.emplace_back(Word{(int16_t)id}, Series::constant(cfg, c));
            }
            return out;
        },
        [cfg, gens](int i) {
            std::vector<Series> a;
            if (gens[i].kind == GenKind::tangent) {
                a.assign(cfg.dynamical_dim, Series::zero(cfg));
                a[gens[i].alpha - 1] = Series::constant(cfg, 1);
            }
            return a;
        });
    return env;
}

int Envelope::find_loop(int basis, int t_deg) const {
    for (int i = 0; i < (int)gens_.size(); ++i)
        if (gens_[i].kind == GenKind::loop && gens_[i].basis == basis && gens_[i].t_deg == t_deg)
            return i;
    return -1;
}

int Envelope::find_tangent(int alpha) const {
    for (int i = 0; i < (int)gens_.size(); ++i)
        if (gens_[i].kind == GenKind::tangent && gens_[i].alpha == alpha) return i;
    return -1;
}

EnvElement EnvElement::unit(const Envelope* env) {
    EnvElement e(env);
    e.add_term({}, Series::constant(env->config(), 1));
    return e;
}

EnvElement EnvElement::generator(const Envelope* env, int id) {
    if (id < 0 || id >= env->num_gens()) throw IndexError("generator id out of range");
    EnvElement e(env);
    e.add_term({(int16_t)id}, Series::constant(env->config(), 1));
    return e;
}

EnvElement EnvElement::from_word(const Envelope* env, const Word& w, const Series& c) {
    EnvElement e(env);
    e.add_term(w, c);
    return e;
}

void EnvElement::add_term(const Word& w, const Series& c) {
    if (c.is_zero()) return;
    auto it = t_.find(w);
    if (it == t_.end()) {
        t_.emplace(w, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) t_.erase(it);
    }
}

EnvElement EnvElement::operator+(const EnvElement& o) const {
    EnvElement r = *this;
    r += o;
    return r;
}

EnvElement& EnvElement::operator+=(const EnvElement& o) {
    if (env_ == nullptr) env_ = o.env_;
    if (!o.t_.empty()) check_same_env(env_, o.env_);
    for (auto& [w, c] : o.t_) add_term(w, c);
    return *this;
}

EnvElement EnvElement::operator-(const EnvElement& o) const { return *this + (-o); }

EnvElement EnvElement::operator-() const {
    EnvElement r = *this;
    for (auto& [w, c] : r.t_) c = -c;
    return r;
}

EnvElement EnvElement::operator*(const Series& s) const {
    EnvElement r(env_);
    for (auto& [w, c] : t_) r.add_term(w, c * s);
    return r;
}

EnvElement EnvElement::operator*(const Rat& s) const {
    EnvElement r(env_);
    for (auto& [w, c] : t_) r.add_term(w, c * s);
    return r;
}

bool EnvElement::operator==(const EnvElement& o) const {
    if (t_.empty() && o.t_.empty()) return true;
    check_same_env(env_, o.env_);
    return t_ == o.t_;
}

Series EnvElement::counit() const {
    auto it = t_.find({});
    if (it == t_.end()) return env_ ? Series::zero(env_->config()) : Series();
    return it->second;
}

std::string EnvElement::str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [w, c] : t_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.str() << ")";
        for (auto g : w) os << "*" << env_->gen(g).name;
    }
    return os.str();
}

EnvElement EnvOps::mul(const EnvElement& a, const EnvElement& b) {
    if (a.is_zero() || b.is_zero()) return EnvElement(env_);
    check_same_env(env_, a.env());
    check_same_env(env_, b.env());
    EnvElement r(env_);
    for (auto& [wa, ca] : a.terms()) {
        EnvElement cur = b;
        for (int i = (int)wa.size() - 1; i >= 0; --i) cur = left_mul_gen(wa[i], cur);
        r += cur * ca;
    }
    return r;
}

EnvElement EnvOps::left_mul_gen(int g, const EnvElement& b) {
    EnvElement r(env_);
    const auto& anchor = env_->anchor(g);
    for (auto& [w, c] : b.terms()) {
        EnvElement gw = mul_gen_word(g, w);
        r += gw * c;
        if (!anchor.empty()) {
            Series dc = Series::zero(env_->config());
            for (int a = 0; a < (int)anchor.size(); ++a) {
                if (anchor[a].is_zero()) continue;
                dc += anchor[a] * c.partial(a + 1);
            }
            if (!dc.is_zero()) r.add_term(w, dc);
        }
    }
    return r;
}

EnvElement EnvOps::mul_gen_word(int g, const Word& w) {
    if (w.empty() || g >= w.front()) {
        Word nw;
        nw.reserve(w.size() + 1);
        nw.push_back((int16_t)g);
        nw.insert(nw.end(), w.begin(), w.end());
        return EnvElement::from_word(env_, nw, Series::constant(env_->config(), 1));
    }
    auto key = std::pair{g, w};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Word tail(w.begin() + 1, w.end());
    int h = w.front();
    // g.w = h.(g.tail) + [g,h].tail
    EnvElement r = left_mul_gen(h, mul_gen_word(g, tail));
    EnvElement tail_el = EnvElement::from_word(env_, tail, Series::constant(env_->config(), 1));
    for (auto& [wk, s] : env_->bracket(g, h)) r += mul(EnvElement::from_word(env_, wk, s), tail_el);
    memo_.emplace(std::move(key), r);
    return r;
}

EnvElement EnvOps::exp_nilpotent(const EnvElement& x) {
    EnvElement r = EnvElement::unit(env_);
    EnvElement p = r;
    const int kmax = 64;
    for (int k = 1; k <= kmax; ++k) {
        p = mul(p, x) * Rat(1, k);
        if (p.is_zero()) return r;
        r += p;
    }
    throw NilpotencyError("exponential did not terminate within " + std::to_string(kmax) +
                          " powers");
}

EnvElement EnvOps::power(const EnvElement& x, int n) {
    EnvElement r = EnvElement::unit(env_);
    for (int i = 0; i < n; ++i) r = mul(r, x);
    return r;
}

EnvElement EnvOps::normalize_word(const Word& w) {
    EnvElement r = EnvElement::unit(env_);
    for (int i = (int)w.size() - 1; i >= 0; --i) r = left_mul_gen(w[i], r);
    return r;
}

EnvElement EnvOps::transport(const EnvElement& a, EnvOps& target) {
    const Envelope* te = target.env();
    EnvElement r(te);
    for (auto& [w, c] : a.terms()) {
        Word mapped;
        mapped.reserve(w.size());
        for (auto g : w) {
            const GenDef& def = env_->gen(g);
            int id = def.kind == GenKind::tangent ? te->find_tangent(def.alpha)
                                                  : te->find_loop(def.basis, def.t_deg);
            if (id < 0)
                throw AlgebraError("generator " + def.name + " has no image in " + te->tag());
            mapped.push_back((int16_t)id);
        }
        r += target.normalize_word(mapped) * c;
    }
    return r;
}

namespace {

Rat permanent(const std::vector<std::vector<Rat>>& m, unsigned cols_used, int row) {
    const int n = (int)m.size();
    if (row == n) return 1;
    Rat s = 0;
    for (int j = 0; j < n; ++j) {
        if (cols_used & (1u << j)) continue;
        if (m[row][j] == 0) continue;
        s += m[row][j] * permanent(m, cols_used | (1u << j), row + 1);
    }
    return s;
}

} // namespace

Series dual_pair(const EnvElement& f, const EnvElement& u) {
    if (f.is_zero() || u.is_zero())
        return Series::zero((f.env() ? f.env() : u.env())->config());
    const CotangentLie* d = f.env()->lie();
    Series out = Series::zero(f.env()->config());
    for (auto& [wf, cf] : f.terms())
        for (auto& [wu, cu] : u.terms()) {
            if (wf.size() != wu.size()) continue;
            const int n = (int)wf.size();
            std::vector<std::vector<Rat>> m(n, std::vector<Rat>(n, 0));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const GenDef& gf = f.env()->gen(wf[i]);
                    const GenDef& gu = u.env()->gen(wu[j]);
                    if (gf.kind != GenKind::loop || gu.kind != GenKind::loop)
                        throw AlgebraError("dual pairing needs loop generators");
                    if (gf.t_deg + gu.t_deg == -1) m[i][j] = d->pairing(gf.basis, gu.basis);
                }
            Rat p = n == 0 ? Rat(1) : permanent(m, 0, 0);
            if (p != 0) out += cf * cu * p;
        }
    return out;
}

Splitter::Splitter(EnvOps& ops, std::function<bool(int)> pred)
    : ops_(ops), pred_(std::move(pred)) {}

namespace {
void accum(std::map<std::pair<Word, Word>, Series>& out, const std::pair<Word, Word>& key,
           const Series& v) {
    auto [it, fresh] = out.try_emplace(key, v);
    if (!fresh) it->second += v;
}
} // namespace

std::map<std::pair<Word, Word>, Series> Splitter::split(const EnvElement& u) {
    std::map<std::pair<Word, Word>, Series> out;
    for (auto& [w, c] : u.terms())
        for (auto& [p, s] : split_word(w)) accum(out, p, s * c);
    for (auto it = out.begin(); it != out.end();)
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

std::map<std::pair<Word, Word>, Series> Splitter::split_word(const Word& w) {
    auto it = memo_.find(w);
    if (it != memo_.end()) return it->second;
    std::map<std::pair<Word, Word>, Series> out;
    const Series one = Series::constant(ops_.env()->config(), 1);
    int viol = -1;
    for (int i = 0; i + 1 < (int)w.size(); ++i)
        if (!pred_(w[i]) && pred_(w[i + 1])) {
            viol = i;
            break;
        }
    if (viol < 0) {
        // contiguous left/right parts; normalize each side in its subalgebra
        Word left, right;
        for (auto g : w) (pred_(g) ? left : right).push_back(g);
        EnvElement ln = ops_.normalize_word(left);
        EnvElement rn = ops_.normalize_word(right);
        for (auto& [wl, cl] : ln.terms())
            for (auto& [wr, cr] : rn.terms()) accum(out, {wl, wr}, cl * cr);
    } else {
        Word sw = w;
        std::swap(sw[viol], sw[viol + 1]);
        out = split_word(sw);
        Word br(w.begin(), w.begin() + viol);
        for (auto& [wk, s] : ops_.env()->bracket(w[viol], w[viol + 1])) {
            Word wb = br;
            wb.insert(wb.end(), wk.begin(), wk.end());
            wb.insert(wb.end(), w.begin() + viol + 2, w.end());
            for (auto& [p, c] : split_word(wb)) accum(out, p, c * s);
        }
        for (auto i2 = out.begin(); i2 != out.end();)
            i2 = i2->second.is_zero() ? out.erase(i2) : std::next(i2);
    }
    memo_.emplace(w, out);
    return out;
}

} // namespace ydk
