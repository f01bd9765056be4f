#include "ydk/lie.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace ydk {

LieData::LieData(std::vector<std::string> labels, std::vector<std::vector<std::vector<Rat>>> c)
    : labels_(std::move(labels)), c_(std::move(c)) {
    const int d = (int)labels_.size();
    if ((int)c_.size() != d) throw StructureError("structure-constant table is not square");
    for (auto& row : c_) {
        if ((int)row.size() != d) throw StructureError("structure-constant table is not square");
        for (auto& v : row) {
            if ((int)v.size() != d) throw StructureError("structure-constant table is not square");
            for (auto& x : v) x.canonicalize();
        }
    }
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int k = 0; k < d; ++k)
                if (c_[a][b][k] != -c_[b][a][k])
                    throw StructureError("antisymmetry fails at [" + labels_[a] + "," + labels_[b] +
                                         "]");
    // Jacobi: [[a,b],c] + [[b,c],a] + [[c,a],b] = 0
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int cc = 0; cc < d; ++cc)
                for (int m = 0; m < d; ++m) {
                    Rat s = 0;
                    for (int k = 0; k < d; ++k)
                        s += c_[a][b][k] * c_[k][cc][m] + c_[b][cc][k] * c_[k][a][m] +
                             c_[cc][a][k] * c_[k][b][m];
                    if (s != 0)
                        throw StructureError("Jacobi fails at (" + labels_[a] + "," + labels_[b] +
                                             "," + labels_[cc] + ")");
                }
}

LieData LieData::sl2() {
    const int e = 0, h = 1, f = 2;
    std::vector<std::vector<std::vector<Rat>>> c(3,
                                                 std::vector<std::vector<Rat>>(3, std::vector<Rat>(3, 0)));
    c[h][e][e] = 2;
    c[e][h][e] = -2;
    c[h][f][f] = -2;
    c[f][h][f] = 2;
    c[e][f][h] = 1;
    c[f][e][h] = -1;
    return LieData({"e", "h", "f"}, std::move(c));
}

SparseVec LieData::bracket(int a, int b) const {
    SparseVec r;
    for (int k = 0; k < dim(); ++k)
        if (c_[a][b][k] != 0) r.emplace_back(k, c_[a][b][k]);
    return r;
}

CotangentLie::CotangentLie(LieData g) : g_(std::move(g)) {
    const int d = g_.dim();
    table_.assign(2 * d, std::vector<SparseVec>(2 * d));
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) table_[a][b] = g_.bracket(a, b);
    // coadjoint action: [I_a, I^b] = -sum_c c^b_{ac} I^c
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            SparseVec v;
            for (int cc = 0; cc < d; ++cc)
                if (g_.c(a, cc, b) != 0) v.emplace_back(d + cc, -g_.c(a, cc, b));
            table_[a][d + b] = v;
            for (auto& [i, x] : v) x = -x;
            table_[d + b][a] = v;
        }
    // g* abelian: [I^a, I^b] = 0 (already empty)
    validate();
}

std::string CotangentLie::label(int i) const {
    return is_g(i) ? g_.label(i) : g_.label(i - gdim()) + "*";
}

SparseVec CotangentLie::bracket(int a, int b) const { return table_.at(a).at(b); }

Rat CotangentLie::pairing(int a, int b) const {
    if (is_g(a) == is_g(b)) return 0;
    return dual_index(a) == b ? Rat(1) : Rat(0);
}

std::vector<std::pair<int, int>> CotangentLie::casimir() const {
    std::vector<std::pair<int, int>> c;
    for (int a = 0; a < gdim(); ++a) {
        c.emplace_back(a, dual_index(a));
        c.emplace_back(dual_index(a), a);
    }
    return c;
}

void CotangentLie::validate() const {
    const int n = dim();
    // invariance of the pairing: <[a,b],c> + <b,[a,c]> = 0
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                Rat s = 0;
                for (auto& [k, x] : table_[a][b]) s += x * pairing(k, c);
                for (auto& [k, x] : table_[a][c]) s += x * pairing(b, k);
                if (s != 0) throw StructureError("pairing is not ad-invariant");
            }
    // ad-invariance of the Casimir: [x (x) 1 + 1 (x) x, C] = 0
    for (int x = 0; x < n; ++x) {
        std::map<std::pair<int, int>, Rat> acc;
        for (auto& [l, r] : casimir()) {
            for (auto& [k, c] : table_[x][l]) acc[{k, r}] += c;
            for (auto& [k, c] : table_[x][r]) acc[{l, k}] += c;
        }
        for (auto& [_, c] : acc)
            if (c != 0) throw StructureError("Casimir is not ad-invariant");
    }
}

LoopElement LoopElement::single(const TruncationConfig& cfg, int basis, int t_deg,
                                const Series& coeff) {
    LoopElement e(cfg);
    e.add(basis, t_deg, coeff);
    return e;
}

LoopElement LoopElement::single(const TruncationConfig& cfg, int basis, int t_deg,
                                const Rat& coeff) {
    return single(cfg, basis, t_deg, Series::constant(cfg, coeff));
}

void LoopElement::add(int basis, int t_deg, const Series& coeff) {
    if (coeff.is_zero()) return;
    if (t_deg < -cfg_.t_neg_max || t_deg > cfg_.t_pos_max) return;
    auto key = [&](const LoopTerm& t) { return std::pair{t.basis, t.t_deg}; };
    auto it = std::lower_bound(t_.begin(), t_.end(), std::pair{basis, t_deg},
                               [&](const LoopTerm& t, const std::pair<int, int>& k) {
                                   return key(t) < k;
                               });
    if (it != t_.end() && it->basis == basis && it->t_deg == t_deg) {
        it->coeff += coeff;
        if (it->coeff.is_zero()) t_.erase(it);
    } else {
        t_.insert(it, LoopTerm{basis, t_deg, coeff});
    }
}

LoopElement LoopElement::operator+(const LoopElement& o) const {
    LoopElement r = *this;
    for (const auto& t : o.t_) r.add(t.basis, t.t_deg, t.coeff);
    return r;
}

LoopElement LoopElement::operator-(const LoopElement& o) const { return *this + (-o); }

LoopElement LoopElement::operator-() const {
    LoopElement r = *this;
    for (auto& t : r.t_) t.coeff = -t.coeff;
    return r;
}

LoopElement LoopElement::operator*(const Series& s) const {
    LoopElement r(cfg_);
    for (const auto& t : t_) r.add(t.basis, t.t_deg, t.coeff * s);
    return r;
}

LoopElement LoopElement::operator*(const Rat& s) const {
    LoopElement r = *this;
    for (auto& t : r.t_) t.coeff *= s;
    if (s == 0) r.t_.clear();
    return r;
}

bool LoopElement::operator==(const LoopElement& o) const {
    if (t_.size() != o.t_.size()) return false;
    for (size_t i = 0; i < t_.size(); ++i)
        if (t_[i].basis != o.t_[i].basis || t_[i].t_deg != o.t_[i].t_deg ||
            !(t_[i].coeff == o.t_[i].coeff))
            return false;
    return true;
}

LoopElement LoopElement::partial(int alpha) const {
    LoopElement r(cfg_);
    for (const auto& t : t_) r.add(t.basis, t.t_deg, t.coeff.partial(alpha));
    return r;
}

std::string LoopElement::str(const CotangentLie& d) const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : t_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << t.coeff.str() << ")*" << d.label(t.basis) << "@t^" << t.t_deg;
    }
    return os.str();
}

LoopElement loop_bracket(const CotangentLie& d, const LoopElement& a, const LoopElement& b,
                         long* dropped) {
    LoopElement r(a.config());
    for (const auto& ta : a.terms())
        for (const auto& tb : b.terms()) {
            int deg = ta.t_deg + tb.t_deg;
            auto v = d.bracket(ta.basis, tb.basis);
            if (v.empty()) continue;
            if (deg < -a.config().t_neg_max || deg > a.config().t_pos_max) {
                if (dropped) *dropped += (long)v.size();
                continue;
            }
            auto c = ta.coeff * tb.coeff;
            for (auto& [k, x] : v) r.add(k, deg, c * x);
        }
    return r;
}

Series residue_pair(const CotangentLie& d, const LoopElement& f, const LoopElement& x) {
    Series r(f.config());
    for (const auto& tf : f.terms())
        for (const auto& tx : x.terms()) {
            if (tf.t_deg + tx.t_deg != -1) continue;
            Rat p = d.pairing(tf.basis, tx.basis);
            if (p != 0) r += tf.coeff * tx.coeff * p;
        }
    return r;
}

} // namespace ydk
