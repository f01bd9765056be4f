#include "ydk/yangian.hpp"

#include <algorithm>

namespace ydk {

namespace {

Rat binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    Rat r = 1;
    for (int i = 1; i <= k; ++i) r *= Rat(n - k + i, i);
    return r;
}

// product of multiplicity factorials of a sorted word
Rat word_aut(const Word& w) {
    Rat r = 1;
    int run = 1;
    for (size_t i = 1; i < w.size(); ++i) {
        if (w[i] == w[i - 1])
            ++run;
        else
            run = 1;
        r *= run;
    }
    return r;
}

// Applies a generator-wise algebra map to one leg: the leg is replaced by
// `child` legs and each generator by img(gen). Requires the leg to carry no
// dynamical scalar.
Tensor map_leg(const Tensor& t, int leg, const std::vector<EnvOps*>& child,
               const std::function<Tensor(int)>& img) {
    std::vector<EnvOps*> out_legs;
    for (int j = 0; j < t.arity(); ++j) {
        if (j == leg)
            for (auto* c : child) out_legs.push_back(c);
        else
            out_legs.push_back(t.legs()[j]);
    }
    Tensor r(out_legs);
    for (auto& [k, c] : t.terms()) {
        for (auto v : k[leg].lam)
            if (v != 0) throw AlgebraError("mapped leg carries a dynamical scalar");
        Tensor acc = Tensor::unit(child);
        for (auto g : k[leg].w) {
            acc = acc.mul(img(g));
            if (acc.is_zero()) break;
        }
        for (auto& [ak, ac] : acc.terms()) {
            TensorKey nk;
            for (int j = 0; j < t.arity(); ++j) {
                if (j == leg)
                    for (auto& lk : ak) nk.push_back(lk);
                else
                    nk.push_back(k[j]);
            }
            r.add_term(nk, ac * c);
        }
    }
    return r;
}

} // namespace

Series clip_series(const Series& s, const TruncationConfig& ext) {
    Series r = Series::zero(s.config());
    for (auto& [e, c] : s.terms())
        if (ext.admits(e)) r.add_term(e, c);
    return r;
}

YangianCtx::YangianCtx(LieData g, const TruncationConfig& ext)
    : d_(std::move(g)), ext_(ext), int_(ext) {
    D_ = ext_.t_pos_max;
    H_ = ext_.hbar_max;
    Dint_ = D_ + H_ + 1;
    depth_ = (H_ + 2) * (Dint_ + 1);
    int_.t_pos_max = std::max(Dint_, 2 * D_ + 1);
    int_.t_neg_max = std::max(depth_, 4 * D_ + 4);
    int zw = ext_.z_order_max * (H_ + 1) + (H_ + 1) * Dint_;
    int_.z_order_max = zw;
    int_.z_pos_max = zw;

    // the smash algebra: g-currents (low rank) then dual currents (high rank)
    std::vector<GenDef> gens;
    for (int deg = 0; deg <= Dint_; ++deg)
        for (int b = 0; b < d_.gdim(); ++b) {
            GenDef gd;
            gd.basis = b;
            gd.t_deg = deg;
            gd.name = d_.label(b) + "@t^" + std::to_string(deg);
            gens.push_back(gd);
        }
    for (int deg = 0; deg <= Dint_; ++deg)
        for (int b = 0; b < d_.gdim(); ++b) {
            GenDef gd;
            gd.basis = d_.dual_index(b);
            gd.t_deg = deg;
            gd.name = d_.label(gd.basis) + "@t^" + std::to_string(deg);
            gens.push_back(gd);
        }
    const CotangentLie* dp = &d_;
    aux_ = Envelope::loop_envelope("aux", dp, int_, -depth_, Dint_,
                                   [dp](int b) { return dp->is_g(b); });
    neg_ = Envelope::loop_envelope("neg", dp, int_, -depth_, -1,
                                   [dp](int b) { return dp->is_g(b); });
    ud_ = Envelope::loop_envelope("ud", dp, int_, -(4 * D_ + 4), 2 * D_ + 1,
                                  [](int) { return true; });
    auxops_ = std::make_unique<EnvOps>(aux_.get());
    negops_ = std::make_unique<EnvOps>(neg_.get());
    dops_ = std::make_unique<EnvOps>(ud_.get());
    auxsplit_ = std::make_unique<Splitter>(*auxops_,
                                           [this](int g) { return aux_->gen(g).t_deg < 0; });

    // Mixed bracket [x, f] of a current with a dual current: the dual of the
    // multiplication action of x on the negative-current envelope. For every
    // normal word u of negative currents with matching total degree, project
    // x*u back onto the negative envelope (trivial nonnegative factor), pair f
    // with its single-letter component, and contribute the dual monomial of u
    // weighted by -hbar^{|u|-1}/aut(u). |u| = 1 recovers the coadjoint action
    // of the cotangent algebra; longer words are the quantum corrections dual
    // to re-normal-ordering.
    Y_ = std::make_shared<Envelope>(
        "Y", dp, int_, gens,
        [this, gens](int i, int j, long* dropped) {
            WordCombo out;
            const GenDef& gi = gens[i];
            const GenDef& gj = gens[j];
            auto find = [&](int basis, int deg) {
                for (size_t m = 0; m < gens.size(); ++m)
                    if (gens[m].basis == basis && gens[m].t_deg == deg) return (int)m;
                return -1;
            };
            if (d_.is_g(gi.basis) && d_.is_g(gj.basis)) {
                int deg = gi.t_deg + gj.t_deg;
                for (auto& [k, c] : d_.bracket(gi.basis, gj.basis)) {
                    int id = find(k, deg);
                    if (id < 0) {
                        ++*dropped;
                        continue;
                    }
                    out.emplace_back(Word{(int16_t)id}, Series::constant(int_, c));
                }
                return out;
            }
            if (!d_.is_g(gi.basis)) return out; // dual currents commute
            const int tot = -(gi.t_deg + gj.t_deg + 1); // total degree of u
            if (tot >= 0) return out;
            auto x = EnvElement::generator(aux_.get(), aux_->find_loop(gi.basis, gi.t_deg));
            const Series one = Series::constant(int_, 1);
            std::vector<int> letters; // negative aux generators, descending rank
            for (int a = aux_->num_gens() - 1; a >= 0; --a)
                if (aux_->gen(a).t_deg >= tot && aux_->gen(a).t_deg < 0) letters.push_back(a);
            Word u;
            std::function<void(size_t, int)> emit = [&](size_t from, int deg) {
                if (deg == tot) {
                    auto sp = auxsplit_->split(
                        auxops_->mul(x, EnvElement::from_word(aux_.get(), u, one)));
                    Series cu = Series::zero(int_);
                    for (auto& [pw, s] : sp) {
                        if (!pw.second.empty() || pw.first.size() != 1) continue;
                        const GenDef& l = aux_->gen(pw.first[0]);
                        if (l.t_deg != -gj.t_deg - 1) continue;
                        Rat p = d_.pairing(gj.basis, l.basis);
                        if (p != 0) cu += s * p;
                    }
                    if (!cu.is_zero()) {
                        Word m;
                        bool ok = true;
                        for (auto lid : u) {
                            const GenDef& l = aux_->gen(lid);
                            int sid = find(d_.dual_index(l.basis), -l.t_deg - 1);
                            if (sid < 0) {
                                ok = false;
                                ++*dropped;
                                break;
                            }
                            m.push_back((int16_t)sid);
                        }
                        if (ok) {
                            std::sort(m.rbegin(), m.rend());
                            out.emplace_back(
                                m, cu * hbar().pow((int)u.size() - 1) * (Rat(-1) / word_aut(u)));
                        }
                    }
                    return;
                }
                if ((int)u.size() == H_ + 1) return;
                for (size_t a = from; a < letters.size(); ++a) {
                    int nd = deg + aux_->gen(letters[a]).t_deg;
                    if (nd < tot) continue;
                    u.push_back((int16_t)letters[a]);
                    emit(a, nd);
                    u.pop_back();
                }
            };
            emit(0, 0);
            return out;
        },
        nullptr);
    yops_ = std::make_unique<EnvOps>(Y_.get());
}

EnvElement YangianCtx::current(int basis, int deg) {
    if (!d_.is_g(basis)) throw IndexError("current expects a g-basis index");
    return EnvElement::generator(Y_.get(), Y_->find_loop(basis, deg));
}

EnvElement YangianCtx::dual_current(int basis, int deg) {
    if (!d_.is_g(basis)) throw IndexError("dual_current expects a g-basis index");
    return EnvElement::generator(Y_.get(), Y_->find_loop(d_.dual_index(basis), deg));
}

Series YangianCtx::hbar() const { return Series::var(int_, int_.hbar_index()); }

bool YangianCtx::gen_in_ext(const Envelope* env, int id) const {
    const GenDef& g = env->gen(id);
    return g.t_deg >= -ext_.t_neg_max && g.t_deg <= D_;
}

Tensor YangianCtx::gamma() {
    Tensor r({dops_.get(), dops_.get()});
    for (int k = 0; k <= 2 * D_ + 1; ++k)
        for (auto& [l, rr] : d_.casimir()) {
            auto a = EnvElement::generator(ud_.get(), ud_->find_loop(l, -k - 1));
            auto b = EnvElement::generator(ud_.get(), ud_->find_loop(rr, k));
            r += Tensor::pure({dops_.get(), dops_.get()}, {a, b});
        }
    return r;
}

Tensor YangianCtx::cobracket(int basis, int deg) {
    auto g = gamma();
    auto x = EnvElement::generator(ud_.get(), ud_->find_loop(basis, deg));
    auto u = EnvElement::unit(ud_.get());
    auto x1 = Tensor::pure({dops_.get(), dops_.get()}, {x, u});
    auto x2 = Tensor::pure({dops_.get(), dops_.get()}, {u, x});
    auto xx = x1 + x2;
    return xx.mul(g) - g.mul(xx);
}

Tensor YangianCtx::clip_d2(const Tensor& t) const {
    Tensor r(t.legs());
    for (auto& [k, c] : t.terms()) {
        bool keep = true;
        for (auto& lk : k)
            for (auto gid : lk.w) keep = keep && gen_in_ext(ud_.get(), gid);
        if (!keep) continue;
        Series cc = clip_series(c, ext_);
        r.add_term(k, cc);
    }
    return r;
}

Tensor YangianCtx::classical_cybe_defect() {
    auto g = gamma();
    std::vector<EnvOps*> legs3 = {dops_.get(), dops_.get(), dops_.get()};
    auto g12 = g.embedded(legs3, {0, 1});
    auto g13 = g.embedded(legs3, {0, 2});
    auto g23 = g.embedded(legs3, {1, 2});
    auto comm = [](const Tensor& a, const Tensor& b) { return a.mul(b) - b.mul(a); };
    auto defect = comm(g12, g13) + comm(g12, g23) + comm(g13, g23);
    // clip to the external window
    Tensor r(legs3);
    for (auto& [k, c] : defect.terms()) {
        bool keep = true;
        for (auto& lk : k)
            for (auto gid : lk.w) keep = keep && gen_in_ext(ud_.get(), gid);
        if (keep) r.add_term(k, clip_series(c, ext_));
    }
    return r;
}

Tensor YangianCtx::e_gamma() {
    // Canonical element of the residue pairing between negative g-currents
    // and the dual-current polynomial algebra: sum over PBW words u of
    // hbar^{|u|} u (x) M(u)/aut(u), where M(u) is the dual monomial. This is
    // not exp of the single-letter part: the letters on the left leg do not
    // commute, and the commutator corrections are exactly what makes the
    // conjugated coproduct land back in the smash algebra.
    std::vector<EnvOps*> legs = {auxops_.get(), yops_.get()};
    Tensor r = Tensor::unit(legs);
    std::vector<int> letters;
    for (int i = 0; i < aux_->num_gens(); ++i) {
        const GenDef& g = aux_->gen(i);
        if (g.t_deg < 0 && g.t_deg >= -(Dint_ + 1)) letters.push_back(i);
    }
    std::sort(letters.rbegin(), letters.rend()); // descending rank
    Word cur;
    std::function<void(size_t)> emit = [&](size_t from) {
        if (!cur.empty()) {
            Word dual;
            for (auto gid : cur) {
                const GenDef& lg = aux_->gen(gid);
                int yid = Y_->find_loop(d_.dual_index(lg.basis), -lg.t_deg - 1);
                if (yid < 0) throw InternalInvariantError("dual letter missing in smash algebra");
                dual.push_back((int16_t)yid);
            }
            std::sort(dual.rbegin(), dual.rend());
            TensorKey k(2);
            k[0].w = cur;
            k[0].lam.assign(int_.dynamical_dim, 0);
            k[1].w = dual;
            k[1].lam.assign(int_.dynamical_dim, 0);
            r.add_term(k, hbar().pow((int)cur.size()) * (Rat(1) / word_aut(cur)));
        }
        if ((int)cur.size() == H_) return;
        for (size_t i = from; i < letters.size(); ++i) {
            cur.push_back((int16_t)letters[i]);
            emit(i);
            cur.pop_back();
        }
    };
    emit(0);
    return r;
}

Tensor YangianCtx::collapse(const Tensor& t) {
    Tensor r({yops_.get(), yops_.get()});
    for (auto& [k, c] : t.terms()) {
        bool negative = false;
        for (auto gid : k[0].w) negative = negative || aux_->gen(gid).t_deg < 0;
        if (negative) {
            int leg2deg = 0;
            for (auto gid : k[1].w) leg2deg += Y_->gen(gid).t_deg;
            if (leg2deg <= D_)
                throw InternalInvariantError(
                    "coproduct failed to collapse inside the external window");
            continue; // residual confined to the truncated region
        }
        Word mapped;
        bool keep = true;
        for (auto gid : k[0].w) {
            const GenDef& g = aux_->gen(gid);
            int id = Y_->find_loop(g.basis, g.t_deg);
            if (id < 0) {
                keep = false; // beyond the internal degree bound: quotiented
                break;
            }
            mapped.push_back((int16_t)id);
        }
        if (!keep) continue;
        TensorKey nk = k;
        nk[0].w = mapped;
        r.add_term(nk, c);
    }
    return r;
}

const Tensor& YangianCtx::coproduct_gen(int id) {
    auto it = cop_.find(id);
    if (it != cop_.end()) return it->second;
    const GenDef& g = Y_->gen(id);
    Tensor result({yops_.get(), yops_.get()});
    if (d_.is_g(g.basis)) {
        if (!eg_) {
            eg_ = e_gamma();
            eginv_ = eg_->inverse();
        }
        const Tensor& E = *eg_;
        const Tensor& Einv = *eginv_;
        auto xa = EnvElement::generator(aux_.get(), aux_->find_loop(g.basis, g.t_deg));
        auto xy = EnvElement::generator(Y_.get(), id);
        auto prim = Tensor::pure({auxops_.get(), yops_.get()}, {xa, EnvElement::unit(Y_.get())}) +
                    Tensor::pure({auxops_.get(), yops_.get()},
                                 {EnvElement::unit(aux_.get()), xy});
        result = collapse(Einv.mul(prim).mul(E));
    } else {
        result = coproduct_s_gen(id);
    }
    return cop_.emplace(id, std::move(result)).first->second;
}

Tensor YangianCtx::coproduct_s_gen(int id) {
    const GenDef& g = Y_->gen(id);
    const int target = -g.t_deg - 1; // total letter degree dual to the generator
    const int maxlen = H_ + 1;
    // letters: duals of the symmetric-side generators
    std::vector<int> letters;
    for (int i = 0; i < neg_->num_gens(); ++i)
        if (neg_->gen(i).t_deg >= -(Dint_ + 1)) letters.push_back(i);
    std::sort(letters.rbegin(), letters.rend()); // descending rank
    struct Multi {
        Word w;
        int deg;
    };
    std::vector<Multi> multis;
    multis.push_back({Word{}, 0});
    Word cur;
    std::function<void(size_t, int)> emit = [&](size_t from, int deg) {
        if (!cur.empty()) multis.push_back({cur, deg});
        if ((int)cur.size() == maxlen) return;
        for (size_t i = from; i < letters.size(); ++i) {
            int nd = deg + neg_->gen(letters[i]).t_deg;
            if (nd < target) continue; // letter degrees are negative: no recovery
            cur.push_back((int16_t)letters[i]);
            emit(i, nd);
            cur.pop_back();
        }
    };
    emit(0, 0);
    auto fel = EnvElement::generator(Y_.get(), id);
    auto one = Series::constant(int_, 1);
    Tensor r({yops_.get(), yops_.get()});
    auto to_dual_word = [&](const Word& u) {
        Word w;
        for (auto gid : u) {
            const GenDef& lg = neg_->gen(gid);
            int yid = Y_->find_loop(d_.dual_index(lg.basis), -lg.t_deg - 1);
            if (yid < 0) throw InternalInvariantError("dual letter missing in smash algebra");
            w.push_back((int16_t)yid);
        }
        std::sort(w.rbegin(), w.rend());
        return w;
    };
    for (auto& u1 : multis)
        for (auto& u2 : multis) {
            int len = (int)(u1.w.size() + u2.w.size());
            if (len < 1 || len > maxlen) continue;
            if (u1.deg + u2.deg != target) continue;
            auto prod = negops_->mul(EnvElement::from_word(neg_.get(), u2.w, one),
                                     EnvElement::from_word(neg_.get(), u1.w, one));
            Series pair = dual_pair(fel, prod);
            if (pair.is_zero()) continue;
            Series coeff = pair * hbar().pow(len - 1);
            coeff *= Rat(1) / (word_aut(u1.w) * word_aut(u2.w));
            TensorKey k(2);
            k[0].w = to_dual_word(u1.w);
            k[0].lam.assign(int_.dynamical_dim, 0);
            k[1].w = to_dual_word(u2.w);
            k[1].lam.assign(int_.dynamical_dim, 0);
            r.add_term(k, coeff);
        }
    return r;
}

Tensor YangianCtx::coproduct(const EnvElement& y) {
    std::vector<EnvOps*> pair = {yops_.get(), yops_.get()};
    Tensor r(pair);
    for (auto& [w, c] : y.terms()) {
        Tensor acc = Tensor::unit(pair);
        for (auto g : w) acc = acc.mul(coproduct_gen(g));
        r += acc * c;
    }
    return r;
}

Tensor YangianCtx::coproduct_leg(const Tensor& t, int leg) {
    return map_leg(t, leg, {yops_.get(), yops_.get()},
                   [this](int g) { return coproduct_gen(g); });
}

Tensor YangianCtx::counit_leg(const Tensor& t, int leg) { return t.counit_leg(leg, -1); }

EnvElement YangianCtx::tau_z(const EnvElement& y, int zwhich, bool negate) {
    return tau_z_leg(Tensor::pure({yops_.get()}, {y}), 0, zwhich, negate).as_element();
}

Tensor YangianCtx::tau_z_leg(const Tensor& t, int leg, int zwhich, bool negate) {
    EnvOps* ops = t.legs()[leg];
    return map_leg(t, leg, {ops}, [&, this](int gid) {
        const GenDef& g = ops->env()->gen(gid);
        Tensor img({ops});
        for (int j = 0; j <= g.t_deg; ++j) {
            int nid = ops->env()->find_loop(g.basis, g.t_deg - j);
            if (nid < 0) throw InternalInvariantError("shift image missing");
            Series zc = Series::var(int_, int_.z_index(zwhich), j) *
                        (binom(g.t_deg, j) * (negate && j % 2 ? Rat(-1) : Rat(1)));
            img += Tensor::pure({ops}, {EnvElement::generator(ops->env(), nid)}) * zc;
        }
        return img;
    });
}

Tensor YangianCtx::r_spectral(int za, int zb, bool negate) {
    // Canonical word-sum form: the image of the mixed canonical element under
    // re-expansion of its negative-current leg for a dominant spectral
    // variable. The re-expansion x@(-j-1) -> sum_i binom(-j-1, i) z^{-j-1-i}
    // x@i is an algebra map on currents, so each PBW word contributes the
    // ordered product of its re-expanded letters. The single-letter layer is
    // exp(hbar/(t1 - t2 + z) C) with C the mixed half of the Casimir; longer
    // words carry the non-commutativity corrections of the current leg.
    //
    // Pole/positive-power caps. Single-variable usage keeps the blanket
    // internal window. In the two-variable (dominance-ordered) usage the
    // dominant variable only ever acquires poles and the most-subdominant one
    // only positive powers, so their exponents are monotone under products and
    // anything past the external window is dead; the middle variable mixes,
    // but its positive powers are tied to poles of the top variable, which
    // bounds the cancellation headroom by the hbar budget.
    int pole_cap = int_.z_order_max;
    int pos_cap = int_.effective_z_pos();
    if (zb >= 0) {
        pole_cap = ext_.z_order_max * (za == 2 ? 1 + H_ : 1);
        pos_cap = zb == 2 ? ext_.z_order_max : ext_.effective_z_pos();
    }
    // re-expanded letter: (t + s(z_a - z_b))^m for m < 0, |z_a| dominant
    auto phi = [&](int alpha, int m) {
        EnvElement r(Y_.get());
        for (int p = 0; p - m <= pole_cap; ++p) {
            Rat bp = binom(-m + p - 1, p) * (p % 2 ? Rat(-1) : Rat(1)); // binom(m, p)
            int qmax = zb >= 0 ? std::min(p, pos_cap) : 0;
            for (int q = 0; q <= qmax; ++q) {
                int tdeg = p - q;
                if (tdeg > Dint_) continue;
                Rat c = bp * binom(p, q) * (q % 2 ? Rat(-1) : Rat(1));
                if (negate && (((m - p + q) % 2) + 2) % 2 != 0) c = -c;
                ExpVec e(int_.num_vars(), 0);
                e[int_.z_index(za)] = m - p;
                if (zb >= 0) e[int_.z_index(zb)] = q;
                r += current(alpha, tdeg) * Series::monomial(int_, e, c);
            }
        }
        return r;
    };
    std::map<std::pair<int, int>, EnvElement> phicache;
    auto phi_at = [&](int alpha, int m) -> const EnvElement& {
        auto key = std::pair{alpha, m};
        auto it = phicache.find(key);
        if (it == phicache.end()) it = phicache.emplace(key, phi(alpha, m)).first;
        return it->second;
    };
    std::vector<EnvOps*> pair = {yops_.get(), yops_.get()};
    Tensor r = Tensor::unit(pair);
    // letters (alpha, m): negative current degrees whose duals exist
    std::vector<std::pair<int, int>> letters; // descending aux rank: (m, alpha) desc
    for (int m = -1; m >= -(Dint_ + 1); --m)
        for (int a = d_.gdim() - 1; a >= 0; --a) letters.emplace_back(a, m);
    std::vector<size_t> word;
    std::function<void(size_t)> emit = [&](size_t from) {
        if (!word.empty()) {
            EnvElement leg1 = EnvElement::unit(Y_.get());
            Word dual;
            Word autw;
            for (auto li : word) {
                auto [a, m] = letters[li];
                leg1 = yops_->mul(leg1, phi_at(a, m));
                dual.push_back((int16_t)Y_->find_loop(d_.dual_index(a), -m - 1));
                autw.push_back((int16_t)li);
            }
            if (!leg1.is_zero()) {
                std::sort(dual.rbegin(), dual.rend());
                auto leg2 = EnvElement::from_word(Y_.get(), dual,
                                                 hbar().pow((int)word.size()) *
                                                     (Rat(1) / word_aut(autw)));
                r += Tensor::pure(pair, {leg1, leg2});
            }
        }
        if ((int)word.size() == H_) return;
        for (size_t i = from; i < letters.size(); ++i) {
            word.push_back(i);
            emit(i);
            word.pop_back();
        }
    };
    emit(0);
    return r;
}

Tensor YangianCtx::r_gamma(int zwhich) {
    auto pos = r_spectral(zwhich, -1, false);
    auto neg = r_spectral(zwhich, -1, true).permuted({1, 0});
    return neg.inverse().mul(pos);
}

Tensor YangianCtx::clip_y(const Tensor& t) const {
    Tensor r(t.legs());
    for (auto& [k, c] : t.terms()) {
        bool keep = true;
        for (auto& lk : k)
            for (auto gid : lk.w) keep = keep && (Y_->gen(gid).t_deg <= D_);
        if (!keep) continue;
        Series cc = clip_series(c, ext_);
        r.add_term(k, cc);
    }
    return r;
}

Tensor YangianCtx::cobracket_gate_defect(int basis, int deg) {
    int id = Y_->find_loop(basis, deg);
    if (id < 0) throw IndexError("generator outside the smash algebra");
    auto delta_d = cobracket(basis, deg);
    // transfer the (nonnegative-degree) cobracket into the smash algebra
    std::vector<EnvOps*> pair = {yops_.get(), yops_.get()};
    Tensor delta(pair);
    for (auto& [k, c] : delta_d.terms()) {
        TensorKey nk = k;
        bool keep = true;
        for (auto& lk : nk) {
            Word mapped;
            for (auto gid : lk.w) {
                const GenDef& g = ud_->gen(gid);
                if (g.t_deg < 0)
                    throw InternalInvariantError("cobracket retains negative modes");
                int yid = Y_->find_loop(g.basis, g.t_deg);
                if (yid < 0) {
                    keep = false;
                    break;
                }
                mapped.push_back((int16_t)yid);
            }
            std::sort(mapped.rbegin(), mapped.rend());
            lk.w = mapped;
        }
        if (keep) delta.add_term(nk, c);
    }
    auto cop = coproduct_gen(id);
    auto defect = cop - cop.permuted({1, 0}) - delta * hbar();
    // quasi-cocommutativity is a first-order statement: compare modulo hbar^2
    Tensor clipped = clip_y(defect);
    Tensor r(clipped.legs());
    TruncationConfig lin = ext_;
    lin.hbar_max = 1;
    for (auto& [k, c] : clipped.terms()) r.add_term(k, clip_series(c, lin));
    return r;
}

Tensor YangianCtx::coassoc_defect(const EnvElement& y) {
    auto cop = coproduct(y);
    return clip_y(coproduct_leg(cop, 0) - coproduct_leg(cop, 1));
}

Tensor YangianCtx::counit_defect(const EnvElement& y) {
    auto cop = coproduct(y);
    auto p = Tensor::pure({yops_.get()}, {y});
    return clip_y((counit_leg(cop, 0) - p) + (counit_leg(cop, 1) - p));
}

Tensor YangianCtx::hom_defect(const EnvElement& a, const EnvElement& b) {
    return clip_y(coproduct(yops_->mul(a, b)) - coproduct(a).mul(coproduct(b)));
}

Tensor YangianCtx::intertwiner_defect(const EnvElement& y) {
    auto R = r_gamma(0);
    auto cop = coproduct(y);
    auto lhs = tau_z_leg(cop.permuted({1, 0}), 0, 0, false).mul(R);
    auto rhs = R.mul(tau_z_leg(cop, 0, 0, false));
    return clip_y(lhs - rhs);
}

Tensor YangianCtx::qybe_defect() {
    std::vector<EnvOps*> legs3 = {yops_.get(), yops_.get(), yops_.get()};
    auto rg = [&](int za, int zb) {
        auto neg = r_spectral(za, zb, true).permuted({1, 0});
        return neg.inverse().mul(r_spectral(za, zb, false));
    };
    auto R12 = rg(1, 2).embedded(legs3, {0, 1});
    auto R13 = rg(1, 3).embedded(legs3, {0, 2});
    auto R23 = rg(2, 3).embedded(legs3, {1, 2});
    auto lhs = R12.mul(R13).mul(R23);
    auto rhs = R23.mul(R13).mul(R12);
    return clip_y(lhs - rhs);
}

} // namespace ydk
