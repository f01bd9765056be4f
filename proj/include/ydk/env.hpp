#pragma once

// PBW-normal-form arithmetic in truncated universal envelopes.
//
// An Envelope is a finite table of generators with a fixed total order
// (tangent > positive-degree loop > negative-degree loop; within a class by
// (t-degree, basis index)), a bracket table closed modulo the truncation
// window (drops audited), and an anchor derivation per generator. PBW
// monomials are weakly decreasing words in generator rank; coefficients are
// Series and always sit on the left of the word.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "ydk/lie.hpp"
#include "ydk/series.hpp"

namespace ydk {

enum class GenKind { loop, tangent, abstract_gen };

struct GenDef {
    GenKind kind = GenKind::loop;
    int basis = -1;  // d-basis index for loop generators
    int t_deg = 0;   // loop degree
    int alpha = 0;   // tangent index (1..N) for tangent generators
    std::string name;
};

using Word = std::vector<int16_t>; // generator ids, weakly decreasing in rank
// Commutator expansion: a combination of normal words. Loop algebras only ever
// produce single-letter words; smash products also produce longer words (the
// dual of the re-normal-ordering action).
using WordCombo = std::vector<std::pair<Word, Series>>;

class Envelope {
  public:
    // gens must be listed in strictly increasing PBW rank; bracket(i,j) for
    // rank(i) < rank(j) returns the commutator [g_i, g_j] expanded as a
    // combination of normal words in the generator set.
    // anchor(i) returns the anchor derivation of g_i as lambda-coefficients
    // (one Series per dynamical index), or {} for anchorless generators.
    Envelope(std::string tag, const CotangentLie* d, TruncationConfig cfg,
             std::vector<GenDef> gens,
             std::function<WordCombo(int, int, long*)> bracket,
             std::function<std::vector<Series>(int)> anchor);

    // Standard envelopes over the cotangent loop algebra. Degree windows are
    // [lo, hi]; basis_filter selects which d-basis indices are generators.
    static std::shared_ptr<Envelope> loop_envelope(std::string tag, const CotangentLie* d,
                                                   const TruncationConfig& cfg, int deg_lo,
                                                   int deg_hi,
                                                   std::function<bool(int)> basis_filter,
                                                   bool with_tangent = false);

    const std::string& tag() const { return tag_; }
    const CotangentLie* lie() const { return d_; }
    const TruncationConfig& config() const { return cfg_; }
    int num_gens() const { return (int)gens_.size(); }
    const GenDef& gen(int id) const { return gens_.at(id); }
    int find_loop(int basis, int t_deg) const;
    int find_tangent(int alpha) const;
    const WordCombo& bracket(int i, int j) const { return brackets_[i][j]; }
    const std::vector<Series>& anchor(int id) const { return anchors_[id]; }
    long dropped() const { return dropped_; }

  private:
    std::string tag_;
    const CotangentLie* d_;
    TruncationConfig cfg_;
    std::vector<GenDef> gens_;
    std::vector<std::vector<WordCombo>> brackets_;
    std::vector<std::vector<Series>> anchors_;
    long dropped_ = 0;
};

class EnvElement {
  public:
    EnvElement() = default;
    explicit EnvElement(const Envelope* env) : env_(env) {}
    static EnvElement unit(const Envelope* env);
    static EnvElement generator(const Envelope* env, int id);
    static EnvElement from_word(const Envelope* env, const Word& w, const Series& c);

    const Envelope* env() const { return env_; }
    const std::map<Word, Series>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    void add_term(const Word& w, const Series& c);

    EnvElement operator+(const EnvElement& o) const;
    EnvElement operator-(const EnvElement& o) const;
    EnvElement operator-() const;
    EnvElement& operator+=(const EnvElement& o);
    EnvElement operator*(const Series& s) const;
    EnvElement operator*(const Rat& s) const;
    bool operator==(const EnvElement& o) const;
    bool operator!=(const EnvElement& o) const { return !(*this == o); }

    Series counit() const; // psi(.)(1): coefficient of the empty word
    std::string str() const;

  private:
    const Envelope* env_ = nullptr;
    std::map<Word, Series> t_;
};

// Shared straightening caches for one envelope; not thread-safe by design
// (one instance per task).
class EnvOps {
  public:
    explicit EnvOps(const Envelope* env) : env_(env) {}
    const Envelope* env() const { return env_; }

    EnvElement mul(const EnvElement& a, const EnvElement& b);
    EnvElement left_mul_gen(int g, const EnvElement& b);
    // exp(hbar^k * x) for a Lie-degree-1 element with hbar/lambda-positive
    // coefficients; terminates via nilpotency under the config.
    EnvElement exp_nilpotent(const EnvElement& x);
    EnvElement power(const EnvElement& x, int n);
    // Product of the word's generators, straightened to normal form.
    EnvElement normalize_word(const Word& w);

    // Rewrites a word of this envelope into the target envelope's normal
    // form; every generator of *this must exist in target.
    EnvElement transport(const EnvElement& a, EnvOps& target);

  private:
    EnvElement mul_gen_word(int g, const Word& w);
    const Envelope* env_;
    std::map<std::pair<int, Word>, EnvElement> memo_;
};

// Factorizes normal forms along a subalgebra split U = U(h) (x) U(k): writes u
// as a sum of (left word in pred-generators) (x) (right word in the rest),
// moving pred-generators left through brackets. Both generator classes must be
// bracket-closed. Backs the matched-pair actions and the triangular
// decomposition of loop envelopes.
class Splitter {
  public:
    Splitter(EnvOps& ops, std::function<bool(int)> pred);
    std::map<std::pair<Word, Word>, Series> split(const EnvElement& u);

  private:
    std::map<std::pair<Word, Word>, Series> split_word(const Word& w);
    EnvOps& ops_;
    std::function<bool(int)> pred_;
    std::map<Word, std::map<std::pair<Word, Word>, Series>> memo_;
};

// Pairing between a monomial in the symmetric envelope of g*-loops and a PBW
// word in an envelope of g-loops: permanent of the pairwise residue pairings
// <f t^k, x t^m> = <f,x>_d [k + m = -1]; zero across mismatched lengths.
Series dual_pair(const EnvElement& f, const EnvElement& u);

} // namespace ydk
