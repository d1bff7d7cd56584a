#pragma once

// Rank-one model of curves and mapping classes on S_{1,1} / S_{0,4}:
// essential simple closed curves are primitive integer directions (p,q) up to
// sign, and the mapping class group acts through PSL(2,Z).

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mfgap/numeric.hpp"

namespace mfgap::curves {

/// Primitive integer direction in canonical sign (q > 0, or q == 0 and p == 1).
/// Doubles as a point p/q of the projective line, with 1/0 standing for infinity.
class Slope {
 public:
  /// Reduces (p,q) to its canonical primitive representative. Throws DomainError on (0,0).
  static Slope canonical(const BigInt& p, const BigInt& q);

  const BigInt& p() const { return p_; }
  const BigInt& q() const { return q_; }
  bool is_infinity() const { return q_ == 0; }

  /// Emission order is lexicographic on (q,p).
  friend std::strong_ordering operator<=>(const Slope& a, const Slope& b);
  friend bool operator==(const Slope& a, const Slope& b) = default;

  std::string str() const;  // "p/q"
  static Slope parse(std::string_view text);

 private:
  Slope(BigInt p, BigInt q) : p_(std::move(p)), q_(std::move(q)) {}
  BigInt p_;
  BigInt q_;
};

Slope canonicalize_slope(const BigInt& p, const BigInt& q);

/// Element of PSL(2,Z): determinant one, sign chosen so the first nonzero entry is positive.
class MappingClass {
 public:
  MappingClass();  // identity
  MappingClass(BigInt a, BigInt b, BigInt c, BigInt d);

  const BigInt& a() const { return a_; }
  const BigInt& b() const { return b_; }
  const BigInt& c() const { return c_; }
  const BigInt& d() const { return d_; }

  BigInt trace() const { return a_ + d_; }
  MappingClass inverse() const;
  bool is_identity() const;

  friend MappingClass operator*(const MappingClass& x, const MappingClass& y);
  friend bool operator==(const MappingClass& x, const MappingClass& y) = default;

  std::string str() const;  // [[a,b],[c,d]]

 private:
  BigInt a_, b_, c_, d_;
};

MappingClass identity();
/// The standard parabolics [[1,1],[0,1]] and [[1,0],[1,1]], and the order-two rotation [[0,-1],[1,0]].
MappingClass shear_t();
MappingClass shear_u();
MappingClass rotation_s();

Slope act_slope(const MappingClass& m, const Slope& s);

enum class MappingType { kFiniteOrder, kReducible, kPseudoAnosov };
MappingType classify(const MappingClass& m);
std::string to_string(MappingType t);

/// Rational fixed points of m on the projective line. Empty for pseudo-Anosov
/// classes (their fixed points are quadratic irrationals). Throws DomainError
/// for the identity, which fixes everything.
std::vector<Slope> fixed_slopes(const MappingClass& m);

struct WeightedSlope {
  Rational weight;
  Slope slope;
};
WeightedSlope make_weighted(Rational weight, Slope slope);
WeightedSlope act_weighted(const MappingClass& m, const WeightedSlope& w);

// ---------------------------------------------------------------------------
// Words in a finite generating set.
//
// Letter 2i is generator i, letter 2i+1 its inverse. A word x1 x2 ... xk acts
// as x1(x2(...xk(s))).

using Letter = std::uint8_t;

constexpr Letter inverse_letter(Letter l) { return l ^ 1U; }

struct Word {
  std::vector<Letter> letters;

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  bool is_reduced() const;
  bool is_cyclically_reduced() const;
  Word inverse() const;
  friend Word operator*(const Word& x, const Word& y);  // freely reduced concatenation
  friend auto operator<=>(const Word& a, const Word& b) = default;
};

struct GeneratorSet {
  std::vector<MappingClass> mats;
  std::vector<std::string> names;

  GeneratorSet() = default;
  /// Default names A, B, C, ...
  explicit GeneratorSet(std::vector<MappingClass> generators);
  GeneratorSet(std::vector<MappingClass> generators, std::vector<std::string> generator_names);

  std::size_t size() const { return mats.size(); }
  std::size_t num_letters() const { return 2 * mats.size(); }
  const MappingClass& letter_matrix(Letter l) const { return letter_mats_[l]; }
  std::string letter_name(Letter l) const;

  MappingClass evaluate(const Word& w) const;
  Slope act(const Word& w, const Slope& s) const;
  std::string format(const Word& w) const;  // "1" for the empty word
  Word parse(std::string_view text) const;

 private:
  void build_letters();
  std::vector<MappingClass> letter_mats_;
};

/// Visits every nonempty reduced word of length <= max_len in depth-first
/// order (letters ordered A, a, B, b, ...), passing the word and its matrix.
/// Returning false from the visitor skips that word's extensions.
void for_each_reduced_word(
    const GeneratorSet& gens, int max_len,
    const std::function<bool(const Word&, const MappingClass&)>& visit);

/// All slopes reachable from base by words of length <= radius in gens and inverses,
/// sorted by (q,p).
std::vector<Slope> orbit_ball(const Slope& base, const GeneratorSet& gens, int radius);

/// Every nonempty reduced word w with |w| <= max_len and w.s == s, depth-first order.
/// Throws DomainError when max_len < 1.
std::vector<Word> stabilizer_scan(const Slope& s, const GeneratorSet& gens, int max_len);

}  // namespace mfgap::curves

template <>
struct std::hash<mfgap::curves::Slope> {
  std::size_t operator()(const mfgap::curves::Slope& s) const noexcept;
};
