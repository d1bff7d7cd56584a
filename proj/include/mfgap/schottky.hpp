#pragma once

// Schottky (ping-pong) certification for rank-two subgroups of PSL(2,Z)
// acting on the projective line, and covers of their limit sets.

#include <optional>
#include <string>
#include <vector>

#include "mfgap/curve_model.hpp"

namespace mfgap::schottky {

using curves::GeneratorSet;
using curves::Letter;
using curves::MappingClass;
using curves::Slope;
using curves::Word;

/// True when theta(u) < theta(v), theta the angle of the canonical vector in [0, pi).
bool theta_less(const Slope& u, const Slope& v);

/// Angle of the counterclockwise arc from u to v, in [0, pi).
double ccw_angle(const Slope& u, const Slope& v);

/// Closed counterclockwise arc of the projective line from lo to hi
/// (theta increasing; note x = p/q decreases along it).
class ProjInterval {
 public:
  ProjInterval(Slope lo, Slope hi);

  /// The arc covering the real segment [a, b] with a < b.
  static ProjInterval from_real(const Rational& a, const Rational& b);

  const Slope& lo() const { return lo_; }
  const Slope& hi() const { return hi_; }

  bool contains(const Slope& x) const;
  bool contains_interior(const Slope& x) const;
  bool contains(const ProjInterval& inner) const;
  bool disjoint(const ProjInterval& other) const;
  /// Closure of the complement.
  ProjInterval complement() const { return {hi_, lo_}; }
  ProjInterval image(const MappingClass& m) const;

  /// Angular measure normalized so the whole circle has length 1.
  double length() const;

  friend bool operator==(const ProjInterval&, const ProjInterval&) = default;

 private:
  // Position of x measured counterclockwise from lo; true if x comes strictly before y.
  bool before(const Slope& x, const Slope& y) const;
  Slope lo_;
  Slope hi_;
};

/// Quadratic surd (u + v*sqrt(d)) / w with d squarefree and w > 0.
struct QuadraticSurd {
  BigInt u, v, d, w;
  double value() const;
  std::string str() const;
  friend bool operator==(const QuadraticSurd&, const QuadraticSurd&) = default;
  static QuadraticSurd make(BigInt u, BigInt v, BigInt d, BigInt w);
};

struct FixedPoints {
  QuadraticSurd attracting;
  QuadraticSurd repelling;
};

/// Attracting and repelling fixed points of a hyperbolic class. Throws DomainError
/// unless |trace| > 2.
FixedPoints fixed_points(const MappingClass& m);

/// Candidate ping-pong data; nothing is assumed until verify_ping_pong says so.
struct SchottkyPair {
  MappingClass gen_a;
  MappingClass gen_b;
  ProjInterval a_plus;
  ProjInterval a_minus;
  ProjInterval b_plus;
  ProjInterval b_minus;

  GeneratorSet generators() const;
  /// The ping-pong interval attached to a letter: A -> a_plus, a -> a_minus, ...
  const ProjInterval& letter_interval(Letter l) const;
};

struct CheckLine {
  std::string name;
  bool passed;
  std::string detail;
};

struct PingPongResult {
  bool certified = false;
  std::vector<CheckLine> transcript;
  std::optional<std::string> violation;  // first failed check
};

PingPongResult verify_ping_pong(const SchottkyPair& candidate);

/// A pair that has passed verify_ping_pong. Only obtainable through certify().
class CertifiedSchottky {
 public:
  /// Throws DomainError naming the violated condition.
  static CertifiedSchottky certify(const SchottkyPair& candidate);

  const SchottkyPair& pair() const { return pair_; }
  /// Same generators with a_plus/b_plus shrunk to the exact images of the
  /// complements, so that boundary points are paired by the generators.
  const SchottkyPair& paired() const { return paired_; }
  const GeneratorSet& generators() const { return gens_; }
  const PingPongResult& certificate() const { return certificate_; }

 private:
  CertifiedSchottky(SchottkyPair pair, SchottkyPair paired, PingPongResult cert);
  SchottkyPair pair_;
  SchottkyPair paired_;
  GeneratorSet gens_;
  PingPongResult certificate_;
};

/// A = [[3,1],[2,1]], B = [[1,2],[1,3]] with intervals fixed at build-verification time.
SchottkyPair default_pair();
const CertifiedSchottky& default_certified();

struct HyperbolicScanReport {
  int max_len = 0;
  std::size_t words_checked = 0;
  BigInt min_abs_trace;
  std::string min_word;
  std::size_t violations = 0;       // cyclically reduced words with |trace| <= 2
  std::size_t identity_words = 0;   // nonempty reduced words equal to the identity
  std::vector<std::string> violating_words;  // first few, for the report
};

/// |trace| > 2 for every cyclically reduced word of length <= max_len.
HyperbolicScanReport purely_hyperbolic_scan(const SchottkyPair& pair, int max_len);

struct FixedSlopeScanReport {
  int max_len = 0;
  long coord_bound = 0;
  std::size_t words_checked = 0;
  std::vector<std::pair<std::string, std::string>> violations;  // (word, slope)
};

/// Exact search for a nonempty reduced word of length <= max_len fixing a
/// slope with |p|,|q| <= coord_bound. Uses the rational roots of the
/// fixed-point quadratic, so no slope grid is enumerated.
FixedSlopeScanReport fixed_slope_scan(const SchottkyPair& pair, int max_len, long coord_bound);

struct CoverInterval {
  Word word;      // w; the interval is w(I_y) where y is the last letter of word*y
  Letter tail;    // y
  ProjInterval interval;
};

struct LimitSetCover {
  int depth = 0;
  std::vector<CoverInterval> intervals;
  double total_length = 0;
};

/// Images w(I_y) over reduced words w of length depth-1 and letters y with
/// w*y reduced. Throws DomainError for depth < 1.
LimitSetCover limit_set_cover(const CertifiedSchottky& h, int depth);

/// Total normalized length for depths 1..max_depth without storing intervals.
std::vector<double> limit_set_lengths(const CertifiedSchottky& h, int max_depth);

/// True if x lies in the interior of some depth-`depth` cover interval.
bool in_limit_cover(const CertifiedSchottky& h, int depth, const Slope& x);

struct OrbitReduction {
  Slope representative;  // lies in the closed fundamental domain
  Word word;             // x == word . representative
};

/// Pushes x into the fundamental domain of the paired intervals by
/// ping-pong descent; two slopes lie in one H-orbit iff their
/// representatives agree.
OrbitReduction reduce_to_fundamental_domain(const CertifiedSchottky& h, const Slope& x);

}  // namespace mfgap::schottky
