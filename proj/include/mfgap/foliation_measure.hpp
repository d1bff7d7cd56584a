#pragma once

// Measured foliations of the rank-one model, MF = (R^2 - 0)/{+-1}, with
// Thurston measure = Lebesgue area. Exact convex rational polygons,
// wandering cells, H-related covers and the continuous spectral-gap check.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mfgap/gap_engine.hpp"
#include "mfgap/numeric.hpp"
#include "mfgap/schottky.hpp"

namespace mfgap::foliation {

using curves::MappingClass;
using curves::Letter;
using curves::Slope;
using curves::Word;
using schottky::CertifiedSchottky;
using schottky::ProjInterval;

struct Point {
  Rational x, y;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Twice the signed area of triangle (o, a, b).
Rational cross(const Point& o, const Point& a, const Point& b);

// Exact polygon kernel. Polygons are vertex lists, counterclockwise.
namespace poly {
using Polygon = std::vector<Point>;

Rational signed_area(const Polygon& p);
/// Drops repeated and collinear vertices.
Polygon cleanup(const Polygon& p);
bool is_convex_ccw(const Polygon& p);
/// Part of p on the left of the directed line a->b (inside for ccw edges),
/// or on the right when keep_left is false.
Polygon clip(const Polygon& p, const Point& a, const Point& b, bool keep_left);
Polygon intersect(const Polygon& p, const Polygon& q);
/// Convex pieces of closure(p - q), interiors disjoint: piece i lies outside
/// edge i of q and inside edges 0..i-1.
std::vector<Polygon> difference(const Polygon& p, const Polygon& q);
Polygon convex_hull(std::vector<Point> pts);
bool contains(const Polygon& p, const Point& x);  // closed
}  // namespace poly

/// Convex polygon in MF. Stored with a canonical sign (vertex average in the
/// upper half-plane, or on the positive x-axis) and a canonical first vertex.
class Cell {
 public:
  /// Validates convexity (either orientation accepted), positive area, and
  /// that the closed polygon misses the origin.
  explicit Cell(poly::Polygon vertices);

  const poly::Polygon& vertices() const { return v_; }
  Rational area() const;
  /// Directions of the cell as a closed arc of the projective line.
  ProjInterval arc() const;
  Point vertex_average() const;
  std::string str() const;

  friend bool operator==(const Cell&, const Cell&) = default;

 private:
  poly::Polygon v_;
};

Rational thurston_measure(const Cell& c);
Cell act_cell(const MappingClass& m, const Cell& c);
Cell act_cell(const curves::GeneratorSet& gens, const Word& w, const Cell& c);

/// Area of the intersection in MF: |c1 cap c2| + |c1 cap -c2|.
Rational overlap_area(const Cell& a, const Cell& b);
/// Convex pieces of a cap b in MF.
std::vector<Cell> intersect(const Cell& a, const Cell& b);
/// Convex pieces of a - b in MF.
std::vector<Cell> subtract(const Cell& a, const Cell& b);

struct WanderingResult {
  bool wandering = true;
  std::optional<Word> witness;
  std::string witness_name;
  std::size_t words_checked = 0;
};

/// No nonempty reduced word of length <= max_len moves c onto a set meeting c
/// in positive area.
WanderingResult wandering_check(const Cell& c, const CertifiedSchottky& h, int max_len);

struct CoverPiece {
  Word word;  // the piece lies in word . base
  Cell cell;
};

struct CoverRound {
  std::size_t base = 0;  // index into the bases list
  std::vector<CoverPiece> pieces;
};

struct HRelatedCover {
  std::vector<CoverRound> rounds;
  std::size_t piece_count() const;
};

class UncoveredRegion : public DomainError {
 public:
  UncoveredRegion(std::vector<Cell> leftover, Rational area);
  const std::vector<Cell>& leftover() const { return leftover_; }
  const Rational& area() const { return area_; }

 private:
  std::vector<Cell> leftover_;
  Rational area_;
};

/// Greedy rounds: round k takes the translates w . bases[k] (|w| <= max_len)
/// meeting what is left of K, keeps the intersections, deletes them, and
/// continues. Throws DomainError if a base is not wandering at max_len*2 and
/// UncoveredRegion if area remains after the last round. K must be pairwise
/// disjoint.
HRelatedCover build_h_related_cover(const std::vector<Cell>& K, const std::vector<Cell>& bases,
                                    const CertifiedSchottky& h, int max_len);

struct CoverVerification {
  bool pairwise_disjoint = false;
  bool pieces_in_translates = false;
  bool area_identity = false;  // sum area(piece cap K) == area(K)
  Rational covered_area;
  Rational k_area;
  bool ok() const { return pairwise_disjoint && pieces_in_translates && area_identity; }
};

/// Independent exact verification of a cover of K.
CoverVerification verify_cover(const HRelatedCover& cover, const std::vector<Cell>& K,
                               const std::vector<Cell>& bases, const CertifiedSchottky& h);

struct StepFunction {
  std::vector<std::pair<Cell, GaussianRational>> pieces;

  StepFunction() = default;
  /// Throws DomainError unless the cells are pairwise disjoint in MF.
  explicit StepFunction(std::vector<std::pair<Cell, GaussianRational>> p);
  Rational norm2() const;  // integral of |f|^2
  /// f o g^-1.
  StepFunction pushforward(const MappingClass& g) const;
};

/// ||pi(g)f - f||^2 in L^2(MF), exact.
Rational displacement(const MappingClass& g, const StepFunction& f);

struct CellAmplitudes {
  std::map<Word, Rational> mass;  // integral of |f|^2 over word . base
  gap::FinSuppVector<Word, std::complex<double>> vector;  // A_f = sqrt(mass)
  Rational norm2() const;
};

/// A_f on the 2-tree at the base: each piece must lie in a single translate
/// w . base with |w| <= max_len; a piece meeting a translate only partially is
/// an error.
CellAmplitudes cell_amplitudes(const StepFunction& f, const Cell& base, const CertifiedSchottky& h,
                               int max_len);

struct ChainTerm {
  Word word;
  Rational lhs;   // integral over word.U of |pi(g)f - f|^2
  Rational pushed;  // integral over word.U of |pi(g)f|^2
  Rational own;     // integral over word.U of |f|^2
  bool holds = false;
  bool equality = false;
};

struct ContinuousGapReport {
  std::vector<std::string> K;
  double epsilon_prime = 0;
  Rational norm2;
  std::vector<Rational> displacement;
  double max_ratio = 0;
  bool gap_holds = false;  // exact: max displacement >= (2-sqrt 3)/8 * norm2
  std::size_t chain_terms = 0;
  std::size_t chain_violations = 0;
  std::size_t chain_equalities = 0;
  std::vector<double> tree_displacement;  // ||pi(g)A_f - A_f||^2 from the masses
  bool chain_sum_matches = false;  // per-translate terms add up to the displacement
  bool passed() const { return gap_holds && chain_violations == 0 && chain_sum_matches; }
};

/// Exact continuous gap check for g in {a, a^-1, b, b^-1}, plus the
/// per-translate chain inequality against A_f.
ContinuousGapReport continuous_gap_check(const StepFunction& f, const Cell& base,
                                         const CertifiedSchottky& h, int max_len,
                                         std::vector<std::vector<ChainTerm>>* terms = nullptr);

/// Exact test of r >= (2 - sqrt 3)/8 for rational r.
bool at_least_epsilon_prime(const Rational& r);

/// Area of the annulus r_in <= |v| <= r_out (in MF) over the depth-d cover.
double limit_cone_mass(const CertifiedSchottky& h, double r_in, double r_out, int depth);

// Seeded instances used by the acceptance harness and the CLI.

/// The four arcs between consecutive ping-pong intervals.
std::vector<ProjInterval> fundamental_gaps(const CertifiedSchottky& h);

/// True if the closed arc of c misses every depth-`depth` cover interval.
bool avoids_limit_cone(const Cell& c, const CertifiedSchottky& h, int depth);

struct CoverInstance {
  std::vector<Cell> K;
  std::vector<Cell> bases;
  Word shift;  // the word carrying the second component of K
  int max_len = 3;
};

/// K = K0 u g.K0' with K0, K0' random convex polygons in the cone over a
/// fundamental gap (radii in [1, 4]) and |g| <= 2; bases are a slightly
/// overlapping 2x2 grid over the bounding box of K0.
CoverInstance random_cover_instance(const CertifiedSchottky& h, std::uint64_t seed, std::uint64_t index);

struct StepInstance {
  Cell base;
  StepFunction f;
  int max_len = 3;
};

/// Random step function on a one-base H-related cover: a wandering base, a few
/// translates, each cut by a random line, amplitudes small Gaussian rationals.
StepInstance random_step_instance(const CertifiedSchottky& h, std::uint64_t seed, std::uint64_t index);

}  // namespace mfgap::foliation
