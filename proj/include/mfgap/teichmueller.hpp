#pragma once

// Teichmueller space of the once-punctured torus in trace coordinates:
// Fricke trace recursion, geodesic lengths, and length-sum checks.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mfgap/curve_model.hpp"

namespace mfgap::teich {

using curves::MappingClass;
using curves::Slope;

/// Traces of the curves 0/1, 1/0, 1/1 on the Fricke surface x^2+y^2+z^2 = xyz.
struct TracePoint {
  double x = 3, y = 3, z = 3;

  /// Validates x,y,z > 2 and the Fricke relation to relative tolerance tol.
  static TracePoint make(double x, double y, double z, double tol = 1e-9);
  /// Larger root z of the Fricke quadratic; throws if none exceeds 2.
  static TracePoint from_xy(double x, double y);
  static TracePoint modular() { return {3, 3, 3}; }

  /// |x^2+y^2+z^2 - xyz| / (x^2+y^2+z^2).
  double fricke_residual() const;
  std::string str() const;
};

/// Trace function of a point. The seed triangle is first moved by Vieta
/// jumps (z -> (x^2+y^2)/z) to the triangle of smallest traces, from which
/// every Farey descent only adds, so large pullback points stay accurate.
class TraceFunction {
 public:
  explicit TraceFunction(const TracePoint& pt);
  double operator()(const Slope& s) const { return static_cast<double>(trace(s)); }
  /// Extended range: stays finite long after double traces overflow.
  long double trace(const Slope& s) const;
  double length(const Slope& s) const;
  /// Vieta jumps taken during reduction.
  int reduction_steps() const { return steps_; }

 private:
  std::array<BigInt, 3> vp_, vq_;  // primitive vectors of the reduced triangle
  std::array<long double, 3> t_;
  int steps_ = 0;
};

double trace_of_slope(const TracePoint& pt, const Slope& s);

/// 2 arccosh(t/2); throws DomainError when t < 2 + 1e-12.
double length_from_trace(double t);
double length(const TracePoint& pt, const Slope& s);

/// Point whose seeds are the traces at phi^-1(0/1), phi^-1(1/0), phi^-1(1/1).
TracePoint pullback_point(const MappingClass& phi, const TracePoint& pt);

struct LengthEntry {
  double trace = 0;
  double length = 0;
  int depth = 0;
};

/// Slopes of Farey depth <= depth (depth 1 = {0/1, 1/0, 1/1}), except inside
/// subtrees whose sum of e^{-2 l} is certified below `prune` and dropped.
struct LengthSpectrumTruncation {
  TracePoint point;
  int depth = 0;
  double prune = 0;
  std::map<Slope, LengthEntry> table;
  /// Upper bound on sum e^{-2l} over dropped subtrees, by subtree root depth.
  std::vector<double> pruned_by_depth;  // index d-1
  std::size_t pruned_subtrees = 0;
  /// Upper bound on sum e^{-2l} over all slopes deeper than `depth` below the
  /// frontier; infinite if some frontier edge has no certified bound.
  double frontier_bound = 0;

  double tail_bound() const;  // everything not in the table
};

LengthSpectrumTruncation truncate(const TracePoint& pt, int depth, double prune = 1e-18);

/// Subtree bound: with a, b the traces of an edge and d the opposite trace,
/// sum over the subtree of e^{-2l} <= 256 / ((1 - 16/a^4 - 16/b^4)(ab)^4)
/// provided d <= ab/2 and the bracket is positive. Returns +inf otherwise.
double subtree_bound(double a, double b, double d);

struct L2TailReport {
  TracePoint point;
  int max_depth = 0;
  std::vector<double> partial_sums;  // over enumerated slopes of depth <= d
  std::vector<double> increments;
  std::vector<std::size_t> counts;   // enumerated slopes per depth
  std::size_t pruned_subtrees = 0;
  double tail_bound = 0;             // sum beyond the table, certified
  bool cauchy = false;               // tail_bound <= tolerance
  double tolerance = 1e-8;
};

L2TailReport l2_tail_report(const TracePoint& pt, int max_depth, double prune = 1e-18,
                            double tolerance = 1e-8);

/// Number of slopes with length <= L, exhaustive.
std::size_t curve_count(const TracePoint& pt, double L);

struct Cor43Row {
  int phi = 0;
  Slope slope = Slope::canonical(0, 1);
  double length = 0;
  double length_pushed = 0;  // l_{phi X}(alpha)
  double delta = 0;          // l_X - l_{phi X}
};

struct Cor43Report {
  TracePoint point;
  int depth = 0;
  std::vector<std::string> phis;
  std::vector<double> lhs;
  std::vector<double> displacement;  // ||pi(phi)f_T - f_T||^2 on the truncated vector
  std::vector<double> boundary_correction;  // lhs - displacement, from slopes leaving T
  double rhs = 0;
  double ratio = 0;
  double threshold = 0;              // (2 - sqrt 3)/8
  double rhs_tail = 0;
  double rhs_tail_extrapolated = 0;
  double rhs_tail_certified = 0;
  double max_delta_last_depth = 0;  // positive part: (e^D - 1)^2 <= 1 when D < 0
  double lhs_tail = 0;
  double allowance = 0;              // lhs_tail / rhs
  double crosscheck_error = 0;       // max_i |lhs_i - displacement_i - correction_i|
  bool passed = false;
  std::vector<Cor43Row> rows;
};

/// Throws DomainError if some phi is not pseudo-Anosov.
Cor43Report cor43_check(const TracePoint& pt, const std::vector<MappingClass>& phis, int depth,
                        double prune = 1e-18, bool keep_rows = false);

/// Generic points: x, y uniform in [2.2, 8] with z the larger root.
std::vector<TracePoint> sample_points(int n, std::uint64_t seed);
/// Points with x descending toward 2.05 and y just above the admissible minimum.
std::vector<TracePoint> near_degenerate_points(int n, std::uint64_t seed);

}  // namespace mfgap::teich
