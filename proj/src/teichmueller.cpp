#include "mfgap/teichmueller.hpp"

#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <sstream>

#include "mfgap/gap_engine.hpp"

namespace mfgap::teich {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// e^{-2 l} for l = 2 arccosh(t/2), i.e. (t/2 + sqrt(t^2/4 - 1))^-4.
double weight_from_trace(double t) {
  const double h = t / 2;
  const double e = h + std::sqrt(std::max(0.0, h * h - 1));
  const double e2 = e * e;
  return 1.0 / (e2 * e2);
}

struct Vec {
  std::int64_t p, q;
};

Vec operator+(Vec a, Vec b) { return {a.p + b.p, a.q + b.q}; }

Slope to_slope(Vec v) { return Slope::canonical(v.p, v.q); }

// Farey edge between L and R; d is the trace on the far side of the edge,
// `depth` the depth of the mediant.
struct Edge {
  Vec L, R;
  double tl, tr, td;
  int depth;
};

// The two sides of the root edge (0/1, 1/0): mediants 1/1 (depth 1) and -1/1 (depth 2).
std::array<Edge, 2> root_edges(const TracePoint& pt) {
  return {Edge{{0, 1}, {1, 0}, pt.x, pt.y, pt.x * pt.y - pt.z, 1},
          Edge{{-1, 0}, {0, 1}, pt.y, pt.x, pt.z, 2}};
}

}  // namespace

TracePoint TracePoint::make(double x, double y, double z, double tol) {
  if (!(x > 2 && y > 2 && z > 2)) throw DomainError("trace point needs x, y, z > 2");
  TracePoint p{x, y, z};
  if (!(p.fricke_residual() <= tol)) {
    throw DomainError("trace point " + p.str() + " violates the Fricke relation");
  }
  return p;
}

TracePoint TracePoint::from_xy(double x, double y) {
  const double disc = x * x * y * y - 4 * (x * x + y * y);
  if (!(x > 2 && y > 2) || disc < 0) throw DomainError("no Fricke point over this (x, y)");
  const double z = (x * y + std::sqrt(disc)) / 2;
  // Refine against the relation with one Newton step.
  const double f = x * x + y * y + z * z - x * y * z;
  const double df = 2 * z - x * y;
  const double zr = df != 0 ? z - f / df : z;
  return make(x, y, zr);
}

double TracePoint::fricke_residual() const {
  const double s = x * x + y * y + z * z;
  return std::abs(s - x * y * z) / s;
}

std::string TracePoint::str() const {
  std::ostringstream os;
  os.precision(17);
  os << "(" << x << ", " << y << ", " << z << ")";
  return os.str();
}

TraceFunction::TraceFunction(const TracePoint& pt)
    : vp_{0, 1, 1}, vq_{1, 0, 1}, t_{pt.x, pt.y, pt.z} {
  for (;;) {
    int k = -1;
    for (int i = 0; i < 3; ++i) {
      const long double a = t_[(i + 1) % 3], b = t_[(i + 2) % 3];
      const long double other = (a * a + b * b) / t_[i];
      if (other < t_[i] * (1 - 1e-12)) {
        k = i;
        break;
      }
    }
    if (k < 0) break;
    if (++steps_ > 100000) throw DomainError("trace reduction did not terminate");
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    const long double a = t_[i], b = t_[j];
    t_[k] = (a * a + b * b) / t_[k];
    // The far vertex across edge (i, j) is the other of v_i + v_j, v_i - v_j.
    const BigInt sp = vp_[i] + vp_[j], sq = vq_[i] + vq_[j];
    const bool was_sum = (sp == vp_[k] && sq == vq_[k]) || (sp == -vp_[k] && sq == -vq_[k]);
    vp_[k] = was_sum ? BigInt(vp_[i] - vp_[j]) : sp;
    vq_[k] = was_sum ? BigInt(vq_[i] - vq_[j]) : sq;
  }
}

long double TraceFunction::trace(const Slope& s) const {
  const BigInt& p = s.p();
  const BigInt& q = s.q();
  for (int i = 0; i < 3; ++i) {
    if (vp_[i] * q == vq_[i] * p) return t_[i];
  }
  for (int k = 0; k < 3; ++k) {
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    BigInt lp = vp_[i], lq = vq_[i], rp = vp_[j], rq = vq_[j];
    // Orient so that the far vertex k is +-(L - R) and the arc of L + R is free of it.
    if ((lp + rp == vp_[k] && lq + rq == vq_[k]) || (lp + rp == -vp_[k] && lq + rq == -vq_[k])) {
      rp = -rp;
      rq = -rq;
    }
    const BigInt det = lp * rq - lq * rp;
    BigInt alpha = (p * rq - q * rp) * det;
    BigInt beta = (lp * q - lq * p) * det;
    if (alpha < 0 && beta < 0) {
      alpha = -alpha;
      beta = -beta;
    }
    if (alpha <= 0 || beta <= 0) continue;
    long double tl = t_[i], tr = t_[j], td = t_[k];
    for (;;) {
      const long double tm = tl * tr - td;
      if (alpha == beta) return tm;
      if (alpha > beta) {
        alpha -= beta;
        td = tr;
        tr = tm;
      } else {
        beta -= alpha;
        td = tl;
        tl = tm;
      }
    }
  }
  throw DomainError("slope " + s.str() + " not located in the trace topograph");
}

double TraceFunction::length(const Slope& s) const {
  const long double t = trace(s);
  if (!(t >= 2 + 1e-12L)) throw DomainError("trace of " + s.str() + " is not hyperbolic");
  return static_cast<double>(2 * std::acosh(t / 2));
}

double trace_of_slope(const TracePoint& pt, const Slope& s) { return TraceFunction(pt)(s); }

double length_from_trace(double t) {
  if (!(t >= 2 + 1e-12)) throw DomainError("trace " + std::to_string(t) + " is not hyperbolic");
  return 2 * std::acosh(t / 2);
}

double length(const TracePoint& pt, const Slope& s) { return TraceFunction(pt).length(s); }

TracePoint pullback_point(const MappingClass& phi, const TracePoint& pt) {
  const MappingClass inv = phi.inverse();
  const TraceFunction t(pt);
  TracePoint out{t(curves::act_slope(inv, Slope::canonical(0, 1))),
                 t(curves::act_slope(inv, Slope::canonical(1, 0))),
                 t(curves::act_slope(inv, Slope::canonical(1, 1)))};
  if (!(out.fricke_residual() <= 1e-6)) {
    throw DomainError("pullback point " + out.str() + " left the Fricke surface");
  }
  return out;
}

double subtree_bound(double a, double b, double d) {
  if (!(a > 2 && b > 2) || d > a * b / 2) return kInf;
  const double bracket = 1 - 16 / std::pow(a, 4) - 16 / std::pow(b, 4);
  if (!(bracket > 0)) return kInf;
  const double ab = a * b;
  return 256 / (bracket * ab * ab * ab * ab);
}

double LengthSpectrumTruncation::tail_bound() const {
  double s = frontier_bound;
  for (double v : pruned_by_depth) s += v;
  return s;
}

LengthSpectrumTruncation truncate(const TracePoint& pt, int depth, double prune) {
  if (depth < 1) throw DomainError("truncation depth must be >= 1");
  if (depth > 80) throw DomainError("truncation depth must be <= 80");
  LengthSpectrumTruncation out;
  out.point = pt;
  out.depth = depth;
  out.prune = prune;
  out.pruned_by_depth.assign(static_cast<std::size_t>(depth), 0.0);
  out.table.emplace(Slope::canonical(0, 1), LengthEntry{pt.x, length_from_trace(pt.x), 1});
  out.table.emplace(Slope::canonical(1, 0), LengthEntry{pt.y, length_from_trace(pt.y), 1});
  const auto roots = root_edges(pt);
  std::deque<Edge> queue(roots.begin(), roots.end());
  while (!queue.empty()) {
    const Edge e = queue.front();
    queue.pop_front();
    const double bound = subtree_bound(e.tl, e.tr, e.td);
    if (e.depth > depth) {
      out.frontier_bound += bound;
      continue;
    }
    if (bound < prune || bound == 0) {
      out.pruned_by_depth[static_cast<std::size_t>(e.depth - 1)] += bound;
      ++out.pruned_subtrees;
      continue;
    }
    const Vec m = e.L + e.R;
    const double tm = e.tl * e.tr - e.td;
    out.table.emplace(to_slope(m), LengthEntry{tm, length_from_trace(tm), e.depth});
    queue.push_back(Edge{e.L, m, e.tl, tm, e.tr, e.depth + 1});
    queue.push_back(Edge{m, e.R, tm, e.tr, e.tl, e.depth + 1});
  }
  return out;
}

L2TailReport l2_tail_report(const TracePoint& pt, int max_depth, double prune, double tolerance) {
  const LengthSpectrumTruncation t = truncate(pt, max_depth, prune);
  L2TailReport rep;
  rep.point = pt;
  rep.max_depth = max_depth;
  rep.tolerance = tolerance;
  rep.increments.assign(static_cast<std::size_t>(max_depth), 0.0);
  rep.counts.assign(static_cast<std::size_t>(max_depth), 0);
  for (const auto& [s, e] : t.table) {
    rep.increments[static_cast<std::size_t>(e.depth - 1)] += weight_from_trace(e.trace);
    ++rep.counts[static_cast<std::size_t>(e.depth - 1)];
  }
  double run = 0;
  for (double inc : rep.increments) {
    run += inc;
    rep.partial_sums.push_back(run);
  }
  rep.pruned_subtrees = t.pruned_subtrees;
  rep.tail_bound = t.tail_bound();
  rep.cauchy = rep.tail_bound <= tolerance;
  return rep;
}

std::size_t curve_count(const TracePoint& pt, double L) {
  if (!(L > 0)) throw DomainError("curve_count needs L > 0");
  const double cap = 2 * std::cosh(L / 2);
  std::size_t count = (pt.x <= cap) + (pt.y <= cap);
  const auto roots = root_edges(pt);
  std::vector<Edge> stack(roots.begin(), roots.end());
  while (!stack.empty()) {
    const Edge e = stack.back();
    stack.pop_back();
    const double tm = e.tl * e.tr - e.td;
    const bool monotone = e.tl > 2 && e.tr > 2 && e.td <= e.tl * e.tr / 2;
    if (tm > cap && monotone) continue;
    if (!monotone && e.depth > 10000) throw DomainError("Farey descent is not monotone");
    if (tm <= cap) ++count;
    const Vec m = e.L + e.R;
    stack.push_back(Edge{e.L, m, e.tl, tm, e.tr, e.depth + 1});
    stack.push_back(Edge{m, e.R, tm, e.tr, e.tl, e.depth + 1});
  }
  return count;
}

Cor43Report cor43_check(const TracePoint& pt, const std::vector<MappingClass>& phis, int depth,
                        double prune, bool keep_rows) {
  if (phis.empty()) throw DomainError("cor43 needs at least one mapping class");
  for (const auto& phi : phis) {
    if (curves::classify(phi) != curves::MappingType::kPseudoAnosov) {
      throw DomainError("mapping class " + phi.str() + " is not pseudo-Anosov");
    }
  }
  const LengthSpectrumTruncation t = truncate(pt, depth, prune);
  Cor43Report rep;
  rep.point = pt;
  rep.depth = depth;
  rep.threshold = (2 - std::sqrt(3.0)) / 8;

  int last_depth = 0;
  std::vector<double> increments(static_cast<std::size_t>(depth), 0.0);
  gap::SlopeVector f;
  for (const auto& [s, e] : t.table) {
    const double w = weight_from_trace(e.trace);
    rep.rhs += w;
    increments[static_cast<std::size_t>(e.depth - 1)] += w;
    last_depth = std::max(last_depth, e.depth);
    f.set(s, std::exp(-e.length));
  }

  for (std::size_t i = 0; i < phis.size(); ++i) {
    const MappingClass& phi = phis[i];
    rep.phis.push_back(phi.str());
    const TraceFunction pushed(pullback_point(phi, pt));
    const MappingClass inv = phi.inverse();
    double lhs = 0;
    // displacement(phi, f_T) sees f_T(phi^-1 a) = 0 when phi^-1 a leaves T and
    // an extra spike at phi(b) for b in T with phi(b) outside T.
    double correction = 0;
    for (const auto& [s, e] : t.table) {
      const double lp = pushed.length(s);
      const double fx = std::exp(-e.length);
      const double diff = std::exp(-lp) - fx;
      lhs += diff * diff;
      if (!t.table.count(curves::act_slope(inv, s))) correction += diff * diff - fx * fx;
      if (!t.table.count(curves::act_slope(phi, s))) correction -= fx * fx;
      const double delta = e.length - lp;
      if (e.depth == last_depth) rep.max_delta_last_depth = std::max(rep.max_delta_last_depth, delta);
      if (keep_rows) rep.rows.push_back({static_cast<int>(i), s, e.length, lp, delta});
    }
    rep.lhs.push_back(lhs);
    rep.displacement.push_back(gap::displacement(phi, f));
    rep.boundary_correction.push_back(correction);
    rep.crosscheck_error =
        std::max(rep.crosscheck_error, std::abs(lhs - rep.displacement.back() - correction));
  }

  // Geometric extrapolation of the last three increments.
  rep.rhs_tail_extrapolated = kInf;
  if (depth >= 3) {
    const double i0 = increments[static_cast<std::size_t>(depth - 3)];
    const double i1 = increments[static_cast<std::size_t>(depth - 2)];
    const double i2 = increments[static_cast<std::size_t>(depth - 1)];
    if (i2 == 0) {
      rep.rhs_tail_extrapolated = 0;
    } else if (i0 > 0 && i1 > 0) {
      const double r = std::max(i1 / i0, i2 / i1);
      if (r < 1) rep.rhs_tail_extrapolated = i2 * r / (1 - r);
    }
  }
  rep.rhs_tail_certified = t.tail_bound();
  rep.rhs_tail = std::isinf(rep.rhs_tail_extrapolated)
                     ? rep.rhs_tail_certified
                     : std::max(rep.rhs_tail_extrapolated, rep.rhs_tail_certified);
  const double grow = std::exp(rep.max_delta_last_depth) + 1;
  rep.lhs_tail = grow * grow * rep.rhs_tail;
  rep.allowance = rep.lhs_tail / rep.rhs;
  double best = 0;
  for (double v : rep.lhs) best = std::max(best, v);
  rep.ratio = best / rep.rhs;
  rep.passed = rep.ratio >= rep.threshold - rep.allowance;
  return rep;
}

std::vector<TracePoint> sample_points(int n, std::uint64_t seed) {
  std::vector<TracePoint> out;
  for (int i = 0; i < n; ++i) {
    std::mt19937_64 rng(split_seed(seed, static_cast<std::uint64_t>(i)));
    std::uniform_real_distribution<double> u(2.2, 8.0);
    for (;;) {
      const double x = u(rng), y = u(rng);
      if ((x * x - 4) * (y * y - 4) >= 16) {
        out.push_back(TracePoint::from_xy(x, y));
        break;
      }
    }
  }
  return out;
}

std::vector<TracePoint> near_degenerate_points(int n, std::uint64_t seed) {
  std::vector<TracePoint> out;
  for (int i = 0; i < n; ++i) {
    std::mt19937_64 rng(split_seed(seed ^ 0x5eedULL, static_cast<std::uint64_t>(i)));
    const double x = n == 1 ? 2.05 : 2.3 - 0.25 * static_cast<double>(i) / (n - 1);
    const double ymin = std::sqrt(4 + 16 / (x * x - 4));
    std::uniform_real_distribution<double> u(ymin + 0.1, ymin + 10);
    out.push_back(TracePoint::from_xy(x, u(rng)));
  }
  return out;
}

}  // namespace mfgap::teich
