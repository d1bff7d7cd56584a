#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mfgap/schottky.hpp"
#include "mfgap/teichmueller.hpp"

using namespace mfgap;
using namespace mfgap::teich;

namespace {

Slope sl(long p, long q) { return Slope::canonical(p, q); }

struct M2 {
  double a, b, c, d;
  M2 operator*(const M2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  M2 inv() const { return {d, -b, -c, a}; }
  double tr() const { return a + d; }
};

// Holonomy oracle: X, Y in SL(2,R) with tr X = x, tr Y = y, tr XY = z; the
// curve (p, q) is the balanced word with q letters X and |p| letters Y^{+-1}.
double matrix_trace_oracle(const TracePoint& pt, long p, long q) {
  const double lam = (pt.x + std::sqrt(pt.x * pt.x - 4)) / 2;
  const M2 X{lam, 0, 0, 1 / lam};
  const double a = (pt.z - pt.y / lam) / (lam - 1 / lam);
  const double d = pt.y - a;
  const M2 Y{a, 1, a * d - 1, d};
  const M2 Yp = p >= 0 ? Y : Y.inv();
  const long m = std::labs(p);
  const long n = m + q;
  M2 w{1, 0, 0, 1};
  for (long i = 1; i <= n; ++i) {
    const bool is_y = (i * m) / n - ((i - 1) * m) / n == 1;
    w = w * (is_y ? Yp : X);
  }
  return w.tr();
}

}  // namespace

TEST_CASE("trace recursion examples") {
  const TracePoint m = TracePoint::modular();
  CHECK(trace_of_slope(m, sl(1, 1)) == 3);
  CHECK(trace_of_slope(m, sl(2, 1)) == 6);
  CHECK(trace_of_slope(m, sl(3, 1)) == 15);
  CHECK(trace_of_slope(m, sl(0, 1)) == 3);
  CHECK(trace_of_slope(m, sl(1, 0)) == 3);
  CHECK(trace_of_slope(m, sl(-1, 1)) == 6);
}

TEST_CASE("trace recursion matches a holonomy representation") {
  for (const TracePoint& pt : {TracePoint::modular(), TracePoint::from_xy(2.5, 4.0),
                               TracePoint::from_xy(2.05, 12.0), TracePoint::from_xy(6.0, 3.1)}) {
    for (long q = 0; q <= 9; ++q) {
      for (long p = -9; p <= 9; ++p) {
        if (std::gcd(p, q) != 1 || (q == 0 && p != 1)) continue;
        const double t = trace_of_slope(pt, sl(p, q));
        CHECK(t == doctest::Approx(matrix_trace_oracle(pt, p, q)).epsilon(1e-9));
        CHECK(t > 2);
      }
    }
  }
}

TEST_CASE("reduction of large trace points") {
  const auto& gens = schottky::default_certified().generators();
  const TracePoint pt = TracePoint::from_xy(2.3, 6.5);
  const MappingClass phi = gens.evaluate(gens.parse("ABa"));
  const TracePoint pb = pullback_point(phi, pt);
  const TraceFunction f(pb);
  CHECK(f.reduction_steps() > 0);
  for (long q = 0; q <= 9; ++q) {
    for (long p = -9; p <= 9; ++p) {
      if (std::gcd(p, q) != 1 || (q == 0 && p != 1)) continue;
      CHECK(f.length(sl(p, q)) == doctest::Approx(length(pt, curves::act_slope(phi.inverse(), sl(p, q)))).epsilon(1e-9));
    }
  }
}

TEST_CASE("trace points") {
  CHECK(TracePoint::modular().fricke_residual() == 0);
  CHECK_THROWS_AS(TracePoint::make(3, 3, 4), DomainError);
  CHECK_THROWS_AS(TracePoint::make(1, 3, 3), DomainError);
  CHECK_THROWS_AS(TracePoint::from_xy(2.05, 3.0), DomainError);
  const TracePoint p = TracePoint::from_xy(2.5, 4.0);
  CHECK(p.fricke_residual() <= 1e-12);
  CHECK(p.z > p.x * p.y / 2);
  for (const auto& s : sample_points(30, 4)) CHECK(s.fricke_residual() <= 1e-9);
  const auto near = near_degenerate_points(10, 4);
  CHECK(near.back().x == doctest::Approx(2.05));
  for (const auto& s : near) CHECK(s.fricke_residual() <= 1e-9);
}

TEST_CASE("lengths") {
  CHECK(length_from_trace(3) == doctest::Approx(1.924847).epsilon(1e-6));
  CHECK(length_from_trace(6) == doctest::Approx(3.525494).epsilon(1e-6));
  CHECK_THROWS_AS(length_from_trace(2), DomainError);
  CHECK_THROWS_AS(length_from_trace(1.5), DomainError);
}

TEST_CASE("modular point symmetry") {
  const TracePoint m = TracePoint::modular();
  const MappingClass rot(1, -1, 1, 0);
  CHECK(curves::act_slope(rot, sl(0, 1)) == sl(1, 0));
  for (long q = 1; q <= 8; ++q) {
    for (long p = -8; p <= 8; ++p) {
      if (std::gcd(p, q) != 1) continue;
      const Slope s = sl(p, q);
      CHECK(trace_of_slope(m, s) == doctest::Approx(trace_of_slope(m, curves::act_slope(rot, s))));
      CHECK(trace_of_slope(m, s) == doctest::Approx(trace_of_slope(m, curves::act_slope(rot * rot, s))));
      CHECK(trace_of_slope(m, s) == doctest::Approx(trace_of_slope(m, sl(q, p))));
    }
  }
}

TEST_CASE("pullback points") {
  const TracePoint m = TracePoint::modular();
  const TracePoint id = pullback_point(MappingClass(), m);
  CHECK(id.x == m.x);
  CHECK(id.y == m.y);
  CHECK(id.z == m.z);
  // The order-3 rotation fixes the modular point; S exchanges 1/1 and -1/1.
  const TracePoint r = pullback_point(MappingClass(1, -1, 1, 0), m);
  CHECK(r.x == 3);
  CHECK(r.y == 3);
  CHECK(r.z == 3);
  const TracePoint s = pullback_point(curves::rotation_s(), m);
  CHECK(s.x == 3);
  CHECK(s.y == 3);
  CHECK(s.z == 6);

  const auto& gens = schottky::default_certified().generators();
  const TracePoint pt = TracePoint::from_xy(2.7, 3.3);
  for (const char* word : {"A", "b", "AB", "aBB", "ABab", "BABa"}) {
    const MappingClass phi = gens.evaluate(gens.parse(word));
    const TracePoint pb = pullback_point(phi, pt);
    CHECK(pb.fricke_residual() <= 1e-9);
    for (long q = 0; q <= 6; ++q) {
      for (long p = -6; p <= 6; ++p) {
        if (std::gcd(p, q) != 1 || (q == 0 && p != 1)) continue;
        const Slope a = sl(p, q);
        CHECK(length(pb, a) == doctest::Approx(length(pt, curves::act_slope(phi.inverse(), a))).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("subtree tail bound dominates the true tail") {
  for (const TracePoint& pt : {TracePoint::modular(), TracePoint::from_xy(2.3, 5.0)}) {
    const auto shallow = truncate(pt, 8, 0.0);
    const auto deep = truncate(pt, 18, 1e-300);
    double s8 = 0, s18 = 0;
    for (const auto& [s, e] : shallow.table) s8 += std::exp(-2 * e.length);
    for (const auto& [s, e] : deep.table) s18 += std::exp(-2 * e.length);
    CHECK(shallow.pruned_subtrees == 0);
    CHECK(s18 - s8 <= shallow.frontier_bound);
    CHECK(s18 - s8 >= 0);
  }
  CHECK(std::isinf(subtree_bound(2.05, 2.5, 1.0)));
  CHECK(std::isinf(subtree_bound(5, 5, 20)));
}

TEST_CASE("l2 partial sums") {
  const TracePoint m = TracePoint::modular();
  const auto one = l2_tail_report(m, 1);
  CHECK(one.partial_sums[0] == doctest::Approx(0.06394).epsilon(1e-3));
  CHECK(one.partial_sums[0] == doctest::Approx(3 * std::exp(-2 * length_from_trace(3))));

  const auto exact = l2_tail_report(m, 14, 0.0);
  for (std::size_t d = 0; d < exact.increments.size(); ++d) CHECK(exact.increments[d] > 0);
  CHECK(exact.counts[0] == 3);
  CHECK(exact.counts[1] == 3);
  CHECK(exact.counts[2] == 6);
  for (std::size_t d = 4; d + 1 < exact.increments.size(); ++d) {
    CHECK(exact.increments[d + 1] < exact.increments[d]);
  }

  const auto deep = l2_tail_report(m, 40);
  CHECK(deep.cauchy);
  CHECK(deep.tail_bound <= 1e-8);
  CHECK(deep.partial_sums.back() - exact.partial_sums.back() <= exact.tail_bound);
  for (const auto& pt : sample_points(5, 21)) {
    const auto r = l2_tail_report(pt, 40);
    CHECK(r.cauchy);
  }
}

TEST_CASE("curve counts") {
  const TracePoint m = TracePoint::modular();
  CHECK(curve_count(m, 1.0) == 0);
  CHECK(curve_count(m, 2.0) == 3);
  CHECK_THROWS_AS(curve_count(m, 0.0), DomainError);
  for (const TracePoint& pt : {m, TracePoint::from_xy(2.4, 4.0)}) {
    const double L = 7.0;
    std::size_t brute = 0;
    for (long q = 0; q <= 60; ++q) {
      for (long p = -60; p <= 60; ++p) {
        if (std::gcd(p, q) != 1 || (q == 0 && p != 1)) continue;
        if (length(pt, sl(p, q)) <= L) ++brute;
      }
    }
    CHECK(curve_count(pt, L) == brute);
  }
  const double ratio = static_cast<double>(curve_count(m, 24)) / static_cast<double>(curve_count(m, 12));
  CHECK(ratio >= 3.2);
  CHECK(ratio <= 4.8);
}

TEST_CASE("length-sum inequality") {
  const auto& gens = schottky::default_certified().generators();
  std::vector<MappingClass> K;
  for (curves::Letter l = 0; l < 4; ++l) K.push_back(gens.letter_matrix(l));
  CHECK_THROWS_AS(cor43_check(TracePoint::modular(), {MappingClass()}, 10), DomainError);
  CHECK_THROWS_AS(cor43_check(TracePoint::modular(), {curves::shear_t()}, 10), DomainError);

  const Cor43Report rep = cor43_check(TracePoint::modular(), K, 30, 1e-18, true);
  CHECK(rep.ratio > 0);
  CHECK(rep.passed);
  CHECK(rep.crosscheck_error <= 1e-9);
  CHECK(rep.threshold == doctest::Approx((2 - std::sqrt(3.0)) / 8));
  REQUIRE_FALSE(rep.rows.empty());
  for (std::size_t i = 0; i < rep.rows.size(); i += 97) {
    const auto& r = rep.rows[i];
    const double lhs_term = std::pow(std::exp(r.delta) - 1, 2) * std::exp(-2 * r.length);
    const double direct = std::pow(std::exp(-r.length_pushed) - std::exp(-r.length), 2);
    CHECK(lhs_term == doctest::Approx(direct).epsilon(1e-9));
    CHECK((r.delta == 0) == (direct == 0));
  }
  for (const auto& pt : near_degenerate_points(3, 8)) {
    const Cor43Report r = cor43_check(pt, K, 40);
    CHECK(r.passed);
    CHECK(r.crosscheck_error <= 1e-9);
  }
}
