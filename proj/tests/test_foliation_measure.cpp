#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mfgap/foliation_measure.hpp"

using namespace mfgap;
using namespace mfgap::foliation;

namespace {

Rational q(long n, long d = 1) { return Rational(BigInt(n), BigInt(d)); }
Point pt(Rational x, Rational y) { return {std::move(x), std::move(y)}; }

Cell square(long x0, long y0, long side = 1) {
  return Cell({pt(q(x0), q(y0)), pt(q(x0 + side), q(y0)), pt(q(x0 + side), q(y0 + side)),
               pt(q(x0), q(y0 + side))});
}

const CertifiedSchottky& H() { return schottky::default_certified(); }

// Direction (1 - t) u + t v' inside a fundamental gap, scaled to max norm r.
Point gap_point(const ProjInterval& gap, const Rational& t, const Rational& r) {
  Point u{Rational(gap.lo().p()), Rational(gap.lo().q())};
  Point v{Rational(gap.hi().p()), Rational(gap.hi().q())};
  if (u.x * v.y - u.y * v.x < 0) v = {-v.x, -v.y};
  Point d{(1 - t) * u.x + t * v.x, (1 - t) * u.y + t * v.y};
  Rational m = std::max(abs(d.x), abs(d.y));
  return {r * d.x / m, r * d.y / m};
}

Cell sector(const ProjInterval& gap, const Rational& t0, const Rational& t1, const Rational& r0,
            const Rational& r1) {
  return Cell({gap_point(gap, t0, r0), gap_point(gap, t1, r0), gap_point(gap, t1, r1), gap_point(gap, t0, r1)});
}

// Shoelace area in doubles, as an oracle independent of the exact kernel.
double float_area(const poly::Polygon& p) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % p.size()];
    s += to_double(a.x) * to_double(b.y) - to_double(a.y) * to_double(b.x);
  }
  return std::abs(s) / 2;
}

poly::Polygon random_convex(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> d(-40, 40);
  std::vector<Point> pts;
  for (int i = 0; i < 7; ++i) pts.push_back(pt(q(d(rng), 4), q(d(rng), 4)));
  return poly::convex_hull(pts);
}

// Monte Carlo-free oracle for a point-in-convex test in doubles.
bool inside_float(const poly::Polygon& p, double x, double y) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % p.size()];
    double c = (to_double(b.x) - to_double(a.x)) * (y - to_double(a.y)) -
               (to_double(b.y) - to_double(a.y)) * (x - to_double(a.x));
    if (c < 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("thurston measure and cell validation") {
  CHECK(thurston_measure(square(1, 1)) == 1);
  CHECK(thurston_measure(Cell({pt(q(1), q(0)), pt(q(2), q(0)), pt(q(1), q(1))})) == q(1, 2));
  // Clockwise input is re-oriented.
  CHECK(thurston_measure(Cell({pt(q(1), q(0)), pt(q(1), q(1)), pt(q(2), q(0))})) == q(1, 2));
  CHECK_THROWS_AS(Cell({pt(q(1), q(1)), pt(q(2), q(2)), pt(q(3), q(3))}), DomainError);
  CHECK_THROWS_AS(square(-1, -1, 2), DomainError);  // contains the origin
  CHECK_THROWS_AS(Cell({pt(q(0), q(0)), pt(q(1), q(0)), pt(q(0), q(1))}), DomainError);  // origin on boundary
  CHECK_THROWS_AS(Cell({pt(q(1), q(1)), pt(q(4), q(1)), pt(q(2), q(2)), pt(q(1), q(4))}), DomainError);
  // -c is the same point of MF.
  CHECK(square(1, 1) == Cell({pt(q(-1), q(-1)), pt(q(-2), q(-1)), pt(q(-2), q(-2)), pt(q(-1), q(-2))}));
}

TEST_CASE("act_cell: identity, shear, invariance, composition") {
  const Cell c = square(1, 1);
  CHECK(act_cell(MappingClass{}, c) == c);
  Cell sheared = act_cell(curves::shear_t(), c);
  CHECK(thurston_measure(sheared) == 1);
  CHECK(sheared == Cell({pt(q(2), q(1)), pt(q(3), q(1)), pt(q(4), q(2)), pt(q(3), q(2))}));

  std::mt19937_64 rng(11);
  const auto& gens = H().generators();
  std::vector<MappingClass> ms{curves::shear_t(), curves::shear_u(), curves::rotation_s(),
                               gens.letter_matrix(0), gens.letter_matrix(3)};
  for (int it = 0; it < 30; ++it) {
    auto p = random_convex(rng);
    if (p.empty() || poly::contains(p, Point{0, 0})) continue;
    Cell k(p);
    const auto& m1 = ms[rng() % ms.size()];
    const auto& m2 = ms[rng() % ms.size()];
    CHECK(thurston_measure(act_cell(m1, k)) == thurston_measure(k));
    CHECK(act_cell(m1 * m2, k) == act_cell(m1, act_cell(m2, k)));
    CHECK(std::abs(float_area(k.vertices()) - to_double(k.area())) < 1e-9);
  }
}

TEST_CASE("polygon kernel: intersection and difference partition") {
  std::mt19937_64 rng(5);
  int tested = 0;
  for (int it = 0; it < 60; ++it) {
    auto p = random_convex(rng);
    auto r = random_convex(rng);
    if (p.empty() || r.empty()) continue;
    ++tested;
    auto inter = poly::intersect(p, r);
    auto diff = poly::difference(p, r);
    Rational total = inter.empty() ? Rational(0) : poly::signed_area(inter);
    for (const auto& d : diff) {
      CHECK(poly::is_convex_ccw(d));
      auto o = poly::intersect(d, r);
      CHECK((o.empty() || poly::signed_area(o) == 0));
      total += poly::signed_area(d);
    }
    CHECK(total == poly::signed_area(p));
    for (std::size_t i = 0; i < diff.size(); ++i) {
      for (std::size_t j = i + 1; j < diff.size(); ++j) {
        auto o = poly::intersect(diff[i], diff[j]);
        CHECK((o.empty() || poly::signed_area(o) == 0));
      }
    }
    // Grid oracle: a lattice point inside p and outside r lies in some piece.
    for (int gx = -10; gx <= 10; ++gx) {
      for (int gy = -10; gy <= 10; ++gy) {
        double x = gx + 0.137, y = gy + 0.291;
        bool want = inside_float(p, x, y) && !inside_float(r, x, y);
        bool got = false;
        for (const auto& d : diff) got = got || inside_float(d, x, y);
        CHECK(want == got);
      }
    }
  }
  CHECK(tested > 40);
}

TEST_CASE("wandering_check") {
  const auto& h = H();
  // Thin sliver along the attracting eigendirection (1, sqrt3 - 1) of A from
  // radius 1 to 5; A stretches it by 2 + sqrt 3 along itself.
  Cell sliver({pt(q(1), q(7, 10)), pt(q(5), q(35, 10)), pt(q(5), q(382, 100)), pt(q(1), q(764, 1000))});
  auto r = wandering_check(sliver, h, 3);
  CHECK_FALSE(r.wandering);
  REQUIRE(r.witness);
  CHECK(r.witness_name == "A");
  CHECK(wandering_check(sliver, h, 0).wandering);

  const auto gaps = fundamental_gaps(h);
  REQUIRE(gaps.size() == 4);
  for (const auto& gap : gaps) {
    Cell c = sector(gap, q(2, 5), q(3, 5), q(1), q(2));
    CHECK(avoids_limit_cone(c, h, 3));
    auto w = wandering_check(c, h, 10);
    CHECK(w.wandering);
    CHECK(w.words_checked == 4 * (59049 - 1) / 2);
    // Float oracle: no word of length <= 5 sends the centre direction into
    // the cell's angular range.
    auto arc = c.arc();
    double lo = std::atan2(to_double(Rational(arc.lo().q())), to_double(Rational(arc.lo().p())));
    double hi = std::atan2(to_double(Rational(arc.hi().q())), to_double(Rational(arc.hi().p())));
    auto ctr = c.vertex_average();
    curves::for_each_reduced_word(h.generators(), 5, [&](const Word&, const MappingClass& m) {
      double x = to_double(Rational(m.a())) * to_double(ctr.x) + to_double(Rational(m.b())) * to_double(ctr.y);
      double y = to_double(Rational(m.c())) * to_double(ctr.x) + to_double(Rational(m.d())) * to_double(ctr.y);
      double th = std::atan2(y, x);
      if (th < 0) th += std::numbers::pi;
      if (th >= std::numbers::pi) th -= std::numbers::pi;
      bool in = lo <= hi ? (th >= lo && th <= hi) : (th >= lo || th <= hi);
      CHECK_FALSE(in);
      return true;
    });
  }
}

TEST_CASE("H-related cover: trivial cases") {
  const auto& h = H();
  const auto gap = fundamental_gaps(h)[1];
  Cell base = sector(gap, q(3, 10), q(7, 10), q(1), q(3));
  Cell inner = sector(gap, q(4, 10), q(6, 10), q(3, 2), q(2));

  auto one = build_h_related_cover({inner}, {base}, h, 2);
  REQUIRE(one.rounds.size() == 1);
  REQUIRE(one.rounds[0].pieces.size() == 1);
  CHECK(one.rounds[0].pieces[0].cell == inner);
  CHECK(one.rounds[0].pieces[0].word.empty());

  const auto& gens = h.generators();
  Word w1 = gens.parse("A"), w2 = gens.parse("Ba");
  std::vector<Cell> K{act_cell(gens, w1, base), act_cell(gens, w2, base)};
  auto two = build_h_related_cover(K, {base}, h, 2);
  REQUIRE(two.rounds.size() == 1);
  REQUIRE(two.rounds[0].pieces.size() == 2);
  CHECK(two.rounds[0].pieces[0].word == w1);
  CHECK(two.rounds[0].pieces[1].word == w2);
  CHECK(verify_cover(two, K, {base}, h).ok());

  // Not covered: the region is in another gap.
  Cell far = sector(fundamental_gaps(h)[3], q(4, 10), q(6, 10), q(1), q(2));
  try {
    build_h_related_cover({far}, {base}, h, 1);
    FAIL("expected UncoveredRegion");
  } catch (const UncoveredRegion& e) {
    CHECK(e.area() == far.area());
    CHECK(e.leftover().size() == 1);
  }

  // A non-wandering base is refused.
  Cell sliver({pt(q(1), q(7, 10)), pt(q(5), q(35, 10)), pt(q(5), q(382, 100)), pt(q(1), q(764, 1000))});
  CHECK_THROWS_AS(build_h_related_cover({inner}, {sliver}, h, 1), DomainError);
}

TEST_CASE("H-related cover: ring sector with two bases") {
  const auto& h = H();
  const auto gap = fundamental_gaps(h)[0];
  // Ring sector between max-norm radii 2 and 3, cut into convex slabs.
  std::vector<Cell> K;
  for (int i = 2; i < 8; ++i) K.push_back(sector(gap, q(i, 10), q(i + 1, 10), q(2), q(3)));
  std::vector<Cell> bases{sector(gap, q(3, 20), q(11, 20), q(3, 2), q(7, 2)),
                          sector(gap, q(9, 20), q(17, 20), q(3, 2), q(7, 2))};
  // One translate of a base as well.
  const auto& gens = h.generators();
  K.push_back(act_cell(gens, gens.parse("bA"), sector(gap, q(1, 2), q(7, 10), q(2), q(5, 2))));

  auto cover = build_h_related_cover(K, bases, h, 2);
  CHECK(cover.rounds.size() == 2);
  auto v = verify_cover(cover, K, bases, h);
  CHECK(v.pairwise_disjoint);
  CHECK(v.pieces_in_translates);
  CHECK(v.area_identity);
  // Independent float oracle for the area identity.
  double pieces = 0, k = 0;
  for (const auto& r : cover.rounds)
    for (const auto& p : r.pieces) pieces += float_area(p.cell.vertices());
  for (const auto& c : K) k += float_area(c.vertices());
  CHECK(pieces == doctest::Approx(k).epsilon(1e-12));
}

TEST_CASE("H-related cover: seeded instances") {
  const auto& h = H();
  for (std::uint64_t i = 0; i < 4; ++i) {
    auto inst = random_cover_instance(h, 3, i);
    CHECK(inst.K.size() == 2);
    CHECK(inst.bases.size() == 4);
    auto cover = build_h_related_cover(inst.K, inst.bases, h, inst.max_len);
    CHECK(verify_cover(cover, inst.K, inst.bases, h).ok());
  }
  CHECK(random_cover_instance(h, 3, 1).K == random_cover_instance(h, 3, 1).K);
}

TEST_CASE("step functions: unitarity and displacement oracle") {
  const auto& h = H();
  for (std::uint64_t i = 0; i < 6; ++i) {
    auto inst = random_step_instance(h, 9, i);
    const auto& f = inst.f;
    for (Letter l = 0; l < 4; ++l) {
      const auto& g = h.generators().letter_matrix(l);
      auto pushed = f.pushforward(g);
      CHECK(pushed.norm2() == f.norm2());
      // Oracle: integrate |pushed - f|^2 over the common refinement.
      Rational s = 0;
      for (const auto& [cp, ap] : pushed.pieces) {
        Rational covered = 0;
        for (const auto& [cf, af] : f.pieces) {
          Rational o = overlap_area(cp, cf);
          covered += o;
          s += abs2(ap - af) * o;
        }
        s += abs2(ap) * (cp.area() - covered);
      }
      for (const auto& [cf, af] : f.pieces) {
        Rational covered = 0;
        for (const auto& [cp, ap] : pushed.pieces) covered += overlap_area(cp, cf);
        s += abs2(af) * (cf.area() - covered);
      }
      CHECK(displacement(g, f) == s);
    }
  }
  Cell a = square(1, 1), b = square(1, 2);
  CHECK_THROWS_AS(StepFunction({{a, GaussianRational(1)}, {square(1, 1), GaussianRational(2)}}), DomainError);
  CHECK_NOTHROW(StepFunction({{a, GaussianRational(1)}, {b, GaussianRational(2)}}));
}

TEST_CASE("cell amplitudes") {
  const auto& h = H();
  const auto& gens = h.generators();
  const auto gap = fundamental_gaps(h)[2];
  Cell base = sector(gap, q(3, 10), q(7, 10), q(1), q(3));

  StepFunction one({{base, GaussianRational(1)}});
  auto a1 = cell_amplitudes(one, base, h, 2);
  REQUIRE(a1.vector.size() == 1);
  CHECK(a1.mass.at(Word{}) == base.area());
  CHECK(a1.vector.at(Word{}).real() == doctest::Approx(std::sqrt(to_double(base.area()))));

  StepFunction two({{base, GaussianRational(1)}, {act_cell(gens, gens.parse("A"), base), GaussianRational(1)}});
  auto a2 = cell_amplitudes(two, base, h, 2);
  REQUIRE(a2.mass.size() == 2);
  CHECK(a2.mass.at(Word{}) == a2.mass.at(gens.parse("A")));

  for (std::uint64_t i = 0; i < 5; ++i) {
    auto inst = random_step_instance(h, 21, i);
    auto amps = cell_amplitudes(inst.f, inst.base, h, inst.max_len);
    CHECK(amps.norm2() == inst.f.norm2());
    CHECK(amps.vector.norm2() == doctest::Approx(to_double(inst.f.norm2())).epsilon(1e-12));
  }

  // A piece hanging out of the base straddles.
  Cell wide = sector(gap, q(1, 10), q(5, 10), q(3, 2), q(2));
  CHECK_THROWS_AS(cell_amplitudes(StepFunction({{wide, GaussianRational(1)}}), base, h, 2), DomainError);
  // A piece in no translate.
  Cell elsewhere = sector(fundamental_gaps(h)[0], q(4, 10), q(6, 10), q(1), q(2));
  CHECK_THROWS_AS(cell_amplitudes(StepFunction({{elsewhere, GaussianRational(1)}}), base, h, 1), DomainError);
}

TEST_CASE("continuous gap check") {
  const auto& h = H();
  const auto& gens = h.generators();
  const auto gap = fundamental_gaps(h)[1];
  Cell base = sector(gap, q(3, 10), q(7, 10), q(1), q(3));

  CHECK(at_least_epsilon_prime(q(1, 29)));   // 0.0345 > 0.0335
  CHECK_FALSE(at_least_epsilon_prime(q(1, 30)));  // 0.0333 < 0.0335

  auto rep = continuous_gap_check(StepFunction({{base, GaussianRational(1)}}), base, h, 2);
  REQUIRE(rep.displacement.size() == 4);
  for (const auto& d : rep.displacement) CHECK(d == 2 * base.area());
  CHECK(rep.max_ratio == 2.0);
  CHECK(rep.passed());

  // Halves of the base and of A.base.
  Point c = base.vertex_average();
  Point c2{c.x + 1, c.y + 2};
  Cell left(poly::clip(base.vertices(), c, c2, true));
  Cell right(poly::clip(base.vertices(), c, c2, false));
  const auto& A = gens.letter_matrix(0);
  auto make = [&](long l0, long r0, long l1, long r1) {
    return StepFunction({{left, GaussianRational(q(l0))},
                         {right, GaussianRational(q(r0))},
                         {act_cell(A, left), GaussianRational(q(l1))},
                         {act_cell(A, right), GaussianRational(q(r1))}});
  };
  auto term_at = [&](const std::vector<std::vector<ChainTerm>>& t, const Word& w) {
    for (const auto& x : t[0])
      if (x.word == w) return x;
    FAIL("no term");
    return t[0][0];
  };
  std::vector<std::vector<ChainTerm>> terms;
  // On A.U, pi(A)f is (l0, r0) and f is (l1, r1): equality iff proportional.
  continuous_gap_check(make(1, 1, 1, 1), base, h, 2, &terms);
  CHECK(term_at(terms, gens.parse("A")).equality);
  continuous_gap_check(make(1, 2, 2, 4), base, h, 2, &terms);
  CHECK(term_at(terms, gens.parse("A")).equality);
  auto strict = continuous_gap_check(make(1, 2, 2, 1), base, h, 2, &terms);
  CHECK_FALSE(term_at(terms, gens.parse("A")).equality);
  CHECK(term_at(terms, gens.parse("A")).holds);
  CHECK(strict.chain_violations == 0);
  CHECK(strict.chain_sum_matches);

  for (std::uint64_t i = 0; i < 10; ++i) {
    auto inst = random_step_instance(h, 4, i);
    auto r = continuous_gap_check(inst.f, inst.base, h, inst.max_len);
    CHECK(r.passed());
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(to_double(r.displacement[k]) >= r.tree_displacement[k] - 1e-9);
    }
  }
}

TEST_CASE("limit cone mass") {
  const auto& h = H();
  // Polar oracle at depth 1 from float angles of the four base intervals.
  double radians = 0;
  for (const auto& iv : schottky::limit_set_cover(h, 1).intervals) {
    auto th = [](const Slope& s) {
      return std::atan2(to_double(Rational(s.q())), to_double(Rational(s.p())));
    };
    double d = th(iv.interval.hi()) - th(iv.interval.lo());
    if (d < 0) d += std::numbers::pi;
    radians += d;
  }
  CHECK(limit_cone_mass(h, 1, 3, 1) == doctest::Approx((9.0 - 1.0) / 2 * radians).epsilon(1e-12));
  double prev = limit_cone_mass(h, 1, 3, 1);
  for (int d = 2; d <= 10; ++d) {
    double m = limit_cone_mass(h, 1, 3, d);
    CHECK(m < prev);
    prev = m;
  }
  CHECK(prev / limit_cone_mass(h, 1, 3, 1) < 0.5);
  CHECK_THROWS_AS(limit_cone_mass(h, 2, 1, 1), DomainError);
}
