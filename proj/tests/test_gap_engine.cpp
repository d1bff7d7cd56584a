#include <doctest.h>

#include <cmath>
#include <deque>
#include <random>
#include <set>

#include "mfgap/gap_engine.hpp"

using namespace mfgap;
using namespace mfgap::gap;

namespace {

const double kSqrt3Half = std::sqrt(3.0) / 2;

Slope sl(long p, long q) { return Slope::canonical(p, q); }

// Independent orbit oracle: plain BFS over the H-action up to a word radius.
std::map<Slope, int> bfs_distances(const Slope& x, const GeneratorSet& gens, int radius) {
  std::map<Slope, int> dist{{x, 0}};
  std::deque<Slope> queue{x};
  while (!queue.empty()) {
    const Slope cur = queue.front();
    queue.pop_front();
    const int d = dist[cur];
    if (d == radius) continue;
    for (curves::Letter l = 0; l < gens.num_letters(); ++l) {
      const Slope nxt = curves::act_slope(gens.letter_matrix(l), cur);
      if (dist.emplace(nxt, d + 1).second) queue.push_back(nxt);
    }
  }
  return dist;
}

std::vector<MappingClass> K_default() {
  const auto& g = schottky::default_certified().generators();
  return {g.letter_matrix(0), g.letter_matrix(1), g.letter_matrix(2), g.letter_matrix(3)};
}

}  // namespace

TEST_CASE("finitely supported vectors") {
  ExactSlopeVector f;
  f.set(sl(0, 1), GaussianRational(Rational(1, 2)));
  f.set(sl(1, 0), GaussianRational(Rational(0), Rational(3)));
  f.set(sl(2, 3), GaussianRational());
  CHECK(f.size() == 2);
  f.add(sl(0, 1), GaussianRational(Rational(-1, 2)));
  CHECK(f.size() == 1);
  CHECK(f.norm2() == 9);
  CHECK(inner(f, f) == GaussianRational(Rational(9)));
  CHECK((f - f).empty());
}

TEST_CASE("displacement examples") {
  const MappingClass a = K_default()[0];
  const Slope x = sl(0, 1);
  SlopeVector delta;
  delta.set(x, 1.0);
  CHECK(displacement(MappingClass(), delta) == 0.0);
  CHECK(displacement(a, delta) == doctest::Approx(2.0));

  ExactSlopeVector two;
  two.set(x, GaussianRational(Rational(1)));
  two.set(curves::act_slope(a, x), GaussianRational(Rational(1)));
  // pi(a)f = delta_{ax} + delta_{a^2 x}; difference delta_{a^2x} - delta_x.
  CHECK(displacement(a, two) == 2);
  Rational brute = 0;
  std::set<Slope> pts{x, curves::act_slope(a, x), curves::act_slope(a * a, x)};
  const MappingClass ainv = a.inverse();
  for (const auto& y : pts) {
    const auto d = two.at(curves::act_slope(ainv, y)) - two.at(y);
    brute += abs2(d);
  }
  CHECK(displacement(a, two) == brute);
}

TEST_CASE("representation is unitary and orthogonal across trees") {
  std::mt19937_64 rng(3);
  const auto K = K_default();
  const auto& h = schottky::default_certified();
  const auto pool = sampling_ball(sl(0, 1), 4);
  for (int trial = 0; trial < 50; ++trial) {
    ExactSlopeVector f;
    for (int i = 0; i < 12; ++i) {
      f.set(pool[rng() % pool.size()],
            GaussianRational(Rational(static_cast<long>(rng() % 21) - 10, 1 + rng() % 7),
                             Rational(static_cast<long>(rng() % 21) - 10, 1 + rng() % 7)));
    }
    for (const auto& g : K) {
      const auto moved = f.pushforward([&](const Slope& s) { return curves::act_slope(g, s); });
      CHECK(moved.norm2() == f.norm2());
    }
    const auto pieces = decompose_into_two_trees(f, h, 30);
    ExactSlopeVector sum;
    std::size_t total = 0;
    for (const auto& p : pieces) {
      sum = sum + p.part;
      total += p.part.size();
    }
    CHECK(sum == f);
    CHECK(total == f.size());
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      for (std::size_t j = i + 1; j < pieces.size(); ++j) {
        CHECK(inner(pieces[i].part, pieces[j].part) == GaussianRational());
      }
    }
    for (const auto& g : K) {
      Rational parts = 0;
      for (const auto& p : pieces) parts += displacement(g, p.part);
      CHECK(displacement(g, f) == parts);
    }
  }
}

TEST_CASE("two-tree decomposition") {
  const auto& h = schottky::default_certified();
  const auto& gens = h.generators();
  SlopeVector one;
  one.set(sl(3, 7), 1.0);
  CHECK(decompose_into_two_trees(one, h, 4).size() == 1);

  SlopeVector pair;
  pair.set(sl(0, 1), 1.0);
  pair.set(curves::act_slope(gens.letter_matrix(0), sl(0, 1)), 2.0);
  const auto pieces = decompose_into_two_trees(pair, h, 4);
  REQUIRE(pieces.size() == 1);
  CHECK(pieces[0].tree.members.size() == 2);

  // 20 points over 3 orbits, compared with brute-force BFS.
  std::mt19937_64 rng(11);
  // Three seeds pairwise far apart in the orbit graph, chosen by BFS.
  std::vector<Slope> seeds;
  for (const auto& cand : sampling_ball(sl(0, 1), 3)) {
    bool far = true;
    const auto ball = bfs_distances(cand, gens, 8);
    for (const auto& s : seeds) far = far && ball.count(s) == 0;
    if (far) seeds.push_back(cand);
    if (seeds.size() == 3) break;
  }
  REQUIRE(seeds.size() == 3);
  for (int trial = 0; trial < 20; ++trial) {
    SlopeVector f;
    std::map<Slope, std::size_t> origin;
    while (f.size() < 20) {
      const std::size_t o = rng() % 3;
      Word w;
      const int len = static_cast<int>(rng() % 4);
      for (int k = 0; k < len; ++k) w = w * Word{{static_cast<curves::Letter>(rng() % 4)}};
      const Slope x = gens.act(w, seeds[o]);
      f.set(x, 1.0 + static_cast<double>(f.size()));
      origin[x] = o;
    }
    const auto parts = decompose_into_two_trees(f, h, 6);
    std::set<std::size_t> origins;
    for (const auto& [x, o] : origin) origins.insert(o);
    CHECK(parts.size() == origins.size());
    for (const auto& p : parts) {
      const auto ball = bfs_distances(p.tree.base, gens, 6);
      for (const auto& [x, v] : origin) {
        const bool in_part = p.part.entries().count(x) == 1;
        CHECK(in_part == (ball.count(x) == 1));
        if (in_part) CHECK(v == origin[p.tree.base]);
      }
      for (const auto& [w, x] : p.tree.members) CHECK(gens.act(w, p.tree.base) == x);
    }
  }
}

TEST_CASE("undetermined pair is explicit") {
  const auto& h = schottky::default_certified();
  const auto& gens = h.generators();
  SlopeVector f;
  f.set(sl(0, 1), 1.0);
  f.set(gens.act(gens.parse("ABAB"), sl(0, 1)), 1.0);
  CHECK_THROWS_AS(decompose_into_two_trees(f, h, 3), UndeterminedPair);
  CHECK(decompose_into_two_trees(f, h, 4).size() == 1);
}

TEST_CASE("free group gap constant") {
  const GapConstant c = free_group_gap_constant();
  CHECK(c.epsilon == doctest::Approx(0.267949).epsilon(1e-6));
  CHECK(c.eta == doctest::Approx(0.066987).epsilon(1e-5));
  CHECK(c.epsilon_prime == doctest::Approx(c.epsilon / 8));
  CHECK(c.K == std::vector<std::string>{"A", "a", "B", "b"});
  CHECK_FALSE(c.transcript.empty());
  CHECK(1 - c.epsilon / 2 == doctest::Approx(kSqrt3Half));
}

TEST_CASE("spectral radius of the truncated walk") {
  CHECK(random_walk_spectral_radius(1) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_THROWS_AS(random_walk_spectral_radius(0), DomainError);
  for (int r = 1; r <= 5; ++r) {
    CHECK(random_walk_spectral_radius(r) ==
          doctest::Approx(random_walk_spectral_radius_full(r)).epsilon(1e-8));
  }
  double prev = 0;
  for (int r = 1; r <= 40; ++r) {
    const double v = random_walk_spectral_radius(r);
    CHECK(v >= prev);
    CHECK(v <= kSqrt3Half + 1e-9);
    prev = v;
  }
  const double r10 = random_walk_spectral_radius(10);
  CHECK(r10 >= 0.80);
  CHECK(r10 <= 0.8660254);
}

TEST_CASE("gap ratio") {
  SlopeVector empty;
  CHECK_THROWS_AS(gap_ratio(K_default(), empty), DomainError);
  for (const auto& x : sampling_ball(sl(0, 1), 3)) {
    SlopeVector d;
    d.set(x, {0.0, 2.5});
    CHECK(gap_ratio(K_default(), d) == doctest::Approx(2.0));
  }
}

TEST_CASE("harness on the default orbit") {
  const auto& h = schottky::default_certified();
  const GapReport rep = certify_gap(sl(0, 1), h, 100, 7);
  CHECK(rep.violations == 0);
  CHECK(rep.min_observed_ratio >= rep.eta);
  CHECK(rep.ratios.size() == 100);
  CHECK(rep.adversarial_final_ratio >= rep.eta);
  CHECK(rep.adversarial_final_ratio <= 2.0);
  CHECK(rep.adversarial_final_ratio == doctest::Approx(rep.adversarial_tree_ratio).epsilon(1e-9));
  CHECK(rep.adversarial_final_ratio < rep.adversarial_initial_ratio);
  CHECK(rep.passed());

  const GapReport again = certify_gap(sl(0, 1), h, 100, 7);
  CHECK(again.ratios == rep.ratios);
  CHECK_THROWS_AS(certify_gap(sl(0, 1), h, 0, 7), DomainError);
}

TEST_CASE("punctured orbit harness") {
  const auto& h = schottky::default_certified();
  const GapReport rep = punctured_orbit_gap(sl(1, 2), h, 60, 9);
  CHECK(rep.punctured);
  CHECK(rep.violations == 0);
  CHECK(rep.passed());
  for (const auto& x : sampling_ball(sl(1, 2), 8)) {
    if (x == sl(1, 2)) continue;
    SlopeVector d;
    d.set(x, 1.0);
    CHECK(gap_ratio(K_default(), d) == doctest::Approx(2.0));
    break;
  }
}

TEST_CASE("random ensemble is seeded") {
  const auto pool = sampling_ball(sl(0, 1), 8);
  CHECK(random_vector(pool, 64, 42, 3) == random_vector(pool, 64, 42, 3));
  CHECK_FALSE(random_vector(pool, 64, 42, 3) == random_vector(pool, 64, 42, 4));
  for (int i = 0; i < 50; ++i) {
    const auto f = random_vector(pool, 64, 1, static_cast<std::uint64_t>(i));
    CHECK(f.size() >= 1);
    CHECK(f.size() <= 64);
  }
}
