#include "mfgap/parity_decomposition.hpp"

#include <deque>
#include <random>
#include <set>

namespace mfgap::parity {

namespace {

struct RawSection {
  BigInt p, q, r, s;
};

// a x + b y = gcd(a, b) >= 0.
void ext_gcd(const BigInt& a, const BigInt& b, BigInt& g, BigInt& x, BigInt& y) {
  BigInt r0 = a, r1 = b, x0 = 1, x1 = 0, y0 = 0, y1 = 1;
  while (r1 != 0) {
    BigInt t = r0 / r1;
    BigInt tmp = r0 - t * r1;
    r0 = r1;
    r1 = tmp;
    tmp = x0 - t * x1;
    x0 = x1;
    x1 = tmp;
    tmp = y0 - t * y1;
    y0 = y1;
    y1 = tmp;
  }
  if (r0 < 0) {
    r0 = -r0;
    x0 = -x0;
    y0 = -y0;
  }
  g = r0;
  x = x0;
  y = y0;
}

BigInt floor_mod(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

RawSection raw_section(const Slope& sl) {
  RawSection out{sl.p(), sl.q(), 0, 0};
  if (out.p == 0) {
    out.r = -1;
    out.s = 0;
    return out;
  }
  // p s - q r = 1.
  BigInt g, x, y;
  ext_gcd(out.p, out.q, g, x, y);
  BigInt s = x, r = -y;
  BigInt ap = out.p < 0 ? BigInt(-out.p) : out.p;
  BigInt rn = floor_mod(r, ap);
  BigInt k = (rn - r) / out.p;
  out.r = rn;
  out.s = s + k * out.q;
  return out;
}

}  // namespace

std::string CosetKey::str() const { return slope.str() + ":" + std::to_string(parity); }

MappingClass section(const Slope& s) {
  auto r = raw_section(s);
  return MappingClass(r.p, r.r, r.q, r.s);
}

CosetKey coset_key(const MappingClass& g) {
  const bool flip = g.c() < 0 || (g.c() == 0 && g.a() < 0);
  const BigInt e = flip ? -1 : 1;
  Slope sl = Slope::canonical(e * g.a(), e * g.c());
  auto sec = raw_section(sl);
  BigInt n = sec.s * (e * g.b()) - sec.r * (e * g.d());
  return {sl, static_cast<int>(floor_mod(n, 2))};
}

CosetKey act(const MappingClass& m, const CosetKey& k) {
  MappingClass g = m * section(k.slope);
  if (k.parity) g = g * curves::shear_t();
  return coset_key(g);
}

CosetKey inversion(const CosetKey& k) { return {k.slope, 1 - k.parity}; }

ParityVector act(const MappingClass& m, const ParityVector& f) {
  return f.pushforward([&](const CosetKey& k) { return act(m, k); });
}

ParityVector project_even(const ParityVector& f) {
  ParityVector out;
  for (const auto& [k, v] : f.entries()) {
    out.add(k, halve(v));
    out.add(inversion(k), halve(v));
  }
  return out;
}

ParityVector project_odd(const ParityVector& f) {
  ParityVector out;
  for (const auto& [k, v] : f.entries()) {
    out.add(k, halve(v));
    out.add(inversion(k), GaussianRational{} - halve(v));
  }
  return out;
}

SlopeVector forget_parity(const ParityVector& f) {
  SlopeVector out;
  for (const auto& [k, v] : f.entries()) out.add(k.slope, v);
  return out;
}

bool CosetBall::inner(const CosetKey& k) const {
  auto it = distance.find(k);
  return it != distance.end() && it->second <= radius - 1;
}

std::vector<CosetKey> CosetBall::inner_keys() const {
  std::vector<CosetKey> out;
  for (const auto& [k, d] : distance) {
    if (d <= radius - 1) out.push_back(k);
  }
  return out;
}

CosetBall coset_ball(const GeneratorSet& gens, int radius) {
  if (radius < 1) throw DomainError("coset ball: radius must be >= 1");
  CosetBall ball;
  ball.radius = radius;
  CosetKey start{};
  ball.distance[start] = 0;
  std::deque<CosetKey> queue{start};
  while (!queue.empty()) {
    CosetKey k = queue.front();
    queue.pop_front();
    int d = ball.distance[k];
    if (d == radius) continue;
    for (curves::Letter l = 0; l < gens.num_letters(); ++l) {
      CosetKey n = act(gens.letter_matrix(l), k);
      if (ball.distance.emplace(n, d + 1).second) queue.push_back(n);
    }
  }
  return ball;
}

VectorCheck check_vector(const CosetBall& ball, const GeneratorSet& gens, const ParityVector& f) {
  for (const auto& [k, v] : f.entries()) {
    if (!ball.inner(k)) {
      throw DomainError("parity check: vector has support at " + k.str() +
                        " outside the inner ball of radius " + std::to_string(ball.radius - 1) +
                        "; its translates would leave the truncation");
    }
  }
  VectorCheck c;
  const auto even = project_even(f);
  const auto odd = project_odd(f);
  if (!(even + odd == f)) ++c.projection_violations;
  if (!(project_even(even) == even) || !(project_odd(odd) == odd)) ++c.projection_violations;
  if (!(project_odd(even).empty() && project_even(odd).empty())) ++c.projection_violations;
  if (!is_zero(gap::inner(even, odd))) ++c.projection_violations;

  const auto slopes = forget_parity(f);
  for (curves::Letter l = 0; l < gens.num_letters(); ++l) {
    const auto& m = gens.letter_matrix(l);
    const auto moved = act(m, f);
    for (const auto& [k, v] : moved.entries()) {
      if (!ball.distance.contains(k)) ++c.escapes;
    }
    if (!(act(m, even) == project_even(moved))) ++c.commute_violations;
    if (!(act(m, odd) == project_odd(moved))) ++c.commute_violations;
    auto pushed = slopes.pushforward([&](const Slope& s) { return curves::act_slope(m, s); });
    if (!(forget_parity(moved) == pushed)) ++c.intertwine_violations;
  }
  return c;
}

bool DecompositionReport::passed() const {
  return slopes_match_orbit && delta_violations == 0 && random.total() == 0 &&
         cross_orthogonality_violations == 0 && even_gset_violations == 0 && odd_gset_violations == 0;
}

namespace {

void accumulate(VectorCheck& into, const VectorCheck& c) {
  into.commute_violations += c.commute_violations;
  into.projection_violations += c.projection_violations;
  into.intertwine_violations += c.intertwine_violations;
  into.escapes += c.escapes;
}

ParityVector pair_vector(const Slope& s, int sign) {
  ParityVector v;
  v.set({s, 0}, GaussianRational(Rational(1)));
  v.add({s, 1}, GaussianRational(Rational(sign)));
  return v;
}

}  // namespace

DecompositionReport decomposition_report(const GeneratorSet& gens, int radius, std::size_t samples,
                                         std::uint64_t seed) {
  if (radius < 1) throw DomainError("decomposition report: radius must be >= 1");
  if (samples < 1) throw DomainError("decomposition report: samples must be >= 1");
  DecompositionReport rep;
  rep.radius = radius;
  rep.samples = samples;
  rep.seed = seed;
  const auto ball = coset_ball(gens, radius);
  const auto inner = ball.inner_keys();
  rep.ball_size = ball.distance.size();
  rep.inner_size = inner.size();

  std::set<Slope> slopes;
  for (const auto& [k, d] : ball.distance) slopes.insert(k.slope);
  rep.slope_count = slopes.size();
  for (const auto& s : slopes) {
    if (ball.distance.contains({s, 0}) && ball.distance.contains({s, 1})) ++rep.double_fibers;
  }
  auto orbit = curves::orbit_ball(Slope::canonical(1, 0), gens, radius);
  rep.slopes_match_orbit = std::set<Slope>(orbit.begin(), orbit.end()) == slopes;

  for (const auto& k : inner) {
    ParityVector d;
    d.set(k, GaussianRational(Rational(1)));
    rep.delta_violations += check_vector(ball, gens, d).total();
  }

  ParityVector prev;
  for (std::size_t i = 0; i < samples; ++i) {
    std::mt19937_64 rng(split_seed(seed, i));
    std::uniform_int_distribution<std::size_t> pick(0, inner.size() - 1);
    std::uniform_int_distribution<long> num(-9, 9), den(1, 6);
    std::size_t support = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    ParityVector f;
    for (std::size_t j = 0; j < support; ++j) {
      f.set(inner[pick(rng)], GaussianRational(Rational(BigInt(num(rng)), BigInt(den(rng))),
                                               Rational(BigInt(num(rng)), BigInt(den(rng)))));
    }
    if (f.empty()) f.set(inner[pick(rng)], GaussianRational(Rational(1)));
    accumulate(rep.random, check_vector(ball, gens, f));
    if (i > 0 && !is_zero(gap::inner(project_even(f), project_odd(prev)))) ++rep.cross_orthogonality_violations;
    prev = std::move(f);
  }

  std::set<Slope> inner_slopes;
  for (const auto& k : inner) inner_slopes.insert(k.slope);
  for (const auto& s : inner_slopes) {
    const auto e = pair_vector(s, 1);
    const auto o = pair_vector(s, -1);
    for (curves::Letter l = 0; l < gens.num_letters(); ++l) {
      const auto& m = gens.letter_matrix(l);
      const Slope ms = curves::act_slope(m, s);
      if (!(act(m, e) == pair_vector(ms, 1))) ++rep.even_gset_violations;
      const auto mo = act(m, o);
      const auto target = pair_vector(ms, -1);
      if (mo == target) continue;
      if (mo + target == ParityVector{}) {
        ++rep.odd_sign_flips;
      } else {
        ++rep.odd_gset_violations;
      }
    }
  }
  return rep;
}

GeneratorSet default_generators() {
  return GeneratorSet({curves::shear_t(), curves::shear_u()}, {"T", "U"});
}

}  // namespace mfgap::parity
