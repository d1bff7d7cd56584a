#include "mfgap/foliation_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace mfgap::foliation {

Rational cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

namespace {

const Point kOrigin{Rational(0), Rational(0)};

Point neg(const Point& p) { return {-p.x, -p.y}; }

Point apply(const MappingClass& m, const Point& p) {
  return {Rational(m.a()) * p.x + Rational(m.b()) * p.y, Rational(m.c()) * p.x + Rational(m.d()) * p.y};
}

poly::Polygon negated(const poly::Polygon& p) {
  poly::Polygon out;
  out.reserve(p.size());
  for (const auto& v : p) out.push_back(neg(v));
  return out;
}

Slope direction(const Point& p) {
  BigInt l = boost::multiprecision::lcm(denominator(p.x), denominator(p.y));
  return Slope::canonical(numerator(p.x) * (l / denominator(p.x)), numerator(p.y) * (l / denominator(p.y)));
}

}  // namespace

namespace poly {

Rational signed_area(const Polygon& p) {
  Rational s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % p.size()];
    s += a.x * b.y - a.y * b.x;
  }
  return s / 2;
}

Polygon cleanup(const Polygon& p) {
  Polygon q;
  for (const auto& v : p) {
    if (q.empty() || !(q.back() == v)) q.push_back(v);
  }
  while (q.size() > 1 && q.front() == q.back()) q.pop_back();
  bool changed = true;
  while (changed && q.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const auto& prev = q[(i + q.size() - 1) % q.size()];
      const auto& next = q[(i + 1) % q.size()];
      if (cross(prev, q[i], next) == 0) {
        q.erase(q.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  if (q.size() < 3) q.clear();
  return q;
}

bool is_convex_ccw(const Polygon& p) {
  if (p.size() < 3) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (cross(p[i], p[(i + 1) % p.size()], p[(i + 2) % p.size()]) <= 0) return false;
  }
  // Left turns alone allow a star that winds twice; every vertex must also be
  // on the left of every edge.
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % p.size()];
    for (const auto& v : p) {
      if (cross(a, b, v) < 0) return false;
    }
  }
  return true;
}

Polygon clip(const Polygon& p, const Point& a, const Point& b, bool keep_left) {
  Polygon out;
  if (p.empty()) return out;
  auto side = [&](const Point& v) {
    Rational s = cross(a, b, v);
    return keep_left ? s : Rational(-s);
  };
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& cur = p[i];
    const auto& nxt = p[(i + 1) % p.size()];
    Rational sc = side(cur);
    Rational sn = side(nxt);
    if (sc >= 0) out.push_back(cur);
    if ((sc > 0 && sn < 0) || (sc < 0 && sn > 0)) {
      Rational t = sc / (sc - sn);
      out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
    }
  }
  return cleanup(out);
}

Polygon intersect(const Polygon& p, const Polygon& q) {
  Polygon r = p;
  for (std::size_t i = 0; i < q.size() && !r.empty(); ++i) {
    r = clip(r, q[i], q[(i + 1) % q.size()], true);
  }
  return r;
}

std::vector<Polygon> difference(const Polygon& p, const Polygon& q) {
  std::vector<Polygon> pieces;
  Polygon rest = p;
  for (std::size_t i = 0; i < q.size() && !rest.empty(); ++i) {
    const auto& a = q[i];
    const auto& b = q[(i + 1) % q.size()];
    Polygon out = clip(rest, a, b, false);
    if (!out.empty()) pieces.push_back(std::move(out));
    rest = clip(rest, a, b, true);
  }
  return pieces;
}

Polygon convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& u, const Point& v) {
    return u.x < v.x || (u.x == v.x && u.y < v.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return {};
  Polygon h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& v : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], v) <= 0) --k;
    h[k++] = v;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return cleanup(h);
}

bool contains(const Polygon& p, const Point& x) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (cross(p[i], p[(i + 1) % p.size()], x) < 0) return false;
  }
  return !p.empty();
}

}  // namespace poly

Cell::Cell(poly::Polygon vertices) {
  auto p = poly::cleanup(vertices);
  if (p.size() < 3) throw DomainError("cell: degenerate polygon");
  if (poly::signed_area(p) < 0) std::reverse(p.begin(), p.end());
  if (!poly::is_convex_ccw(p)) throw DomainError("cell: polygon is not convex");
  if (poly::contains(p, kOrigin)) throw DomainError("cell: polygon contains the origin");
  // Canonical representative of the class in (R^2 - 0)/{+-1}.
  Point s{0, 0};
  for (const auto& v : p) {
    s.x += v.x;
    s.y += v.y;
  }
  if (s.y < 0 || (s.y == 0 && s.x < 0)) p = negated(p);
  auto first = std::min_element(p.begin(), p.end(), [](const Point& u, const Point& v) {
    return u.y < v.y || (u.y == v.y && u.x < v.x);
  });
  std::rotate(p.begin(), first, p.end());
  v_ = std::move(p);
}

Rational Cell::area() const { return poly::signed_area(v_); }

Point Cell::vertex_average() const {
  Point s{0, 0};
  for (const auto& v : v_) {
    s.x += v.x;
    s.y += v.y;
  }
  Rational n(static_cast<long>(v_.size()));
  return {s.x / n, s.y / n};
}

ProjInterval Cell::arc() const {
  // The polygon sits in an open half-plane through the origin, so the
  // origin-based cross product orders vertex directions.
  const Point* lo = &v_[0];
  const Point* hi = &v_[0];
  for (const auto& v : v_) {
    if (cross(kOrigin, *lo, v) < 0) lo = &v;
    if (cross(kOrigin, *hi, v) > 0) hi = &v;
  }
  return ProjInterval(direction(*lo), direction(*hi));
}

std::string Cell::str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < v_.size(); ++i) {
    if (i) os << ',';
    os << "[\"" << to_string(v_[i].x) << "\",\"" << to_string(v_[i].y) << "\"]";
  }
  os << ']';
  return os.str();
}

Rational thurston_measure(const Cell& c) { return c.area(); }

Cell act_cell(const MappingClass& m, const Cell& c) {
  poly::Polygon out;
  out.reserve(c.vertices().size());
  for (const auto& v : c.vertices()) out.push_back(apply(m, v));
  return Cell(std::move(out));
}

Cell act_cell(const curves::GeneratorSet& gens, const Word& w, const Cell& c) {
  return act_cell(gens.evaluate(w), c);
}

namespace {

bool arcs_apart(const Cell& a, const Cell& b) { return a.arc().disjoint(b.arc()); }

}  // namespace

Rational overlap_area(const Cell& a, const Cell& b) {
  if (arcs_apart(a, b)) return 0;
  Rational s = 0;
  auto p = poly::intersect(a.vertices(), b.vertices());
  if (!p.empty()) s += poly::signed_area(p);
  auto q = poly::intersect(a.vertices(), negated(b.vertices()));
  if (!q.empty()) s += poly::signed_area(q);
  return s;
}

std::vector<Cell> intersect(const Cell& a, const Cell& b) {
  std::vector<Cell> out;
  if (arcs_apart(a, b)) return out;
  for (const auto& other : {b.vertices(), negated(b.vertices())}) {
    auto p = poly::intersect(a.vertices(), other);
    if (!p.empty()) out.emplace_back(std::move(p));
  }
  return out;
}

std::vector<Cell> subtract(const Cell& a, const Cell& b) {
  if (arcs_apart(a, b)) return {a};
  std::vector<poly::Polygon> cur{a.vertices()};
  for (const auto& other : {b.vertices(), negated(b.vertices())}) {
    std::vector<poly::Polygon> next;
    for (const auto& p : cur) {
      if (poly::intersect(p, other).empty()) {
        next.push_back(p);
        continue;
      }
      for (auto& d : poly::difference(p, other)) next.push_back(std::move(d));
    }
    cur = std::move(next);
  }
  std::vector<Cell> out;
  for (auto& p : cur) out.emplace_back(std::move(p));
  return out;
}

WanderingResult wandering_check(const Cell& c, const CertifiedSchottky& h, int max_len) {
  WanderingResult r;
  if (max_len <= 0) return r;
  const auto& gens = h.generators();
  const ProjInterval arc = c.arc();
  curves::for_each_reduced_word(gens, max_len, [&](const Word& w, const MappingClass& m) {
    if (!r.wandering) return false;
    ++r.words_checked;
    if (arc.image(m).disjoint(arc)) return true;
    if (overlap_area(act_cell(m, c), c) > 0) {
      r.wandering = false;
      r.witness = w;
      r.witness_name = gens.format(w);
      return false;
    }
    return true;
  });
  return r;
}

std::size_t HRelatedCover::piece_count() const {
  std::size_t n = 0;
  for (const auto& r : rounds) n += r.pieces.size();
  return n;
}

UncoveredRegion::UncoveredRegion(std::vector<Cell> leftover, Rational area)
    : DomainError("H-related cover: " + std::to_string(leftover.size()) +
                  " uncovered piece(s), area " + to_string(area)),
      leftover_(std::move(leftover)),
      area_(std::move(area)) {}

namespace {

struct Translate {
  Word word;
  MappingClass mat;
};

// The identity followed by every nonempty reduced word of length <= max_len.
std::vector<Translate> translates(const CertifiedSchottky& h, int max_len) {
  std::vector<Translate> out{{Word{}, MappingClass{}}};
  curves::for_each_reduced_word(h.generators(), max_len, [&](const Word& w, const MappingClass& m) {
    out.push_back({w, m});
    return true;
  });
  return out;
}

void require_disjoint(const std::vector<Cell>& cells, const char* what) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      if (overlap_area(cells[i], cells[j]) > 0) {
        throw DomainError(std::string(what) + ": cells " + std::to_string(i) + " and " +
                          std::to_string(j) + " overlap");
      }
    }
  }
}

}  // namespace

HRelatedCover build_h_related_cover(const std::vector<Cell>& K, const std::vector<Cell>& bases,
                                    const CertifiedSchottky& h, int max_len) {
  if (max_len < 0) throw DomainError("H-related cover: max_len must be >= 0");
  require_disjoint(K, "H-related cover: K");
  for (std::size_t k = 0; k < bases.size(); ++k) {
    auto w = wandering_check(bases[k], h, 2 * max_len);
    if (!w.wandering) {
      throw DomainError("H-related cover: base " + std::to_string(k) + " is not wandering (word " +
                        w.witness_name + ")");
    }
  }
  const auto words = translates(h, max_len);
  HRelatedCover cover;
  std::vector<Cell> remaining = K;
  for (std::size_t k = 0; k < bases.size() && !remaining.empty(); ++k) {
    CoverRound round;
    round.base = k;
    std::vector<Cell> used;
    for (const auto& t : words) {
      Cell image = act_cell(t.mat, bases[k]);
      bool hit = false;
      for (const auto& piece : remaining) {
        for (auto& c : intersect(piece, image)) {
          round.pieces.push_back({t.word, std::move(c)});
          hit = true;
        }
      }
      if (hit) used.push_back(std::move(image));
    }
    if (round.pieces.empty()) continue;
    for (const auto& image : used) {
      std::vector<Cell> next;
      for (const auto& piece : remaining) {
        for (auto& c : subtract(piece, image)) next.push_back(std::move(c));
      }
      remaining = std::move(next);
    }
    cover.rounds.push_back(std::move(round));
  }
  if (!remaining.empty()) {
    Rational a = 0;
    for (const auto& c : remaining) a += c.area();
    throw UncoveredRegion(std::move(remaining), a);
  }
  return cover;
}

CoverVerification verify_cover(const HRelatedCover& cover, const std::vector<Cell>& K,
                               const std::vector<Cell>& bases, const CertifiedSchottky& h) {
  CoverVerification v;
  std::vector<const Cell*> all;
  v.pieces_in_translates = true;
  for (const auto& r : cover.rounds) {
    if (r.base >= bases.size()) {
      v.pieces_in_translates = false;
      continue;
    }
    for (const auto& p : r.pieces) {
      all.push_back(&p.cell);
      Cell image = act_cell(h.generators(), p.word, bases[r.base]);
      if (overlap_area(p.cell, image) != p.cell.area()) v.pieces_in_translates = false;
    }
  }
  v.pairwise_disjoint = true;
  for (std::size_t i = 0; i < all.size() && v.pairwise_disjoint; ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (overlap_area(*all[i], *all[j]) > 0) {
        v.pairwise_disjoint = false;
        break;
      }
    }
  }
  v.covered_area = 0;
  for (const auto* p : all) {
    for (const auto& k : K) v.covered_area += overlap_area(*p, k);
  }
  v.k_area = 0;
  for (const auto& k : K) v.k_area += k.area();
  v.area_identity = v.covered_area == v.k_area;
  return v;
}

StepFunction::StepFunction(std::vector<std::pair<Cell, GaussianRational>> p) : pieces(std::move(p)) {
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    for (std::size_t j = i + 1; j < pieces.size(); ++j) {
      if (overlap_area(pieces[i].first, pieces[j].first) > 0) {
        throw DomainError("step function: pieces " + std::to_string(i) + " and " + std::to_string(j) +
                          " overlap");
      }
    }
  }
}

Rational StepFunction::norm2() const {
  Rational s = 0;
  for (const auto& [c, a] : pieces) s += abs2(a) * c.area();
  return s;
}

StepFunction StepFunction::pushforward(const MappingClass& g) const {
  StepFunction out;
  out.pieces.reserve(pieces.size());
  for (const auto& [c, a] : pieces) out.pieces.emplace_back(act_cell(g, c), a);
  return out;
}

namespace {

// Re sum_{i,j} a_i conj(b_j) |p_i cap q_j|.
Rational real_inner(const std::vector<std::pair<Cell, GaussianRational>>& p,
                    const std::vector<std::pair<Cell, GaussianRational>>& q) {
  Rational s = 0;
  for (const auto& [cp, ap] : p) {
    for (const auto& [cq, aq] : q) {
      Rational o = overlap_area(cp, cq);
      if (o != 0) s += (ap * conj(aq)).re * o;
    }
  }
  return s;
}

}  // namespace

Rational displacement(const MappingClass& g, const StepFunction& f) {
  auto pushed = f.pushforward(g);
  return 2 * f.norm2() - 2 * real_inner(pushed.pieces, f.pieces);
}

Rational CellAmplitudes::norm2() const {
  Rational s = 0;
  for (const auto& [w, m] : mass) s += m;
  return s;
}

namespace {

// The translate word holding each piece of f.
std::vector<Word> resolve_pieces(const StepFunction& f, const Cell& base, const CertifiedSchottky& h,
                                 int max_len) {
  const auto words = translates(h, max_len);
  std::vector<Cell> images;
  images.reserve(words.size());
  for (const auto& t : words) images.push_back(act_cell(t.mat, base));
  std::vector<Word> out;
  for (std::size_t i = 0; i < f.pieces.size(); ++i) {
    const Cell& c = f.pieces[i].first;
    std::optional<std::size_t> found;
    for (std::size_t k = 0; k < images.size(); ++k) {
      Rational o = overlap_area(c, images[k]);
      if (o == 0) continue;
      if (o != c.area() || found) {
        throw DomainError("cell amplitudes: piece " + std::to_string(i) +
                          " straddles translates; refine the pieces first");
      }
      found = k;
    }
    if (!found) {
      throw DomainError("cell amplitudes: piece " + std::to_string(i) + " lies in no translate of length <= " +
                        std::to_string(max_len));
    }
    out.push_back(words[*found].word);
  }
  return out;
}

}  // namespace

CellAmplitudes cell_amplitudes(const StepFunction& f, const Cell& base, const CertifiedSchottky& h,
                               int max_len) {
  auto words = resolve_pieces(f, base, h, max_len);
  CellAmplitudes out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& [c, a] = f.pieces[i];
    out.mass[words[i]] += abs2(a) * c.area();
  }
  for (const auto& [w, m] : out.mass) out.vector.set(w, std::sqrt(to_double(m)));
  return out;
}

bool at_least_epsilon_prime(const Rational& r) {
  // r >= (2 - sqrt 3)/8  <=>  8r - 2 >= -sqrt 3.
  Rational t = 8 * r - 2;
  if (t >= 0) return true;
  return t * t <= 3;
}

ContinuousGapReport continuous_gap_check(const StepFunction& f, const Cell& base,
                                         const CertifiedSchottky& h, int max_len,
                                         std::vector<std::vector<ChainTerm>>* terms) {
  ContinuousGapReport rep;
  rep.epsilon_prime = (2.0 - std::sqrt(3.0)) / 8.0;
  rep.norm2 = f.norm2();
  if (rep.norm2 == 0) throw DomainError("continuous gap: f is zero");
  auto where = resolve_pieces(f, base, h, max_len);
  const auto& gens = h.generators();
  if (terms) terms->clear();
  Rational best = 0;
  rep.chain_sum_matches = true;
  for (Letter l = 0; l < gens.num_letters(); ++l) {
    const MappingClass& g = gens.letter_matrix(l);
    rep.K.push_back(gens.letter_name(l));
    Rational d = displacement(g, f);
    rep.displacement.push_back(d);
    if (d > best) best = d;

    // Group pi(g)f and f by translate: piece i of f sits in where[i].U, its
    // image in (g where[i]).U.
    Word gw{{l}};
    std::map<Word, std::pair<std::vector<std::pair<Cell, GaussianRational>>,
                             std::vector<std::pair<Cell, GaussianRational>>>>
        by;
    for (std::size_t i = 0; i < f.pieces.size(); ++i) {
      const auto& [c, a] = f.pieces[i];
      by[gw * where[i]].first.emplace_back(act_cell(g, c), a);
      by[where[i]].second.emplace_back(c, a);
    }
    std::vector<ChainTerm> row;
    Rational total = 0;
    double tree = 0;
    for (auto& [w, pq] : by) {
      ChainTerm t;
      t.word = w;
      t.pushed = 0;
      t.own = 0;
      for (const auto& [c, a] : pq.first) t.pushed += abs2(a) * c.area();
      for (const auto& [c, a] : pq.second) t.own += abs2(a) * c.area();
      t.lhs = t.pushed + t.own - 2 * real_inner(pq.first, pq.second);
      total += t.lhs;
      // lhs >= (sqrt P - sqrt Q)^2  <=>  2 sqrt(PQ) >= P + Q - lhs.
      Rational rhs = t.pushed + t.own - t.lhs;
      Rational four_pq = 4 * t.pushed * t.own;
      t.holds = rhs <= 0 || four_pq >= rhs * rhs;
      t.equality = rhs >= 0 && four_pq == rhs * rhs;
      double s = std::sqrt(to_double(t.pushed)) - std::sqrt(to_double(t.own));
      tree += s * s;
      ++rep.chain_terms;
      if (!t.holds) ++rep.chain_violations;
      if (t.equality) ++rep.chain_equalities;
      row.push_back(std::move(t));
    }
    if (total != d) rep.chain_sum_matches = false;
    rep.tree_displacement.push_back(tree);
    if (terms) terms->push_back(std::move(row));
  }
  Rational ratio = best / rep.norm2;
  rep.max_ratio = to_double(ratio);
  rep.gap_holds = at_least_epsilon_prime(ratio);
  return rep;
}

double limit_cone_mass(const CertifiedSchottky& h, double r_in, double r_out, int depth) {
  if (!(r_in > 0 && r_in < r_out)) throw DomainError("limit cone mass: need 0 < r_in < r_out");
  if (depth < 1) throw DomainError("limit cone mass: depth must be >= 1");
  auto lengths = schottky::limit_set_lengths(h, depth);
  double radians = lengths.back() * std::numbers::pi;
  return (r_out * r_out - r_in * r_in) / 2.0 * radians;
}

std::vector<ProjInterval> fundamental_gaps(const CertifiedSchottky& h) {
  auto cover = schottky::limit_set_cover(h, 1);
  std::vector<ProjInterval> iv;
  for (const auto& c : cover.intervals) iv.push_back(c.interval);
  std::sort(iv.begin(), iv.end(),
            [](const ProjInterval& a, const ProjInterval& b) { return schottky::theta_less(a.lo(), b.lo()); });
  std::vector<ProjInterval> gaps;
  for (std::size_t i = 0; i < iv.size(); ++i) gaps.emplace_back(iv[i].hi(), iv[(i + 1) % iv.size()].lo());
  return gaps;
}

bool avoids_limit_cone(const Cell& c, const CertifiedSchottky& h, int depth) {
  const auto arc = c.arc();
  for (const auto& iv : schottky::limit_set_cover(h, depth).intervals) {
    if (!iv.interval.disjoint(arc)) return false;
  }
  return true;
}

namespace {

using Rng = std::mt19937_64;

Rational rand_rational(Rng& rng, long lo, long hi, long den) {
  std::uniform_int_distribution<long> d(lo * den, hi * den);
  return Rational(BigInt(d(rng)), BigInt(den));
}

Point vec(const Slope& s) { return {Rational(s.p()), Rational(s.q())}; }

// Random convex polygon in the cone over the interior of `gap`, radii in [1, 4]
// measured in the max norm.
poly::Polygon random_cone_polygon(const ProjInterval& gap, Rng& rng) {
  Point u = vec(gap.lo());
  Point v = vec(gap.hi());
  if (cross(kOrigin, u, v) < 0) v = neg(v);
  const long den = 1000;
  std::uniform_int_distribution<long> pick(50, 900);
  long t0 = pick(rng);
  long width = std::uniform_int_distribution<long>(40, 150)(rng);
  long t1 = std::min(950L, t0 + width);
  long r0 = std::uniform_int_distribution<long>(1000, 3000)(rng);
  long r1 = std::min(4000L, r0 + std::uniform_int_distribution<long>(300, 1000)(rng));
  int n = std::uniform_int_distribution<int>(3, 6)(rng);
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) {
    Rational t(BigInt(std::uniform_int_distribution<long>(t0, t1)(rng)), BigInt(den));
    Rational rho(BigInt(std::uniform_int_distribution<long>(r0, r1)(rng)), BigInt(den));
    Point d{(1 - t) * u.x + t * v.x, (1 - t) * u.y + t * v.y};
    Rational m = std::max(abs(d.x), abs(d.y));
    pts.push_back({rho * d.x / m, rho * d.y / m});
  }
  return poly::convex_hull(std::move(pts));
}

poly::Polygon box(const Rational& x0, const Rational& x1, const Rational& y0, const Rational& y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

Word random_word(Rng& rng, int min_len, int max_len, std::size_t letters) {
  int len = std::uniform_int_distribution<int>(min_len, max_len)(rng);
  Word w;
  std::uniform_int_distribution<int> pick(0, static_cast<int>(letters) - 1);
  while (static_cast<int>(w.size()) < len) {
    auto l = static_cast<Letter>(pick(rng));
    if (!w.empty() && w.letters.back() == curves::inverse_letter(l)) continue;
    w.letters.push_back(l);
  }
  return w;
}

std::optional<CoverInstance> try_cover_instance(const CertifiedSchottky& h, Rng& rng) {
  const auto gaps = fundamental_gaps(h);
  const auto& gap = gaps[std::uniform_int_distribution<std::size_t>(0, gaps.size() - 1)(rng)];
  CoverInstance inst;
  auto k0 = random_cone_polygon(gap, rng);
  if (k0.empty()) return std::nullopt;
  Rational x0 = k0[0].x, x1 = k0[0].x, y0 = k0[0].y, y1 = k0[0].y;
  for (const auto& p : k0) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  Rational xm = (x0 + x1) / 2, ym = (y0 + y1) / 2;
  Rational dx = (x1 - x0) / 20, dy = (y1 - y0) / 20;
  auto k1 = poly::intersect(random_cone_polygon(gap, rng), box(x0, x1, y0, y1));
  if (k1.empty()) return std::nullopt;
  inst.shift = random_word(rng, 1, 2, h.generators().num_letters());
  try {
    inst.bases = {Cell(box(x0, xm + dx, y0, ym + dy)), Cell(box(xm - dx, x1, y0, ym + dy)),
                  Cell(box(x0, xm + dx, ym - dy, y1)), Cell(box(xm - dx, x1, ym - dy, y1))};
    Cell c0(k0);
    Cell c1 = act_cell(h.generators(), inst.shift, Cell(k1));
    if (overlap_area(c0, c1) > 0) return std::nullopt;
    inst.K = {c0, c1};
  } catch (const DomainError&) {
    return std::nullopt;
  }
  for (const auto& c : inst.K) {
    if (!avoids_limit_cone(c, h, 3)) return std::nullopt;
  }
  for (const auto& b : inst.bases) {
    if (!wandering_check(b, h, 2 * inst.max_len).wandering) return std::nullopt;
  }
  return inst;
}

}  // namespace

CoverInstance random_cover_instance(const CertifiedSchottky& h, std::uint64_t seed, std::uint64_t index) {
  Rng rng(split_seed(seed, index));
  for (int attempt = 0; attempt < 200; ++attempt) {
    if (auto inst = try_cover_instance(h, rng)) return *inst;
  }
  throw DomainError("random cover instance: no valid instance after 200 attempts");
}

StepInstance random_step_instance(const CertifiedSchottky& h, std::uint64_t seed, std::uint64_t index) {
  Rng rng(split_seed(seed, index ^ 0x57e9f00dULL));
  const auto gaps = fundamental_gaps(h);
  const auto& gens = h.generators();
  for (int attempt = 0; attempt < 200; ++attempt) {
    const auto& gap = gaps[std::uniform_int_distribution<std::size_t>(0, gaps.size() - 1)(rng)];
    auto bp = random_cone_polygon(gap, rng);
    if (bp.empty()) continue;
    Cell base(bp);
    StepInstance inst{base, {}, 3};
    if (!wandering_check(base, h, 2 * inst.max_len + 2).wandering) continue;
    std::vector<Word> words{Word{}};
    int extra = std::uniform_int_distribution<int>(1, 3)(rng);
    while (static_cast<int>(words.size()) <= extra) {
      Word w = random_word(rng, 1, 2, gens.num_letters());
      if (std::find(words.begin(), words.end(), w) == words.end()) words.push_back(w);
    }
    std::vector<std::pair<Cell, GaussianRational>> pieces;
    auto amp = [&] {
      return GaussianRational(rand_rational(rng, -3, 3, 4), rand_rational(rng, -3, 3, 4));
    };
    for (const auto& w : words) {
      Cell t = act_cell(gens, w, base);
      Point c = t.vertex_average();
      Point dir{Rational(std::uniform_int_distribution<long>(-5, 5)(rng)),
                Rational(std::uniform_int_distribution<long>(1, 5)(rng))};
      Point c2{c.x + dir.x, c.y + dir.y};
      for (bool left : {true, false}) {
        auto half = poly::clip(t.vertices(), c, c2, left);
        if (!half.empty()) pieces.emplace_back(Cell(half), amp());
      }
    }
    inst.f = StepFunction(std::move(pieces));
    if (inst.f.norm2() == 0) continue;
    return inst;
  }
  throw DomainError("random step instance: no valid instance after 200 attempts");
}

}  // namespace mfgap::foliation
