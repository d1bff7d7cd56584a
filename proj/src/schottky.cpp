#include "mfgap/schottky.hpp"

#include <cmath>
#include <numbers>

namespace mfgap::schottky {

namespace {

BigInt abs_big(const BigInt& x) { return x < 0 ? BigInt(-x) : x; }

BigInt cross(const Slope& u, const Slope& v) { return u.p() * v.q() - u.q() * v.p(); }
BigInt dot(const Slope& u, const Slope& v) { return u.p() * v.p() + u.q() * v.q(); }

// atan2 of two big integers, scaled so neither overflows a double.
double big_atan2(const BigInt& y, const BigInt& x) {
  const BigInt ay = abs_big(y), ax = abs_big(x);
  unsigned bits = 0;
  if (ay != 0) bits = std::max<unsigned>(bits, boost::multiprecision::msb(ay));
  if (ax != 0) bits = std::max<unsigned>(bits, boost::multiprecision::msb(ax));
  const unsigned shift = bits > 900 ? bits - 900 : 0;
  double dy = BigInt(ay >> shift).convert_to<double>();
  double dx = BigInt(ax >> shift).convert_to<double>();
  if (y < 0) dy = -dy;
  if (x < 0) dx = -dx;
  return std::atan2(dy, dx);
}

Slope slope_of(const Rational& r) {
  return Slope::canonical(boost::multiprecision::numerator(r),
                          boost::multiprecision::denominator(r));
}

}  // namespace

bool theta_less(const Slope& u, const Slope& v) { return cross(u, v) > 0; }

double ccw_angle(const Slope& u, const Slope& v) {
  const BigInt c = cross(u, v);
  if (c == 0) return 0.0;
  const double a = big_atan2(c, dot(u, v));
  return c > 0 ? a : std::numbers::pi + a;
}

ProjInterval::ProjInterval(Slope lo, Slope hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_ == hi_) throw DomainError("projective interval endpoints must differ");
}

ProjInterval ProjInterval::from_real(const Rational& a, const Rational& b) {
  if (!(a < b)) throw DomainError("from_real needs a < b");
  return {slope_of(b), slope_of(a)};
}

bool ProjInterval::before(const Slope& x, const Slope& y) const {
  const bool x_wrapped = theta_less(x, lo_);
  const bool y_wrapped = theta_less(y, lo_);
  if (x_wrapped != y_wrapped) return !x_wrapped;
  return theta_less(x, y);
}

bool ProjInterval::contains(const Slope& x) const { return !before(hi_, x); }

bool ProjInterval::contains_interior(const Slope& x) const { return x != lo_ && before(x, hi_); }

bool ProjInterval::contains(const ProjInterval& inner) const {
  return contains(inner.lo_) && contains(inner.hi_) && !before(inner.hi_, inner.lo_);
}

bool ProjInterval::disjoint(const ProjInterval& other) const {
  return !contains(other.lo_) && !contains(other.hi_) && !other.contains(lo_) &&
         !other.contains(hi_);
}

ProjInterval ProjInterval::image(const MappingClass& m) const {
  return {curves::act_slope(m, lo_), curves::act_slope(m, hi_)};
}

double ProjInterval::length() const { return ccw_angle(lo_, hi_) / std::numbers::pi; }

QuadraticSurd QuadraticSurd::make(BigInt u, BigInt v, BigInt d, BigInt w) {
  if (w == 0) throw DomainError("surd denominator is zero");
  if (d < 0) throw DomainError("negative radicand");
  for (BigInt k = 2; k * k <= d && k <= 100000; ++k) {
    const BigInt k2 = k * k;
    while (d % k2 == 0) {
      d /= k2;
      v *= k;
    }
  }
  if (d == 1) {
    u += v;
    v = 0;
  }
  if (d == 0) v = 0;
  if (w < 0) {
    u = -u;
    v = -v;
    w = -w;
  }
  BigInt g = boost::multiprecision::gcd(abs_big(u), abs_big(v));
  g = boost::multiprecision::gcd(g, w);
  if (g > 1) {
    u /= g;
    v /= g;
    w /= g;
  }
  return {u, v, d, w};
}

double QuadraticSurd::value() const {
  return (u.convert_to<double>() + v.convert_to<double>() * std::sqrt(d.convert_to<double>())) /
         w.convert_to<double>();
}

std::string QuadraticSurd::str() const {
  std::string radical;
  if (v != 0) {
    const std::string root = "sqrt(" + d.str() + ")";
    if (v == 1) {
      radical = "+" + root;
    } else if (v == -1) {
      radical = "-" + root;
    } else {
      radical = (v > 0 ? "+" : "") + v.str() + "*" + root;
    }
  }
  std::string top = u.str() + radical;
  if (w == 1) return top;
  return "(" + top + ")/" + w.str();
}

FixedPoints fixed_points(const MappingClass& m) {
  const BigInt tr = m.trace();
  if (abs_big(tr) <= 2) throw DomainError("fixed_points needs a hyperbolic class, got trace " + tr.str());
  const BigInt disc = tr * tr - 4;
  const int s = tr > 0 ? 1 : -1;
  return {QuadraticSurd::make(m.a() - m.d(), s, disc, 2 * m.c()),
          QuadraticSurd::make(m.a() - m.d(), -s, disc, 2 * m.c())};
}

GeneratorSet SchottkyPair::generators() const { return GeneratorSet({gen_a, gen_b}); }

const ProjInterval& SchottkyPair::letter_interval(Letter l) const {
  switch (l) {
    case 0:
      return a_plus;
    case 1:
      return a_minus;
    case 2:
      return b_plus;
    case 3:
      return b_minus;
    default:
      throw DomainError("letter out of range for a Schottky pair");
  }
}

PingPongResult verify_ping_pong(const SchottkyPair& c) {
  PingPongResult out;
  auto add = [&](std::string name, bool ok, std::string detail) {
    if (!ok && !out.violation) out.violation = name + ": " + detail;
    out.transcript.push_back({std::move(name), ok, std::move(detail)});
  };
  add("trace A", abs_big(c.gen_a.trace()) > 2, "|tr A| = " + abs_big(c.gen_a.trace()).str());
  add("trace B", abs_big(c.gen_b.trace()) > 2, "|tr B| = " + abs_big(c.gen_b.trace()).str());

  const std::pair<const char*, const ProjInterval*> named[] = {
      {"a_plus", &c.a_plus}, {"a_minus", &c.a_minus}, {"b_plus", &c.b_plus}, {"b_minus", &c.b_minus}};
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const bool ok = named[i].second->disjoint(*named[j].second);
      add(std::string("disjoint ") + named[i].first + "/" + named[j].first, ok,
          ok ? "closed arcs disjoint" : "closed arcs intersect");
    }
  }
  auto inclusion = [&](const char* name, const MappingClass& m, const ProjInterval& from,
                       const ProjInterval& into) {
    const ProjInterval img = from.complement().image(m);
    const bool ok = into.contains(img);
    add(name, ok, "image [" + img.lo().str() + ", " + img.hi().str() + "] in [" + into.lo().str() +
                      ", " + into.hi().str() + "]");
  };
  inclusion("A maps complement(a_minus) into a_plus", c.gen_a, c.a_minus, c.a_plus);
  inclusion("A^-1 maps complement(a_plus) into a_minus", c.gen_a.inverse(), c.a_plus, c.a_minus);
  inclusion("B maps complement(b_minus) into b_plus", c.gen_b, c.b_minus, c.b_plus);
  inclusion("B^-1 maps complement(b_plus) into b_minus", c.gen_b.inverse(), c.b_plus, c.b_minus);
  out.certified = !out.violation.has_value();
  return out;
}

CertifiedSchottky::CertifiedSchottky(SchottkyPair pair, SchottkyPair paired, PingPongResult cert)
    : pair_(std::move(pair)),
      paired_(std::move(paired)),
      gens_(pair_.generators()),
      certificate_(std::move(cert)) {}

CertifiedSchottky CertifiedSchottky::certify(const SchottkyPair& candidate) {
  PingPongResult cert = verify_ping_pong(candidate);
  if (!cert.certified) throw DomainError("Schottky pair not certified: " + *cert.violation);
  SchottkyPair paired = candidate;
  paired.a_plus = candidate.a_minus.complement().image(candidate.gen_a);
  paired.b_plus = candidate.b_minus.complement().image(candidate.gen_b);
  return CertifiedSchottky(candidate, std::move(paired), std::move(cert));
}

SchottkyPair default_pair() {
  const MappingClass a(3, 1, 2, 1);
  const MappingClass b(1, 2, 1, 3);
  const ProjInterval a_minus = ProjInterval::from_real(Rational(-13, 25), Rational(7, 20));
  const ProjInterval b_minus = ProjInterval::from_real(Rational(-100), Rational(-7, 10));
  return {a, b, a_minus.complement().image(a), a_minus, b_minus.complement().image(b), b_minus};
}

const CertifiedSchottky& default_certified() {
  static const CertifiedSchottky h = CertifiedSchottky::certify(default_pair());
  return h;
}

HyperbolicScanReport purely_hyperbolic_scan(const SchottkyPair& pair, int max_len) {
  if (max_len < 1) throw DomainError("hyperbolic scan needs max_len >= 1");
  const GeneratorSet gens = pair.generators();
  HyperbolicScanReport rep;
  rep.max_len = max_len;
  bool have_min = false;
  curves::for_each_reduced_word(gens, max_len, [&](const Word& w, const MappingClass& m) {
    if (m.is_identity()) ++rep.identity_words;
    if (!w.is_cyclically_reduced()) return true;
    ++rep.words_checked;
    const BigInt t = abs_big(m.trace());
    if (!have_min || t < rep.min_abs_trace) {
      rep.min_abs_trace = t;
      rep.min_word = gens.format(w);
      have_min = true;
    }
    if (t <= 2) {
      ++rep.violations;
      if (rep.violating_words.size() < 16) rep.violating_words.push_back(gens.format(w));
    }
    return true;
  });
  return rep;
}

FixedSlopeScanReport fixed_slope_scan(const SchottkyPair& pair, int max_len, long coord_bound) {
  if (max_len < 1) throw DomainError("fixed slope scan needs max_len >= 1");
  const GeneratorSet gens = pair.generators();
  FixedSlopeScanReport rep;
  rep.max_len = max_len;
  rep.coord_bound = coord_bound;
  curves::for_each_reduced_word(gens, max_len, [&](const Word& w, const MappingClass& m) {
    ++rep.words_checked;
    if (m.is_identity()) {
      rep.violations.emplace_back(gens.format(w), "every slope");
      return true;
    }
    for (const auto& s : curves::fixed_slopes(m)) {
      if (abs_big(s.p()) <= coord_bound && abs_big(s.q()) <= coord_bound) {
        rep.violations.emplace_back(gens.format(w), s.str());
      }
    }
    return true;
  });
  return rep;
}

namespace {

template <class Emit>
void for_each_cover_interval(const CertifiedSchottky& h, int depth, Emit&& emit) {
  if (depth < 1) throw DomainError("limit set cover depth must be >= 1");
  const SchottkyPair& pair = h.pair();
  auto tails = [&](const Word& w, const MappingClass& m) {
    for (Letter y = 0; y < 4; ++y) {
      if (!w.empty() && y == curves::inverse_letter(w.letters.back())) continue;
      emit(w, y, pair.letter_interval(y).image(m));
    }
  };
  if (depth == 1) {
    tails(Word{}, MappingClass{});
    return;
  }
  curves::for_each_reduced_word(h.generators(), depth - 1,
                                [&](const Word& w, const MappingClass& m) {
                                  if (static_cast<int>(w.size()) == depth - 1) tails(w, m);
                                  return true;
                                });
}

}  // namespace

LimitSetCover limit_set_cover(const CertifiedSchottky& h, int depth) {
  LimitSetCover cover;
  cover.depth = depth;
  for_each_cover_interval(h, depth, [&](const Word& w, Letter y, ProjInterval iv) {
    cover.total_length += iv.length();
    cover.intervals.push_back({w, y, std::move(iv)});
  });
  return cover;
}

std::vector<double> limit_set_lengths(const CertifiedSchottky& h, int max_depth) {
  std::vector<double> out;
  for (int d = 1; d <= max_depth; ++d) {
    double total = 0;
    for_each_cover_interval(h, d, [&](const Word&, Letter, const ProjInterval& iv) {
      total += iv.length();
    });
    out.push_back(total);
  }
  return out;
}

bool in_limit_cover(const CertifiedSchottky& h, int depth, const Slope& x) {
  const SchottkyPair& pair = h.pair();
  const GeneratorSet& gens = h.generators();
  Slope cur = x;
  int prev = -1;
  for (int k = 0; k < depth; ++k) {
    int hit = -1;
    for (Letter y = 0; y < 4; ++y) {
      if (prev >= 0 && y == curves::inverse_letter(static_cast<Letter>(prev))) continue;
      if (pair.letter_interval(y).contains_interior(cur)) {
        hit = y;
        break;
      }
    }
    if (hit < 0) return false;
    cur = curves::act_slope(gens.letter_matrix(curves::inverse_letter(static_cast<Letter>(hit))), cur);
    prev = hit;
  }
  return true;
}

OrbitReduction reduce_to_fundamental_domain(const CertifiedSchottky& h, const Slope& x) {
  const SchottkyPair& pair = h.paired();
  const GeneratorSet& gens = h.generators();
  OrbitReduction out{x, Word{}};
  constexpr int kMaxSteps = 100000;
  for (int step = 0;; ++step) {
    if (step == kMaxSteps) throw DomainError("orbit reduction did not terminate for " + x.str());
    int hit = -1;
    for (Letter y = 0; y < 4; ++y) {
      if (pair.letter_interval(y).contains_interior(out.representative)) {
        hit = y;
        break;
      }
    }
    if (hit < 0) break;
    const Letter y = static_cast<Letter>(hit);
    out.representative = curves::act_slope(gens.letter_matrix(curves::inverse_letter(y)), out.representative);
    out.word.letters.push_back(y);
  }
  // Boundary points of a_plus/b_plus are identified with those of a_minus/b_minus.
  for (Letter y : {Letter{0}, Letter{2}}) {
    const ProjInterval& iv = pair.letter_interval(y);
    if (out.representative == iv.lo() || out.representative == iv.hi()) {
      out.representative = curves::act_slope(gens.letter_matrix(curves::inverse_letter(y)), out.representative);
      out.word = out.word * Word{{y}};
      break;
    }
  }
  return out;
}

}  // namespace mfgap::schottky
