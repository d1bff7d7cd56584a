#include "mfgap/curve_model.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace mfgap::curves {

namespace {

BigInt abs_big(const BigInt& x) { return x < 0 ? BigInt(-x) : x; }

}  // namespace

Slope Slope::canonical(const BigInt& p, const BigInt& q) {
  if (p == 0 && q == 0) throw DomainError("slope of the zero vector is undefined");
  BigInt g = boost::multiprecision::gcd(abs_big(p), abs_big(q));
  BigInt pp = p / g;
  BigInt qq = q / g;
  if (qq < 0 || (qq == 0 && pp < 0)) {
    pp = -pp;
    qq = -qq;
  }
  return Slope(std::move(pp), std::move(qq));
}

std::strong_ordering operator<=>(const Slope& a, const Slope& b) {
  if (a.q_ != b.q_) return a.q_ < b.q_ ? std::strong_ordering::less : std::strong_ordering::greater;
  if (a.p_ != b.p_) return a.p_ < b.p_ ? std::strong_ordering::less : std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Slope::str() const { return p_.str() + "/" + q_.str(); }

Slope Slope::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) throw DomainError("slope must be written p/q");
  return canonical(parse_bigint(text.substr(0, slash)), parse_bigint(text.substr(slash + 1)));
}

Slope canonicalize_slope(const BigInt& p, const BigInt& q) { return Slope::canonical(p, q); }

MappingClass::MappingClass() : a_(1), b_(0), c_(0), d_(1) {}

MappingClass::MappingClass(BigInt a, BigInt b, BigInt c, BigInt d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  if (a_ * d_ - b_ * c_ != 1) throw DomainError("mapping class matrix must have determinant 1");
  const BigInt& lead = a_ != 0 ? a_ : b_;
  if (lead < 0) {
    a_ = -a_;
    b_ = -b_;
    c_ = -c_;
    d_ = -d_;
  }
}

MappingClass MappingClass::inverse() const { return MappingClass(d_, -b_, -c_, a_); }

bool MappingClass::is_identity() const { return a_ == 1 && b_ == 0 && c_ == 0 && d_ == 1; }

MappingClass operator*(const MappingClass& x, const MappingClass& y) {
  return MappingClass(x.a_ * y.a_ + x.b_ * y.c_, x.a_ * y.b_ + x.b_ * y.d_,
                      x.c_ * y.a_ + x.d_ * y.c_, x.c_ * y.b_ + x.d_ * y.d_);
}

std::string MappingClass::str() const {
  std::ostringstream out;
  out << "[[" << a_ << "," << b_ << "],[" << c_ << "," << d_ << "]]";
  return out.str();
}

MappingClass identity() { return {}; }
MappingClass shear_t() { return {1, 1, 0, 1}; }
MappingClass shear_u() { return {1, 0, 1, 1}; }
MappingClass rotation_s() { return {0, -1, 1, 0}; }

Slope act_slope(const MappingClass& m, const Slope& s) {
  return Slope::canonical(m.a() * s.p() + m.b() * s.q(), m.c() * s.p() + m.d() * s.q());
}

MappingType classify(const MappingClass& m) {
  const BigInt t = abs_big(m.trace());
  if (t < 2) return MappingType::kFiniteOrder;
  if (t == 2) return MappingType::kReducible;
  return MappingType::kPseudoAnosov;
}

std::string to_string(MappingType t) {
  switch (t) {
    case MappingType::kFiniteOrder:
      return "finite_order";
    case MappingType::kReducible:
      return "reducible";
    case MappingType::kPseudoAnosov:
      return "pseudo_anosov";
  }
  return "unknown";
}

std::vector<Slope> fixed_slopes(const MappingClass& m) {
  if (m.is_identity()) throw DomainError("the identity fixes every slope");
  // c p^2 + (d - a) p q - b q^2 = 0
  if (m.c() == 0) return {Slope::canonical(1, 0)};
  const BigInt disc = m.trace() * m.trace() - 4;
  if (disc < 0) return {};
  const BigInt root = boost::multiprecision::sqrt(disc);
  if (root * root != disc) return {};
  std::vector<Slope> out;
  out.push_back(Slope::canonical(m.a() - m.d() + root, 2 * m.c()));
  if (root != 0) out.push_back(Slope::canonical(m.a() - m.d() - root, 2 * m.c()));
  std::sort(out.begin(), out.end());
  return out;
}

WeightedSlope make_weighted(Rational weight, Slope slope) {
  if (weight <= 0) throw DomainError("multicurve weight must be positive");
  return {std::move(weight), std::move(slope)};
}

WeightedSlope act_weighted(const MappingClass& m, const WeightedSlope& w) {
  return {w.weight, act_slope(m, w.slope)};
}

bool Word::is_reduced() const {
  for (std::size_t i = 1; i < letters.size(); ++i) {
    if (letters[i] == inverse_letter(letters[i - 1])) return false;
  }
  return true;
}

bool Word::is_cyclically_reduced() const {
  if (!is_reduced()) return false;
  return letters.size() < 2 || letters.front() != inverse_letter(letters.back());
}

Word Word::inverse() const {
  Word out;
  out.letters.reserve(letters.size());
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) out.letters.push_back(inverse_letter(*it));
  return out;
}

Word operator*(const Word& x, const Word& y) {
  Word out = x;
  for (Letter l : y.letters) {
    if (!out.letters.empty() && out.letters.back() == inverse_letter(l)) {
      out.letters.pop_back();
    } else {
      out.letters.push_back(l);
    }
  }
  return out;
}

GeneratorSet::GeneratorSet(std::vector<MappingClass> generators) : mats(std::move(generators)) {
  for (std::size_t i = 0; i < mats.size(); ++i) names.emplace_back(1, static_cast<char>('A' + i));
  build_letters();
}

GeneratorSet::GeneratorSet(std::vector<MappingClass> generators,
                           std::vector<std::string> generator_names)
    : mats(std::move(generators)), names(std::move(generator_names)) {
  if (names.size() != mats.size()) throw DomainError("one name per generator required");
  build_letters();
}

void GeneratorSet::build_letters() {
  if (mats.size() > 100) throw DomainError("too many generators");
  letter_mats_.clear();
  for (const auto& m : mats) {
    letter_mats_.push_back(m);
    letter_mats_.push_back(m.inverse());
  }
}

std::string GeneratorSet::letter_name(Letter l) const {
  const std::string& base = names.at(l / 2);
  if ((l & 1U) == 0) return base;
  if (base.size() == 1 && std::isupper(static_cast<unsigned char>(base[0]))) {
    return std::string(1, static_cast<char>(std::tolower(static_cast<unsigned char>(base[0]))));
  }
  return base + "^-1";
}

MappingClass GeneratorSet::evaluate(const Word& w) const {
  MappingClass m;
  for (Letter l : w.letters) m = m * letter_mats_.at(l);
  return m;
}

Slope GeneratorSet::act(const Word& w, const Slope& s) const {
  Slope out = s;
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) out = act_slope(letter_mats_.at(*it), out);
  return out;
}

std::string GeneratorSet::format(const Word& w) const {
  if (w.empty()) return "1";
  std::string out;
  for (Letter l : w.letters) out += letter_name(l);
  return out;
}

Word GeneratorSet::parse(std::string_view text) const {
  Word w;
  if (text == "1") return w;
  std::size_t pos = 0;
  while (pos < text.size()) {
    bool matched = false;
    // Longest match first so multi-character names are not split.
    std::size_t best_len = 0;
    Letter best = 0;
    for (Letter l = 0; l < num_letters(); ++l) {
      const std::string name = letter_name(l);
      if (name.size() > best_len && text.substr(pos, name.size()) == name) {
        best_len = name.size();
        best = l;
        matched = true;
      }
    }
    if (!matched) throw DomainError("cannot parse word: " + std::string(text));
    w.letters.push_back(best);
    pos += best_len;
  }
  return w;
}

namespace {

bool visit_extensions(const GeneratorSet& gens, int max_len, Word& word, const MappingClass& m,
                      const std::function<bool(const Word&, const MappingClass&)>& visit) {
  if (static_cast<int>(word.size()) >= max_len) return true;
  for (Letter l = 0; l < gens.num_letters(); ++l) {
    if (!word.empty() && l == inverse_letter(word.letters.back())) continue;
    word.letters.push_back(l);
    MappingClass next = m * gens.letter_matrix(l);
    if (visit(word, next)) visit_extensions(gens, max_len, word, next, visit);
    word.letters.pop_back();
  }
  return true;
}

}  // namespace

void for_each_reduced_word(const GeneratorSet& gens, int max_len,
                           const std::function<bool(const Word&, const MappingClass&)>& visit) {
  Word word;
  visit_extensions(gens, max_len, word, MappingClass{}, visit);
}

std::vector<Slope> orbit_ball(const Slope& base, const GeneratorSet& gens, int radius) {
  if (radius < 0) throw DomainError("orbit radius must be nonnegative");
  std::set<Slope> seen{base};
  std::vector<Slope> frontier{base};
  for (int r = 0; r < radius && !frontier.empty(); ++r) {
    std::vector<Slope> next;
    for (const auto& s : frontier) {
      for (Letter l = 0; l < gens.num_letters(); ++l) {
        Slope t = act_slope(gens.letter_matrix(l), s);
        if (seen.insert(t).second) next.push_back(std::move(t));
      }
    }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

std::vector<Word> stabilizer_scan(const Slope& s, const GeneratorSet& gens, int max_len) {
  if (max_len < 1) throw DomainError("stabilizer scan needs max_len >= 1");
  std::vector<Word> out;
  for_each_reduced_word(gens, max_len, [&](const Word& w, const MappingClass& m) {
    if (act_slope(m, s) == s) out.push_back(w);
    return true;
  });
  return out;
}

}  // namespace mfgap::curves

std::size_t std::hash<mfgap::curves::Slope>::operator()(
    const mfgap::curves::Slope& s) const noexcept {
  static const mfgap::BigInt kMod = (mfgap::BigInt(1) << 61) - 1;
  auto reduce = [](const mfgap::BigInt& x) {
    mfgap::BigInt r = x % kMod;
    if (r < 0) r += kMod;
    return r.convert_to<std::uint64_t>();
  };
  return static_cast<std::size_t>(mfgap::splitmix64(reduce(s.p()) * 31 + reduce(s.q())));
}
