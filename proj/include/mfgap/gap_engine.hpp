#pragma once

// Finitely supported vectors on orbit spaces, 2-tree decomposition, and
// spectral-gap certification for Schottky subgroups.

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mfgap/numeric.hpp"
#include "mfgap/schottky.hpp"

namespace mfgap::gap {

using curves::GeneratorSet;
using curves::MappingClass;
using curves::Slope;
using curves::Word;
using schottky::CertifiedSchottky;

template <class Scalar>
using Norm2Type = decltype(abs2(std::declval<Scalar>()));

/// Function with finite support; zero amplitudes are never stored.
template <class Key, class Scalar = std::complex<double>>
class FinSuppVector {
 public:
  using Map = std::map<Key, Scalar>;

  FinSuppVector() = default;

  void set(const Key& k, Scalar v) {
    if (is_zero(v)) {
      entries_.erase(k);
    } else {
      entries_.insert_or_assign(k, std::move(v));
    }
  }
  void add(const Key& k, const Scalar& v) {
    auto it = entries_.find(k);
    if (it == entries_.end()) {
      if (!is_zero(v)) entries_.emplace(k, v);
      return;
    }
    it->second += v;
    if (is_zero(it->second)) entries_.erase(it);
  }
  Scalar at(const Key& k) const {
    auto it = entries_.find(k);
    return it == entries_.end() ? Scalar{} : it->second;
  }

  const Map& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  Norm2Type<Scalar> norm2() const {
    Norm2Type<Scalar> s{0};
    for (const auto& [k, v] : entries_) s += abs2(v);
    return s;
  }

  /// x -> f(x) restricted to keys satisfying pred.
  template <class Pred>
  FinSuppVector restricted(Pred&& pred) const {
    FinSuppVector out;
    for (const auto& [k, v] : entries_) {
      if (pred(k)) out.entries_.emplace(k, v);
    }
    return out;
  }

  /// pi(g)f where act(x) = g.x, so (pi(g)f)(g.x) = f(x).
  template <class Act>
  FinSuppVector pushforward(Act&& act) const {
    FinSuppVector out;
    for (const auto& [k, v] : entries_) out.add(act(k), v);
    return out;
  }

  friend FinSuppVector operator+(FinSuppVector a, const FinSuppVector& b) {
    for (const auto& [k, v] : b.entries_) a.add(k, v);
    return a;
  }
  friend FinSuppVector operator-(FinSuppVector a, const FinSuppVector& b) {
    for (const auto& [k, v] : b.entries_) a.add(k, Scalar{} - v);
    return a;
  }
  friend bool operator==(const FinSuppVector&, const FinSuppVector&) = default;

 private:
  Map entries_;
};

/// <f, g> = sum f(x) conj(g(x)).
template <class Key, class Scalar>
Scalar inner(const FinSuppVector<Key, Scalar>& f, const FinSuppVector<Key, Scalar>& g) {
  Scalar s{};
  for (const auto& [k, v] : f.entries()) {
    auto it = g.entries().find(k);
    if (it != g.entries().end()) s += v * conj(it->second);
  }
  return s;
}

/// ||pi(g)f - f||^2 for an arbitrary point action.
template <class Key, class Scalar, class Act>
Norm2Type<Scalar> displacement_by(Act&& act, const FinSuppVector<Key, Scalar>& f) {
  return (f.pushforward(act) - f).norm2();
}

using SlopeVector = FinSuppVector<Slope, std::complex<double>>;
using ExactSlopeVector = FinSuppVector<Slope, GaussianRational>;

template <class Scalar>
Norm2Type<Scalar> displacement(const MappingClass& g, const FinSuppVector<Slope, Scalar>& f) {
  return displacement_by([&](const Slope& x) { return curves::act_slope(g, x); }, f);
}

/// max over K of displacement / ||f||^2. Throws DomainError for the zero vector.
double gap_ratio(const std::vector<MappingClass>& K, const SlopeVector& f);

struct TwoTree {
  Slope base;
  std::map<Word, Slope> members;  // word w -> w.base, over the support points of the class
  int explored_radius = 0;
};

/// Two support points whose orbit relation could not be settled within the budget.
class UndeterminedPair : public DomainError {
 public:
  UndeterminedPair(Slope x, Slope y, const std::string& why);
  const Slope& first() const { return x_; }
  const Slope& second() const { return y_; }

 private:
  Slope x_, y_;
};

template <class Scalar>
struct TreePiece {
  TwoTree tree;
  FinSuppVector<Slope, Scalar> part;
};

/// Orbit classes of supp(f) under H and the induced splitting f = sum f_i.
/// Points of one class are joined to its base by words of length <= max_word_len.
std::vector<TwoTree> orbit_classes(const std::vector<Slope>& points, const CertifiedSchottky& h,
                                   int max_word_len);

template <class Scalar>
std::vector<TreePiece<Scalar>> decompose_into_two_trees(const FinSuppVector<Slope, Scalar>& f,
                                                        const CertifiedSchottky& h,
                                                        int max_word_len) {
  std::vector<Slope> pts;
  for (const auto& [k, v] : f.entries()) pts.push_back(k);
  std::vector<TreePiece<Scalar>> out;
  for (auto& tree : orbit_classes(pts, h, max_word_len)) {
    TreePiece<Scalar> piece{std::move(tree), {}};
    for (const auto& [w, x] : piece.tree.members) piece.part.set(x, f.at(x));
    out.push_back(std::move(piece));
  }
  return out;
}

struct GapConstant {
  double epsilon = 0;        // 2 - sqrt(3)
  double eta = 0;            // epsilon / |K|
  double epsilon_prime = 0;  // epsilon / (2|K|), the continuous-case threshold
  std::vector<std::string> K;
  std::vector<std::string> transcript;
};

GapConstant free_group_gap_constant(const GeneratorSet& gens);
GapConstant free_group_gap_constant();

/// Largest eigenvalue of (1/4) sum_s lambda(s) on the radius-R ball of the
/// 4-regular tree. Throws DomainError for radius < 1.
double random_walk_spectral_radius(int radius);

/// Same quantity by power iteration on the full ball; exponential cost.
double random_walk_spectral_radius_full(int radius);

struct EnsembleParams {
  int max_support = 64;
  int radius = 8;               // sampling ball radius under T, U
  int stabilizer_scan_len = 4;  // words of H checked against each sampled point
  int descent_iterations = 500;
  int descent_radius = 8;       // 2-tree ball used by the adversarial descent
  double descent_step0 = 0.25;
  double descent_decay = 0.99;
};

struct GapReport {
  Slope base = Slope::canonical(0, 1);
  bool punctured = false;
  std::uint64_t seed = 0;
  EnsembleParams params;
  std::vector<std::string> K;
  double epsilon = 0;
  double eta = 0;
  int samples = 0;
  std::vector<double> ratios;  // per sample
  double min_observed_ratio = 0;
  int violations = 0;
  std::size_t points_scanned = 0;
  double adversarial_initial_ratio = 0;
  double adversarial_final_ratio = 0;
  double adversarial_tree_ratio = 0;  // same vector evaluated on the word model

  bool passed() const {
    return violations == 0 && adversarial_final_ratio >= eta - 1e-12;
  }
};

/// Random finitely supported vectors on the orbit of `base` tested against
/// K = {a, a^-1, b, b^-1}; throws DomainError naming the word if a sampled
/// point has a nontrivial stabilizer.
GapReport certify_gap(const Slope& base, const CertifiedSchottky& h, int samples, std::uint64_t seed,
                      const EnsembleParams& params = {});

/// Same harness on X_gamma - {gamma}.
GapReport punctured_orbit_gap(const Slope& gamma, const CertifiedSchottky& h, int samples,
                              std::uint64_t seed, const EnsembleParams& params = {});

/// Sampling pool: slopes within `radius` of base under T and U, sorted.
std::vector<Slope> sampling_ball(const Slope& base, int radius);

/// One ensemble draw; deterministic in (seed, index).
SlopeVector random_vector(const std::vector<Slope>& pool, int max_support, std::uint64_t seed,
                          std::uint64_t index);

struct DescentResult {
  double initial_ratio = 0;
  double final_ratio = 0;    // recomputed on slopes with the matrix action
  double tree_ratio = 0;     // on the word model
  SlopeVector minimizer;
};

/// Projected subgradient descent of max_K displacement on the unit sphere of
/// l^2 of the radius-R ball of the 2-tree at base.
DescentResult adversarial_descent(const Slope& base, const CertifiedSchottky& h,
                                  const EnsembleParams& params);

}  // namespace mfgap::gap
