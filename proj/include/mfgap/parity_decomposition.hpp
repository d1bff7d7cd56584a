#pragma once

// Even/odd decomposition of l^2(G/H) for G = PSL(2,Z), H' = <T> (stabilizer of
// the slope 1/0) and H = <T^2>, index two in H'. Cosets gH are keyed by the
// slope g.(1/0) and the parity of n in g = sigma(slope) T^n.

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mfgap/curve_model.hpp"
#include "mfgap/gap_engine.hpp"

namespace mfgap::parity {

using curves::GeneratorSet;
using curves::MappingClass;
using curves::Slope;

struct CosetKey {
  Slope slope = Slope::canonical(1, 0);
  int parity = 0;  // 0 or 1

  friend auto operator<=>(const CosetKey&, const CosetKey&) = default;
  friend bool operator==(const CosetKey&, const CosetKey&) = default;
  std::string str() const;  // "p/q:0"
};

/// The fixed section: [[p, r], [q, s]] of determinant one with 0 <= r < |p|,
/// and [[0, -1], [1, 0]] for the slope 0/1.
MappingClass section(const Slope& s);

CosetKey coset_key(const MappingClass& g);
/// Left action m . gH.
CosetKey act(const MappingClass& m, const CosetKey& k);
/// gH -> gTH.
CosetKey inversion(const CosetKey& k);

using ParityVector = gap::FinSuppVector<CosetKey, GaussianRational>;
using SlopeVector = gap::FinSuppVector<Slope, GaussianRational>;

ParityVector act(const MappingClass& m, const ParityVector& f);
ParityVector project_even(const ParityVector& f);
ParityVector project_odd(const ParityVector& f);
/// Forget the parity: F(s) = f(s, 0) + f(s, 1).
SlopeVector forget_parity(const ParityVector& f);

/// Word-metric ball of cosets around H.
struct CosetBall {
  int radius = 0;
  std::map<CosetKey, int> distance;
  bool inner(const CosetKey& k) const;  // distance <= radius - 1
  std::vector<CosetKey> inner_keys() const;
};

CosetBall coset_ball(const GeneratorSet& gens, int radius);

struct VectorCheck {
  std::size_t commute_violations = 0;     // pi(m)P f != P pi(m)f
  std::size_t projection_violations = 0;  // P+ + P- = 1, P^2 = P, <P+f, P-f> = 0
  std::size_t intertwine_violations = 0;  // forget(pi(m)f) != pi(m) forget(f)
  std::size_t escapes = 0;                // pi(m)f leaves the ball
  std::size_t total() const {
    return commute_violations + projection_violations + intertwine_violations + escapes;
  }
};

/// All checks for one vector and every letter of gens. Throws DomainError when
/// f is supported outside the inner ball.
VectorCheck check_vector(const CosetBall& ball, const GeneratorSet& gens, const ParityVector& f);

struct DecompositionReport {
  int radius = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t ball_size = 0;
  std::size_t inner_size = 0;
  std::size_t slope_count = 0;       // slopes under the ball
  std::size_t double_fibers = 0;     // slopes with both parities in the ball
  bool slopes_match_orbit = false;   // slopes under the ball == orbit ball of 1/0
  std::size_t delta_violations = 0;  // the delta vectors of the inner ball
  VectorCheck random;                // the seeded random vectors
  std::size_t cross_orthogonality_violations = 0;  // <P+f, P-h> for consecutive samples
  std::size_t even_gset_violations = 0;  // pi(m)e_s != e_{m s}
  std::size_t odd_gset_violations = 0;   // pi(m)o_s != +-o_{m s}
  std::size_t odd_sign_flips = 0;        // how often the odd sign is -1
  bool passed() const;
};

/// Needs radius >= 1 and samples >= 1.
DecompositionReport decomposition_report(const GeneratorSet& gens, int radius, std::size_t samples,
                                         std::uint64_t seed);

/// T and U, the default generators.
GeneratorSet default_generators();

}  // namespace mfgap::parity
