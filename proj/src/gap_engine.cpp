#include "mfgap/gap_engine.hpp"

#include <array>
#include <cmath>
#include <random>
#include <set>

#include "mfgap/parallel.hpp"

namespace mfgap::gap {

namespace {

constexpr double kRatioSlack = 1e-12;

// Ball of radius R in the free group on two letters, vertices indexed by
// reduced words; nbr[v][s] is the index of s.w or -1 outside the ball.
struct CayleyBall {
  std::vector<Word> words;
  std::vector<std::array<int, 4>> nbr;
};

CayleyBall cayley_ball(int radius) {
  CayleyBall ball;
  std::map<Word, int> index;
  ball.words.push_back(Word{});
  index.emplace(Word{}, 0);
  std::size_t level_begin = 0;
  for (int len = 1; len <= radius; ++len) {
    const std::size_t level_end = ball.words.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (curves::Letter s = 0; s < 4; ++s) {
        const Word& w = ball.words[i];
        if (!w.empty() && w.letters.back() == curves::inverse_letter(s)) continue;
        Word next = w;
        next.letters.push_back(s);
        index.emplace(next, static_cast<int>(ball.words.size()));
        ball.words.push_back(std::move(next));
      }
    }
    level_begin = level_end;
  }
  ball.nbr.resize(ball.words.size());
  for (std::size_t v = 0; v < ball.words.size(); ++v) {
    for (curves::Letter s = 0; s < 4; ++s) {
      auto it = index.find(Word{{s}} * ball.words[v]);
      ball.nbr[v][s] = it == index.end() ? -1 : it->second;
    }
  }
  return ball;
}

double norm2(const std::vector<double>& f) {
  double s = 0;
  for (double x : f) s += x * x;
  return s;
}

// ||lambda(s)f - f||^2 for f supported on the ball.
double tree_displacement(const CayleyBall& ball, const std::vector<double>& f, curves::Letter s) {
  const curves::Letter back = curves::inverse_letter(s);
  double overlap = 0;
  for (std::size_t v = 0; v < f.size(); ++v) {
    const int u = ball.nbr[v][back];
    if (u >= 0) overlap += f[v] * f[static_cast<std::size_t>(u)];
  }
  return 2 * norm2(f) - 2 * overlap;
}

std::pair<double, curves::Letter> tree_max_ratio(const CayleyBall& ball, const std::vector<double>& f) {
  const double n = norm2(f);
  double best = -1;
  curves::Letter arg = 0;
  for (curves::Letter s = 0; s < 4; ++s) {
    const double d = tree_displacement(ball, f, s) / n;
    if (d > best) {
      best = d;
      arg = s;
    }
  }
  return {best, arg};
}

std::vector<MappingClass> letter_matrices(const GeneratorSet& gens) {
  std::vector<MappingClass> out;
  for (curves::Letter l = 0; l < gens.num_letters(); ++l) out.push_back(gens.letter_matrix(l));
  return out;
}

std::vector<std::string> letter_names(const GeneratorSet& gens) {
  std::vector<std::string> out;
  for (curves::Letter l = 0; l < gens.num_letters(); ++l) out.push_back(gens.letter_name(l));
  return out;
}

// Power iteration with a +I shift on a symmetric operator; returns the top
// eigenvalue of the unshifted operator via the Rayleigh quotient.
template <class Apply>
double shifted_power_iteration(std::vector<double> x, Apply&& apply) {
  double prev = 0;
  std::vector<double> y(x.size());
  for (int it = 0; it < 1000000; ++it) {
    const double nx = std::sqrt(norm2(x));
    for (double& v : x) v /= nx;
    apply(x, y);
    double rq = 0;
    for (std::size_t i = 0; i < x.size(); ++i) rq += x[i] * y[i];
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
    if (it > 0 && std::abs(rq - prev) <= 1e-10 * std::abs(rq)) return rq;
    prev = rq;
  }
  return prev;
}

}  // namespace

double gap_ratio(const std::vector<MappingClass>& K, const SlopeVector& f) {
  if (f.empty()) throw DomainError("gap ratio of the zero vector is undefined");
  const double n = f.norm2();
  double best = 0;
  for (const auto& g : K) best = std::max(best, displacement(g, f) / n);
  return best;
}

UndeterminedPair::UndeterminedPair(Slope x, Slope y, const std::string& why)
    : DomainError("undetermined pair " + x.str() + ", " + y.str() + ": " + why),
      x_(std::move(x)),
      y_(std::move(y)) {}

std::vector<TwoTree> orbit_classes(const std::vector<Slope>& points, const CertifiedSchottky& h,
                                   int max_word_len) {
  if (max_word_len < 0) throw DomainError("word budget must be nonnegative");
  std::map<Slope, std::vector<std::pair<Slope, Word>>> by_rep;
  std::vector<Slope> rep_order;
  for (const auto& x : points) {
    auto red = schottky::reduce_to_fundamental_domain(h, x);
    auto [it, fresh] = by_rep.try_emplace(red.representative);
    if (fresh) rep_order.push_back(red.representative);
    it->second.emplace_back(x, std::move(red.word));
  }
  std::vector<TwoTree> out;
  for (const auto& rep : rep_order) {
    const auto& members = by_rep[rep];
    TwoTree tree{members.front().first, {}, max_word_len};
    const Word to_rep = members.front().second.inverse();
    for (const auto& [x, w] : members) {
      Word link = w * to_rep;
      if (static_cast<int>(link.size()) > max_word_len) {
        throw UndeterminedPair(tree.base, x,
                               "connecting word has length " + std::to_string(link.size()) +
                                   " > budget " + std::to_string(max_word_len));
      }
      if (h.generators().act(link, tree.base) != x) {
        throw DomainError("orbit reduction produced an inconsistent word for " + x.str());
      }
      tree.members.emplace(std::move(link), x);
    }
    out.push_back(std::move(tree));
  }
  return out;
}

GapConstant free_group_gap_constant(const GeneratorSet& gens) {
  GapConstant c;
  c.epsilon = 2 - std::sqrt(3.0);
  c.K = letter_names(gens);
  const double m = static_cast<double>(c.K.size());
  c.eta = c.epsilon / m;
  c.epsilon_prime = c.epsilon / (2 * m);
  c.transcript = {
      "K = {" + c.K[0] + ", " + c.K[1] + ", " + c.K[2] + ", " + c.K[3] + "}, |K| = 4",
      "sum_s ||lambda(s)f - f||^2 = 8||f||^2 - 2<sum_s lambda(s)f, f>",
      "||(1/4) sum_s lambda(s)|| = sqrt(3)/2 (Kesten, 4-regular tree)",
      "so sum_s ||lambda(s)f - f||^2 >= (8 - 4 sqrt(3))||f||^2",
      "max_s ||lambda(s)f - f||^2 >= (2 - sqrt(3))||f||^2, epsilon = 2 - sqrt(3)",
      "a vector split over 2-trees keeps a tree carrying >= 1/|K| of the bound: eta = epsilon/|K|",
      "continuous case doubles the generating set: epsilon' = epsilon/(2|K|)",
  };
  return c;
}

GapConstant free_group_gap_constant() {
  return free_group_gap_constant(schottky::default_certified().generators());
}

double random_walk_spectral_radius(int radius) {
  if (radius < 1) throw DomainError("spectral radius needs radius >= 1");
  // Radial reduction in the sqrt(level size) basis: symmetric tridiagonal
  // with couplings 1/2 (root) and sqrt(3)/4 further out.
  const std::size_t n = static_cast<std::size_t>(radius) + 1;
  std::vector<double> off(n - 1, std::sqrt(3.0) / 4);
  off[0] = 0.5;
  std::vector<double> x(n, 1.0);
  return shifted_power_iteration(std::move(x), [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::size_t k = 0; k < n; ++k) {
      double s = 0;
      if (k > 0) s += off[k - 1] * v[k - 1];
      if (k + 1 < n) s += off[k] * v[k + 1];
      out[k] = s;
    }
  });
}

double random_walk_spectral_radius_full(int radius) {
  if (radius < 1) throw DomainError("spectral radius needs radius >= 1");
  const CayleyBall ball = cayley_ball(radius);
  std::vector<double> x(ball.words.size(), 1.0);
  return shifted_power_iteration(std::move(x), [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      double s = 0;
      for (int u : ball.nbr[i]) {
        if (u >= 0) s += v[static_cast<std::size_t>(u)];
      }
      out[i] = s / 4;
    }
  });
}

std::vector<Slope> sampling_ball(const Slope& base, int radius) {
  return curves::orbit_ball(base, GeneratorSet({curves::shear_t(), curves::shear_u()}, {"T", "U"}),
                            radius);
}

SlopeVector random_vector(const std::vector<Slope>& pool, int max_support, std::uint64_t seed,
                          std::uint64_t index) {
  if (pool.empty()) throw DomainError("empty sampling pool");
  std::mt19937_64 rng(split_seed(seed, index));
  const int cap = static_cast<int>(std::min<std::size_t>(pool.size(), static_cast<std::size_t>(max_support)));
  std::uniform_int_distribution<int> size_dist(1, cap);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int k = size_dist(rng);
  std::set<std::size_t> chosen;
  while (static_cast<int>(chosen.size()) < k) chosen.insert(pick(rng));
  SlopeVector f;
  for (std::size_t i : chosen) {
    const double re = normal(rng);
    const double im = normal(rng);
    f.set(pool[i], {re, im});
  }
  if (f.empty()) f.set(pool[*chosen.begin()], {1.0, 0.0});
  return f;
}

DescentResult adversarial_descent(const Slope& base, const CertifiedSchottky& h,
                                  const EnsembleParams& params) {
  const CayleyBall ball = cayley_ball(params.descent_radius);
  const std::size_t n = ball.words.size();
  std::vector<double> f(n, 1.0 / std::sqrt(static_cast<double>(n)));
  DescentResult out;
  out.initial_ratio = tree_max_ratio(ball, f).first;
  double step = params.descent_step0;
  std::vector<double> grad(n);
  for (int it = 0; it < params.descent_iterations; ++it) {
    const curves::Letter s = tree_max_ratio(ball, f).second;
    const curves::Letter t = curves::inverse_letter(s);
    for (std::size_t v = 0; v < n; ++v) {
      const int a = ball.nbr[v][s];
      const int b = ball.nbr[v][t];
      grad[v] = 4 * f[v] - 2 * ((a >= 0 ? f[static_cast<std::size_t>(a)] : 0.0) +
                                (b >= 0 ? f[static_cast<std::size_t>(b)] : 0.0));
    }
    double radial = 0;
    for (std::size_t v = 0; v < n; ++v) radial += grad[v] * f[v];
    for (std::size_t v = 0; v < n; ++v) f[v] -= step * (grad[v] - radial * f[v]);
    const double nf = std::sqrt(norm2(f));
    for (double& x : f) x /= nf;
    step *= params.descent_decay;
  }
  out.tree_ratio = tree_max_ratio(ball, f).first;

  // Map words to slopes in length order: w = s.w' with w' one letter shorter.
  const GeneratorSet& gens = h.generators();
  std::vector<Slope> where(n, base);
  for (std::size_t v = 1; v < n; ++v) {
    const curves::Letter first = ball.words[v].letters.front();
    const int rest = ball.nbr[v][curves::inverse_letter(first)];
    where[v] = curves::act_slope(gens.letter_matrix(first), where[static_cast<std::size_t>(rest)]);
  }
  for (std::size_t v = 0; v < n; ++v) out.minimizer.set(where[v], {f[v], 0.0});
  if (out.minimizer.size() != n) throw DomainError("orbit map is not injective on the descent ball");
  out.final_ratio = gap_ratio(letter_matrices(gens), out.minimizer);
  return out;
}

namespace {

GapReport run_harness(const Slope& base, const CertifiedSchottky& h, int samples, std::uint64_t seed,
                      const EnsembleParams& params, bool punctured) {
  if (samples < 1) throw DomainError("samples must be >= 1");
  if (params.max_support < 1 || params.max_support > 64) throw DomainError("support size must be in [1, 64]");
  if (params.radius < 1 || params.radius > 8) throw DomainError("ball radius must be in [1, 8]");
  const GeneratorSet& gens = h.generators();
  const GapConstant c = free_group_gap_constant(gens);
  const std::vector<MappingClass> K = letter_matrices(gens);

  std::vector<Slope> pool = sampling_ball(base, params.radius);
  if (punctured) std::erase(pool, base);

  GapReport rep;
  rep.base = base;
  rep.punctured = punctured;
  rep.seed = seed;
  rep.params = params;
  rep.K = c.K;
  rep.epsilon = c.epsilon;
  rep.eta = c.eta;
  rep.samples = samples;

  std::vector<SlopeVector> draws(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    draws[static_cast<std::size_t>(i)] = random_vector(pool, params.max_support, seed, static_cast<std::uint64_t>(i));
  }
  std::set<Slope> support;
  for (const auto& f : draws) {
    for (const auto& [x, v] : f.entries()) support.insert(x);
  }
  std::vector<Slope> support_list(support.begin(), support.end());
  std::vector<std::string> bad(support_list.size());
  parallel_for(support_list.size(), [&](std::size_t i) {
    const auto stab = curves::stabilizer_scan(support_list[i], gens, params.stabilizer_scan_len);
    if (!stab.empty()) bad[i] = gens.format(stab.front());
  });
  for (std::size_t i = 0; i < bad.size(); ++i) {
    if (!bad[i].empty()) {
      throw DomainError("nontrivial stabilizer at " + support_list[i].str() + ": word " + bad[i]);
    }
  }
  rep.points_scanned = support_list.size();

  rep.ratios.assign(draws.size(), 0.0);
  parallel_for(draws.size(), [&](std::size_t i) { rep.ratios[i] = gap_ratio(K, draws[i]); });
  rep.min_observed_ratio = rep.ratios.front();
  for (double r : rep.ratios) {
    rep.min_observed_ratio = std::min(rep.min_observed_ratio, r);
    if (r < rep.eta - kRatioSlack) ++rep.violations;
  }

  Slope descent_base = base;
  if (punctured) {
    const Slope gamma_rep = schottky::reduce_to_fundamental_domain(h, base).representative;
    bool found = false;
    for (const auto& x : pool) {
      if (schottky::reduce_to_fundamental_domain(h, x).representative != gamma_rep) {
        descent_base = x;
        found = true;
        break;
      }
    }
    if (!found) throw DomainError("no descent base off the orbit of the puncture");
  }
  const DescentResult d = adversarial_descent(descent_base, h, params);
  rep.adversarial_initial_ratio = d.initial_ratio;
  rep.adversarial_final_ratio = d.final_ratio;
  rep.adversarial_tree_ratio = d.tree_ratio;
  return rep;
}

}  // namespace

GapReport certify_gap(const Slope& base, const CertifiedSchottky& h, int samples, std::uint64_t seed,
                      const EnsembleParams& params) {
  return run_harness(base, h, samples, seed, params, false);
}

GapReport punctured_orbit_gap(const Slope& gamma, const CertifiedSchottky& h, int samples,
                              std::uint64_t seed, const EnsembleParams& params) {
  return run_harness(gamma, h, samples, seed, params, true);
}

}  // namespace mfgap::gap
