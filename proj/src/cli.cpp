#include "mfgap/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfgap/foliation_measure.hpp"
#include "mfgap/gap_engine.hpp"
#include "mfgap/parallel.hpp"
#include "mfgap/parity_decomposition.hpp"
#include "mfgap/schottky.hpp"
#include "mfgap/teichmueller.hpp"

namespace mfgap::cli {

namespace {

using json = nlohmann::ordered_json;
using curves::MappingClass;
using curves::Slope;

// --- output ---------------------------------------------------------------

void write_json(std::ostream& os, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        os << "null";
      } else {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
      }
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        os << inner;
        write_json(os, j[i], indent + 1);
        os << (i + 1 < j.size() ? ",\n" : "\n");
      }
      os << pad << ']';
      return;
    }
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        os << inner << json(it.key()).dump() << ": ";
        write_json(os, it.value(), indent + 1);
        os << (i + 1 < j.size() ? ",\n" : "\n");
      }
      os << pad << '}';
      return;
    }
    default:
      os << j.dump();
  }
}

std::string render(const json& j) {
  std::ostringstream os;
  write_json(os, j, 0);
  os << '\n';
  return os.str();
}

struct Checks {
  json list = json::array();
  bool all = true;
  void add(const std::string& name, bool passed, const std::string& detail = "") {
    json c;
    c["name"] = name;
    c["passed"] = passed;
    if (!detail.empty()) c["detail"] = detail;
    list.push_back(std::move(c));
    all = all && passed;
  }
};

json finish(const std::string& name, json config, Checks checks, json results, json units) {
  json r;
  r["subcommand"] = name;
  r["config"] = std::move(config);
  r["checks"] = std::move(checks.list);
  r["results"] = std::move(results);
  r["units"] = std::move(units);
  r["passed"] = checks.all;
  return r;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json matrix_json(const MappingClass& m) {
  return json::array({json::array({m.a().str(), m.b().str()}), json::array({m.c().str(), m.d().str()})});
}

json interval_json(const schottky::ProjInterval& iv) {
  // The arc {lo, hi} covers the real segment [hi, lo] (possibly through infinity).
  json j;
  j["lo"] = iv.lo().str();
  j["hi"] = iv.hi().str();
  j["real_segment"] = json::array({iv.hi().str(), iv.lo().str()});
  return j;
}

json cell_json(const foliation::Cell& c) {
  json j = json::array();
  for (const auto& v : c.vertices()) j.push_back(json::array({to_string(v.x), to_string(v.y)}));
  return j;
}

foliation::Cell parse_cell(const json& j) {
  foliation::poly::Polygon p;
  for (const auto& v : j) {
    auto coord = [](const json& x) {
      return x.is_string() ? parse_rational(x.get<std::string>()) : parse_rational(x.dump());
    };
    p.push_back({coord(v.at(0)), coord(v.at(1))});
  }
  return foliation::Cell(std::move(p));
}

BigInt json_int(const json& x) { return parse_bigint(x.is_string() ? x.get<std::string>() : x.dump()); }

MappingClass parse_matrix(const json& j) {
  return MappingClass(json_int(j.at(0).at(0)), json_int(j.at(0).at(1)), json_int(j.at(1).at(0)),
                      json_int(j.at(1).at(1)));
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError(path + ": " + e.what());
  }
}

void write_csv(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  out << text;
}

teich::TracePoint parse_point(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      v.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw DomainError("bad point '" + s + "'");
    }
  }
  if (v.size() == 3) return teich::TracePoint::make(v[0], v[1], v[2]);
  if (v.size() == 2) return teich::TracePoint::from_xy(v[0], v[1]);
  throw DomainError("point must be x,y,z or x,y: '" + s + "'");
}

json point_json(const teich::TracePoint& p) { return json::array({p.x, p.y, p.z}); }

const schottky::CertifiedSchottky& H() { return schottky::default_certified(); }

// --- suites ---------------------------------------------------------------

struct OrbitOpts {
  std::string base = "0/1";
  int radius = 3;
  std::string generators = "schottky";
  int stab_len = 6;
};

json run_orbit(const OrbitOpts& o, std::uint64_t seed) {
  const Slope base = Slope::parse(o.base);
  const bool schottky_gens = o.generators == "schottky";
  const curves::GeneratorSet gens = schottky_gens ? H().generators() : parity::default_generators();
  json config{{"base", o.base}, {"radius", o.radius}, {"generators", o.generators},
              {"stabilizer_scan_length", o.stab_len}, {"seed", seed}};
  auto ball = curves::orbit_ball(base, gens, o.radius);
  auto stab = curves::stabilizer_scan(base, gens, o.stab_len);
  Checks checks;
  json results;
  results["size"] = ball.size();
  json slopes = json::array();
  for (const auto& s : ball) slopes.push_back(s.str());
  results["slopes"] = std::move(slopes);
  json sw = json::array();
  for (const auto& w : stab) sw.push_back(gens.format(w));
  results["stabilizer_words"] = sw;
  if (schottky_gens) {
    auto red = schottky::reduce_to_fundamental_domain(H(), base);
    results["fundamental_domain_representative"] = red.representative.str();
    results["reduction_word"] = gens.format(red.word);
    checks.add("trivial stabilizer in H up to length " + std::to_string(o.stab_len), stab.empty());
  }
  return finish("orbit", config, checks, results, json{{"radius", "word length"}});
}

struct SchottkyOpts {
  bool use_default = false;
  std::string pair_file;
  int scan_len = 12;
  long coord_bound = 50;
};

schottky::SchottkyPair parse_pair(const json& j) {
  auto A = parse_matrix(j.at("A"));
  auto B = parse_matrix(j.at("B"));
  auto real = [](const json& seg) {
    return schottky::ProjInterval::from_real(parse_rational(seg.at(0).get<std::string>()),
                                             parse_rational(seg.at(1).get<std::string>()));
  };
  auto am = real(j.at("a_minus"));
  auto bm = real(j.at("b_minus"));
  auto ap = j.contains("a_plus") ? real(j["a_plus"]) : am.complement().image(A);
  auto bp = j.contains("b_plus") ? real(j["b_plus"]) : bm.complement().image(B);
  return {A, B, ap, am, bp, bm};
}

json run_schottky(const SchottkyOpts& o, std::uint64_t seed) {
  const auto pair = o.pair_file.empty() ? schottky::default_pair() : parse_pair(read_json_file(o.pair_file));
  json config{{"pair", o.pair_file.empty() ? std::string("default") : o.pair_file},
              {"scan_length", o.scan_len},
              {"coord_bound", o.coord_bound},
              {"seed", seed}};
  Checks checks;
  json results;
  results["generators"] = {{"A", matrix_json(pair.gen_a)}, {"B", matrix_json(pair.gen_b)}};
  results["intervals"] = {{"a_plus", interval_json(pair.a_plus)},
                          {"a_minus", interval_json(pair.a_minus)},
                          {"b_plus", interval_json(pair.b_plus)},
                          {"b_minus", interval_json(pair.b_minus)}};
  auto cert = schottky::verify_ping_pong(pair);
  json transcript = json::array();
  for (const auto& line : cert.transcript) {
    transcript.push_back({{"check", line.name}, {"passed", line.passed}, {"detail", line.detail}});
  }
  results["transcript"] = transcript;
  checks.add("ping-pong certificate", cert.certified, cert.violation.value_or(""));
  if (cert.certified) {
    auto hyp = schottky::purely_hyperbolic_scan(pair, o.scan_len);
    results["hyperbolic_scan"] = {{"words_checked", hyp.words_checked},
                                  {"min_abs_trace", hyp.min_abs_trace.str()},
                                  {"min_word", hyp.min_word},
                                  {"violations", hyp.violations},
                                  {"identity_words", hyp.identity_words}};
    checks.add("purely hyperbolic to length " + std::to_string(o.scan_len),
               hyp.violations == 0 && hyp.identity_words == 0 && hyp.min_abs_trace > 2,
               "min |trace| " + hyp.min_abs_trace.str());
    auto fix = schottky::fixed_slope_scan(pair, o.scan_len, o.coord_bound);
    json v = json::array();
    for (const auto& [w, s] : fix.violations) v.push_back({{"word", w}, {"slope", s}});
    results["fixed_slope_scan"] = {{"words_checked", fix.words_checked}, {"violations", v}};
    checks.add("no word fixes a slope with |p|,|q| <= " + std::to_string(o.coord_bound), fix.violations.empty());
  }
  return finish("schottky-verify", config, checks, results, json{{"scan_length", "word length"}});
}

struct LimitOpts {
  int depth = 10;
  double r_in = 1;
  double r_out = 2;
  std::string csv;
};

json run_limit(const LimitOpts& o, std::uint64_t seed) {
  json config{{"depth", o.depth}, {"r_in", o.r_in}, {"r_out", o.r_out}, {"seed", seed}};
  auto lengths = schottky::limit_set_lengths(H(), o.depth);
  std::vector<double> mass;
  for (int d = 1; d <= o.depth; ++d) mass.push_back(foliation::limit_cone_mass(H(), o.r_in, o.r_out, d));
  bool len_dec = true, mass_dec = true;
  for (std::size_t i = 1; i < lengths.size(); ++i) {
    len_dec = len_dec && lengths[i] < lengths[i - 1];
    mass_dec = mass_dec && mass[i] < mass[i - 1];
  }
  Checks checks;
  checks.add("cover length strictly decreasing", len_dec);
  checks.add("cone mass strictly decreasing", mass_dec);
  const double ratio = mass.back() / mass.front();
  if (o.depth >= 10) checks.add("mass(depth)/mass(1) < 0.5", ratio < 0.5, fmt(ratio));
  std::ostringstream csv;
  csv << "depth,total_length,cone_mass\n";
  for (int d = 1; d <= o.depth; ++d) csv << d << ',' << fmt(lengths[d - 1]) << ',' << fmt(mass[d - 1]) << '\n';
  write_csv(o.csv, csv.str());
  json results{{"total_length", lengths}, {"cone_mass", mass}, {"mass_ratio", ratio}};
  return finish("limit-set", config, checks, results,
                json{{"total_length", "fraction of the projective circle"},
                     {"cone_mass", "Lebesgue area in MF"},
                     {"radii", "Euclidean norm"}});
}

struct GapOpts {
  std::string base = "0/1";
  int samples = 1000;
  int radius = 8;
  bool punctured = false;
  std::string csv;
};

json run_gap(const GapOpts& o, std::uint64_t seed) {
  json config{{"orbit_base", o.base}, {"samples", o.samples}, {"radius", o.radius},
              {"punctured", o.punctured}, {"seed", seed}};
  gap::EnsembleParams p;
  p.radius = o.radius;
  const Slope base = Slope::parse(o.base);
  auto rep = o.punctured ? gap::punctured_orbit_gap(base, H(), o.samples, seed, p)
                         : gap::certify_gap(base, H(), o.samples, seed, p);
  auto constant = gap::free_group_gap_constant(H().generators());
  Checks checks;
  checks.add("every sample ratio >= eta - 1e-12", rep.violations == 0, "min " + fmt(rep.min_observed_ratio));
  checks.add("adversarial descent ratio >= eta - 1e-12", rep.adversarial_final_ratio >= rep.eta - 1e-12,
             fmt(rep.adversarial_final_ratio));
  json results{{"K", rep.K},
               {"epsilon", rep.epsilon},
               {"eta", rep.eta},
               {"constant_transcript", constant.transcript},
               {"min_observed_ratio", rep.min_observed_ratio},
               {"violations", rep.violations},
               {"points_scanned", rep.points_scanned},
               {"adversarial",
                {{"iterations", p.descent_iterations},
                 {"radius", p.descent_radius},
                 {"initial_ratio", rep.adversarial_initial_ratio},
                 {"final_ratio", rep.adversarial_final_ratio},
                 {"tree_ratio", rep.adversarial_tree_ratio}}}};
  std::ostringstream csv;
  csv << "sample,ratio\n";
  for (std::size_t i = 0; i < rep.ratios.size(); ++i) csv << i << ',' << fmt(rep.ratios[i]) << '\n';
  write_csv(o.csv, csv.str());
  return finish("gap-test", config, checks, results,
                json{{"ratio", "max_K ||pi(g)f - f||^2 / ||f||^2, dimensionless"}});
}

struct SpectralOpts {
  int radius = 12;
  std::string csv;
};

json run_spectral(const SpectralOpts& o, std::uint64_t seed) {
  json config{{"radius", o.radius}, {"seed", seed}};
  std::vector<double> v;
  for (int r = 1; r <= o.radius; ++r) v.push_back(gap::random_walk_spectral_radius(r));
  bool mono = true;
  for (std::size_t i = 1; i < v.size(); ++i) mono = mono && v[i] >= v[i - 1];
  const double kesten = std::sqrt(3.0) / 2;
  Checks checks;
  checks.add("monotone in radius", mono);
  checks.add("below sqrt(3)/2 + 1e-9", v.back() <= 0.8660254 + 1e-9, fmt(v.back()));
  if (o.radius >= 12) checks.add("at least 0.84 at radius >= 12", v.back() >= 0.84, fmt(v.back()));
  const double eps = 2 - std::sqrt(3.0);
  std::ostringstream csv;
  csv << "radius,spectral_radius\n";
  for (std::size_t i = 0; i < v.size(); ++i) csv << i + 1 << ',' << fmt(v[i]) << '\n';
  write_csv(o.csv, csv.str());
  json results{{"values", v},
               {"kesten_limit", kesten},
               {"epsilon_from_limit", 2 * (1 - kesten)},
               {"epsilon", eps}};
  return finish("spectral-radius", config, checks, results, json{{"radius", "word length"}});
}

struct L2Opts {
  std::string point;
  int sample = 0;
  int depth = 40;
  double tol = 1e-8;
  double count_length = 12;
};

json run_l2(const L2Opts& o, std::uint64_t seed) {
  json config{{"point", o.point.empty() ? std::string("modular") : o.point},
              {"sample", o.sample},
              {"depth", o.depth},
              {"tolerance", o.tol},
              {"count_length", o.count_length},
              {"seed", seed}};
  std::vector<teich::TracePoint> pts{o.point.empty() ? teich::TracePoint::modular() : parse_point(o.point)};
  for (const auto& p : teich::sample_points(o.sample, seed)) pts.push_back(p);
  Checks checks;
  json rows = json::array();
  std::size_t cauchy = 0;
  for (const auto& p : pts) {
    auto rep = teich::l2_tail_report(p, o.depth, 1e-18, o.tol);
    if (rep.cauchy) ++cauchy;
    rows.push_back({{"point", point_json(p)},
                    {"partial_sum", rep.partial_sums.back()},
                    {"last_increment", rep.increments.back()},
                    {"tail_bound", rep.tail_bound},
                    {"pruned_subtrees", rep.pruned_subtrees},
                    {"cauchy", rep.cauchy}});
  }
  checks.add("partial sums Cauchy within tolerance at depth " + std::to_string(o.depth), cauchy == pts.size(),
             std::to_string(cauchy) + "/" + std::to_string(pts.size()));
  const auto c1 = teich::curve_count(pts.front(), o.count_length);
  const auto c2 = teich::curve_count(pts.front(), 2 * o.count_length);
  const double ratio = c1 ? static_cast<double>(c2) / static_cast<double>(c1) : 0.0;
  checks.add("count(2L)/count(L) in [3.2, 4.8]", ratio >= 3.2 && ratio <= 4.8, fmt(ratio));
  json results{{"points", rows}, {"curve_count", {{"L", o.count_length}, {"count_L", c1}, {"count_2L", c2}, {"ratio", ratio}}}};
  return finish("l2-tail", config, checks, results,
                json{{"sum", "sum of exp(-2 length), dimensionless"}, {"L", "hyperbolic length"}});
}

struct Cor43Opts {
  std::string point;
  int sample = 0;
  int near = 0;
  int depth = 30;
  std::string phis_file;
  std::string csv;
};

json run_cor43(const Cor43Opts& o, std::uint64_t seed) {
  json config{{"point", o.point.empty() ? std::string("modular") : o.point},
              {"sample", o.sample},
              {"near_degenerate", o.near},
              {"depth", o.depth},
              {"phis", o.phis_file.empty() ? std::string("K") : o.phis_file},
              {"seed", seed}};
  std::vector<MappingClass> phis;
  if (o.phis_file.empty()) {
    for (curves::Letter l = 0; l < 4; ++l) phis.push_back(H().generators().letter_matrix(l));
  } else {
    for (const auto& m : read_json_file(o.phis_file)) phis.push_back(parse_matrix(m));
    if (phis.empty()) throw DomainError("phis file lists no matrices");
  }
  std::vector<teich::TracePoint> pts{o.point.empty() ? teich::TracePoint::modular() : parse_point(o.point)};
  for (const auto& p : teich::sample_points(o.sample, seed)) pts.push_back(p);
  for (const auto& p : teich::near_degenerate_points(o.near, seed)) pts.push_back(p);

  std::vector<teich::Cor43Report> reps(pts.size());
  const bool rows = !o.csv.empty();
  parallel_for(pts.size(), [&](std::size_t i) { reps[i] = teich::cor43_check(pts[i], phis, o.depth, 1e-18, rows); });

  Checks checks;
  json out = json::array();
  std::size_t violations = 0, cross_fail = 0;
  double min_margin = INFINITY, max_allow = 0, max_cross = 0;
  std::ostringstream csv;
  csv << "point,phi,slope,length,length_pushed,delta\n";
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto& r = reps[i];
    if (!r.passed) ++violations;
    if (!(r.crosscheck_error <= 1e-9)) ++cross_fail;
    min_margin = std::min(min_margin, r.ratio - (r.threshold - r.allowance));
    max_allow = std::max(max_allow, r.allowance);
    max_cross = std::max(max_cross, r.crosscheck_error);
    out.push_back({{"point", point_json(r.point)},
                   {"ratio", r.ratio},
                   {"allowance", r.allowance},
                   {"rhs", r.rhs},
                   {"lhs", r.lhs},
                   {"crosscheck_error", r.crosscheck_error},
                   {"passed", r.passed}});
    for (const auto& row : r.rows) {
      csv << i << ',' << r.phis[static_cast<std::size_t>(row.phi)] << ',' << row.slope.str() << ','
          << fmt(row.length) << ',' << fmt(row.length_pushed) << ',' << fmt(row.delta) << '\n';
    }
  }
  write_csv(o.csv, csv.str());
  checks.add("max_i LHS_i/RHS >= (2 - sqrt 3)/8 - allowance at every point", violations == 0,
             std::to_string(violations) + " violations");
  checks.add("LHS matches displacement plus boundary terms to 1e-9", cross_fail == 0, "max " + fmt(max_cross));
  json results{{"points", out.size()},
               {"threshold", (2 - std::sqrt(3.0)) / 8},
               {"min_margin", min_margin},
               {"max_allowance", max_allow},
               {"max_crosscheck_error", max_cross},
               {"phis", reps.front().phis},
               {"per_point", out}};
  return finish("cor43", config, checks, results,
                json{{"ratio", "dimensionless"}, {"length", "hyperbolic length"}});
}

struct CoverOpts {
  int samples = 50;
  std::string input;
};

json cover_json(const foliation::HRelatedCover& c, const curves::GeneratorSet& gens) {
  json rounds = json::array();
  for (const auto& r : c.rounds) {
    json pieces = json::array();
    for (const auto& p : r.pieces) pieces.push_back({{"word", gens.format(p.word)}, {"cell", cell_json(p.cell)}});
    rounds.push_back({{"base", r.base}, {"pieces", pieces}});
  }
  return rounds;
}

json run_cover(const CoverOpts& o, std::uint64_t seed) {
  const auto& gens = H().generators();
  Checks checks;
  if (!o.input.empty()) {
    json config{{"input", o.input}, {"seed", seed}};
    const json in = read_json_file(o.input);
    std::vector<foliation::Cell> K, bases;
    for (const auto& c : in.at("K")) K.push_back(parse_cell(c));
    for (const auto& c : in.at("bases")) bases.push_back(parse_cell(c));
    const int max_len = in.value("max_len", 3);
    auto cover = foliation::build_h_related_cover(K, bases, H(), max_len);
    auto v = foliation::verify_cover(cover, K, bases, H());
    checks.add("pairwise disjoint", v.pairwise_disjoint);
    checks.add("pieces inside their translates", v.pieces_in_translates);
    checks.add("sum area(piece cap K) = area(K)", v.area_identity, to_string(v.covered_area) + " vs " + to_string(v.k_area));
    json results{{"area_K", to_string(v.k_area)}, {"rounds", cover_json(cover, gens)}};
    return finish("cover-build", config, checks, results, json{{"area", "Lebesgue area in MF"}});
  }
  json config{{"samples", o.samples}, {"seed", seed}, {"max_len", 3}, {"avoid_depth", 3}};
  struct Row {
    foliation::CoverInstance inst;
    foliation::CoverVerification v;
    std::size_t rounds = 0, pieces = 0;
    bool avoids = false;
  };
  std::vector<Row> rows(static_cast<std::size_t>(o.samples));
  parallel_for(rows.size(), [&](std::size_t i) {
    auto& r = rows[i];
    r.inst = foliation::random_cover_instance(H(), seed, i);
    auto cover = foliation::build_h_related_cover(r.inst.K, r.inst.bases, H(), r.inst.max_len);
    r.v = foliation::verify_cover(cover, r.inst.K, r.inst.bases, H());
    r.rounds = cover.rounds.size();
    r.pieces = cover.piece_count();
    r.avoids = true;
    for (const auto& c : r.inst.K) r.avoids = r.avoids && foliation::avoids_limit_cone(c, H(), 3);
  });
  std::size_t bad_disjoint = 0, bad_translate = 0, bad_area = 0, bad_avoid = 0;
  json per = json::array();
  for (const auto& r : rows) {
    bad_disjoint += !r.v.pairwise_disjoint;
    bad_translate += !r.v.pieces_in_translates;
    bad_area += !r.v.area_identity;
    bad_avoid += !r.avoids;
    per.push_back({{"shift", gens.format(r.inst.shift)},
                   {"area_K", to_string(r.v.k_area)},
                   {"rounds", r.rounds},
                   {"pieces", r.pieces},
                   {"ok", r.v.ok()}});
  }
  checks.add("regions avoid the depth-3 limit cone", bad_avoid == 0);
  checks.add("pairwise disjoint", bad_disjoint == 0, std::to_string(bad_disjoint) + " failures");
  checks.add("pieces inside their translates", bad_translate == 0, std::to_string(bad_translate) + " failures");
  checks.add("area identity", bad_area == 0, std::to_string(bad_area) + " failures");
  return finish("cover-build", config, checks, json{{"instances", per}}, json{{"area", "Lebesgue area in MF"}});
}

struct ContOpts {
  int samples = 200;
  std::string csv;
};

json run_cont(const ContOpts& o, std::uint64_t seed) {
  json config{{"samples", o.samples}, {"seed", seed}, {"max_len", 3}};
  std::vector<foliation::ContinuousGapReport> reps(static_cast<std::size_t>(o.samples));
  parallel_for(reps.size(), [&](std::size_t i) {
    auto inst = foliation::random_step_instance(H(), seed, i);
    reps[i] = foliation::continuous_gap_check(inst.f, inst.base, H(), inst.max_len);
  });
  std::size_t gap_fail = 0, chain_fail = 0, sum_fail = 0, terms = 0, equalities = 0;
  double min_ratio = INFINITY;
  std::ostringstream csv;
  csv << "sample,max_ratio\n";
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto& r = reps[i];
    gap_fail += !r.gap_holds;
    chain_fail += r.chain_violations;
    sum_fail += !r.chain_sum_matches;
    terms += r.chain_terms;
    equalities += r.chain_equalities;
    min_ratio = std::min(min_ratio, r.max_ratio);
    csv << i << ',' << fmt(r.max_ratio) << '\n';
  }
  write_csv(o.csv, csv.str());
  Checks checks;
  checks.add("max displacement >= (2 - sqrt 3)/8 ||f||^2 (exact)", gap_fail == 0,
             std::to_string(gap_fail) + " violations");
  checks.add("chain inequality per translate (exact)", chain_fail == 0, std::to_string(chain_fail) + " violations");
  checks.add("translate terms sum to the displacement", sum_fail == 0);
  json results{{"epsilon_prime", (2 - std::sqrt(3.0)) / 8},
               {"min_max_ratio", min_ratio},
               {"chain_terms", terms},
               {"chain_equalities", equalities}};
  return finish("cont-gap", config, checks, results, json{{"ratio", "dimensionless"}});
}

struct DecOpts {
  int radius = 8;
  int samples = 500;
};

json run_decompose(const DecOpts& o, std::uint64_t seed) {
  json config{{"radius", o.radius}, {"samples", o.samples}, {"seed", seed}, {"generators", "T, U"}};
  auto r = parity::decomposition_report(parity::default_generators(), o.radius,
                                        static_cast<std::size_t>(o.samples), seed);
  Checks checks;
  checks.add("slopes under the coset ball = slope orbit ball", r.slopes_match_orbit);
  checks.add("delta vectors", r.delta_violations == 0);
  checks.add("commutation with generators", r.random.commute_violations == 0);
  checks.add("projection identities", r.random.projection_violations == 0 && r.cross_orthogonality_violations == 0);
  checks.add("parity-forgetting map intertwines", r.random.intertwine_violations == 0);
  checks.add("translates stay in the ball", r.random.escapes == 0);
  checks.add("even part permutes like slopes", r.even_gset_violations == 0);
  checks.add("odd lines permute like slopes", r.odd_gset_violations == 0);
  json results{{"ball_size", r.ball_size},
               {"inner_size", r.inner_size},
               {"slope_count", r.slope_count},
               {"double_fibers", r.double_fibers},
               {"odd_sign_flips", r.odd_sign_flips}};
  return finish("decompose", config, checks, results, json{{"radius", "word length"}});
}

// --- dispatch -------------------------------------------------------------

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"mfgap: spectral-gap verification toolkit for the rank-one mapping class group"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  std::string out_path;
  app.add_option("--seed", seed, "seed for every random draw")->capture_default_str();
  app.add_option("--out", out_path, "write the JSON report here instead of stdout");
  app.fallthrough();

  OrbitOpts orbit;
  auto* c_orbit = app.add_subcommand("orbit", "orbit ball, stabilizer scan and orbit reduction of a slope");
  c_orbit->add_option("--base", orbit.base)->capture_default_str();
  c_orbit->add_option("--radius", orbit.radius)->check(CLI::Range(0, 12))->capture_default_str();
  c_orbit->add_option("--generators", orbit.generators)->check(CLI::IsMember({"schottky", "modular"}))->capture_default_str();
  c_orbit->add_option("--stabilizer-length", orbit.stab_len)->check(CLI::Range(1, 12))->capture_default_str();

  SchottkyOpts sv;
  auto* c_sv = app.add_subcommand("schottky-verify", "certify a Schottky pair by ping-pong and scans");
  auto* o_def = c_sv->add_flag("--default", sv.use_default, "the built-in pair");
  c_sv->add_option("--pair", sv.pair_file, "JSON pair file")->excludes(o_def);
  c_sv->add_option("--scan-length", sv.scan_len)->check(CLI::Range(1, 14))->capture_default_str();
  c_sv->add_option("--coord-bound", sv.coord_bound)->check(CLI::Range(1L, 100000L))->capture_default_str();

  LimitOpts lim;
  auto* c_lim = app.add_subcommand("limit-set", "limit-set cover lengths and cone masses by depth");
  c_lim->add_option("--depth", lim.depth)->check(CLI::Range(1, 14))->capture_default_str();
  c_lim->add_option("--r-in", lim.r_in)->check(CLI::PositiveNumber)->capture_default_str();
  c_lim->add_option("--r-out", lim.r_out)->check(CLI::PositiveNumber)->capture_default_str();
  c_lim->add_option("--csv", lim.csv);

  GapOpts gt;
  auto* c_gap = app.add_subcommand("gap-test", "discrete spectral-gap harness");
  c_gap->add_option("--orbit-base", gt.base)->capture_default_str();
  c_gap->add_option("--samples", gt.samples)->check(CLI::Range(1, 1000000))->capture_default_str();
  c_gap->add_option("--radius", gt.radius)->check(CLI::Range(1, 8))->capture_default_str();
  c_gap->add_flag("--punctured", gt.punctured, "remove the base slope from the orbit");
  c_gap->add_option("--csv", gt.csv);

  SpectralOpts sp;
  auto* c_sp = app.add_subcommand("spectral-radius", "random walk spectral radius on truncated trees");
  c_sp->add_option("--radius", sp.radius)->check(CLI::Range(1, 5000))->capture_default_str();
  c_sp->add_option("--csv", sp.csv);

  L2Opts l2;
  auto* c_l2 = app.add_subcommand("l2-tail", "l2 membership of exp(-length) and curve counts");
  c_l2->add_option("--point", l2.point, "x,y,z or x,y");
  c_l2->add_option("--sample", l2.sample, "extra sampled points")->check(CLI::Range(0, 100000))->capture_default_str();
  c_l2->add_option("--depth", l2.depth)->check(CLI::Range(1, 80))->capture_default_str();
  c_l2->add_option("--tolerance", l2.tol)->check(CLI::PositiveNumber)->capture_default_str();
  c_l2->add_option("--count-length", l2.count_length)->check(CLI::PositiveNumber)->capture_default_str();

  Cor43Opts co;
  auto* c_co = app.add_subcommand("cor43", "length-sum inequality at Teichmueller points");
  c_co->add_option("--point", co.point, "x,y,z or x,y");
  c_co->add_option("--sample", co.sample, "extra generic points")->check(CLI::Range(0, 100000))->capture_default_str();
  c_co->add_option("--near-degenerate", co.near, "extra points with x -> 2.05")->check(CLI::Range(0, 100000))->capture_default_str();
  c_co->add_option("--depth", co.depth)->check(CLI::Range(2, 80))->capture_default_str();
  c_co->add_option("--phis", co.phis_file, "JSON list of matrices");
  c_co->add_option("--csv", co.csv);

  CoverOpts cv;
  auto* c_cv = app.add_subcommand("cover-build", "H-related covers of polygon regions");
  c_cv->add_option("--samples", cv.samples)->check(CLI::Range(1, 100000))->capture_default_str();
  c_cv->add_option("--input", cv.input, "JSON {K, bases, max_len}");

  ContOpts ct;
  auto* c_ct = app.add_subcommand("cont-gap", "continuous spectral gap on step functions");
  c_ct->add_option("--samples", ct.samples)->check(CLI::Range(1, 100000))->capture_default_str();
  c_ct->add_option("--csv", ct.csv);

  DecOpts dc;
  auto* c_dc = app.add_subcommand("decompose", "even/odd decomposition checks");
  c_dc->add_option("--radius", dc.radius)->check(CLI::Range(1, 12))->capture_default_str();
  c_dc->add_option("--samples", dc.samples)->check(CLI::Range(1, 1000000))->capture_default_str();

  auto* c_all = app.add_subcommand("all", "every suite with its defaults");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "mfgap: " << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  }

  Timer timer;
  json report;
  std::string name;
  try {
    if (c_orbit->parsed()) {
      name = "orbit";
      report = run_orbit(orbit, seed);
    } else if (c_sv->parsed()) {
      name = "schottky-verify";
      report = run_schottky(sv, seed);
    } else if (c_lim->parsed()) {
      name = "limit-set";
      if (!(lim.r_in < lim.r_out)) throw DomainError("--r-in must be below --r-out");
      report = run_limit(lim, seed);
    } else if (c_gap->parsed()) {
      name = "gap-test";
      report = run_gap(gt, seed);
    } else if (c_sp->parsed()) {
      name = "spectral-radius";
      report = run_spectral(sp, seed);
    } else if (c_l2->parsed()) {
      name = "l2-tail";
      report = run_l2(l2, seed);
    } else if (c_co->parsed()) {
      name = "cor43";
      report = run_cor43(co, seed);
    } else if (c_cv->parsed()) {
      name = "cover-build";
      report = run_cover(cv, seed);
    } else if (c_ct->parsed()) {
      name = "cont-gap";
      report = run_cont(ct, seed);
    } else if (c_dc->parsed()) {
      name = "decompose";
      report = run_decompose(dc, seed);
    } else if (c_all->parsed()) {
      name = "all";
      json reports;
      bool all = true;
      auto add = [&](const std::string& key, json r) {
        all = all && r["passed"].get<bool>();
        err << "mfgap: " << key << (r["passed"].get<bool>() ? " passed" : " FAILED") << " after "
            << timer.seconds() << " s\n";
        reports[key] = std::move(r);
      };
      add("orbit", run_orbit({}, seed));
      add("schottky-verify", run_schottky({}, seed));
      add("limit-set", run_limit({}, seed));
      add("gap-test", run_gap({}, seed));
      add("spectral-radius", run_spectral({}, seed));
      L2Opts l2all;
      l2all.sample = 20;
      add("l2-tail", run_l2(l2all, seed));
      Cor43Opts coall;
      coall.sample = 80;
      coall.near = 20;
      add("cor43", run_cor43(coall, seed));
      add("cover-build", run_cover({}, seed));
      add("cont-gap", run_cont({}, seed));
      add("decompose", run_decompose({}, seed));
      report["subcommand"] = "all";
      report["config"] = {{"seed", seed}};
      report["reports"] = std::move(reports);
      report["passed"] = all;
    }
  } catch (const DomainError& e) {
    err << "mfgap " << name << ": " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "mfgap " << name << ": " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    err << "mfgap " << name << ": malformed input: " << e.what() << '\n';
    return 2;
  }

  const std::string text = render(report);
  if (out_path.empty()) {
    out << text;
  } else {
    std::ofstream f(out_path);
    if (!f) {
      err << "mfgap: cannot write " << out_path << '\n';
      return 2;
    }
    f << text;
  }
  err << "mfgap: " << name << " wall-clock " << timer.seconds() << " s\n";
  return report["passed"].get<bool>() ? 0 : 1;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return dispatch(args, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "mfgap: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace mfgap::cli
