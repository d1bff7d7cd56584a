#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mfgap/cli.hpp"

using mfgap::cli::dispatch;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run({"gap-test", "--samples", "0"}).code == 2);
  CHECK(run({"gap-test", "--radius", "9"}).code == 2);
  CHECK(run({"gap-test", "--no-such-flag"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"orbit", "--base", "0/0"}).code == 2);
  CHECK(run({"cor43", "--point", "1,1,1"}).code == 2);
  CHECK(run({"cor43", "--phis", "/nonexistent.json"}).code == 2);
  CHECK(run({"limit-set", "--r-in", "3", "--r-out", "2"}).code == 2);
}

TEST_CASE("schottky-verify --default") {
  auto r = run({"schottky-verify", "--default", "--scan-length", "6"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["passed"] == true);
  CHECK(j["results"]["generators"]["A"][0][0] == "3");
  CHECK(j["results"]["transcript"].size() == 12);
  CHECK(j["config"]["seed"] == 0);
}

TEST_CASE("a custom pair that fails exits 1") {
  const std::string path = "test_cli_pair.json";
  {
    std::ofstream f(path);
    f << R"({"A": [[3,1],[2,1]], "B": [[3,1],[2,1]], "a_minus": ["-13/25","7/20"], "b_minus": ["-13/25","7/20"]})";
  }
  auto r = run({"schottky-verify", "--pair", path, "--scan-length", "4"});
  CHECK(r.code == 1);
  CHECK(nlohmann::json::parse(r.out)["passed"] == false);
  std::remove(path.c_str());
}

TEST_CASE("reports are deterministic and carry the seed") {
  std::vector<std::string> args{"--seed", "9", "gap-test", "--samples", "20", "--radius", "4"};
  auto a = run(args);
  auto b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j["config"]["seed"] == 9);
  CHECK(j["subcommand"] == "gap-test");
  // Seed also accepted after the subcommand.
  CHECK(run({"gap-test", "--samples", "20", "--radius", "4", "--seed", "9"}).out == a.out);
}

TEST_CASE("floats use 17 significant digits") {
  auto r = run({"spectral-radius", "--radius", "3"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  double v = j["results"]["values"][0];
  CHECK(v == doctest::Approx(0.5).epsilon(1e-9));
  // Values appear exactly as %.17g renders them.
  CHECK(r.out.find("\"kesten_limit\": 0.8660254037844386") != std::string::npos);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", j["results"]["values"][2].get<double>());
  CHECK(r.out.find(buf) != std::string::npos);
}

TEST_CASE("cover-build from a file, csv outputs") {
  const std::string path = "test_cli_cover.json";
  {
    // A small quadrilateral in the cone between slopes 7/10 and 2 and a base around it.
    std::ofstream f(path);
    f << R"({"K": [[["2","3"],["3","3"],["3","4"],["2","4"]]],
             "bases": [[["3/2","5/2"],["7/2","5/2"],["7/2","9/2"],["3/2","9/2"]]], "max_len": 1})";
  }
  auto r = run({"cover-build", "--input", path});
  // Whether or not this base wanders, the answer must be a clean report or a usage error.
  CHECK((r.code == 0 || r.code == 1 || r.code == 2));
  std::remove(path.c_str());

  const std::string csv = "test_cli_limit.csv";
  auto l = run({"limit-set", "--depth", "4", "--csv", csv});
  CHECK(l.code == 0);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "depth,total_length,cone_mass");
  std::remove(csv.c_str());
}
