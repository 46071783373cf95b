#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using namespace qfhc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("qfhc_test_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

Json report(const fs::path& dir) {
  std::ifstream is(dir / "run_report.json");
  return Json::parse(is);
}

int run_quiet(const cli::Config& c) {
  std::ostringstream log;
  return cli::run(c, log);
}

}  // namespace

TEST_CASE("config round trip") {
  cli::Config c;
  c.scenario = "orbit";
  c.q = 3;
  c.horizon = 12345;
  c.weights.family = "tmu";
  c.weights.mu = Scalar(1.0, -0.5);
  c.space.kind = "entire";
  c.space.rmax = 6;
  c.construct.vectors = {{{{1, 1.0, 0.0}, {3, 0.0, -2.0}}}};
  c.construct.epsilon = {0.5, 0.25};
  c.orbit.mode = "powers";
  c.orbit.rotation = std::polar(1.0, 0.7);
  c.sweep.lambda = {0.5, 2.0};
  CHECK(cli::parse_config(cli::to_json(c).dump()) == c);
  CHECK(cli::parse_config(cli::to_json(cli::Config{}).dump(2)) == cli::Config{});
}

TEST_CASE("unknown keys and bad values report a line") {
  const std::string text = "{\n  \"scenario\": \"criterion\",\n  \"horizn\": 10\n}\n";
  try {
    cli::parse_config(text);
    FAIL("expected ConfigError");
  } catch (const cli::ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(cli::parse_config("{\n  \"q\": \"two\"\n}"), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_config("{\n  \"q\": 2,\n"), cli::ConfigError);
  CHECK_THROWS_AS(cli::validate(cli::parse_config("{\"weights\": {\"family\": \"nope\"}}")), cli::ConfigError);
  CHECK_THROWS_AS(cli::validate(cli::parse_config("{\"max_exp\": 99}")), cli::ConfigError);
  CHECK_NOTHROW(cli::validate(cli::Config{}));
}

TEST_CASE("criterion scenario: Bergman q=2 satisfies") {
  cli::Config c;
  c.out = scratch("criterion").string();
  c.q = 2;
  c.weights.family = "bergman";
  CHECK(run_quiet(c) == 0);
  const auto r = report(c.out);
  CHECK(r["results"]["report"]["overall"] == "SatisfiesCriterion");
  CHECK(fs::exists(fs::path(c.out) / "verdicts.csv"));
  CHECK(fs::exists(fs::path(c.out) / "config.json"));
}

TEST_CASE("reruns are byte identical") {
  cli::Config c;
  c.scenario = "sweep";
  c.sweep.family = "root";
  c.sweep.p = {1, 2};
  c.sweep.q = {1, 2, 3};
  c.out = scratch("rerun_a").string();
  REQUIRE(run_quiet(c) == 0);
  const auto first = slurp(fs::path(c.out) / "verdict_matrix.csv");
  c.workers = 3;
  c.out = scratch("rerun_b").string();
  REQUIRE(run_quiet(c) == 0);
  CHECK(slurp(fs::path(c.out) / "verdict_matrix.csv") == first);
  CHECK_FALSE(first.empty());
}

TEST_CASE("constant sweep at q=1 converges only for |lambda| > 1") {
  cli::Config c;
  c.scenario = "sweep";
  c.sweep.family = "constant";
  c.sweep.lambda = {0.5, 1.0, 2.0};
  c.sweep.q = {1};
  c.out = scratch("constant").string();
  REQUIRE(run_quiet(c) == 0);
  const auto cells = report(c.out)["results"]["cells"];
  REQUIRE(cells.size() == 3);
  for (const auto& cell : cells) {
    const std::string row = cell["weights"];
    const bool big = row.find("lambda=2") != std::string::npos;
    CHECK_MESSAGE((cell["overall"] == "SatisfiesCriterion") == big, row);
  }
}

TEST_CASE("empty sweep grid is a config error") {
  cli::Config c;
  c.scenario = "sweep";
  c.sweep.family = "constant";
  c.out = scratch("empty").string();
  CHECK_THROWS_AS(run_quiet(c), cli::ConfigError);
}

TEST_CASE("construct refuses Bergman q=1 with exit 2") {
  cli::Config c;
  c.scenario = "construct";
  c.q = 1;
  c.weights.family = "bergman";
  c.out = scratch("refuse").string();
  CHECK(run_quiet(c) == 2);
  CHECK(report(c.out)["results"].contains("refused"));
}

TEST_CASE("density scenario writes a profile") {
  cli::Config c;
  c.scenario = "density";
  c.horizon = 100;
  for (Index k = 1; k * k <= 100; ++k) c.density.times.push_back(k * k);
  c.q = 2;
  c.density.burn_in = 1;
  c.out = scratch("density").string();
  CHECK(run_quiet(c) == 0);
  const auto csv = slurp(fs::path(c.out) / "density_profile.csv");
  CHECK(csv.rfind("N,count,p_N\n", 0) == 0);
  // at q=2 the profile runs over N with N^2 <= horizon
  CHECK(csv.find("\n10,10,1\n") != std::string::npos);
}
