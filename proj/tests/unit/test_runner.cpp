#include <algorithm>
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sam/runner.hpp"

using namespace sam;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("sam_unit_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("zero cycles gives an empty trace") {
  const auto sc = make_scenario("hotspot_shift");
  CHECK(run_single(sc, {"aura", {}, ""}, 1, 0).records.empty());
}

TEST_CASE("identical configs give byte-identical traces") {
  const std::string doc = R"({"scenario": "pollution_attack", "policies": ["aura", "b13"], "cycles": 120})";
  std::string first;
  for (int k = 0; k < 2; ++k) {
    auto cfg = parse_experiment_config(doc);
    cfg.out_dir = fresh_dir("det" + std::to_string(k));
    const auto s = run_experiment(cfg);
    REQUIRE(s.runs.size() == 2);
    const std::string text = slurp(cfg.out_dir / s.runs[0].trace_file) + slurp(cfg.out_dir / s.runs[1].trace_file);
    CHECK_FALSE(text.empty());
    if (k == 0) first = text;
    else CHECK(text == first);
  }
}

TEST_CASE("three policies by three seeds write nine traces and one summary") {
  auto cfg = parse_experiment_config(
      R"({"scenario": "hotspot_shift", "policies": ["aura", "b7", {"kind": "b1", "label": "static"}],
          "seeds": [1, 2, 3], "cycles": 60})");
  cfg.out_dir = fresh_dir("files");
  const auto s = run_experiment(cfg);
  CHECK(s.runs.size() == 9);
  std::size_t csv = 0, json = 0;
  for (const auto& e : fs::directory_iterator(cfg.out_dir)) {
    csv += e.path().extension() == ".csv";
    json += e.path().filename() == "summary.json";
  }
  CHECK(csv == 9);
  CHECK(json == 1);
  for (const auto& r : s.runs) CHECK(r.invalid_plans == 0);
  CHECK(summary_to_json(s).find("\"static\"") != std::string::npos);
}

TEST_CASE("config errors are reported") {
  CHECK_THROWS_AS(parse_experiment_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"policies": ["aura"]})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"scenario": "nope", "policies": ["aura"]})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"scenario": "hotspot_shift", "policies": ["b42"]})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"scenario": "hotspot_shift", "policies": "aura"})"), ConfigError);
  CHECK_THROWS_AS(
      parse_experiment_config(R"({"scenario": "hotspot_shift", "policies": [{"kind": "aura", "params": {"k_max": "x"}}]})"),
      ConfigError);
  CHECK_THROWS_AS(run_suite("no_such_suite"), ConfigError);
}

TEST_CASE("steady-state utility averages the final half of each phase") {
  WorkloadSchedule s;
  s.base_ops = {1.0};
  s.phases = {{4, {1.0}}, {2, {1.0}}};
  const std::vector<double> u{1, 1, 3, 5, 7, 9};
  CHECK(steady_state_utility(u, s) == std::vector<double>{4.0, 9.0});
}

TEST_CASE("oracle suite passes") {
  const auto r = run_suite("oracle");
  REQUIRE(r.criteria.size() == 1);
  CHECK(r.criteria[0].passed);
  CHECK(r.passed());
  CHECK(report_to_json(r).find("\"passed\"") != std::string::npos);
}

TEST_CASE("robustness report carries both VIP ratios") {
  const auto r = run_suite("robustness");
  REQUIRE(r.criteria.size() == 1);
  CHECK(r.criteria[0].metrics.count("vip_attacker_ratio_aura_s1") == 1);
  CHECK(r.criteria[0].metrics.count("vip_attacker_ratio_b7_s1") == 1);
}

TEST_CASE("suite names include every criterion") {
  const auto names = suite_names();
  for (const char* s : {"regret", "stability", "robustness", "adaptation", "scalability", "oracle", "all"}) {
    CHECK(std::find(names.begin(), names.end(), s) != names.end());
  }
}
