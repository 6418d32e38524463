#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include "sam/analysis.hpp"
#include "sam/oracle.hpp"
#include "sam/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sam::ConfigError(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path default_out_dir() {
  const char* env = std::getenv("SAM_OUT_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("sam_out");
}

int cmd_run(const std::string& config, const std::optional<std::uint64_t>& seed, const std::string& out) {
  auto cfg = sam::parse_experiment_config(read_file(config));
  if (seed) cfg.seeds = {*seed};
  if (!out.empty()) {
    cfg.out_dir = out;
  } else if (cfg.out_dir.empty()) {
    cfg.out_dir = default_out_dir();
  }
  const auto summary = sam::run_experiment(cfg);
  fmt::print("policy,seed,cycles,mean_utility,sigma_delta,scan_fraction,mean_touched,invalid_plans,trace\n");
  for (const auto& r : summary.runs) {
    fmt::print("{},{},{},{:.4f},{:.4f},{:.4f},{:.3f},{},{}\n", r.policy, r.seed, r.cycles, r.mean_utility,
               r.sigma_delta, r.scan_fraction, r.mean_touched, r.invalid_plans, r.trace_file);
  }
  return 0;
}

int cmd_suite(const std::string& name, const std::string& out, bool json) {
  sam::SuiteOptions opt;
  opt.out_dir = out;
  const auto report = sam::run_suite(name, opt);
  if (json) {
    fmt::print("{}\n", sam::report_to_json(report));
  } else {
    for (const auto& c : report.criteria) {
      fmt::print("[{}] criterion {} {}: {}\n", c.passed ? "PASS" : "FAIL", c.id, c.title, c.detail);
    }
  }
  return report.passed() ? 0 : 1;
}

int cmd_oracle(const std::string& scenario_arg, std::size_t phase, sam::Pages chunk) {
  const auto sc = std::filesystem::exists(scenario_arg) ? sam::parse_scenario(read_file(scenario_arg))
                                                        : sam::make_scenario(scenario_arg);
  if (phase >= sc.env.schedule.phases.size()) {
    throw sam::ConfigError(fmt::format("scenario '{}' has {} phases", sc.name, sc.env.schedule.phases.size()));
  }
  const auto res = sam::oracle_for_phase(sc.env, sc.pool, phase, chunk);
  const auto ops = sam::phase_average_ops(sc.env, phase);
  fmt::print("# scenario={} phase={} chunk={} grid_value={:.6f} plan_value={:.6f}\n", sc.name, phase, res.chunk,
             res.grid_value, res.plan_value);
  fmt::print("tenant,pages,avg_ops,true_hr\n");
  for (std::size_t i = 0; i < res.plan.pages.size(); ++i) {
    fmt::print("{},{},{:.4f},{:.6f}\n", i, res.plan.pages[i], ops[i],
               sam::true_hit_rate(sc.env.curves[i], res.plan.pages[i]));
  }
  return 0;
}

int cmd_analyze(const std::string& path, const std::string& metric) {
  std::ifstream in(path);
  if (!in) throw sam::ConfigError(fmt::format("cannot open '{}'", path));
  const auto trace = sam::read_trace_csv(in);
  const auto scenario = sam::parse_scenario(trace.scenario_json);
  const auto& sched = scenario.env.schedule;

  if (metric == "utility") {
    fmt::print("cycle,utility_true,utility_obs\n");
    for (const auto& r : trace.records) fmt::print("{},{:.6f},{:.6f}\n", r.cycle, r.utility_true, r.utility_obs);
  } else if (metric == "regret") {
    std::vector<sam::AllocationPlan> plans;
    for (std::size_t p = 0; p < sched.phases.size(); ++p) {
      plans.push_back(sam::oracle_for_phase(scenario.env, scenario.pool, p, 1).plan);
    }
    const auto ref = sam::plan_utility_series(scenario.env, plans, static_cast<std::int64_t>(trace.records.size()));
    const auto reg = sam::regret_series(trace, ref);
    const auto fit = sam::loglog_slope(reg);
    fmt::print("# loglog_slope={:.6f} stderr={:.6f} r2={:.6f}\n", fit.fit.slope, fit.fit.slope_stderr, fit.fit.r2);
    fmt::print("cycle,regret\n");
    for (std::size_t t = 0; t < reg.size(); ++t) fmt::print("{},{:.6f}\n", t, reg[t]);
  } else if (metric == "jitter") {
    const auto j = sam::jitter_series(trace);
    const auto fit = sam::jitter_decay_fit(j, 50);
    fmt::print("# sigma_delta={:.6f} c={:.6f} r2_inverse_t={:.6f} r2_cumulative_log={:.6f}\n", j.sigma,
               fit.inverse_t.slope, fit.inverse_t.r2, fit.cumulative_log.r2);
    fmt::print("cycle,delta,cumulative\n");
    for (std::size_t t = 0; t < j.delta.size(); ++t) fmt::print("{},{:.1f},{:.1f}\n", t, j.delta[t], j.cumulative[t]);
  } else if (metric == "stability") {
    const auto s = sam::stability_sigma_tps(trace, sched);
    const auto steady = sam::steady_state_utility(trace.utility_true(), sched);
    fmt::print("phase,steady_utility,sigma_tps\n");
    for (std::size_t p = 0; p < s.size(); ++p) fmt::print("{},{:.6f},{:.6f}\n", p, steady[p], s[p]);
  } else if (metric == "cost") {
    const auto c = sam::amortized_cost(trace, trace.records.size() / 2);
    fmt::print("# steady state: final half of the run\n");
    fmt::print("scan_fraction,mean_touched,p95_touched,mean_comparisons,mean_decision_us,p95_decision_us\n");
    fmt::print("{:.6f},{:.4f},{:.1f},{:.2f},{:.3f},{:.3f}\n", c.scan_fraction, c.mean_touched, c.p95_touched,
               c.mean_comparisons, c.mean_duration_ns / 1000.0, c.p95_duration_ns / 1000.0);
    fmt::print("touched,count\n");
    for (const auto& [k, n] : c.touched_histogram) fmt::print("{},{}\n", k, n);
  } else if (metric == "pages") {
    fmt::print("cycle");
    for (std::size_t i = 0; i < trace.tenants; ++i) fmt::print(",pages_{}", i);
    fmt::print("\n");
    for (const auto& r : trace.records) fmt::print("{},{}\n", r.cycle, fmt::join(r.plan, ","));
  } else {
    throw sam::ConfigError(fmt::format("unknown metric '{}'", metric));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shared buffer-pool allocation experiments"};
  app.require_subcommand(1);

  std::string config, out, suite_name, scenario, trace_path, metric;
  std::optional<std::uint64_t> seed;
  std::size_t phase = 0;
  sam::Pages chunk = 1;
  bool json = false;

  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config, "experiment JSON")->required();
  run->add_option("--seed", seed, "run only this seed");
  run->add_option("--out", out, "output directory (default $SAM_OUT_DIR or ./sam_out)");

  auto* suite = app.add_subcommand("suite", "run an acceptance suite");
  suite->add_option("name", suite_name, "suite name")->required()->check(CLI::IsMember(sam::suite_names()));
  suite->add_option("--out", out, "write suite traces here");
  suite->add_flag("--json", json, "machine-readable report");

  auto* oracle = app.add_subcommand("oracle", "hindsight-optimal static plan for one phase");
  oracle->add_option("--scenario", scenario, "built-in scenario name or scenario JSON file")->required();
  oracle->add_option("--phase", phase, "0-based phase index");
  oracle->add_option("--chunk", chunk, "page granularity (0 = default)");

  auto* analyze = app.add_subcommand("analyze", "derive a metric from a trace");
  analyze->add_option("--trace", trace_path, "trace CSV")->required();
  analyze->add_option("--metric", metric, "utility|regret|jitter|stability|cost|pages")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, seed, out);
    if (*suite) return cmd_suite(suite_name, out.empty() && std::getenv("SAM_OUT_DIR") ? default_out_dir().string() : out, json);
    if (*oracle) return cmd_oracle(scenario, phase, chunk);
    if (*analyze) return cmd_analyze(trace_path, metric);
  } catch (const std::exception& e) {
    fmt::print(stderr, "samctl: {}\n", e.what());
    return 2;
  }
  return 0;
}
