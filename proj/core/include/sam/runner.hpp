#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sam/analysis.hpp"
#include "sam/policy.hpp"
#include "sam/simenv.hpp"

namespace sam {

struct ExperimentConfig {
  Scenario scenario;
  std::vector<PolicySpec> policies;
  std::vector<std::uint64_t> seeds{1};
  std::optional<std::int64_t> cycles;  // caps the schedule length
  std::filesystem::path out_dir;
  bool write_traces = true;
  bool timing = false;  // record wall-clock decision time in traces

  void check() const;
};

/// Parses an experiment document (see docs/config.md). Syntax errors carry
/// the offending line; semantic errors name the field.
ExperimentConfig parse_experiment_config(std::string_view json_text);

/// Called after every decision with the policy and the cycle just decided.
using DecisionHook = std::function<void(const Policy&, std::int64_t)>;

/// One Sense-Decide-Act loop. The scenario's noise seed is replaced by
/// `seed`; `cycles` truncates the schedule.
RunTrace run_single(const Scenario& scenario, const PolicySpec& spec, std::uint64_t seed,
                    std::optional<std::int64_t> cycles = std::nullopt, const DecisionHook& hook = {});

struct RunSummary {
  std::string policy;
  std::uint64_t seed = 0;
  std::int64_t cycles = 0;
  double mean_utility = 0.0;
  std::vector<double> steady_utility;  // per phase, final half
  std::vector<double> oracle_utility;  // per phase, same window
  std::vector<double> sigma_tps;       // per phase
  double sigma_delta = 0.0;
  double scan_fraction = 0.0;
  double mean_touched = 0.0;
  double mean_decision_us = 0.0;
  std::size_t invalid_plans = 0;
  std::string trace_file;
};

struct ExperimentSummary {
  std::string scenario;
  std::vector<RunSummary> runs;
};

/// Mean expected utility over the final half of every phase.
std::vector<double> steady_state_utility(std::span<const double> utility, const WorkloadSchedule& schedule);

/// Runs every (policy, seed) pair, writes one trace CSV per run plus
/// summary.json into out_dir (when set), and returns the summary.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);
std::string summary_to_json(const ExperimentSummary& summary);

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  std::map<std::string, double> metrics;
};

struct SuiteReport {
  std::string suite;
  std::vector<CriterionResult> criteria;
  [[nodiscard]] bool passed() const;
};

struct SuiteOptions {
  std::filesystem::path out_dir;  // traces are written here when set
  bool verbose = false;
};

/// Suites: regret, gap, stability, robustness, adaptation, scalability,
/// oracle, invariants, archetypes, or all.
SuiteReport run_suite(std::string_view name, const SuiteOptions& options = {});
std::vector<std::string> suite_names();
std::string report_to_json(const SuiteReport& report);

/// Random but valid scenario for fuzzing: 2 to max_tenants tenants, mixed
/// curve kinds, phases, bursts and noise.
Scenario random_scenario(std::mt19937_64& rng, std::size_t max_tenants, std::int64_t cycles);

}  // namespace sam
