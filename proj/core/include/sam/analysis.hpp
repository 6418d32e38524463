#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sam/domain.hpp"
#include "sam/policy.hpp"
#include "sam/simenv.hpp"

namespace sam {

inline constexpr const char* kTraceSchema = "sam-trace v1";

/// One Sense-Decide-Act cycle as seen by the runner.
struct CycleRecord {
  std::int64_t cycle = 0;
  std::vector<Pages> plan;  // plan in force during the cycle
  std::vector<TenantObservation> obs;
  std::vector<double> true_hr;
  std::vector<double> expected_ops;
  double utility_obs = 0.0;   // sum ops * observed hit rate
  double utility_true = 0.0;  // sum expected ops * true hit rate
  double latency_ms = 0.0;
  std::int64_t decision_ns = 0;
  DecisionStats stats;
  bool valid = true;  // plan emitted this cycle passed validate_plan
};

struct RunTrace {
  std::string scenario;
  std::string policy;
  std::uint64_t seed = 0;
  std::size_t tenants = 0;
  std::string scenario_json;  // full scenario document, for reproducibility
  std::vector<CycleRecord> records;

  [[nodiscard]] std::vector<double> utility_true() const;
  [[nodiscard]] std::vector<double> utility_obs() const;
};

/// CSV with a schema header line and metadata comments. Wall-clock
/// decision time is written only when `timing` is set, so traces of the
/// same configuration are byte-identical by default.
void write_trace_csv(std::ostream& out, const RunTrace& trace, bool timing = false);
/// Throws ConfigError on a schema mismatch or malformed rows.
RunTrace read_trace_csv(std::istream& in);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Per-cycle utility of a reference plan sequence, e.g. the oracle's.
std::vector<double> plan_utility_series(const EnvironmentModel& env, std::span<const AllocationPlan> plan_per_phase,
                                        std::int64_t cycles);

/// Reg_T = sum over t <= T of (reference_t - utility_true_t).
std::vector<double> regret_series(const RunTrace& trace, std::span<const double> reference_utility);

struct SlopeFit {
  LinearFit fit;
  std::size_t first_index = 0;  // first series index used (0-based)
  bool window_shrunk = false;   // non-positive values forced a later start
};
/// Least-squares slope of log(series_t) on log(t), t = index + 1, over the
/// trailing `window` fraction of the series.
SlopeFit loglog_slope(std::span<const double> series, double window = 0.5);

struct JitterStats {
  std::vector<double> delta;       // delta[t] = |x_t - x_{t-1}|_1, delta[0] = 0
  std::vector<double> cumulative;  // running sum of delta
  double sigma = 0.0;              // std of delta over the final half
};
JitterStats jitter_series(const RunTrace& trace);

/// Fit of the decay law delta_t ~ c / t between `warmup` and the last
/// non-zero delta, on means over `bins` log-spaced bins. Reports c as the
/// slope against 1/t.
struct DecayFit {
  LinearFit inverse_t;       // bin means against 1/t (through the origin)
  LinearFit cumulative_log;  // cumulative variation against log t
  std::size_t fit_end = 0;   // one past the last cycle with a move
};
DecayFit jitter_decay_fit(const JitterStats& jitter, std::size_t warmup, std::size_t bins = 20);

/// Mean over sliding windows of the std of expected utility, per phase,
/// restricted to the final half of each phase.
std::vector<double> stability_sigma_tps(const RunTrace& trace, const WorkloadSchedule& schedule,
                                        std::size_t window = 20);
/// Population standard deviation.
double stddev(std::span<const double> values);

struct LagResult {
  std::int64_t cycles = 0;
  bool censored = false;
};
/// Cycles from `boundary` until expected utility reaches threshold x target.
/// Censored lags report the remaining run length.
LagResult adaptation_lag(const RunTrace& trace, std::int64_t boundary, double target_utility,
                         double threshold = 0.95, std::int64_t phase_end = -1);
/// Same, requiring rolling mean minus rolling std over `window` cycles to
/// reach the threshold, which penalizes oscillating controllers.
LagResult sigma_adjusted_lag(const RunTrace& trace, std::int64_t boundary, double target_utility,
                             double threshold = 0.95, std::size_t window = 10, std::int64_t phase_end = -1);

struct CostStats {
  double mean_duration_ns = 0.0;
  double p95_duration_ns = 0.0;
  double scan_fraction = 0.0;
  double mean_touched = 0.0;
  double p95_touched = 0.0;
  double mean_comparisons = 0.0;
  std::map<std::size_t, std::size_t> touched_histogram;
};
/// Work accounting over records [from, to); to < 0 means the end.
CostStats amortized_cost(const RunTrace& trace, std::size_t from = 0, std::int64_t to = -1);

/// Reporting-only constants of the regret bound G D sqrt(2T) + delta T.
struct TheoryParams {
  double G = 0.0;
  double D = 0.0;
  double L = 0.0;
  double delta = 0.0;
  double alpha_cc = 1.0;

  [[nodiscard]] double regret_bound(double T) const;
  static TheoryParams estimate(const Scenario& scenario);
};

}  // namespace sam
