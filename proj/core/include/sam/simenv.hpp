#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sam/domain.hpp"

namespace sam {

enum class CurveKind { kExpSaturating, kLogisticSShape, kPolluterFlat, kQuiescent };

std::string_view to_string(CurveKind kind);
CurveKind curve_kind_from_string(std::string_view name);

/// Ground-truth hit rate of one tenant as a function of its pages.
///   exp_saturating:   h_max * (1 - exp(-pages / scale))       (concave)
///   logistic_s_shape: h_max / (1 + exp(-(pages - midpoint) / scale))
///   polluter_flat:    floor, independent of pages
///   quiescent:        0, and the tenant issues no operations
struct HitRateCurve {
  CurveKind kind = CurveKind::kExpSaturating;
  double h_max = 0.9;
  double scale = 100.0;
  double midpoint = 0.0;
  double floor = 0.0;

  static HitRateCurve exp_saturating(double h_max, double scale) {
    return {CurveKind::kExpSaturating, h_max, scale, 0.0, 0.0};
  }
  static HitRateCurve logistic(double h_max, double scale, double midpoint) {
    return {CurveKind::kLogisticSShape, h_max, scale, midpoint, 0.0};
  }
  static HitRateCurve polluter(double floor) { return {CurveKind::kPolluterFlat, 0.0, 1.0, 0.0, floor}; }
  static HitRateCurve quiescent() { return {CurveKind::kQuiescent, 0.0, 1.0, 0.0, 0.0}; }

  void check() const;
};

double true_hit_rate(const HitRateCurve& curve, double pages);
inline double true_hit_rate(const HitRateCurve& curve, Pages pages) {
  return true_hit_rate(curve, static_cast<double>(pages));
}

/// Square-wave modulation of one tenant's load: `on` cycles at
/// `amplitude` times the phase load, then `off` cycles at 1x, starting
/// at `start` and ending before `end` (end < 0 means never).
struct BurstPattern {
  std::int64_t start = 0;
  std::int64_t end = -1;
  std::int64_t on = 20;
  std::int64_t off = 20;
  double amplitude = 10.0;

  [[nodiscard]] bool active(std::int64_t cycle) const;
};

struct Phase {
  std::int64_t duration = 1;
  std::vector<double> multiplier;
};

struct WorkloadSchedule {
  std::vector<double> base_ops;
  std::vector<Phase> phases;
  std::vector<std::optional<BurstPattern>> bursts;

  [[nodiscard]] std::int64_t total_cycles() const;
  /// Index of the phase containing `cycle`; requires cycle < total_cycles().
  [[nodiscard]] std::size_t phase_of(std::int64_t cycle) const;
  [[nodiscard]] std::int64_t phase_start(std::size_t phase) const;
  /// Noise-free operations per cycle for a tenant.
  [[nodiscard]] double expected_ops(TenantId tenant, std::int64_t cycle) const;

  void check(std::size_t tenants) const;
};

/// Multiplicative Gaussian observation noise, clamped after application.
struct NoiseModel {
  double hr_sigma = 0.02;
  double ops_sigma = 0.05;
  std::uint64_t seed = 1;
};

struct EnvironmentModel {
  std::vector<HitRateCurve> curves;
  WorkloadSchedule schedule;
  NoiseModel noise;
  double hit_latency_ms = 0.1;
  double miss_latency_ms = 50.0;

  [[nodiscard]] std::size_t tenants() const { return curves.size(); }
  void check() const;
};

/// Per-tenant metadata consumed by a few baselines and reports.
struct TenantProfile {
  std::string name;
  double data_size = 1.0;
  double sla_hit_rate = 0.8;
};

struct Scenario {
  std::string name;
  EnvironmentModel env;
  PoolConfig pool;
  std::vector<TenantProfile> profiles;

  [[nodiscard]] std::size_t tenants() const { return env.tenants(); }
  void check() const;
};

/// Sense: per-tenant observations for the plan in force during `cycle`.
/// Deterministic in (env, plan, cycle, seed). Returns nullopt once the
/// schedule is exhausted.
std::optional<std::vector<TenantObservation>> step(const EnvironmentModel& env,
                                                   const AllocationPlan& plan, std::int64_t cycle);

/// Ground-truth hit rates of the plan, no noise.
std::vector<double> true_hit_rates(const EnvironmentModel& env, const AllocationPlan& plan);

/// Per-cycle utility: sum of ops * hit rate over tenants.
double effective_throughput(std::span<const TenantObservation> obs);
/// Same sum, substituting ground-truth hit rates where supplied.
double effective_throughput(std::span<const TenantObservation> obs, std::span<const double> true_rates);

/// Noise-free utility of a plan at a cycle: expected ops times true hit rate.
double expected_utility(const EnvironmentModel& env, const AllocationPlan& plan, std::int64_t cycle);
double expected_utility(const EnvironmentModel& env, std::span<const Pages> pages, std::int64_t cycle);

/// Latency proxy HR * L_hit + (1 - HR) * L_miss, ops-weighted over tenants.
double mean_latency_ms(const EnvironmentModel& env, std::span<const TenantObservation> obs);

struct ScenarioOptions {
  std::optional<std::size_t> tenants;
  std::optional<std::int64_t> cycles;
  std::optional<NoiseModel> noise;
};

/// Built-in scenarios: hotspot_shift, pollution_attack, stationary_concave,
/// sshape_stress, scale_K (also scale_<K>), archetypes.
Scenario make_scenario(std::string_view name, const ScenarioOptions& options = {});
std::vector<std::string> scenario_names();

/// JSON-compatible scenario documents; see docs/config.md for the schema.
Scenario parse_scenario(std::string_view json_text);
std::string dump_scenario(const Scenario& scenario);

}  // namespace sam
