#include "sam/simenv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

namespace sam {

std::string_view to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::kExpSaturating: return "exp_saturating";
    case CurveKind::kLogisticSShape: return "logistic_s_shape";
    case CurveKind::kPolluterFlat: return "polluter_flat";
    case CurveKind::kQuiescent: return "quiescent";
  }
  return "unknown";
}

CurveKind curve_kind_from_string(std::string_view name) {
  if (name == "exp_saturating") return CurveKind::kExpSaturating;
  if (name == "logistic_s_shape" || name == "logistic") return CurveKind::kLogisticSShape;
  if (name == "polluter_flat" || name == "polluter") return CurveKind::kPolluterFlat;
  if (name == "quiescent") return CurveKind::kQuiescent;
  throw ConfigError(fmt::format("unknown curve kind '{}'", name));
}

void HitRateCurve::check() const {
  auto unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!unit(h_max)) throw ConfigError(fmt::format("curve h_max {} outside [0,1]", h_max));
  if (!unit(floor)) throw ConfigError(fmt::format("curve floor {} outside [0,1]", floor));
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("curve scale must be > 0");
  if (!(midpoint >= 0.0)) throw ConfigError("curve midpoint must be >= 0");
}

double true_hit_rate(const HitRateCurve& curve, double pages) {
  const double p = std::max(pages, 0.0);
  double hr = 0.0;
  switch (curve.kind) {
    case CurveKind::kExpSaturating:
      hr = curve.h_max * -std::expm1(-p / curve.scale);
      break;
    case CurveKind::kLogisticSShape:
      hr = curve.h_max / (1.0 + std::exp(-(p - curve.midpoint) / curve.scale));
      break;
    case CurveKind::kPolluterFlat:
      hr = curve.floor;
      break;
    case CurveKind::kQuiescent:
      hr = 0.0;
      break;
  }
  return std::clamp(hr, 0.0, 1.0);
}

bool BurstPattern::active(std::int64_t cycle) const {
  if (cycle < start || (end >= 0 && cycle >= end)) return false;
  const std::int64_t period = on + off;
  if (period <= 0) return false;
  return (cycle - start) % period < on;
}

std::int64_t WorkloadSchedule::total_cycles() const {
  std::int64_t total = 0;
  for (const auto& p : phases) total += p.duration;
  return total;
}

std::size_t WorkloadSchedule::phase_of(std::int64_t cycle) const {
  std::int64_t end = 0;
  for (std::size_t k = 0; k < phases.size(); ++k) {
    end += phases[k].duration;
    if (cycle < end) return k;
  }
  return phases.empty() ? 0 : phases.size() - 1;
}

std::int64_t WorkloadSchedule::phase_start(std::size_t phase) const {
  std::int64_t start = 0;
  for (std::size_t k = 0; k < phase && k < phases.size(); ++k) start += phases[k].duration;
  return start;
}

double WorkloadSchedule::expected_ops(TenantId tenant, std::int64_t cycle) const {
  const auto& phase = phases[phase_of(cycle)];
  double ops = base_ops[tenant] * phase.multiplier[tenant];
  if (tenant < bursts.size() && bursts[tenant] && bursts[tenant]->active(cycle)) {
    ops *= bursts[tenant]->amplitude;
  }
  return ops;
}

void WorkloadSchedule::check(std::size_t tenants) const {
  if (base_ops.size() != tenants) {
    throw ConfigError(fmt::format("schedule has {} base_ops entries for {} tenants", base_ops.size(), tenants));
  }
  for (std::size_t i = 0; i < tenants; ++i) {
    if (!(base_ops[i] >= 0.0)) throw ConfigError(fmt::format("tenant {}: base_ops must be >= 0", i));
  }
  if (phases.empty()) throw ConfigError("schedule needs at least one phase");
  for (std::size_t k = 0; k < phases.size(); ++k) {
    if (phases[k].duration < 1) throw ConfigError(fmt::format("phase {}: duration must be >= 1", k));
    if (phases[k].multiplier.size() != tenants) {
      throw ConfigError(fmt::format("phase {}: {} multipliers for {} tenants", k,
                                    phases[k].multiplier.size(), tenants));
    }
    for (double m : phases[k].multiplier) {
      if (!(m >= 0.0)) throw ConfigError(fmt::format("phase {}: negative multiplier", k));
    }
  }
  if (!bursts.empty() && bursts.size() != tenants) throw ConfigError("bursts must list every tenant");
}

void EnvironmentModel::check() const {
  if (curves.empty()) throw ConfigError("environment has no tenants");
  for (const auto& c : curves) c.check();
  schedule.check(curves.size());
  if (!(noise.hr_sigma >= 0.0) || !(noise.ops_sigma >= 0.0)) throw ConfigError("noise sigmas must be >= 0");
  if (!(miss_latency_ms >= hit_latency_ms)) throw ConfigError("miss latency must be >= hit latency");
}

void Scenario::check() const {
  env.check();
  pool.check();
  if (pool.tenants() != env.tenants()) {
    throw ConfigError(fmt::format("pool lists {} tenants, environment {}", pool.tenants(), env.tenants()));
  }
  if (!profiles.empty() && profiles.size() != env.tenants()) throw ConfigError("profiles must list every tenant");
  const auto bounds = effective_lower_bounds(pool);
  const Pages need = std::accumulate(bounds.begin(), bounds.end(), Pages{0});
  if (need > pool.total_pages) {
    throw InfeasibleError(fmt::format("lower bounds need {} pages, budget is {}", need, pool.total_pages));
  }
}

namespace {

std::mt19937_64 cell_rng(std::uint64_t seed, std::int64_t cycle, TenantId tenant) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(cycle), static_cast<std::uint32_t>(cycle >> 32),
                    static_cast<std::uint32_t>(tenant), 0x5a3du};
  return std::mt19937_64(seq);
}

}  // namespace

std::optional<std::vector<TenantObservation>> step(const EnvironmentModel& env,
                                                   const AllocationPlan& plan, std::int64_t cycle) {
  if (cycle < 0 || cycle >= env.schedule.total_cycles()) return std::nullopt;
  const std::size_t n = env.tenants();
  std::vector<TenantObservation> out(n);
  const bool noisy = env.noise.hr_sigma > 0.0 || env.noise.ops_sigma > 0.0;

  for (TenantId i = 0; i < n; ++i) {
    auto& o = out[i];
    o.current_pages = plan[i];
    if (env.curves[i].kind == CurveKind::kQuiescent) continue;

    double ops = env.schedule.expected_ops(i, cycle);
    double hr = true_hit_rate(env.curves[i], plan[i]);
    if (noisy) {
      auto rng = cell_rng(env.noise.seed, cycle, i);
      std::normal_distribution<double> gauss(0.0, 1.0);
      const double z_ops = gauss(rng);
      const double z_hr = gauss(rng);
      ops = std::max(ops * (1.0 + env.noise.ops_sigma * z_ops), 0.0);
      hr = std::clamp(hr * (1.0 + env.noise.hr_sigma * z_hr), 0.0, 1.0);
    }
    o.ops = ops;
    o.hits = ops * hr;
    o.misses = ops - o.hits;
    o.hit_rate = ops > 0.0 ? hr : 0.0;
  }
  return out;
}

std::vector<double> true_hit_rates(const EnvironmentModel& env, const AllocationPlan& plan) {
  std::vector<double> out(env.tenants());
  for (TenantId i = 0; i < out.size(); ++i) out[i] = true_hit_rate(env.curves[i], plan[i]);
  return out;
}

double effective_throughput(std::span<const TenantObservation> obs) {
  double sum = 0.0;
  for (const auto& o : obs) sum += o.ops * o.hit_rate;
  return sum;
}

double effective_throughput(std::span<const TenantObservation> obs, std::span<const double> true_rates) {
  double sum = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    sum += obs[i].ops * (i < true_rates.size() ? true_rates[i] : obs[i].hit_rate);
  }
  return sum;
}

double expected_utility(const EnvironmentModel& env, std::span<const Pages> pages, std::int64_t cycle) {
  double sum = 0.0;
  for (TenantId i = 0; i < env.tenants(); ++i) {
    if (env.curves[i].kind == CurveKind::kQuiescent) continue;
    sum += env.schedule.expected_ops(i, cycle) * true_hit_rate(env.curves[i], pages[i]);
  }
  return sum;
}

double expected_utility(const EnvironmentModel& env, const AllocationPlan& plan, std::int64_t cycle) {
  return expected_utility(env, std::span<const Pages>(plan.pages), cycle);
}

double mean_latency_ms(const EnvironmentModel& env, std::span<const TenantObservation> obs) {
  double ops = 0.0;
  double weighted = 0.0;
  for (const auto& o : obs) {
    weighted += o.ops * (o.hit_rate * env.hit_latency_ms + (1.0 - o.hit_rate) * env.miss_latency_ms);
    ops += o.ops;
  }
  return ops > 0.0 ? weighted / ops : 0.0;
}

// ---------------------------------------------------------------------------
// Built-in scenarios

namespace {

Scenario make_hotspot_shift(const ScenarioOptions& opt) {
  // One high-priority, one medium-priority and four low-priority tenants.
  Scenario s;
  s.name = "hotspot_shift";
  const std::vector<double> ops{100, 100, 100, 80, 60, 40};
  const std::vector<double> prio{3, 2, 1, 1, 1, 1};
  // The two tenants that become hot have long working sets; the rest
  // saturate early, so a hotspot should own most of the elastic pool.
  const std::vector<double> h{0.92, 0.90, 0.88, 0.85, 0.90, 0.80};
  const std::vector<double> scale{700, 600, 120, 100, 80, 60};
  const std::vector<std::string> names{"db_high_prio", "db_medium_prio", "db_low_0",
                                       "db_low_1",     "db_low_2",       "db_low_3"};
  const std::size_t n = ops.size();
  for (std::size_t i = 0; i < n; ++i) {
    s.env.curves.push_back(HitRateCurve::exp_saturating(h[i], scale[i]));
    s.profiles.push_back({names[i], 1000.0 * (1.0 + static_cast<double>(i % 3)), 0.8});
  }
  s.env.schedule.base_ops = ops;
  std::vector<double> base(n, 1.0);
  auto hot0 = base;
  hot0[0] = 30.0;
  auto hot1 = base;
  hot1[1] = 30.0;
  const std::int64_t shifted = opt.cycles ? std::max<std::int64_t>((*opt.cycles - 60) / 2, 1) : 300;
  s.env.schedule.phases = {{60, base}, {shifted, hot0}, {shifted, hot1}};
  s.pool.total_pages = 4096;
  s.pool.fixed_pages = 1024;
  s.pool.base_priority = prio;
  s.pool.lower_bound.assign(n, 64);
  return s;
}

Scenario make_pollution_attack(const ScenarioOptions& opt) {
  // A VIP tenant with a tight working set and a scanning attacker share
  // a 2 MB (512-page) cache. Bursts start after a clean baseline phase.
  Scenario s;
  s.name = "pollution_attack";
  s.env.curves = {HitRateCurve::exp_saturating(0.95, 80.0), HitRateCurve::polluter(0.05)};
  s.profiles = {{"vip", 2000.0, 0.9}, {"attacker", 8000.0, 0.5}};
  s.env.schedule.base_ops = {100.0, 40.0};
  const std::int64_t baseline = 100;
  const std::int64_t attack = opt.cycles ? std::max<std::int64_t>(*opt.cycles - baseline, 1) : 500;
  s.env.schedule.phases = {{baseline, {1.0, 1.0}}, {attack, {1.0, 1.0}}};
  s.env.schedule.bursts = {std::nullopt, BurstPattern{baseline, -1, 20, 20, 10.0}};
  s.pool.total_pages = 512;
  s.pool.fixed_pages = 96;
  s.pool.base_priority = {3.0, 1.0};
  s.pool.lower_bound = {32, 16};
  return s;
}

// Deterministic spread of tenant parameters used by the generated scenarios.
double spread(std::size_t i, std::size_t n, double lo, double hi, std::size_t stride) {
  if (n <= 1) return lo;
  const std::size_t k = (i * stride) % n;
  return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
}

Scenario make_stationary_concave(const ScenarioOptions& opt) {
  Scenario s;
  s.name = "stationary_concave";
  const std::size_t n = opt.tenants.value_or(10);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = spread(i, n, 0.70, 0.95, 3);
    const double scale = spread(i, n, 60.0, 400.0, 7);
    s.env.curves.push_back(HitRateCurve::exp_saturating(h, scale));
    s.env.schedule.base_ops.push_back(spread(i, n, 50.0, 400.0, 1));
    s.profiles.push_back({fmt::format("tenant_{}", i), 1000.0, 0.8});
  }
  s.env.schedule.phases = {{opt.cycles.value_or(5000), std::vector<double>(n, 1.0)}};
  s.env.noise = NoiseModel{0.01, 0.02, 1};  // mild: half the default hit-rate noise
  s.pool.total_pages = static_cast<Pages>(205 * n);
  s.pool.fixed_pages = s.pool.total_pages / 4;
  s.pool.base_priority.assign(n, 1.0);
  s.pool.lower_bound.assign(n, 32);
  return s;
}

Scenario make_sshape_stress(const ScenarioOptions& opt) {
  Scenario s;
  s.name = "sshape_stress";
  const std::size_t n = opt.tenants.value_or(8);
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 2 == 0) {
      s.env.curves.push_back(HitRateCurve::logistic(spread(i, n, 0.75, 0.95, 3), spread(i, n, 20.0, 60.0, 5),
                                                    spread(i, n, 150.0, 450.0, 3)));
    } else {
      s.env.curves.push_back(HitRateCurve::exp_saturating(spread(i, n, 0.7, 0.9, 5), spread(i, n, 80.0, 300.0, 3)));
    }
    s.env.schedule.base_ops.push_back(spread(i, n, 60.0, 300.0, 3));
    s.profiles.push_back({fmt::format("tenant_{}", i), 1000.0, 0.8});
  }
  s.env.schedule.phases = {{opt.cycles.value_or(2000), std::vector<double>(n, 1.0)}};
  s.pool.total_pages = static_cast<Pages>(256 * n);
  s.pool.fixed_pages = s.pool.total_pages / 4;
  s.pool.base_priority.assign(n, 1.0);
  s.pool.lower_bound.assign(n, 32);
  return s;
}

Scenario make_scale(const ScenarioOptions& opt) {
  Scenario s;
  const std::size_t n = opt.tenants.value_or(60);
  s.name = fmt::format("scale_{}", n);
  for (std::size_t i = 0; i < n; ++i) {
    s.env.curves.push_back(
        HitRateCurve::exp_saturating(spread(i, n, 0.6, 0.95, 7), spread(i, n, 40.0, 400.0, 11)));
    // Log-uniform load between 20 and 500 ops per cycle.
    const double u = spread(i, n, 0.0, 1.0, 13);
    s.env.schedule.base_ops.push_back(20.0 * std::pow(25.0, u));
    s.profiles.push_back({fmt::format("tenant_{}", i), 1000.0, 0.8});
  }
  s.env.schedule.phases = {{opt.cycles.value_or(2000), std::vector<double>(n, 1.0)}};
  s.pool.total_pages = static_cast<Pages>(256 * n);
  s.pool.fixed_pages = s.pool.total_pages / 4;
  s.pool.base_priority.assign(n, 1.0);
  s.pool.lower_bound.assign(n, 16);
  return s;
}

Scenario make_archetypes(const ScenarioOptions& opt) {
  // Saturated, emerging, polluter and quiescent tenants side by side.
  Scenario s;
  s.name = "archetypes";
  s.env.curves = {HitRateCurve::exp_saturating(0.95, 30.0), HitRateCurve::exp_saturating(0.90, 400.0),
                  HitRateCurve::polluter(0.03), HitRateCurve::quiescent()};
  s.profiles = {{"saturated", 500.0, 0.9}, {"emerging", 4000.0, 0.8}, {"polluter", 8000.0, 0.5},
                {"quiescent", 100.0, 0.5}};
  s.env.schedule.base_ops = {200.0, 150.0, 300.0, 0.0};
  s.env.schedule.phases = {{opt.cycles.value_or(1000), {1.0, 1.0, 1.0, 1.0}}};
  s.pool.total_pages = 2048;
  s.pool.fixed_pages = 256;
  s.pool.base_priority = {1.0, 1.0, 1.0, 1.0};
  s.pool.lower_bound = {32, 32, 32, 32};
  return s;
}

}  // namespace

std::vector<std::string> scenario_names() {
  return {"hotspot_shift", "pollution_attack", "stationary_concave", "sshape_stress", "scale_K", "archetypes"};
}

Scenario make_scenario(std::string_view name, const ScenarioOptions& options) {
  Scenario s;
  if (name == "hotspot_shift") {
    s = make_hotspot_shift(options);
  } else if (name == "pollution_attack") {
    s = make_pollution_attack(options);
  } else if (name == "stationary_concave") {
    s = make_stationary_concave(options);
  } else if (name == "sshape_stress") {
    s = make_sshape_stress(options);
  } else if (name == "archetypes") {
    s = make_archetypes(options);
  } else if (name == "scale_K") {
    s = make_scale(options);
  } else if (name.starts_with("scale_")) {
    std::size_t k = 0;
    const auto digits = name.substr(6);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || k == 0) {
      throw ConfigError(fmt::format("bad scale scenario name '{}'", name));
    }
    auto opt = options;
    opt.tenants = k;
    s = make_scale(opt);
  } else {
    throw ConfigError(fmt::format("unknown scenario '{}'", name));
  }
  if (options.noise) s.env.noise = *options.noise;
  s.check();
  return s;
}

}  // namespace sam
