#include "sam/runner.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "json_util.hpp"
#include "sam/oracle.hpp"
#include "scenario_json.hpp"

namespace sam {

using nlohmann::json;

void ExperimentConfig::check() const {
  if (policies.empty()) throw ConfigError("experiment: at least one policy is required");
  if (seeds.empty()) throw ConfigError("experiment: at least one seed is required");
  if (cycles && *cycles < 0) throw ConfigError("experiment.cycles must be >= 0");
  std::set<std::string> labels;
  for (const auto& p : policies) {
    if (!labels.insert(p.display_name()).second) {
      throw ConfigError(fmt::format("experiment: duplicate policy label '{}'", p.display_name()));
    }
  }
  scenario.check();
}

ExperimentConfig parse_experiment_config(std::string_view json_text) {
  const json doc = detail::parse_json(json_text, "experiment config");
  if (!doc.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentConfig cfg;
  try {
    if (!doc.contains("scenario")) throw ConfigError("experiment: missing field 'scenario'");
    const json& sc = doc.at("scenario");
    cfg.scenario = sc.is_string() ? make_scenario(sc.get<std::string>()) : scenario_from_json(sc);

    if (!doc.contains("policies") || !doc.at("policies").is_array()) {
      throw ConfigError("experiment: 'policies' must be an array");
    }
    for (std::size_t k = 0; k < doc.at("policies").size(); ++k) {
      const json& p = doc.at("policies")[k];
      const std::string path = fmt::format("policies[{}]", k);
      PolicySpec spec;
      if (p.is_string()) {
        spec.kind = p.get<std::string>();
      } else {
        spec.kind = detail::required<std::string>(p, "kind", path);
        spec.label = detail::value_or<std::string>(p, "label", "", path);
        if (p.contains("params")) {
          for (const auto& [key, value] : p.at("params").items()) {
            if (value.is_boolean()) {
              spec.params[key] = value.get<bool>() ? 1.0 : 0.0;
            } else if (value.is_number()) {
              spec.params[key] = value.get<double>();
            } else {
              throw ConfigError(fmt::format("{}.params.{}: expected a number or boolean", path, key));
            }
          }
        }
      }
      make_policy(spec, cfg.scenario);  // validates kind and parameters early
      cfg.policies.push_back(std::move(spec));
    }
    cfg.seeds = detail::value_or(doc, "seeds", cfg.seeds, "experiment");
    if (doc.contains("cycles")) cfg.cycles = detail::required<std::int64_t>(doc, "cycles", "experiment");
    cfg.out_dir = detail::value_or<std::string>(doc, "out_dir", "", "experiment");
    cfg.write_traces = detail::value_or(doc, "traces", cfg.write_traces, "experiment");
    cfg.timing = detail::value_or(doc, "timing", cfg.timing, "experiment");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  cfg.check();
  return cfg;
}

RunTrace run_single(const Scenario& scenario, const PolicySpec& spec, std::uint64_t seed,
                    std::optional<std::int64_t> cycles, const DecisionHook& hook) {
  EnvironmentModel env = scenario.env;
  env.noise.seed = seed;
  auto policy = make_policy(spec, scenario);

  RunTrace trace;
  trace.scenario = scenario.name;
  trace.policy = spec.display_name();
  trace.seed = seed;
  trace.tenants = scenario.tenants();
  Scenario stamped = scenario;
  stamped.env.noise.seed = seed;
  trace.scenario_json = scenario_to_json(stamped).dump();

  const std::int64_t horizon =
      std::min(env.schedule.total_cycles(), cycles.value_or(env.schedule.total_cycles()));
  trace.records.reserve(static_cast<std::size_t>(std::max<std::int64_t>(horizon, 0)));
  AllocationPlan plan = policy->initial_plan();
  for (std::int64_t t = 0; t < horizon; ++t) {
    auto obs = step(env, plan, t);
    if (!obs) break;
    CycleRecord r;
    r.cycle = t;
    r.plan = plan.pages;
    r.true_hr = true_hit_rates(env, plan);
    r.expected_ops.resize(trace.tenants);
    for (TenantId i = 0; i < trace.tenants; ++i) r.expected_ops[i] = env.schedule.expected_ops(i, t);
    r.utility_obs = effective_throughput(*obs);
    r.utility_true = 0.0;
    for (TenantId i = 0; i < trace.tenants; ++i) r.utility_true += r.expected_ops[i] * r.true_hr[i];
    r.latency_ms = mean_latency_ms(env, *obs);

    const auto started = std::chrono::steady_clock::now();
    AllocationPlan next = policy->decide(*obs, plan, t);
    const auto finished = std::chrono::steady_clock::now();
    r.decision_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(finished - started).count();
    r.stats = policy->last_stats();
    if (policy->respects_bounds()) {
      r.valid = validate_plan(next, policy->pool()).ok();
    } else {
      r.valid = validate_plan(next, scenario.pool).ok();
    }
    r.obs = std::move(*obs);
    if (hook) hook(*policy, t);
    trace.records.push_back(std::move(r));
    plan = std::move(next);
  }
  return trace;
}

std::vector<double> steady_state_utility(std::span<const double> utility, const WorkloadSchedule& schedule) {
  std::vector<double> out;
  for (std::size_t ph = 0; ph < schedule.phases.size(); ++ph) {
    const auto start = static_cast<std::size_t>(schedule.phase_start(ph));
    const auto len = static_cast<std::size_t>(schedule.phases[ph].duration);
    const std::size_t from = start + len / 2;
    const std::size_t to = std::min(start + len, utility.size());
    double sum = 0.0;
    for (std::size_t k = from; k < to; ++k) sum += utility[k];
    out.push_back(to > from ? sum / static_cast<double>(to - from) : 0.0);
  }
  return out;
}

namespace {

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) c = '_';
  }
  return s;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.check();
  ExperimentSummary summary;
  summary.scenario = cfg.scenario.name;
  if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);

  // Hindsight reference per phase, shared by every run.
  std::vector<AllocationPlan> oracle_plans;
  for (std::size_t ph = 0; ph < cfg.scenario.env.schedule.phases.size(); ++ph) {
    oracle_plans.push_back(oracle_for_phase(cfg.scenario.env, cfg.scenario.pool, ph).plan);
  }

  for (const auto& spec : cfg.policies) {
    for (std::uint64_t seed : cfg.seeds) {
      const auto trace = run_single(cfg.scenario, spec, seed, cfg.cycles);
      RunSummary s;
      s.policy = spec.display_name();
      s.seed = seed;
      s.cycles = static_cast<std::int64_t>(trace.records.size());
      const auto u = trace.utility_true();
      if (!u.empty()) s.mean_utility = std::accumulate(u.begin(), u.end(), 0.0) / static_cast<double>(u.size());
      s.steady_utility = steady_state_utility(u, cfg.scenario.env.schedule);
      s.oracle_utility = steady_state_utility(
          plan_utility_series(cfg.scenario.env, oracle_plans, s.cycles), cfg.scenario.env.schedule);
      s.sigma_tps = stability_sigma_tps(trace, cfg.scenario.env.schedule);
      s.sigma_delta = jitter_series(trace).sigma;
      const auto cost = amortized_cost(trace);
      s.scan_fraction = cost.scan_fraction;
      s.mean_touched = cost.mean_touched;
      s.mean_decision_us = cost.mean_duration_ns / 1000.0;
      for (const auto& r : trace.records) s.invalid_plans += r.valid ? 0 : 1;

      if (!cfg.out_dir.empty() && cfg.write_traces) {
        const auto file = cfg.out_dir / fmt::format("{}__{}__seed{}.csv", sanitize(cfg.scenario.name),
                                                    sanitize(s.policy), seed);
        std::ofstream out(file);
        if (!out) throw std::runtime_error(fmt::format("cannot write {}", file.string()));
        write_trace_csv(out, trace, cfg.timing);
        s.trace_file = file.filename().string();
      }
      summary.runs.push_back(std::move(s));
    }
  }
  if (!cfg.out_dir.empty()) {
    std::ofstream out(cfg.out_dir / "summary.json");
    out << summary_to_json(summary) << '\n';
  }
  return summary;
}

std::string summary_to_json(const ExperimentSummary& summary) {
  json doc;
  doc["schema"] = "sam-summary v1";
  doc["scenario"] = summary.scenario;
  doc["runs"] = json::array();
  for (const auto& r : summary.runs) {
    json j;
    j["policy"] = r.policy;
    j["seed"] = r.seed;
    j["cycles"] = r.cycles;
    j["mean_utility"] = r.mean_utility;
    j["steady_utility"] = r.steady_utility;
    j["oracle_utility"] = r.oracle_utility;
    j["sigma_tps"] = r.sigma_tps;
    j["sigma_delta"] = r.sigma_delta;
    j["scan_fraction"] = r.scan_fraction;
    j["mean_touched"] = r.mean_touched;
    j["mean_decision_us"] = r.mean_decision_us;
    j["invalid_plans"] = r.invalid_plans;
    if (!r.trace_file.empty()) j["trace_file"] = r.trace_file;
    doc["runs"].push_back(std::move(j));
  }
  return doc.dump(2);
}

bool SuiteReport::passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.passed; });
}

std::string report_to_json(const SuiteReport& report) {
  json doc;
  doc["suite"] = report.suite;
  doc["passed"] = report.passed();
  doc["criteria"] = json::array();
  for (const auto& c : report.criteria) {
    json j;
    j["id"] = c.id;
    j["title"] = c.title;
    j["passed"] = c.passed;
    j["detail"] = c.detail;
    j["metrics"] = c.metrics;
    doc["criteria"].push_back(std::move(j));
  }
  return doc.dump(2);
}

Scenario random_scenario(std::mt19937_64& rng, std::size_t max_tenants, std::int64_t cycles) {
  std::uniform_int_distribution<std::size_t> nt(2, std::max<std::size_t>(max_tenants, 2));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const std::size_t n = nt(rng);
  Scenario s;
  s.name = "random";
  for (std::size_t i = 0; i < n; ++i) {
    const double pick = u01(rng);
    HitRateCurve c;
    if (pick < 0.55) {
      c = HitRateCurve::exp_saturating(0.3 + 0.69 * u01(rng), 5.0 + 500.0 * u01(rng));
    } else if (pick < 0.75) {
      c = HitRateCurve::logistic(0.3 + 0.69 * u01(rng), 5.0 + 80.0 * u01(rng), 400.0 * u01(rng));
    } else if (pick < 0.92) {
      c = HitRateCurve::polluter(0.2 * u01(rng));
    } else {
      c = HitRateCurve::quiescent();
    }
    s.env.curves.push_back(c);
    s.env.schedule.base_ops.push_back(c.kind == CurveKind::kQuiescent ? 0.0 : 1.0 + 500.0 * u01(rng));
    s.profiles.push_back({fmt::format("t{}", i), 1.0 + 1000.0 * u01(rng), 0.5 + 0.45 * u01(rng)});
  }
  const std::size_t phases = 1 + static_cast<std::size_t>(u01(rng) * 3.0);
  std::int64_t left = std::max<std::int64_t>(cycles, static_cast<std::int64_t>(phases));
  for (std::size_t k = 0; k < phases; ++k) {
    Phase p;
    p.duration = k + 1 == phases ? left : std::max<std::int64_t>(1, left / static_cast<std::int64_t>(phases - k));
    left -= p.duration;
    for (std::size_t i = 0; i < n; ++i) p.multiplier.push_back(u01(rng) < 0.2 ? 1.0 + 20.0 * u01(rng) : 1.0);
    s.env.schedule.phases.push_back(std::move(p));
  }
  if (u01(rng) < 0.5) {
    s.env.schedule.bursts.resize(n);
    const auto who = static_cast<std::size_t>(u01(rng) * static_cast<double>(n)) % n;
    s.env.schedule.bursts[who] = BurstPattern{static_cast<std::int64_t>(u01(rng) * 50.0), -1,
                                              1 + static_cast<std::int64_t>(u01(rng) * 30.0),
                                              1 + static_cast<std::int64_t>(u01(rng) * 30.0), 1.0 + 10.0 * u01(rng)};
  }
  s.env.noise = NoiseModel{0.05 * u01(rng), 0.1 * u01(rng), rng()};
  s.pool.lower_bound.resize(n);
  Pages floor_sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s.pool.lower_bound[i] = static_cast<Pages>(u01(rng) * 64.0);
    floor_sum += s.pool.lower_bound[i];
    s.pool.base_priority.push_back(u01(rng) < 0.2 ? 0.0 : 1.0 + 4.0 * u01(rng));
  }
  s.pool.total_pages = floor_sum + static_cast<Pages>(n) + static_cast<Pages>(u01(rng) * 3000.0);
  s.pool.fixed_pages = static_cast<Pages>(u01(rng) * 0.5 * static_cast<double>(s.pool.total_pages));
  if (std::all_of(s.pool.base_priority.begin(), s.pool.base_priority.end(), [](double p) { return p == 0.0; })) {
    s.pool.base_priority[0] = 1.0;
  }
  // Fixed shares may push the effective floors over budget; shrink until feasible.
  while (true) {
    const auto floors = effective_lower_bounds(s.pool);
    if (std::accumulate(floors.begin(), floors.end(), Pages{0}) <= s.pool.total_pages) break;
    s.pool.fixed_pages /= 2;
  }
  s.check();
  return s;
}

}  // namespace sam
