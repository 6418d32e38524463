#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>

#include <fmt/format.h>

#include "sam/aura.hpp"
#include "sam/baselines.hpp"
#include "sam/core_policy.hpp"
#include "sam/oracle.hpp"
#include "sam/policy.hpp"

namespace sam {

namespace {

struct KindInfo {
  const char* short_name;
  const char* long_name;
};

constexpr KindInfo kKinds[] = {
    {"aura", "aura"},
    {"sam_core", "sam_core"},
    {"b1", "b1_static_average"},
    {"b2", "b2_fixed_priority"},
    {"b3", "b3_pure_elastic"},
    {"b4", "b4_individual_opt"},
    {"b5", "b5_global_lru_proxy"},
    {"b6", "b6_datasize_prop"},
    {"b7", "b7_dynamic_need"},
    {"b8", "b8_efficiency_only"},
    {"b9", "b9_reactive_h"},
    {"b10", "b10_potential_only"},
    {"b11", "b11_regression"},
    {"b12", "b12_sla_driven"},
    {"b13", "b13_ucp"},
    {"b14", "b14_oracle"},
};

std::string canonical_kind(std::string kind) {
  std::transform(kind.begin(), kind.end(), kind.begin(), [](unsigned char c) { return std::tolower(c); });
  if (kind == "core" || kind == "aura_core" || kind == "sam-core") return "sam_core";
  if (kind == "oracle") return "b14";
  for (const auto& k : kKinds) {
    if (kind == k.short_name || kind == k.long_name) return k.short_name;
  }
  throw ConfigError(fmt::format("unknown policy kind '{}'", kind));
}

// Consumes parameters one at a time; anything left over is an error.
class ParamReader {
 public:
  ParamReader(const std::map<std::string, double>& params, std::string owner)
      : params_(params), owner_(std::move(owner)) {}

  template <typename T>
  void read(const std::string& key, T& target) {
    auto it = params_.find(key);
    if (it == params_.end()) return;
    used_.push_back(key);
    const double v = it->second;
    if constexpr (std::is_same_v<T, bool>) {
      target = v != 0.0;
    } else if constexpr (std::is_integral_v<T>) {
      if (v < 0.0 || v != std::floor(v)) {
        throw ConfigError(fmt::format("{}: parameter '{}' must be a non-negative integer", owner_, key));
      }
      target = static_cast<T>(v);
    } else {
      target = static_cast<T>(v);
    }
  }

  void finish() const {
    for (const auto& [key, value] : params_) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
        throw ConfigError(fmt::format("{}: unknown parameter '{}'", owner_, key));
      }
    }
  }

 private:
  const std::map<std::string, double>& params_;
  std::string owner_;
  std::vector<std::string> used_;
};

AuraParams read_aura(ParamReader& r, AuraParams p) {
  r.read("k_max", p.k_max);
  r.read("window_w", p.window_w);
  r.read("conv_rel_eps", p.conv_rel_eps);
  r.read("inactivity_cap", p.inactivity_cap);
  r.read("equilibrium_eps", p.equilibrium_eps);
  r.read("alpha_min", p.alpha_min);
  r.read("alpha_max", p.alpha_max);
  r.read("alpha_smooth", p.alpha_smooth);
  r.read("kappa_eps", p.kappa_eps);
  r.read("beta", p.beta_momentum);
  r.read("beta_momentum", p.beta_momentum);
  r.read("eta0", p.eta0);
  r.read("step_decay_tau", p.step_decay_tau);
  r.read("max_step_frac", p.max_step_frac);
  r.read("gate_frac", p.gate_frac);
  r.read("min_score", p.min_score);
  r.read("bottom_quota_divisor", p.bottom_quota_divisor);
  r.read("aas_min_tenants", p.aas_min_tenants);
  r.read("shift_ops_ratio", p.shift_ops_ratio);
  r.read("disable_h", p.disable_h);
  r.read("disable_v", p.disable_v);
  r.read("fast_h", p.fast_h);
  r.read("disable_fixed_pool", p.disable_fixed_pool);
  r.read("disable_aas", p.disable_aas);
  r.read("disable_momentum", p.disable_momentum);
  r.read("lambda_slow", p.signals.lambda_slow);
  r.read("lambda_fast", p.signals.lambda_fast);
  r.read("v_up_rate", p.signals.v_up_rate);
  r.read("v_down_rate", p.signals.v_down_rate);
  r.read("p90_floor", p.signals.p90_floor);
  r.read("sat_delta_hr_eps", p.signals.sat_delta_hr_eps);
  r.read("sat_decay", p.signals.sat_decay);
  r.read("sat_recover", p.signals.sat_recover);
  return p;
}

}  // namespace

std::vector<std::string> policy_kinds() {
  std::vector<std::string> out;
  for (const auto& k : kKinds) out.emplace_back(k.short_name);
  return out;
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const Scenario& scenario) {
  const std::string kind = canonical_kind(spec.kind);
  const std::string label = spec.label.empty() ? spec.kind : spec.label;
  ParamReader r(spec.params, fmt::format("policy '{}'", label));
  const auto& pool = scenario.pool;
  std::unique_ptr<Policy> policy;

  auto aura = [&](AuraParams base, const char* default_name) {
    auto p = read_aura(r, base);
    return std::make_unique<AuraPolicy>(pool, p, spec.label.empty() ? default_name : spec.label);
  };

  if (kind == "aura") {
    policy = aura({}, "aura");
  } else if (kind == "b3") {
    AuraParams p;
    p.disable_fixed_pool = true;
    policy = aura(p, "b3_pure_elastic");
  } else if (kind == "b8") {
    AuraParams p;
    p.disable_v = true;
    policy = aura(p, "b8_efficiency_only");
  } else if (kind == "b9") {
    AuraParams p;
    p.fast_h = true;
    policy = aura(p, "b9_reactive_h");
  } else if (kind == "b10") {
    AuraParams p;
    p.disable_h = true;
    policy = aura(p, "b10_potential_only");
  } else if (kind == "sam_core") {
    CoreParams p;
    r.read("max_radius", p.max_radius);
    r.read("min_leverage", p.min_leverage);
    r.read("history_age", p.history_age);
    r.read("probe_pages", p.probe_pages);
    policy = std::make_unique<CorePolicy>(pool, p);
  } else if (kind == "b1") {
    policy = std::make_unique<StaticPolicy>(pool, b1_static_average(pool), "b1_static_average");
  } else if (kind == "b2") {
    policy = std::make_unique<StaticPolicy>(pool, proportional_elastic(pool.base_priority, pool), "b2_fixed_priority");
  } else if (kind == "b6") {
    std::vector<double> sizes;
    for (const auto& prof : scenario.profiles) sizes.push_back(prof.data_size);
    sizes.resize(pool.tenants(), 1.0);
    policy = std::make_unique<StaticPolicy>(pool, proportional_elastic(sizes, pool), "b6_datasize_prop");
  } else if (kind == "b4") {
    double target = 0.9, grow = 0.10, shrink = 0.05;
    r.read("hr_target", target);
    r.read("grow", grow);
    r.read("shrink", shrink);
    policy = std::make_unique<IndividualOptPolicy>(pool, target, grow, shrink);
  } else if (kind == "b5") {
    policy = std::make_unique<GlobalLruProxyPolicy>(pool);
  } else if (kind == "b7") {
    double lambda = 0.5;
    r.read("lambda_fast", lambda);
    policy = std::make_unique<DynamicNeedPolicy>(pool, lambda);
  } else if (kind == "b11") {
    std::size_t history = 256;
    double probe = 0.2;
    std::int64_t refit = 5;
    r.read("history", history);
    r.read("probe_frac", probe);
    r.read("refit_every", refit);
    policy = std::make_unique<RegressionPolicy>(pool, history, probe, refit);
  } else if (kind == "b12") {
    std::vector<double> sla;
    for (const auto& prof : scenario.profiles) sla.push_back(prof.sla_hit_rate);
    sla.resize(pool.tenants(), 0.8);
    policy = std::make_unique<SlaDrivenPolicy>(pool, sla);
  } else if (kind == "b13") {
    Pages chunk = 0;
    double probe = 0.25;
    r.read("chunk", chunk);
    r.read("probe_frac", probe);
    policy = std::make_unique<UcpPolicy>(pool, chunk, probe);
  } else if (kind == "b14") {
    Pages chunk = 1;
    r.read("chunk", chunk);
    policy = std::make_unique<OraclePolicy>(scenario, chunk);
  }
  r.finish();
  return policy;
}

}  // namespace sam
