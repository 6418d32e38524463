#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sam/domain.hpp"
#include "sam/simenv.hpp"

namespace sam {

/// Work accounting for one decision, used for amortized-cost analysis.
struct DecisionStats {
  bool global_scan = true;
  std::size_t active_size = 0;
  std::size_t touched = 0;
  std::uint64_t comparisons = 0;
};

/// Uniform interface the runner drives: observations plus the plan in
/// force during the cycle go in, the next plan comes out.
class Policy {
 public:
  virtual ~Policy() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  virtual AllocationPlan decide(std::span<const TenantObservation> obs, const AllocationPlan& current,
                                std::int64_t cycle) = 0;
  [[nodiscard]] virtual DecisionStats last_stats() const = 0;

  /// Pool configuration whose constraints this policy's plans honour.
  [[nodiscard]] virtual const PoolConfig& pool() const = 0;
  /// False only for policies that deliberately ignore per-tenant bounds.
  [[nodiscard]] virtual bool respects_bounds() const { return true; }
  /// Plan the policy wants in force before its first decision.
  [[nodiscard]] virtual AllocationPlan initial_plan() const { return even_plan(pool()); }
};

/// Policy kind plus numeric overrides, e.g. {"aura", {{"beta", 0.5}}}.
struct PolicySpec {
  std::string kind;
  std::map<std::string, double> params;
  std::string label;  // defaults to kind

  [[nodiscard]] std::string display_name() const { return label.empty() ? kind : label; }
};

/// Builds any policy by kind: aura, sam_core, b1 .. b13 (long names such as
/// b7_dynamic_need are accepted too). Unknown kinds or parameters throw
/// ConfigError.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const Scenario& scenario);

/// Every kind accepted by make_policy, in canonical short form.
std::vector<std::string> policy_kinds();

}  // namespace sam
