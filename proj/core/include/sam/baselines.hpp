#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sam/core_policy.hpp"
#include "sam/domain.hpp"
#include "sam/policy.hpp"
#include "sam/simenv.hpp"

namespace sam {

/// Fixed shares plus the elastic pool split in proportion to `weights`
/// (largest remainder, ties to the lower id). Zero total weight gives
/// an even split. The result is projected onto the lower bounds.
AllocationPlan proportional_elastic(std::span<const double> weights, const PoolConfig& cfg);

AllocationPlan b1_static_average(const PoolConfig& cfg);
/// need_i = fast ops EMA * (1 - hit rate).
AllocationPlan b7_dynamic_need(std::span<const double> ops_fast, std::span<const double> hit_rates,
                               const PoolConfig& cfg);
/// Elastic shares proportional to max(0, sla_i - hr_i); even when nobody misses.
AllocationPlan b12_sla_driven(std::span<const double> hit_rates, std::span<const double> sla_targets,
                              const PoolConfig& cfg);
/// Single pooled cache: pages_i = C_total * ops_i / sum ops, ignoring the
/// fixed pool and every lower bound.
AllocationPlan b5_global_lru_proxy(std::span<const double> ops, Pages total_pages);

struct ExpFit {
  double h_max = 0.0;
  double scale = 1.0;
  double sse = 0.0;
};
/// Least-squares fit of hr = h (1 - exp(-pages / s)); nullopt with fewer
/// than 3 distinct page counts.
std::optional<ExpFit> fit_exp_curve(std::span<const double> pages, std::span<const double> hit_rates);

/// Allocates `budget - sum(bounds)` pages one at a time to the tenant with
/// the largest weight * (HR(p + 1) - HR(p)) on the fitted curves.
AllocationPlan greedy_on_fits(std::span<const ExpFit> fits, std::span<const double> weights,
                              std::span<const Pages> bounds, Pages budget);

/// UCP lookahead over per-tenant utility tables: utility[i][k] is the
/// value of k chunks above the tenant's floor. Repeatedly grants the
/// tenant with the best average gain per chunk over any lookahead.
/// Returns chunks per tenant.
std::vector<std::size_t> ucp_lookahead(const std::vector<std::vector<double>>& utility, std::size_t chunks);

/// Plan held constant for the whole run (B1, B2, B6).
class StaticPolicy final : public Policy {
 public:
  StaticPolicy(const PoolConfig& pool, AllocationPlan plan, std::string name);
  [[nodiscard]] std::string name() const override { return name_; }
  AllocationPlan decide(std::span<const TenantObservation>, const AllocationPlan&, std::int64_t) override {
    return plan_;
  }
  [[nodiscard]] DecisionStats last_stats() const override { return {true, 0, 0, 0}; }
  [[nodiscard]] const PoolConfig& pool() const override { return pool_; }
  [[nodiscard]] AllocationPlan initial_plan() const override { return plan_; }

 private:
  PoolConfig pool_;
  AllocationPlan plan_;
  std::string name_;
};

/// B4: every tenant grows or shrinks its own request toward a personal
/// hit-rate target without coordination; requests are then squeezed into
/// the budget.
class IndividualOptPolicy final : public Policy {
 public:
  IndividualOptPolicy(const PoolConfig& pool, double hr_target = 0.9, double grow = 0.10, double shrink = 0.05);
  [[nodiscard]] std::string name() const override { return "b4_individual_opt"; }
  AllocationPlan decide(std::span<const TenantObservation> obs, const AllocationPlan& current,
                        std::int64_t cycle) override;
  [[nodiscard]] DecisionStats last_stats() const override { return stats_; }
  [[nodiscard]] const PoolConfig& pool() const override { return pool_; }

 private:
  PoolConfig pool_;
  double target_, grow_, shrink_;
  std::vector<double> request_;
  DecisionStats stats_;
};

/// B5: demand-proportional occupancy of one shared pool.
class GlobalLruProxyPolicy final : public Policy {
 public:
  explicit GlobalLruProxyPolicy(const PoolConfig& pool) : pool_(pool) {}
  [[nodiscard]] std::string name() const override { return "b5_global_lru_proxy"; }
  AllocationPlan decide(std::span<const TenantObservation> obs, const AllocationPlan& current,
                        std::int64_t cycle) override;
  [[nodiscard]] DecisionStats last_stats() const override { return stats_; }
  [[nodiscard]] const PoolConfig& pool() const override { return pool_; }
  [[nodiscard]] bool respects_bounds() const override { return false; }

 private:
  PoolConfig pool_;
  DecisionStats stats_;
};

/// B7: elastic shares proportional to ops x miss rate.
class DynamicNeedPolicy final : public Policy {
 public:
  explicit DynamicNeedPolicy(const PoolConfig& pool, double lambda_fast = 0.5);
  [[nodiscard]] std::string name() const override { return "b7_dynamic_need"; }
  AllocationPlan decide(std::span<const TenantObservation> obs, const AllocationPlan& current,
                        std::int64_t cycle) override;
  [[nodiscard]] DecisionStats last_stats() const override { return stats_; }
  [[nodiscard]] const PoolConfig& pool() const override { return pool_; }

 private:
  PoolConfig pool_;
  double lambda_;
  std::vector<double> ops_fast_;
  bool seeded_ = false;
  DecisionStats stats_;
};

/// B11: per-tenant exponential fits over the observation history, then a
/// greedy allocation on the fitted curves. Until every tenant has three
/// distinct page counts it probes by tilting the even split toward one
/// tenant per cycle.
class RegressionPolicy final : public Policy {
 public:
  RegressionPolicy(const PoolConfig& pool, std::size_t history = 256, double probe_frac = 0.2,
                   std::int64_t refit_every = 5);
  [[nodiscard]] std::string name() const override { return "b11_regression"; }
  AllocationPlan decide(std::span<const TenantObservation> obs, const AllocationPlan& current,
                        std::int64_t cycle) override;
  [[nodiscard]] DecisionStats last_stats() const override { return stats_; }
  [[nodiscard]] const PoolConfig& pool() const override { return pool_; }

 private:
  PoolConfig pool_;
  std::size_t history_cap_;
  double probe_frac_;
  std::int64_t refit_every_;
  std::vector<std::vector<double>> pages_, rates_;
  std::vector<double> ops_ema_;
  std::int64_t probes_ = 0;
  std::optional<AllocationPlan> fitted_plan_;
  std::int64_t last_fit_ = -1;
  DecisionStats stats_;
};

/// B12: undamped SLA-violation-proportional reallocation.
class SlaDrivenPolicy final : public Policy {
 public:
  SlaDrivenPolicy(const PoolConfig& pool, std::vector<double> sla_targets);
  [[nodiscard]] std::string name() const override { return "b12_sla_driven"; }
  AllocationPlan decide(std::span<const TenantObservation> obs, const AllocationPlan& current,
                        std::int64_t cycle) override;
  [[nodiscard]] DecisionStats last_stats() const override { return stats_; }
  [[nodiscard]] const PoolConfig& pool() const override { return pool_; }

 private:
  PoolConfig pool_;
  std::vector<double> sla_;
  DecisionStats stats_;
};

/// B13: utility-based partitioning with lookahead over a chunk grid.
/// Utility at unvisited grid points is linearly interpolated from visited
/// ones and held flat beyond them; a probing schedule visits each tenant
/// at a larger allocation first.
class UcpPolicy final : public Policy {
 public:
  UcpPolicy(const PoolConfig& pool, Pages chunk = 0, double probe_frac = 0.25);
  [[nodiscard]] std::string name() const override { return "b13_ucp"; }
  AllocationPlan decide(std::span<const TenantObservation> obs, const AllocationPlan& current,
                        std::int64_t cycle) override;
  [[nodiscard]] DecisionStats last_stats() const override { return stats_; }
  [[nodiscard]] const PoolConfig& pool() const override { return pool_; }
  [[nodiscard]] Pages chunk() const { return chunk_; }

 private:
  PoolConfig pool_;
  Pages chunk_;
  double probe_frac_;
  std::vector<Pages> floors_;
  std::vector<HitRateHistory> history_;
  std::vector<double> ops_ema_;
  std::int64_t probes_ = 0;
  DecisionStats stats_;
};

}  // namespace sam
