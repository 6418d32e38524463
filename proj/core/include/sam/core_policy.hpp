#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sam/domain.hpp"
#include "sam/policy.hpp"

namespace sam {

/// Fractional Frank-Wolfe iterate kept alongside the rounded plan.
struct CoreState {
  std::vector<double> x;
  std::int64_t t = 0;
  double g_bound = 0.0;  // largest gradient norm seen; diagnostics only

  static CoreState initial(const PoolConfig& cfg);
};

/// Vertex of {x >= bounds, sum x = budget} minimizing <g, y>: every bound,
/// plus all slack on the smallest gradient component (ties to lower id).
std::vector<double> lmo(std::span<const double> g, std::span<const Pages> bounds, Pages budget);

/// x' = (1 - eta) x + eta * lmo(g), eta = 2 / (t + 2). Returns the rounded plan.
AllocationPlan ofw_step(CoreState& state, std::span<const double> gradient, const PoolConfig& cfg);

/// Hit-rate history of one tenant keyed by page count; averages repeated
/// visits so the finite differences sharpen as evidence accumulates.
class HitRateHistory {
 public:
  void record(Pages pages, double hit_rate, std::int64_t cycle);
  /// Slope dHR/dpage around `pages` from a weighted least-squares line
  /// through nearby visited points. Two-sided when history straddles
  /// `pages`, one-sided otherwise; nullopt without two distinct points.
  [[nodiscard]] std::optional<double> slope(Pages pages, Pages max_radius = 32, double min_leverage = 0.0) const;
  /// Mean hit rate at `pages`, linearly interpolated between the nearest
  /// visited neighbours and held flat beyond them; nullopt when empty.
  [[nodiscard]] std::optional<double> estimate(Pages pages) const;
  /// Drops points last visited before `cycle`.
  void forget_before(std::int64_t cycle);
  [[nodiscard]] std::size_t size() const { return points_.size(); }

 private:
  struct Point {
    double sum = 0.0;
    double count = 0.0;
    std::int64_t last = 0;
  };
  std::map<Pages, Point> points_;
};

struct CoreParams {
  Pages max_radius = 32;         // widest finite-difference neighbourhood
  double min_leverage = 50.0;    // widen until sum w (p - mean)^2 reaches this
  std::int64_t history_age = 0;  // <= 0 keeps history forever
  Pages probe_pages = 8;         // perturbation while a tenant has no slope estimate
};

/// SAM-Core: Online Frank-Wolfe on finite-difference gradients of the
/// observed hit rates. Until every tenant has a slope estimate the iterate
/// is held and the unknown tenant is probed with a few extra pages. When
/// the rounded plan stalls, one tenant per cycle (round robin) trades a
/// page with its neighbour, alternating in sign.
class CorePolicy final : public Policy {
 public:
  CorePolicy(const PoolConfig& pool, CoreParams params = {}, std::string name = "sam_core");

  [[nodiscard]] std::string name() const override { return name_; }
  AllocationPlan decide(std::span<const TenantObservation> obs, const AllocationPlan& current,
                        std::int64_t cycle) override;
  [[nodiscard]] DecisionStats last_stats() const override { return stats_; }
  [[nodiscard]] const PoolConfig& pool() const override { return pool_; }

  [[nodiscard]] const CoreState& state() const { return state_; }
  /// Latest gradient estimate, -ops * dHR/dpage per tenant.
  [[nodiscard]] const std::vector<double>& gradient() const { return gradient_; }

 private:
  PoolConfig pool_;
  CoreParams params_;
  CoreState state_;
  std::vector<HitRateHistory> history_;
  std::vector<double> gradient_;
  std::vector<Pages> floors_;
  std::int64_t explore_count_ = 0;
  DecisionStats stats_;
  std::string name_;
};

}  // namespace sam
