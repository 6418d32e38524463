#include "sam/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace sam {

void PoolConfig::check() const {
  if (total_pages < 1) throw ConfigError(fmt::format("total_pages must be >= 1, got {}", total_pages));
  if (fixed_pages < 0 || fixed_pages > total_pages) {
    throw ConfigError(
        fmt::format("fixed_pages must lie in [0, {}], got {}", total_pages, fixed_pages));
  }
  if (base_priority.size() != lower_bound.size()) {
    throw ConfigError(fmt::format("base_priority has {} entries but lower_bound has {}",
                                  base_priority.size(), lower_bound.size()));
  }
  if (lower_bound.empty()) throw ConfigError("pool has no tenants");
  for (std::size_t i = 0; i < lower_bound.size(); ++i) {
    if (lower_bound[i] < 0) throw ConfigError(fmt::format("tenant {}: negative lower bound", i));
    if (!(base_priority[i] >= 0.0) || !std::isfinite(base_priority[i])) {
      throw ConfigError(fmt::format("tenant {}: base_priority must be finite and >= 0", i));
    }
  }
}

Pages AllocationPlan::total() const { return std::accumulate(pages.begin(), pages.end(), Pages{0}); }

std::string PlanViolation::describe() const {
  switch (kind) {
    case Kind::kSizeMismatch:
      return fmt::format("plan covers {} tenants, config has {}", tenant, amount);
    case Kind::kSumMismatch:
      return amount > 0 ? fmt::format("plan is {} pages short of the budget", amount)
                        : fmt::format("plan exceeds the budget by {} pages", -amount);
    case Kind::kNegativePages:
      return fmt::format("tenant {} has negative pages", tenant);
    case Kind::kBelowLowerBound:
      return fmt::format("tenant {} is {} pages below its lower bound", tenant, amount);
  }
  return "unknown violation";
}

std::string PlanReport::describe() const {
  if (ok()) return "ok";
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.describe();
  }
  return out;
}

std::vector<Pages> apportion_fixed_pool(const PoolConfig& cfg) {
  const std::size_t n = cfg.tenants();
  std::vector<Pages> shares(n, 0);
  if (cfg.fixed_pages == 0) return shares;

  const long double weight_sum =
      std::accumulate(cfg.base_priority.begin(), cfg.base_priority.end(), 0.0L);
  if (!(weight_sum > 0.0L)) {
    throw ConfigError("fixed pool is non-empty but every base_priority is zero");
  }

  Pages assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    shares[i] = static_cast<Pages>(
        std::floor(static_cast<long double>(cfg.fixed_pages) * cfg.base_priority[i] / weight_sum));
    assigned += shares[i];
  }

  std::vector<TenantId> order(n);
  std::iota(order.begin(), order.end(), TenantId{0});
  std::stable_sort(order.begin(), order.end(), [&](TenantId a, TenantId b) {
    return cfg.base_priority[a] > cfg.base_priority[b];
  });
  for (Pages left = cfg.fixed_pages - assigned, k = 0; left > 0; --left, ++k) {
    ++shares[order[static_cast<std::size_t>(k) % n]];
  }
  return shares;
}

std::vector<Pages> effective_lower_bounds(const PoolConfig& cfg) {
  auto bounds = apportion_fixed_pool(cfg);
  for (std::size_t i = 0; i < bounds.size(); ++i) bounds[i] = std::max(bounds[i], cfg.lower_bound[i]);
  return bounds;
}

PlanReport validate_plan(const AllocationPlan& plan, const PoolConfig& cfg) {
  PlanReport report;
  using Kind = PlanViolation::Kind;
  if (plan.size() != cfg.tenants()) {
    report.violations.push_back({Kind::kSizeMismatch, plan.size(), static_cast<Pages>(cfg.tenants())});
    return report;
  }
  const Pages deficit = cfg.total_pages - plan.total();
  if (deficit != 0) report.violations.push_back({Kind::kSumMismatch, 0, deficit});

  const auto bounds = effective_lower_bounds(cfg);
  for (TenantId i = 0; i < plan.size(); ++i) {
    if (plan[i] < 0) report.violations.push_back({Kind::kNegativePages, i, -plan[i]});
    if (plan[i] < bounds[i]) report.violations.push_back({Kind::kBelowLowerBound, i, bounds[i] - plan[i]});
  }
  return report;
}

AllocationPlan project_to_bounds(std::span<const double> raw, std::span<const Pages> bounds,
                                 Pages budget) {
  const std::size_t n = raw.size();
  if (bounds.size() != n) throw ConfigError("projection: raw and bounds differ in size");
  if (n == 0) throw ConfigError("projection: no tenants");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(raw[i])) throw std::invalid_argument(fmt::format("projection: raw[{}] is not finite", i));
  }
  const Pages floor_sum = std::accumulate(bounds.begin(), bounds.end(), Pages{0});
  if (floor_sum > budget) {
    throw InfeasibleError(
        fmt::format("lower bounds need {} pages but the budget is {}", floor_sum, budget));
  }

  std::vector<double> slack(n);
  double slack_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    slack[i] = std::max(raw[i] - static_cast<double>(bounds[i]), 0.0);
    slack_sum += slack[i];
  }
  const auto spare = static_cast<double>(budget - floor_sum);

  std::vector<double> target(n);
  if (slack_sum > 0.0) {
    const double scale = spare / slack_sum;
    for (std::size_t i = 0; i < n; ++i) target[i] = static_cast<double>(bounds[i]) + slack[i] * scale;
  } else {
    const auto best = static_cast<std::size_t>(std::max_element(raw.begin(), raw.end()) - raw.begin());
    for (std::size_t i = 0; i < n; ++i) target[i] = static_cast<double>(bounds[i]);
    target[best] += spare;
  }

  AllocationPlan plan{std::vector<Pages>(n)};
  std::vector<double> frac(n);
  Pages assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = std::floor(target[i]);
    plan[i] = std::max(static_cast<Pages>(f), bounds[i]);
    frac[i] = target[i] - f;
    assigned += plan[i];
  }

  std::vector<TenantId> order(n);
  std::iota(order.begin(), order.end(), TenantId{0});
  std::stable_sort(order.begin(), order.end(), [&](TenantId a, TenantId b) { return frac[a] > frac[b]; });
  Pages left = budget - assigned;
  for (std::size_t k = 0; left > 0; ++k, --left) ++plan[order[k % n]];
  // Floating error can overshoot by a page; take it back from the largest slack.
  while (left < 0) {
    TenantId donor = 0;
    Pages room = -1;
    for (TenantId i = 0; i < n; ++i) {
      if (plan[i] - bounds[i] > room) {
        room = plan[i] - bounds[i];
        donor = i;
      }
    }
    --plan[donor];
    ++left;
  }
  return plan;
}

AllocationPlan project_to_feasible(std::span<const double> raw, const PoolConfig& cfg) {
  if (raw.size() != cfg.tenants()) throw ConfigError("projection: plan size does not match config");
  const auto bounds = effective_lower_bounds(cfg);
  return project_to_bounds(raw, bounds, cfg.total_pages);
}

AllocationPlan even_plan(const PoolConfig& cfg) {
  const std::size_t n = cfg.tenants();
  const auto fixed = apportion_fixed_pool(cfg);
  const Pages elastic = cfg.elastic_pages();
  const Pages each = elastic / static_cast<Pages>(n);
  const Pages extra = elastic % static_cast<Pages>(n);

  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    raw[i] = static_cast<double>(fixed[i] + each + (static_cast<Pages>(i) < extra ? 1 : 0));
  }
  return project_to_feasible(raw, cfg);
}

Pages l1_distance(const AllocationPlan& a, const AllocationPlan& b) {
  Pages d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

}  // namespace sam
