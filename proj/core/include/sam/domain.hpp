#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sam {

using TenantId = std::size_t;
using Pages = std::int64_t;

/// Raised for malformed pool or scenario configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the lower bounds cannot fit inside the page budget.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Budget split into a statically apportioned fixed pool and a
/// dynamically reallocated elastic pool. Lower bounds apply to the
/// total allocation of a tenant (fixed share included).
struct PoolConfig {
  Pages total_pages = 1;
  Pages fixed_pages = 0;
  std::vector<double> base_priority;
  std::vector<Pages> lower_bound;

  [[nodiscard]] std::size_t tenants() const { return lower_bound.size(); }
  [[nodiscard]] Pages elastic_pages() const { return total_pages - fixed_pages; }

  /// Throws ConfigError on size mismatch or negative values.
  void check() const;
};

/// Integer pages per tenant; the decision variable of every policy.
struct AllocationPlan {
  std::vector<Pages> pages;

  [[nodiscard]] std::size_t size() const { return pages.size(); }
  [[nodiscard]] Pages total() const;
  Pages& operator[](TenantId i) { return pages[i]; }
  Pages operator[](TenantId i) const { return pages[i]; }
  friend bool operator==(const AllocationPlan&, const AllocationPlan&) = default;
};

/// Raw per-cycle metrics reported for one tenant.
struct TenantObservation {
  double ops = 0.0;
  double hits = 0.0;
  double misses = 0.0;
  double hit_rate = 0.0;
  Pages current_pages = 0;

  /// hits / (hits + misses), or 0 when there was no traffic.
  [[nodiscard]] static double rate_of(double hits, double misses) {
    const double total = hits + misses;
    return total > 0.0 ? hits / total : 0.0;
  }
};

struct PlanViolation {
  enum class Kind { kSizeMismatch, kSumMismatch, kNegativePages, kBelowLowerBound };
  Kind kind;
  TenantId tenant = 0;
  /// Signed shortfall: budget - sum for sum mismatches, bound - pages for bounds.
  Pages amount = 0;

  [[nodiscard]] std::string describe() const;
};

struct PlanReport {
  std::vector<PlanViolation> violations;
  [[nodiscard]] bool ok() const { return violations.empty(); }
  [[nodiscard]] std::string describe() const;
};

/// Splits the fixed pool by base priority: floor of the proportional
/// share, then remainder pages one at a time in descending priority
/// (ties to the lower tenant id).
std::vector<Pages> apportion_fixed_pool(const PoolConfig& cfg);

/// Per-tenant floor of the total allocation: max(lower bound, fixed share).
std::vector<Pages> effective_lower_bounds(const PoolConfig& cfg);

/// Lists every violated constraint; an empty report means feasible.
PlanReport validate_plan(const AllocationPlan& plan, const PoolConfig& cfg);

/// Rounds an arbitrary real allocation onto the feasible integer set.
/// Bounds are clamped first, the slack above them is rescaled to the
/// budget, then largest-remainder rounding restores the exact total.
AllocationPlan project_to_feasible(std::span<const double> raw, const PoolConfig& cfg);

/// Same projection against explicit bounds and budget.
AllocationPlan project_to_bounds(std::span<const double> raw, std::span<const Pages> bounds,
                                 Pages budget);

/// Even split of the elastic pool on top of the fixed shares, projected
/// onto the lower bounds. Used as the common starting plan.
AllocationPlan even_plan(const PoolConfig& cfg);

/// L1 distance between two plans of equal size.
Pages l1_distance(const AllocationPlan& a, const AllocationPlan& b);

}  // namespace sam
