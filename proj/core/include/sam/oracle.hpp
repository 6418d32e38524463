#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sam/domain.hpp"
#include "sam/policy.hpp"
#include "sam/simenv.hpp"

namespace sam {

/// Measured hit rate of one tenant on an ascending page grid.
struct ProfiledCurve {
  std::vector<Pages> grid;
  std::vector<double> hr_at;
  double ops = 0.0;  // phase-average operations per cycle
};

/// Pool-adjacent-violators fit: the non-decreasing sequence closest to
/// `values` in weighted least squares.
std::vector<double> isotonic_non_decreasing(std::span<const double> values, std::span<const double> weights = {});

/// Profiles every tenant of `env` during `phase` on `grid` by stepping the
/// environment with the tenant pinned at each grid size and averaging
/// `samples` observations. The result is made monotone with PAV.
std::vector<ProfiledCurve> profile_phase(const EnvironmentModel& env, std::size_t phase, std::span<const Pages> grid,
                                         std::size_t samples = 5);

/// Grid used by the oracle for one tenant: floor + k * chunk up to the
/// largest size the budget allows.
std::vector<Pages> oracle_grid(Pages floor, Pages max_pages, Pages chunk);

/// Default oracle chunk: max(1, total / 64).
Pages default_chunk(const PoolConfig& cfg);

struct MckpItem {
  std::int64_t weight = 0;  // in chunks
  double value = 0.0;
};

/// Pick exactly one item per group with total weight <= budget.
struct MckpInstance {
  std::vector<std::vector<MckpItem>> groups;
  std::int64_t budget = 0;
};

struct MckpSolution {
  std::vector<std::size_t> choice;  // item index per group
  std::int64_t weight = 0;
  double value = 0.0;
};

/// Exact dynamic program over (group, remaining capacity). Throws
/// InfeasibleError when even the lightest items do not fit.
MckpSolution solve_mckp(const MckpInstance& inst);

/// Exhaustive enumeration of the same problem; test-sized inputs only.
MckpSolution brute_force_mckp(const MckpInstance& inst);

/// Oracle allocation for a set of per-tenant value functions.
struct OracleResult {
  AllocationPlan plan;
  double grid_value = 0.0;  // optimum of the chunked problem
  double plan_value = 0.0;  // value of `plan`, leftover pages included
  Pages chunk = 1;
};

/// Hindsight-optimal static plan for `phase` on the ground-truth curves,
/// valued with the phase-average expected ops.
OracleResult oracle_for_phase(const EnvironmentModel& env, const PoolConfig& cfg, std::size_t phase, Pages chunk = 0);

/// Same solve on profiled curves (values interpolated between grid points).
OracleResult oracle_from_profiles(std::span<const ProfiledCurve> curves, const PoolConfig& cfg, Pages chunk = 0);

/// Enumerates every feasible integral plan of a tiny instance (at most 3
/// tenants, budget at most 64 pages) and returns the best by expected
/// utility over the phase. Throws std::invalid_argument beyond the limits.
struct BruteForceResult {
  AllocationPlan plan;
  double value = 0.0;
};
BruteForceResult brute_force_best(const EnvironmentModel& env, std::size_t phase, const PoolConfig& cfg);

/// Phase-average expected operations of every tenant.
std::vector<double> phase_average_ops(const EnvironmentModel& env, std::size_t phase);

/// Profiles as CSV rows: tenant,pages,hit_rate,ops.
void write_profiles_csv(std::ostream& out, std::span<const ProfiledCurve> curves);
std::vector<ProfiledCurve> read_profiles_csv(std::istream& in);

/// B14: replays the hindsight-optimal plan of whichever phase the next
/// cycle belongs to. Not an online algorithm.
class OraclePolicy final : public Policy {
 public:
  OraclePolicy(const Scenario& scenario, Pages chunk = 1);
  [[nodiscard]] std::string name() const override { return "b14_oracle"; }
  AllocationPlan decide(std::span<const TenantObservation> obs, const AllocationPlan& current,
                        std::int64_t cycle) override;
  [[nodiscard]] DecisionStats last_stats() const override { return {true, 0, 0, 0}; }
  [[nodiscard]] const PoolConfig& pool() const override { return pool_; }
  [[nodiscard]] AllocationPlan initial_plan() const override { return plans_.front(); }

 private:
  PoolConfig pool_;
  WorkloadSchedule schedule_;
  std::vector<AllocationPlan> plans_;
};

}  // namespace sam
