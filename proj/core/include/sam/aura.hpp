#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "sam/domain.hpp"
#include "sam/policy.hpp"
#include "sam/signals.hpp"

namespace sam {

struct AuraParams {
  std::size_t k_max = 8;
  std::size_t window_w = 5;
  double conv_rel_eps = 0.01;
  std::int64_t inactivity_cap = 100;
  double equilibrium_eps = 0.05;
  double alpha_min = 0.3;
  double alpha_max = 0.9;
  double alpha_smooth = 0.2;
  double kappa_eps = 1e-6;
  double beta_momentum = 0.3;
  double eta0 = 1.0;
  double step_decay_tau = 50.0;  // <= 0 disables the decay
  double max_step_frac = 0.05;   // <= 0 disables the per-tenant step cap
  double gate_frac = 0.01;       // <= 0 disables actuation filtering
  double min_score = 0.05;       // scores below this earn no elastic pages
  std::size_t bottom_quota_divisor = 4;
  std::size_t aas_min_tenants = 10;
  // A tenant whose fast ops EMA leaves [slow / r, slow * r] signals a
  // workload shift: the step clock restarts and the active set is rebuilt.
  double shift_ops_ratio = 2.0;  // <= 0 disables

  bool disable_h = false;            // B10
  bool disable_v = false;            // B8
  bool fast_h = false;               // B9
  bool disable_fixed_pool = false;   // B3
  bool disable_aas = false;
  bool disable_momentum = false;     // velocity = target - current

  SignalParams signals;

  void check() const;
};

struct ScoredTenant {
  TenantId id = 0;
  double score = 0.0;
  friend bool operator==(const ScoredTenant&, const ScoredTenant&) = default;
};

struct HeapFilterResult {
  std::vector<ScoredTenant> top;     // best first
  std::vector<ScoredTenant> bottom;  // worst first
  std::uint64_t comparisons = 0;
};

/// Global coordinator state carried between decision cycles.
struct CoordinatorState {
  std::vector<TenantSignalState> signals;
  std::vector<TenantId> active_set;
  std::vector<ScoredTenant> top_candidates;
  std::vector<ScoredTenant> bottom_candidates;
  std::deque<double> improvement_window;
  std::int64_t inactivity_timer = 0;
  double alpha_prev = 0.6;
  std::vector<double> momentum;
  std::int64_t cycle = 0;
  double step_clock = 0.0;
  std::int64_t shifts = 0;  // detected workload shifts

  double last_performance = -1.0;
  bool last_changed = false;

  // Diagnostics of the latest cycle, per tenant (NaN when not evaluated).
  std::vector<double> last_h;
  std::vector<double> last_v;
  std::vector<double> last_score;

  static CoordinatorState initial(std::size_t tenants, const AuraParams& params);
};

/// H = min-max normalized ops EMA times the slow hit-rate EMA, over the
/// evaluation set `members`. Result is aligned with `members`.
std::vector<double> h_factor(std::span<const TenantSignalState> signals, std::span<const TenantId> members,
                             bool use_fast_ops = false);

/// V = p90-normalized saturation-discounted smoothed gradient.
std::vector<double> v_factor(std::span<const TenantSignalState> signals, std::span<const TenantId> members,
                             double p90_floor);

/// Smoothed exploitation weight from the dispersion of the V values;
/// updates state.alpha_prev and returns it.
double meta_alpha(CoordinatorState& state, std::span<const double> v_values, const AuraParams& params);

/// alpha * H + (1 - alpha) * V, honouring the H/V ablation flags.
std::vector<double> score(std::span<const double> h, std::span<const double> v, double alpha,
                          const AuraParams& params);

/// k_max best and k_max worst tenants via two bounded heaps. Ties go to
/// the lower tenant id in both lists.
HeapFilterResult two_way_heap_filter(std::span<const ScoredTenant> tenants, std::size_t k_max);

/// 1-based index of maximum distance from the chord of a descending
/// score curve; 1 when the curve is a straight line.
std::size_t find_knee_point(std::span<const double> descending_scores);

std::vector<TenantId> compose_set(std::span<const ScoredTenant> top, std::span<const ScoredTenant> bottom,
                                  std::size_t k_demand, const AuraParams& params);

bool is_converged(const CoordinatorState& state, const AuraParams& params);

/// True when the best recipients do not beat the best donors by at least
/// equilibrium_eps. Tenants present in both lists are compared only once
/// they have been removed from each side.
bool is_equilibrium(std::span<const ScoredTenant> top, std::span<const ScoredTenant> bottom,
                    const AuraParams& params);

/// Momentum-damped, step-bounded move of the active set toward its
/// score-proportional target. Non-members keep their current pages.
AllocationPlan optimize_in_active_set(CoordinatorState& state, std::span<const TenantId> active,
                                      std::span<const double> scores, const AllocationPlan& current,
                                      const PoolConfig& cfg, const AuraParams& params);

struct CycleOutcome {
  AllocationPlan plan;
  DecisionStats stats;
};

/// One Sense-Decide pass of the controller over all tenants.
CycleOutcome run_decision_cycle(CoordinatorState& state, std::span<const TenantObservation> obs,
                                const AllocationPlan& current, const PoolConfig& cfg, const AuraParams& params);

/// True when some tenant's fast ops EMA departs from its slow EMA by more
/// than shift_ops_ratio in either direction.
bool workload_shift(std::span<const TenantSignalState> signals, const AuraParams& params);

/// Current step size; decays as eta0 / (1 + clock / tau).
double step_size(const CoordinatorState& state, const AuraParams& params);

class AuraPolicy final : public Policy {
 public:
  AuraPolicy(const PoolConfig& pool, AuraParams params, std::string name = "aura");

  [[nodiscard]] std::string name() const override { return name_; }
  AllocationPlan decide(std::span<const TenantObservation> obs, const AllocationPlan& current,
                        std::int64_t cycle) override;
  [[nodiscard]] DecisionStats last_stats() const override { return stats_; }
  [[nodiscard]] const PoolConfig& pool() const override { return pool_; }

  [[nodiscard]] const CoordinatorState& state() const { return state_; }
  [[nodiscard]] const AuraParams& params() const { return params_; }

 private:
  PoolConfig pool_;
  AuraParams params_;
  CoordinatorState state_;
  DecisionStats stats_;
  std::string name_;
};

}  // namespace sam
