#include "sam/aura.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include <fmt/format.h>

namespace sam {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// "a ranks above b": higher score, ties to the lower id.
bool ranks_above(const ScoredTenant& a, const ScoredTenant& b) {
  return a.score > b.score || (a.score == b.score && a.id < b.id);
}

// "a ranks below b": lower score, ties to the lower id.
bool ranks_below(const ScoredTenant& a, const ScoredTenant& b) {
  return a.score < b.score || (a.score == b.score && a.id < b.id);
}

template <typename Better>
std::vector<ScoredTenant> bounded_select(std::span<const ScoredTenant> tenants, std::size_t k, Better better,
                                         std::uint64_t& comparisons) {
  // The heap root is the weakest of the k kept so far.
  auto cmp = [&](const ScoredTenant& a, const ScoredTenant& b) {
    ++comparisons;
    return better(a, b);
  };
  std::priority_queue<ScoredTenant, std::vector<ScoredTenant>, decltype(cmp)> heap(cmp);
  for (const auto& t : tenants) {
    if (heap.size() < k) {
      heap.push(t);
    } else if (k > 0 && cmp(t, heap.top())) {
      heap.pop();
      heap.push(t);
    }
  }
  std::vector<ScoredTenant> out;
  out.reserve(heap.size());
  while (!heap.empty()) {
    out.push_back(heap.top());
    heap.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

double active_performance(const CoordinatorState& state) {
  double p = 0.0;
  for (TenantId i : state.active_set) p += state.signals[i].ema_ops_slow * state.signals[i].ema_hr_slow;
  return p;
}

}  // namespace

void AuraParams::check() const {
  if (k_max == 0) throw ConfigError("k_max must be >= 1");
  if (window_w == 0) throw ConfigError("window_w must be >= 1");
  if (!(0.0 <= alpha_min && alpha_min <= alpha_max && alpha_max <= 1.0)) {
    throw ConfigError("need 0 <= alpha_min <= alpha_max <= 1");
  }
  if (!(alpha_smooth > 0.0 && alpha_smooth <= 1.0)) throw ConfigError("alpha_smooth must lie in (0, 1]");
  if (!(beta_momentum >= 0.0 && beta_momentum <= 1.0)) throw ConfigError("beta_momentum must lie in [0, 1]");
  if (!(eta0 > 0.0)) throw ConfigError("eta0 must be > 0");
  if (bottom_quota_divisor == 0) throw ConfigError("bottom_quota_divisor must be >= 1");
  if (shift_ops_ratio > 0.0 && shift_ops_ratio <= 1.0) throw ConfigError("shift_ops_ratio must be > 1 or <= 0");
  if (disable_h && disable_v) throw ConfigError("cannot disable both H and V");
  signals.check();
}

CoordinatorState CoordinatorState::initial(std::size_t tenants, const AuraParams& params) {
  CoordinatorState s;
  s.signals.assign(tenants, TenantSignalState{});
  s.momentum.assign(tenants, 0.0);
  s.alpha_prev = 0.5 * (params.alpha_min + params.alpha_max);
  s.last_h.assign(tenants, kNaN);
  s.last_v.assign(tenants, kNaN);
  s.last_score.assign(tenants, kNaN);
  return s;
}

std::vector<double> h_factor(std::span<const TenantSignalState> signals, std::span<const TenantId> members,
                             bool use_fast_ops) {
  std::vector<double> ops(members.size());
  for (std::size_t k = 0; k < members.size(); ++k) {
    const auto& s = signals[members[k]];
    ops[k] = std::max(use_fast_ops ? s.ema_ops_fast : s.ema_ops_slow, 0.0);
  }
  std::vector<double> h(members.size(), 0.0);
  if (members.empty()) return h;
  const auto [lo_it, hi_it] = std::minmax_element(ops.begin(), ops.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  const bool flat = range <= 1e-12 * std::max(std::abs(*hi_it), 1.0);
  for (std::size_t k = 0; k < members.size(); ++k) {
    const double norm_ops = flat ? (ops[k] > 0.0 ? 1.0 : 0.0) : (ops[k] - lo) / range;
    const double hr_norm = std::clamp(signals[members[k]].ema_hr_slow, 0.0, 1.0);
    h[k] = norm_ops * hr_norm;
  }
  return h;
}

std::vector<double> v_factor(std::span<const TenantSignalState> signals, std::span<const TenantId> members,
                             double p90_floor) {
  std::vector<double> raw(members.size());
  for (std::size_t k = 0; k < members.size(); ++k) raw[k] = signals[members[k]].v_influence();
  return p90_normalize(raw, p90_floor);
}

double meta_alpha(CoordinatorState& state, std::span<const double> v_values, const AuraParams& params) {
  double target = params.alpha_min;
  if (!v_values.empty()) {
    const double n = static_cast<double>(v_values.size());
    const double mean = std::accumulate(v_values.begin(), v_values.end(), 0.0) / n;
    double var = 0.0;
    for (double v : v_values) var += (v - mean) * (v - mean);
    var /= n;
    const double kappa = var / (mean * mean + params.kappa_eps);
    const double squashed = kappa / (1.0 + kappa);
    target = params.alpha_min + (params.alpha_max - params.alpha_min) * squashed;
  }
  const double next = (1.0 - params.alpha_smooth) * state.alpha_prev + params.alpha_smooth * target;
  state.alpha_prev = std::clamp(next, params.alpha_min, params.alpha_max);
  return state.alpha_prev;
}

std::vector<double> score(std::span<const double> h, std::span<const double> v, double alpha,
                          const AuraParams& params) {
  std::vector<double> out(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (params.disable_v) {
      out[k] = h[k];
    } else if (params.disable_h) {
      out[k] = v[k];
    } else {
      out[k] = alpha * h[k] + (1.0 - alpha) * v[k];
    }
  }
  return out;
}

HeapFilterResult two_way_heap_filter(std::span<const ScoredTenant> tenants, std::size_t k_max) {
  HeapFilterResult r;
  r.top = bounded_select(tenants, k_max, ranks_above, r.comparisons);
  r.bottom = bounded_select(tenants, k_max, ranks_below, r.comparisons);
  return r;
}

std::size_t find_knee_point(std::span<const double> s) {
  const std::size_t n = s.size();
  if (n <= 2) return 1;
  const double span_x = static_cast<double>(n - 1);
  const double rise = s[n - 1] - s[0];
  std::size_t best = 1;
  double best_dist = 0.0;
  const double tol = 1e-12 * std::max({std::abs(s[0]), std::abs(s[n - 1]), 1.0});
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double chord = s[0] + rise * static_cast<double>(i) / span_x;
    const double dist = std::abs(s[i] - chord);
    if (dist > best_dist + tol) {
      best_dist = dist;
      best = i + 1;
    }
  }
  return best;
}

std::vector<TenantId> compose_set(std::span<const ScoredTenant> top, std::span<const ScoredTenant> bottom,
                                  std::size_t k_demand, const AuraParams& params) {
  k_demand = std::clamp<std::size_t>(k_demand, 1, std::max<std::size_t>(top.size(), 1));
  const std::size_t quota = (k_demand + params.bottom_quota_divisor - 1) / params.bottom_quota_divisor;
  std::vector<TenantId> ids;
  for (std::size_t k = 0; k < k_demand && k < top.size(); ++k) ids.push_back(top[k].id);
  for (std::size_t k = 0; k < quota && k < bottom.size(); ++k) ids.push_back(bottom[k].id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

bool is_converged(const CoordinatorState& state, const AuraParams& params) {
  if (state.inactivity_timer > params.inactivity_cap) return true;
  if (state.improvement_window.size() < params.window_w) return false;
  const double best = *std::max_element(state.improvement_window.begin(), state.improvement_window.end());
  return best < params.conv_rel_eps;
}

bool is_equilibrium(std::span<const ScoredTenant> top, std::span<const ScoredTenant> bottom,
                    const AuraParams& params) {
  if (top.empty() || bottom.empty()) return true;
  auto contains = [](std::span<const ScoredTenant> list, TenantId id) {
    return std::any_of(list.begin(), list.end(), [id](const ScoredTenant& t) { return t.id == id; });
  };
  double recipients = std::numeric_limits<double>::infinity();
  double donors = -std::numeric_limits<double>::infinity();
  for (const auto& t : top) {
    if (!contains(bottom, t.id)) recipients = std::min(recipients, t.score);
  }
  for (const auto& t : bottom) {
    if (!contains(top, t.id)) donors = std::max(donors, t.score);
  }
  if (std::isinf(recipients) || std::isinf(donors)) {
    // Lists cover the same tenants: compare the extremes.
    recipients = top.front().score;
    donors = bottom.front().score;
  }
  return recipients - donors < params.equilibrium_eps;
}

bool workload_shift(std::span<const TenantSignalState> signals, const AuraParams& params) {
  if (params.shift_ops_ratio <= 0.0) return false;
  return std::any_of(signals.begin(), signals.end(), [&](const TenantSignalState& s) {
    if (!s.initialized) return false;
    const double slow = s.ema_ops_slow, fast = s.ema_ops_fast;
    return fast > slow * params.shift_ops_ratio || fast * params.shift_ops_ratio < slow;
  });
}

double step_size(const CoordinatorState& state, const AuraParams& params) {
  if (params.step_decay_tau <= 0.0) return params.eta0;
  return params.eta0 / (1.0 + state.step_clock / params.step_decay_tau);
}

AllocationPlan optimize_in_active_set(CoordinatorState& state, std::span<const TenantId> active,
                                      std::span<const double> scores, const AllocationPlan& current,
                                      const PoolConfig& cfg, const AuraParams& params) {
  const std::size_t m = active.size();
  if (m == 0) return current;
  const auto floors = effective_lower_bounds(cfg);

  Pages budget = 0;
  Pages floor_sum = 0;
  double score_sum = 0.0;
  std::vector<double> weight(m);
  for (std::size_t k = 0; k < m; ++k) {
    budget += current[active[k]];
    floor_sum += floors[active[k]];
    weight[k] = scores[k] >= params.min_score ? scores[k] : 0.0;
    score_sum += weight[k];
  }
  const auto spare = static_cast<double>(budget - floor_sum);

  // (1) score-proportional target over the pages the active set holds.
  std::vector<double> target(m);
  for (std::size_t k = 0; k < m; ++k) {
    target[k] = score_sum > 0.0
                    ? static_cast<double>(floors[active[k]]) + spare * weight[k] / score_sum
                    : static_cast<double>(current[active[k]]);
  }

  // (2) momentum: velocity tracks the gap to the target.
  std::vector<double> velocity(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double gap = target[k] - static_cast<double>(current[active[k]]);
    double& v = state.momentum[active[k]];
    v = params.disable_momentum ? gap : (1.0 - params.beta_momentum) * v + params.beta_momentum * gap;
    velocity[k] = v;
  }

  // (3) decaying step, scaled as a whole so the largest move fits the cap.
  const double eta = step_size(state, params);
  std::vector<double> step(m);
  double largest = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    step[k] = eta * velocity[k];
    largest = std::max(largest, std::abs(step[k]));
  }
  if (params.max_step_frac > 0.0) {
    const double cap = std::max(1.0, std::floor(params.max_step_frac * static_cast<double>(cfg.elastic_pages())));
    if (largest > cap) {
      const double shrink = cap / largest;
      for (double& d : step) d *= shrink;
    }
  }
  // Zero-sum repair: the velocity sums to zero only while the active set
  // is stable, and bounds may cut some moves short.
  {
    double pos = 0.0;
    double neg = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double room = static_cast<double>(floors[active[k]] - current[active[k]]);
      if (step[k] < room) step[k] = room;
      (step[k] > 0.0 ? pos : neg) += step[k];
    }
    if (pos + neg > 0.0 && pos > 0.0) {
      const double keep = std::max(0.0, (pos + neg) < pos ? (-neg) / pos : 0.0);
      for (double& d : step) {
        if (d > 0.0) d *= keep;
      }
    } else if (pos + neg < 0.0 && neg < 0.0) {
      const double keep = pos / (-neg);
      for (double& d : step) {
        if (d < 0.0) d *= keep;
      }
    }
  }

  std::vector<double> proposed(m);
  std::vector<Pages> sub_floors(m);
  for (std::size_t k = 0; k < m; ++k) {
    proposed[k] = static_cast<double>(current[active[k]]) + step[k];
    sub_floors[k] = floors[active[k]];
  }
  const AllocationPlan rounded = project_to_bounds(proposed, sub_floors, budget);

  AllocationPlan next = current;
  for (std::size_t k = 0; k < m; ++k) next[active[k]] = rounded[k];

  // (4) actuation filtering.
  const Pages moved = l1_distance(next, current);
  const double threshold = params.gate_frac > 0.0 ? params.gate_frac * static_cast<double>(cfg.elastic_pages()) : 0.0;
  if (moved == 0 || static_cast<double>(moved) < threshold) return current;

  // (5) final feasibility guard; a feasible integral plan passes unchanged.
  std::vector<double> raw(next.pages.begin(), next.pages.end());
  return project_to_feasible(raw, cfg);
}

CycleOutcome run_decision_cycle(CoordinatorState& state, std::span<const TenantObservation> obs,
                                const AllocationPlan& current, const PoolConfig& cfg, const AuraParams& params) {
  const std::size_t n = obs.size();
  if (state.signals.size() != n) state = CoordinatorState::initial(n, params);

  // Sense: per-tenant signal updates.
  for (TenantId i = 0; i < n; ++i) state.signals[i] = observe(state.signals[i], obs[i], params.signals);
  if (workload_shift(state.signals, params)) {
    state.step_clock = 0.0;
    state.active_set.clear();
    std::fill(state.momentum.begin(), state.momentum.end(), 0.0);
    ++state.shifts;
  }
  std::fill(state.last_h.begin(), state.last_h.end(), kNaN);
  std::fill(state.last_v.begin(), state.last_v.end(), kNaN);
  std::fill(state.last_score.begin(), state.last_score.end(), kNaN);

  CycleOutcome out;
  out.stats.global_scan = false;

  const bool use_aas = !params.disable_aas && n >= params.aas_min_tenants;
  if (!use_aas) {
    if (state.active_set.size() != n) {
      state.active_set.resize(n);
      std::iota(state.active_set.begin(), state.active_set.end(), TenantId{0});
    }
    out.stats.global_scan = true;
    out.stats.touched = n;
  } else {
    // Score improvements are only evidence when the previous cycle acted.
    const double perf = active_performance(state);
    if (state.last_changed && state.last_performance > 0.0) {
      state.improvement_window.push_back((perf - state.last_performance) / state.last_performance);
      while (state.improvement_window.size() > params.window_w) state.improvement_window.pop_front();
    }
    state.last_performance = perf;

    if (state.active_set.empty() || is_converged(state, params)) {
      out.stats.global_scan = true;
      out.stats.touched = n;
      std::vector<TenantId> all(n);
      std::iota(all.begin(), all.end(), TenantId{0});
      const auto h = h_factor(state.signals, all, params.fast_h);
      const auto v = v_factor(state.signals, all, params.signals.p90_floor);
      const auto s = score(h, v, state.alpha_prev, params);
      std::vector<ScoredTenant> ranked(n);
      for (TenantId i = 0; i < n; ++i) ranked[i] = {i, s[i]};

      auto filtered = two_way_heap_filter(ranked, params.k_max);
      out.stats.comparisons += filtered.comparisons;
      state.top_candidates = filtered.top;
      state.bottom_candidates = filtered.bottom;
      state.improvement_window.clear();
      state.inactivity_timer = 0;

      if (is_equilibrium(filtered.top, filtered.bottom, params)) {
        for (TenantId i = 0; i < n; ++i) {
          state.last_h[i] = h[i];
          state.last_v[i] = v[i];
          state.last_score[i] = s[i];
        }
        state.last_changed = false;
        state.step_clock += 1.0;
        ++state.cycle;
        out.stats.active_size = state.active_set.size();
        out.plan = current;
        return out;
      }

      std::vector<double> top_scores(filtered.top.size());
      for (std::size_t k = 0; k < top_scores.size(); ++k) top_scores[k] = filtered.top[k].score;
      const std::size_t k_demand = find_knee_point(top_scores);
      auto next_set = compose_set(filtered.top, filtered.bottom, k_demand, params);

      if (next_set != state.active_set) {
        std::vector<bool> member(n, false);
        for (TenantId i : next_set) member[i] = true;
        double mean = 0.0;
        for (TenantId i = 0; i < n; ++i) {
          if (!member[i]) state.momentum[i] = 0.0;
          else mean += state.momentum[i];
        }
        mean /= static_cast<double>(next_set.size());
        for (TenantId i : next_set) state.momentum[i] -= mean;
        state.active_set = std::move(next_set);
      }
      state.last_performance = active_performance(state);
    } else {
      out.stats.touched = state.active_set.size();
    }
  }

  // Decide: score and move the active set.
  const auto& active = state.active_set;
  const auto h = h_factor(state.signals, active, params.fast_h);
  const auto v = v_factor(state.signals, active, params.signals.p90_floor);
  const double alpha = meta_alpha(state, v, params);
  const auto s = score(h, v, alpha, params);
  for (std::size_t k = 0; k < active.size(); ++k) {
    state.last_h[active[k]] = h[k];
    state.last_v[active[k]] = v[k];
    state.last_score[active[k]] = s[k];
  }

  out.plan = optimize_in_active_set(state, active, s, current, cfg, params);
  out.stats.active_size = active.size();

  state.last_changed = out.plan != current;
  state.inactivity_timer = state.last_changed ? 0 : state.inactivity_timer + 1;
  state.step_clock += 1.0;
  ++state.cycle;
  return out;
}

namespace {

PoolConfig effective_pool(PoolConfig pool, const AuraParams& params) {
  if (params.disable_fixed_pool) pool.fixed_pages = 0;
  return pool;
}

}  // namespace

AuraPolicy::AuraPolicy(const PoolConfig& pool, AuraParams params, std::string name)
    : pool_(effective_pool(pool, params)), params_(params), name_(std::move(name)) {
  params_.check();
  pool_.check();
  state_ = CoordinatorState::initial(pool_.tenants(), params_);
}

AllocationPlan AuraPolicy::decide(std::span<const TenantObservation> obs, const AllocationPlan& current,
                                  std::int64_t /*cycle*/) {
  auto outcome = run_decision_cycle(state_, obs, current, pool_, params_);
  stats_ = outcome.stats;
  return std::move(outcome.plan);
}

}  // namespace sam
