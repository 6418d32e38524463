#include "sam/core_policy.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

namespace sam {

CoreState CoreState::initial(const PoolConfig& cfg) {
  CoreState s;
  const auto plan = even_plan(cfg);
  s.x.assign(plan.pages.begin(), plan.pages.end());
  return s;
}

std::vector<double> lmo(std::span<const double> g, std::span<const Pages> bounds, Pages budget) {
  Pages floor_sum = 0;
  for (Pages b : bounds) floor_sum += b;
  if (floor_sum > budget) throw InfeasibleError("lower bounds exceed the page budget");
  std::vector<double> y(bounds.begin(), bounds.end());
  if (y.empty()) return y;
  const auto best = static_cast<std::size_t>(std::min_element(g.begin(), g.end()) - g.begin());
  y[best] += static_cast<double>(budget - floor_sum);
  return y;
}

AllocationPlan ofw_step(CoreState& state, std::span<const double> gradient, const PoolConfig& cfg) {
  const auto floors = effective_lower_bounds(cfg);
  const auto y = lmo(gradient, floors, cfg.total_pages);
  const double eta = 2.0 / (static_cast<double>(state.t) + 2.0);
  for (std::size_t i = 0; i < state.x.size(); ++i) state.x[i] = (1.0 - eta) * state.x[i] + eta * y[i];
  double norm = 0.0;
  for (double g : gradient) norm += g * g;
  state.g_bound = std::max(state.g_bound, std::sqrt(norm));
  ++state.t;
  return project_to_feasible(state.x, cfg);
}

void HitRateHistory::record(Pages pages, double hit_rate, std::int64_t cycle) {
  auto& p = points_[pages];
  p.sum += hit_rate;
  p.count += 1.0;
  p.last = cycle;
}

void HitRateHistory::forget_before(std::int64_t cycle) {
  std::erase_if(points_, [cycle](const auto& kv) { return kv.second.last < cycle; });
}

std::optional<double> HitRateHistory::estimate(Pages pages) const {
  if (points_.empty()) return std::nullopt;
  auto mean = [](const Point& p) { return p.sum / p.count; };
  const auto hi = points_.lower_bound(pages);
  if (hi == points_.end()) return mean(std::prev(hi)->second);
  if (hi->first == pages || hi == points_.begin()) return mean(hi->second);
  const auto lo = std::prev(hi);
  const double w = static_cast<double>(pages - lo->first) / static_cast<double>(hi->first - lo->first);
  return (1.0 - w) * mean(lo->second) + w * mean(hi->second);
}

std::optional<double> HitRateHistory::slope(Pages pages, Pages max_radius, double min_leverage) const {
  if (points_.size() < 2) return std::nullopt;
  std::optional<double> result;
  for (Pages r = 1;; r = std::min(2 * r, max_radius)) {
    double sw = 0.0, sx = 0.0, sy = 0.0;
    bool below = false, above = false;
    std::size_t distinct = 0;
    for (auto it = points_.lower_bound(pages - r); it != points_.end() && it->first <= pages + r; ++it) {
      const double w = it->second.count;
      sw += w;
      sx += w * static_cast<double>(it->first);
      sy += it->second.sum;
      below = below || it->first < pages;
      above = above || it->first > pages;
      ++distinct;
    }
    if (distinct >= 2) {
      const double mx = sx / sw;
      const double my = sy / sw;
      double sxx = 0.0, sxy = 0.0;
      for (auto it = points_.lower_bound(pages - r); it != points_.end() && it->first <= pages + r; ++it) {
        const double dx = static_cast<double>(it->first) - mx;
        sxx += it->second.count * dx * dx;
        sxy += dx * (it->second.sum - it->second.count * my);
      }
      if (sxx > 0.0) {
        result = sxy / sxx;
        if (below && above && sxx >= min_leverage) return result;
      }
    }
    if (r >= max_radius) return result;
  }
}

CorePolicy::CorePolicy(const PoolConfig& pool, CoreParams params, std::string name)
    : pool_(pool), params_(params), name_(std::move(name)) {
  pool_.check();
  state_ = CoreState::initial(pool_);
  history_.resize(pool_.tenants());
  gradient_.assign(pool_.tenants(), 0.0);
  floors_ = effective_lower_bounds(pool_);
}

AllocationPlan CorePolicy::decide(std::span<const TenantObservation> obs, const AllocationPlan& current,
                                  std::int64_t cycle) {
  const std::size_t n = pool_.tenants();
  stats_ = DecisionStats{true, n, n, 0};
  std::optional<TenantId> unknown;
  for (TenantId i = 0; i < n; ++i) {
    history_[i].record(obs[i].current_pages, obs[i].hit_rate, cycle);
    if (params_.history_age > 0) history_[i].forget_before(cycle - params_.history_age);
    const auto s = history_[i].slope(obs[i].current_pages, params_.max_radius, params_.min_leverage);
    gradient_[i] = -obs[i].ops * s.value_or(0.0);
    if (!s && !unknown && obs[i].ops > 0.0) unknown = i;
  }

  if (unknown && n > 1) {
    // Probe: lend the unknown tenant pages from the tenant with most slack.
    AllocationPlan plan = project_to_feasible(state_.x, pool_);
    TenantId donor = *unknown == 0 ? 1 : 0;
    for (TenantId i = 0; i < n; ++i) {
      if (i != *unknown && plan[i] - floors_[i] > plan[donor] - floors_[donor]) donor = i;
    }
    const Pages amount = std::min(params_.probe_pages, plan[donor] - floors_[donor]);
    if (amount > 0) {
      plan[donor] -= amount;
      plan[*unknown] += amount;
    }
    return plan;
  }

  AllocationPlan plan = ofw_step(state_, gradient_, pool_);
  if (plan != current || n < 2) return plan;

  // Stalled: probe one neighbouring pair so the next gradients see movement.
  const auto j = static_cast<TenantId>(explore_count_ % static_cast<std::int64_t>(n));
  const TenantId k = (j + 1) % n;
  const Pages sign = (explore_count_ / static_cast<std::int64_t>(n)) % 2 == 0 ? 1 : -1;
  ++explore_count_;
  const TenantId giver = sign > 0 ? k : j;
  const TenantId taker = sign > 0 ? j : k;
  if (plan[giver] - 1 >= floors_[giver]) {
    --plan[giver];
    ++plan[taker];
  }
  return plan;
}

}  // namespace sam
