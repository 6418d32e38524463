#include "sam/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace sam {

namespace {

// Largest-remainder split of `amount` in proportion to `weights`;
// ties in the fractional part go to the lower id.
std::vector<Pages> largest_remainder(std::span<const double> weights, Pages amount) {
  const std::size_t n = weights.size();
  std::vector<Pages> out(n, 0);
  if (n == 0 || amount <= 0) return out;
  double total = 0.0;
  for (double w : weights) total += std::max(w, 0.0);
  std::vector<double> share(n);
  for (std::size_t i = 0; i < n; ++i) {
    share[i] = total > 0.0 ? static_cast<double>(amount) * std::max(weights[i], 0.0) / total
                           : static_cast<double>(amount) / static_cast<double>(n);
  }
  Pages used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<Pages>(std::floor(share[i]));
    used += out[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return share[a] - std::floor(share[a]) > share[b] - std::floor(share[b]);
  });
  for (std::size_t k = 0; used < amount; k = (k + 1) % n, ++used) ++out[order[k]];
  return out;
}

// Even split tilted toward one tenant: it gains `frac` of the elastic
// pool, taken evenly from everybody else.
AllocationPlan probe_plan(const PoolConfig& cfg, TenantId favoured, double frac) {
  const std::size_t n = cfg.tenants();
  std::vector<double> w(n, 1.0);
  if (n > 1) {
    const double extra = frac * static_cast<double>(n);
    w[favoured] += extra;
    for (TenantId i = 0; i < n; ++i) {
      if (i != favoured) w[i] -= extra / static_cast<double>(n - 1);
    }
    for (double& x : w) x = std::max(x, 0.0);
  }
  return proportional_elastic(w, cfg);
}

double ema(double prev, double x, double lambda) { return (1.0 - lambda) * prev + lambda * x; }

}  // namespace

AllocationPlan proportional_elastic(std::span<const double> weights, const PoolConfig& cfg) {
  const auto fixed = apportion_fixed_pool(cfg);
  const auto elastic = largest_remainder(weights, cfg.elastic_pages());
  std::vector<double> raw(cfg.tenants());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = static_cast<double>(fixed[i] + elastic[i]);
  return project_to_feasible(raw, cfg);
}

AllocationPlan b1_static_average(const PoolConfig& cfg) { return even_plan(cfg); }

AllocationPlan b7_dynamic_need(std::span<const double> ops_fast, std::span<const double> hit_rates,
                               const PoolConfig& cfg) {
  std::vector<double> need(ops_fast.size());
  for (std::size_t i = 0; i < need.size(); ++i) {
    need[i] = std::max(ops_fast[i], 0.0) * (1.0 - std::clamp(hit_rates[i], 0.0, 1.0));
  }
  return proportional_elastic(need, cfg);
}

AllocationPlan b12_sla_driven(std::span<const double> hit_rates, std::span<const double> sla_targets,
                              const PoolConfig& cfg) {
  std::vector<double> violation(hit_rates.size());
  for (std::size_t i = 0; i < violation.size(); ++i) violation[i] = std::max(0.0, sla_targets[i] - hit_rates[i]);
  return proportional_elastic(violation, cfg);
}

AllocationPlan b5_global_lru_proxy(std::span<const double> ops, Pages total_pages) {
  return AllocationPlan{largest_remainder(ops, total_pages)};
}

std::optional<ExpFit> fit_exp_curve(std::span<const double> pages, std::span<const double> hit_rates) {
  if (pages.size() != hit_rates.size()) throw std::invalid_argument("fit_exp_curve: size mismatch");
  std::vector<double> distinct(pages.begin(), pages.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) return std::nullopt;

  // For a fixed scale the best h is closed-form, leaving a 1-D search.
  auto evaluate = [&](double log_s) {
    const double s = std::exp(log_s);
    double sy = 0.0, ss = 0.0;
    for (std::size_t k = 0; k < pages.size(); ++k) {
      const double phi = -std::expm1(-pages[k] / s);
      sy += phi * hit_rates[k];
      ss += phi * phi;
    }
    ExpFit f;
    f.scale = s;
    f.h_max = ss > 0.0 ? std::clamp(sy / ss, 0.0, 1.0) : 0.0;
    for (std::size_t k = 0; k < pages.size(); ++k) {
      const double r = hit_rates[k] - f.h_max * -std::expm1(-pages[k] / s);
      f.sse += r * r;
    }
    return f;
  };

  const double lo = 0.0;
  const double hi = std::log(1e6);
  constexpr int kGrid = 64;
  ExpFit best = evaluate(lo);
  int best_k = 0;
  for (int k = 1; k <= kGrid; ++k) {
    const auto f = evaluate(lo + (hi - lo) * k / kGrid);
    if (f.sse < best.sse) {
      best = f;
      best_k = k;
    }
  }
  // Golden-section refinement inside the bracketing grid cells.
  const double step = (hi - lo) / kGrid;
  double a = lo + step * std::max(best_k - 1, 0);
  double b = lo + step * std::min(best_k + 1, kGrid);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  auto fc = evaluate(c), fd = evaluate(d);
  for (int it = 0; it < 60; ++it) {
    if (fc.sse < fd.sse) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = evaluate(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = evaluate(d);
    }
  }
  for (const auto& f : {fc, fd}) {
    if (f.sse < best.sse) best = f;
  }
  if (!std::isfinite(best.sse)) return std::nullopt;
  return best;
}

AllocationPlan greedy_on_fits(std::span<const ExpFit> fits, std::span<const double> weights,
                              std::span<const Pages> bounds, Pages budget) {
  const std::size_t n = fits.size();
  AllocationPlan plan{std::vector<Pages>(bounds.begin(), bounds.end())};
  Pages spare = budget - plan.total();
  if (spare < 0) throw InfeasibleError("lower bounds exceed the page budget");
  auto gain = [&](TenantId i, Pages p) {
    const auto& f = fits[i];
    const double x = static_cast<double>(p);
    // h (e^{-p/s} - e^{-(p+1)/s}) without cancellation.
    return std::max(weights[i], 0.0) * f.h_max * std::exp(-x / f.scale) * -std::expm1(-1.0 / f.scale);
  };
  using Item = std::pair<double, TenantId>;
  auto worse = [](const Item& a, const Item& b) {
    return a.first < b.first || (a.first == b.first && a.second > b.second);
  };
  std::priority_queue<Item, std::vector<Item>, decltype(worse)> heap(worse);
  for (TenantId i = 0; i < n; ++i) heap.emplace(gain(i, plan[i]), i);
  while (spare > 0 && !heap.empty()) {
    const TenantId i = heap.top().second;
    heap.pop();
    ++plan[i];
    --spare;
    heap.emplace(gain(i, plan[i]), i);
  }
  return plan;
}

std::vector<std::size_t> ucp_lookahead(const std::vector<std::vector<double>>& utility, std::size_t chunks) {
  const std::size_t n = utility.size();
  std::vector<std::size_t> alloc(n, 0);
  std::size_t remaining = chunks;
  while (remaining > 0) {
    double best_gain = 0.0;
    std::size_t best_i = n, best_k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& u = utility[i];
      if (u.empty()) continue;
      const std::size_t room = std::min(remaining, u.size() - 1 - alloc[i]);
      for (std::size_t k = 1; k <= room; ++k) {
        const double g = (u[alloc[i] + k] - u[alloc[i]]) / static_cast<double>(k);
        if (g > best_gain) {
          best_gain = g;
          best_i = i;
          best_k = k;
        }
      }
    }
    if (best_i == n) break;
    alloc[best_i] += best_k;
    remaining -= best_k;
  }
  // Nothing gains any more: spread the rest over tenants that still have a
  // non-flat table, or over everybody with room.
  auto spread = [&](bool only_sloped) {
    bool placed = true;
    while (remaining > 0 && placed) {
      placed = false;
      for (std::size_t i = 0; i < n && remaining > 0; ++i) {
        const auto& u = utility[i];
        if (u.empty() || alloc[i] + 1 >= u.size()) continue;
        if (only_sloped && !(u.back() > u.front())) continue;
        ++alloc[i];
        --remaining;
        placed = true;
      }
    }
  };
  spread(true);
  spread(false);
  return alloc;
}

StaticPolicy::StaticPolicy(const PoolConfig& pool, AllocationPlan plan, std::string name)
    : pool_(pool), plan_(std::move(plan)), name_(std::move(name)) {}

IndividualOptPolicy::IndividualOptPolicy(const PoolConfig& pool, double hr_target, double grow, double shrink)
    : pool_(pool), target_(hr_target), grow_(grow), shrink_(shrink) {
  const auto start = even_plan(pool_);
  request_.assign(start.pages.begin(), start.pages.end());
}

AllocationPlan IndividualOptPolicy::decide(std::span<const TenantObservation> obs, const AllocationPlan&,
                                           std::int64_t) {
  const auto floors = effective_lower_bounds(pool_);
  const std::size_t n = pool_.tenants();
  stats_ = {true, n, n, 0};
  for (TenantId i = 0; i < n; ++i) {
    request_[i] *= obs[i].hit_rate < target_ ? 1.0 + grow_ : 1.0 - shrink_;
    request_[i] = std::clamp(request_[i], static_cast<double>(floors[i]), static_cast<double>(pool_.total_pages));
  }
  return project_to_feasible(request_, pool_);
}

AllocationPlan GlobalLruProxyPolicy::decide(std::span<const TenantObservation> obs, const AllocationPlan&,
                                            std::int64_t) {
  std::vector<double> ops(obs.size());
  for (std::size_t i = 0; i < ops.size(); ++i) ops[i] = obs[i].ops;
  stats_ = {true, ops.size(), ops.size(), 0};
  return b5_global_lru_proxy(ops, pool_.total_pages);
}

DynamicNeedPolicy::DynamicNeedPolicy(const PoolConfig& pool, double lambda_fast)
    : pool_(pool), lambda_(lambda_fast), ops_fast_(pool.tenants(), 0.0) {}

AllocationPlan DynamicNeedPolicy::decide(std::span<const TenantObservation> obs, const AllocationPlan&,
                                         std::int64_t) {
  const std::size_t n = pool_.tenants();
  stats_ = {true, n, n, 0};
  std::vector<double> hr(n);
  for (TenantId i = 0; i < n; ++i) {
    ops_fast_[i] = seeded_ ? ema(ops_fast_[i], obs[i].ops, lambda_) : obs[i].ops;
    hr[i] = obs[i].hit_rate;
  }
  seeded_ = true;
  return b7_dynamic_need(ops_fast_, hr, pool_);
}

RegressionPolicy::RegressionPolicy(const PoolConfig& pool, std::size_t history, double probe_frac,
                                   std::int64_t refit_every)
    : pool_(pool),
      history_cap_(history),
      probe_frac_(probe_frac),
      refit_every_(std::max<std::int64_t>(refit_every, 1)),
      pages_(pool.tenants()),
      rates_(pool.tenants()),
      ops_ema_(pool.tenants(), -1.0) {}

AllocationPlan RegressionPolicy::decide(std::span<const TenantObservation> obs, const AllocationPlan& current,
                                        std::int64_t cycle) {
  const std::size_t n = pool_.tenants();
  stats_ = {true, n, n, 0};
  bool ready = true;
  for (TenantId i = 0; i < n; ++i) {
    pages_[i].push_back(static_cast<double>(obs[i].current_pages));
    rates_[i].push_back(obs[i].hit_rate);
    if (pages_[i].size() > history_cap_) {
      pages_[i].erase(pages_[i].begin());
      rates_[i].erase(rates_[i].begin());
    }
    ops_ema_[i] = ops_ema_[i] < 0.0 ? obs[i].ops : ema(ops_ema_[i], obs[i].ops, 0.1);
    std::vector<double> d = pages_[i];
    std::sort(d.begin(), d.end());
    ready = ready && std::unique(d.begin(), d.end()) - d.begin() >= 3;
  }
  if (!ready) {
    return probe_plan(pool_, static_cast<TenantId>(probes_++ % static_cast<std::int64_t>(n)), probe_frac_);
  }
  if (fitted_plan_ && cycle - last_fit_ < refit_every_) return *fitted_plan_;

  std::vector<ExpFit> fits(n);
  for (TenantId i = 0; i < n; ++i) {
    const auto f = fit_exp_curve(pages_[i], rates_[i]);
    if (!f) return fitted_plan_.value_or(current);
    fits[i] = *f;
  }
  fitted_plan_ = greedy_on_fits(fits, ops_ema_, effective_lower_bounds(pool_), pool_.total_pages);
  last_fit_ = cycle;
  return *fitted_plan_;
}

SlaDrivenPolicy::SlaDrivenPolicy(const PoolConfig& pool, std::vector<double> sla_targets)
    : pool_(pool), sla_(std::move(sla_targets)) {
  if (sla_.size() != pool_.tenants()) throw ConfigError("one SLA target per tenant required");
}

AllocationPlan SlaDrivenPolicy::decide(std::span<const TenantObservation> obs, const AllocationPlan&,
                                       std::int64_t) {
  std::vector<double> hr(obs.size());
  for (std::size_t i = 0; i < hr.size(); ++i) hr[i] = obs[i].hit_rate;
  stats_ = {true, hr.size(), hr.size(), 0};
  return b12_sla_driven(hr, sla_, pool_);
}

UcpPolicy::UcpPolicy(const PoolConfig& pool, Pages chunk, double probe_frac)
    : pool_(pool),
      chunk_(chunk > 0 ? chunk : std::max<Pages>(1, pool.total_pages / 64)),
      probe_frac_(probe_frac),
      floors_(effective_lower_bounds(pool)),
      history_(pool.tenants()),
      ops_ema_(pool.tenants(), -1.0) {}

AllocationPlan UcpPolicy::decide(std::span<const TenantObservation> obs, const AllocationPlan&, std::int64_t) {
  const std::size_t n = pool_.tenants();
  stats_ = {true, n, n, 0};
  for (TenantId i = 0; i < n; ++i) {
    history_[i].record(obs[i].current_pages, obs[i].hit_rate, 0);
    ops_ema_[i] = ops_ema_[i] < 0.0 ? obs[i].ops : ema(ops_ema_[i], obs[i].ops, 0.1);
  }
  if (probes_ < static_cast<std::int64_t>(n)) return probe_plan(pool_, static_cast<TenantId>(probes_++), probe_frac_);

  const Pages spare = pool_.total_pages - std::accumulate(floors_.begin(), floors_.end(), Pages{0});
  const auto chunks = static_cast<std::size_t>(spare / chunk_);
  std::vector<std::vector<double>> utility(n, std::vector<double>(chunks + 1, 0.0));
  for (TenantId i = 0; i < n; ++i) {
    double running = 0.0;
    for (std::size_t k = 0; k <= chunks; ++k) {
      const double hr = history_[i].estimate(floors_[i] + static_cast<Pages>(k) * chunk_).value_or(0.0);
      running = std::max(running, ops_ema_[i] * hr);
      utility[i][k] = running;
    }
  }
  const auto alloc = ucp_lookahead(utility, chunks);
  std::vector<double> raw(n);
  for (TenantId i = 0; i < n; ++i) raw[i] = static_cast<double>(floors_[i] + static_cast<Pages>(alloc[i]) * chunk_);
  return project_to_feasible(raw, pool_);
}

}  // namespace sam
