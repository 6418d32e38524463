#include "sam/oracle.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace sam {

namespace {

using ValueFn = std::function<double(TenantId, Pages)>;

OracleResult solve_allocation(const ValueFn& value, std::span<const Pages> floors, Pages total, Pages chunk) {
  const std::size_t n = floors.size();
  const Pages floor_sum = std::accumulate(floors.begin(), floors.end(), Pages{0});
  if (floor_sum > total) throw InfeasibleError("lower bounds exceed the page budget");
  if (chunk < 1) throw std::invalid_argument("oracle chunk must be >= 1");

  const std::int64_t chunks = (total - floor_sum) / chunk;
  MckpInstance inst;
  inst.budget = chunks;
  inst.groups.resize(n);
  for (TenantId i = 0; i < n; ++i) {
    inst.groups[i].reserve(static_cast<std::size_t>(chunks) + 1);
    for (std::int64_t k = 0; k <= chunks; ++k) inst.groups[i].push_back({k, value(i, floors[i] + k * chunk)});
  }
  const auto sol = solve_mckp(inst);

  OracleResult r;
  r.chunk = chunk;
  r.grid_value = sol.value;
  r.plan.pages.resize(n);
  for (TenantId i = 0; i < n; ++i) r.plan[i] = floors[i] + static_cast<Pages>(sol.choice[i]) * chunk;
  const Pages leftover = total - r.plan.total();
  if (leftover > 0 && n > 0) {
    TenantId best = 0;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (TenantId i = 0; i < n; ++i) {
      const double g = value(i, r.plan[i] + 1) - value(i, r.plan[i]);
      if (g > best_gain) {
        best_gain = g;
        best = i;
      }
    }
    r.plan[best] += leftover;
  }
  r.plan_value = 0.0;
  for (TenantId i = 0; i < n; ++i) r.plan_value += value(i, r.plan[i]);
  return r;
}

double interpolate(const ProfiledCurve& c, Pages pages) {
  if (c.grid.empty()) return 0.0;
  if (pages <= c.grid.front()) return c.hr_at.front();
  if (pages >= c.grid.back()) return c.hr_at.back();
  const auto it = std::upper_bound(c.grid.begin(), c.grid.end(), pages);
  const auto hi = static_cast<std::size_t>(it - c.grid.begin());
  const std::size_t lo = hi - 1;
  const double w = static_cast<double>(pages - c.grid[lo]) / static_cast<double>(c.grid[hi] - c.grid[lo]);
  return (1.0 - w) * c.hr_at[lo] + w * c.hr_at[hi];
}

}  // namespace

std::vector<double> isotonic_non_decreasing(std::span<const double> values, std::span<const double> weights) {
  struct Block {
    double mean, weight;
    std::size_t size;
  };
  std::vector<Block> blocks;
  for (std::size_t k = 0; k < values.size(); ++k) {
    blocks.push_back({values[k], weights.empty() ? 1.0 : weights[k], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      const Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      const double w = a.weight + b.weight;
      a.mean = (a.mean * a.weight + b.mean * b.weight) / w;
      a.weight = w;
      a.size += b.size;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& b : blocks) out.insert(out.end(), b.size, b.mean);
  return out;
}

std::vector<double> phase_average_ops(const EnvironmentModel& env, std::size_t phase) {
  const auto& sched = env.schedule;
  if (phase >= sched.phases.size()) throw std::out_of_range(fmt::format("no phase {}", phase));
  const std::int64_t start = sched.phase_start(phase);
  const std::int64_t len = sched.phases[phase].duration;
  std::vector<double> avg(env.tenants(), 0.0);
  for (TenantId i = 0; i < env.tenants(); ++i) {
    for (std::int64_t c = start; c < start + len; ++c) avg[i] += sched.expected_ops(i, c);
    avg[i] /= static_cast<double>(len);
  }
  return avg;
}

std::vector<ProfiledCurve> profile_phase(const EnvironmentModel& env, std::size_t phase, std::span<const Pages> grid,
                                         std::size_t samples) {
  const auto ops = phase_average_ops(env, phase);
  const std::int64_t start = env.schedule.phase_start(phase);
  const std::int64_t len = env.schedule.phases[phase].duration;
  samples = std::max<std::size_t>(samples, 1);
  std::vector<ProfiledCurve> out(env.tenants());
  AllocationPlan plan{std::vector<Pages>(env.tenants(), 0)};
  for (TenantId i = 0; i < env.tenants(); ++i) {
    out[i].grid.assign(grid.begin(), grid.end());
    out[i].ops = ops[i];
    std::vector<double> raw;
    for (Pages g : grid) {
      plan[i] = g;
      double sum = 0.0;
      for (std::size_t s = 0; s < samples; ++s) {
        const auto cycle = start + static_cast<std::int64_t>(s) % len;
        auto probe = env;
        probe.noise.seed = env.noise.seed + s / static_cast<std::size_t>(len);
        sum += (*step(probe, plan, cycle))[i].hit_rate;
      }
      raw.push_back(sum / static_cast<double>(samples));
    }
    out[i].hr_at = isotonic_non_decreasing(raw);
  }
  return out;
}

std::vector<Pages> oracle_grid(Pages floor, Pages max_pages, Pages chunk) {
  std::vector<Pages> g;
  for (Pages p = floor; p <= max_pages; p += std::max<Pages>(chunk, 1)) g.push_back(p);
  return g;
}

Pages default_chunk(const PoolConfig& cfg) { return std::max<Pages>(1, cfg.total_pages / 64); }

MckpSolution solve_mckp(const MckpInstance& inst) {
  const std::size_t groups = inst.groups.size();
  const auto cap = static_cast<std::size_t>(std::max<std::int64_t>(inst.budget, 0));
  constexpr double kNone = -std::numeric_limits<double>::infinity();
  // best[b]: optimum over the groups so far using at most b capacity.
  std::vector<double> best(cap + 1, 0.0), next(cap + 1);
  std::vector<std::vector<std::uint32_t>> pick(groups, std::vector<std::uint32_t>(cap + 1, 0));
  for (std::size_t g = 0; g < groups; ++g) {
    const auto& items = inst.groups[g];
    if (items.empty()) throw InfeasibleError(fmt::format("MCKP group {} has no items", g));
    for (std::size_t b = 0; b <= cap; ++b) {
      double v = kNone;
      std::uint32_t arg = 0;
      for (std::size_t k = 0; k < items.size(); ++k) {
        const auto w = items[k].weight;
        if (w < 0 || static_cast<std::size_t>(w) > b || best[b - static_cast<std::size_t>(w)] == kNone) continue;
        const double cand = best[b - static_cast<std::size_t>(w)] + items[k].value;
        if (cand > v) {
          v = cand;
          arg = static_cast<std::uint32_t>(k);
        }
      }
      next[b] = v;
      pick[g][b] = arg;
    }
    best.swap(next);
  }
  if (best[cap] == kNone) throw InfeasibleError("MCKP instance is infeasible");
  MckpSolution sol;
  sol.value = best[cap];
  sol.choice.resize(groups);
  std::size_t b = cap;
  for (std::size_t g = groups; g-- > 0;) {
    const std::size_t k = pick[g][b];
    sol.choice[g] = k;
    sol.weight += inst.groups[g][k].weight;
    b -= static_cast<std::size_t>(inst.groups[g][k].weight);
  }
  return sol;
}

MckpSolution brute_force_mckp(const MckpInstance& inst) {
  const std::size_t groups = inst.groups.size();
  MckpSolution best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(groups, 0);
  bool found = false;
  while (true) {
    std::int64_t w = 0;
    double v = 0.0;
    for (std::size_t g = 0; g < groups; ++g) {
      w += inst.groups[g][idx[g]].weight;
      v += inst.groups[g][idx[g]].value;
    }
    if (w <= inst.budget && v > best.value) {
      best = {idx, w, v};
      found = true;
    }
    std::size_t g = 0;
    while (g < groups && ++idx[g] == inst.groups[g].size()) idx[g++] = 0;
    if (g == groups) break;
  }
  if (!found) throw InfeasibleError("MCKP instance is infeasible");
  return best;
}

OracleResult oracle_for_phase(const EnvironmentModel& env, const PoolConfig& cfg, std::size_t phase, Pages chunk) {
  const auto ops = phase_average_ops(env, phase);
  const auto floors = effective_lower_bounds(cfg);
  auto value = [&](TenantId i, Pages p) { return ops[i] * true_hit_rate(env.curves[i], p); };
  return solve_allocation(value, floors, cfg.total_pages, chunk > 0 ? chunk : default_chunk(cfg));
}

OracleResult oracle_from_profiles(std::span<const ProfiledCurve> curves, const PoolConfig& cfg, Pages chunk) {
  const auto floors = effective_lower_bounds(cfg);
  auto value = [&](TenantId i, Pages p) { return curves[i].ops * interpolate(curves[i], p); };
  return solve_allocation(value, floors, cfg.total_pages, chunk > 0 ? chunk : default_chunk(cfg));
}

BruteForceResult brute_force_best(const EnvironmentModel& env, std::size_t phase, const PoolConfig& cfg) {
  const std::size_t n = cfg.tenants();
  if (n == 0 || n > 3) throw std::invalid_argument("brute_force_best supports 1 to 3 tenants");
  if (cfg.total_pages > 64) throw std::invalid_argument("brute_force_best supports budgets up to 64 pages");
  const auto ops = phase_average_ops(env, phase);
  const auto floors = effective_lower_bounds(cfg);
  BruteForceResult best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<Pages> p(n);
  // Enumerate the first n - 1 tenants; the last one takes the remainder.
  std::function<void(std::size_t, Pages)> rec = [&](std::size_t i, Pages left) {
    if (i + 1 == n) {
      if (left < floors[i]) return;
      p[i] = left;
      double v = 0.0;
      for (TenantId t = 0; t < n; ++t) v += ops[t] * true_hit_rate(env.curves[t], p[t]);
      if (v > best.value) best = {AllocationPlan{p}, v};
      return;
    }
    for (Pages x = floors[i]; x <= left; ++x) {
      p[i] = x;
      rec(i + 1, left - x);
    }
  };
  rec(0, cfg.total_pages);
  if (best.plan.size() == 0) throw InfeasibleError("no feasible plan");
  return best;
}

void write_profiles_csv(std::ostream& out, std::span<const ProfiledCurve> curves) {
  out << "tenant,pages,hit_rate,ops\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t k = 0; k < curves[i].grid.size(); ++k) {
      out << fmt::format("{},{},{:.17g},{:.17g}\n", i, curves[i].grid[k], curves[i].hr_at[k], curves[i].ops);
    }
  }
}

std::vector<ProfiledCurve> read_profiles_csv(std::istream& in) {
  std::vector<ProfiledCurve> curves;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line_no == 1) continue;
    std::stringstream ss(line);
    std::string a, b, c, d;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ',') || !std::getline(ss, d)) {
      throw ConfigError(fmt::format("profile CSV line {}: expected 4 fields: {}", line_no, line));
    }
    try {
      const auto t = static_cast<std::size_t>(std::stoull(a));
      if (t >= curves.size()) curves.resize(t + 1);
      curves[t].grid.push_back(std::stoll(b));
      curves[t].hr_at.push_back(std::stod(c));
      curves[t].ops = std::stod(d);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("profile CSV line {}: bad number: {}", line_no, line));
    }
  }
  return curves;
}

OraclePolicy::OraclePolicy(const Scenario& scenario, Pages chunk)
    : pool_(scenario.pool), schedule_(scenario.env.schedule) {
  for (std::size_t ph = 0; ph < schedule_.phases.size(); ++ph) {
    plans_.push_back(oracle_for_phase(scenario.env, pool_, ph, chunk).plan);
  }
}

AllocationPlan OraclePolicy::decide(std::span<const TenantObservation>, const AllocationPlan& current,
                                    std::int64_t cycle) {
  if (cycle + 1 >= schedule_.total_cycles()) return current;
  return plans_[schedule_.phase_of(cycle + 1)];
}

}  // namespace sam
