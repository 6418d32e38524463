#include "sam/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace sam {

std::vector<double> RunTrace::utility_true() const {
  std::vector<double> u(records.size());
  for (std::size_t k = 0; k < records.size(); ++k) u[k] = records[k].utility_true;
  return u;
}

std::vector<double> RunTrace::utility_obs() const {
  std::vector<double> u(records.size());
  for (std::size_t k = 0; k < records.size(); ++k) u[k] = records[k].utility_obs;
  return u;
}

// ---------------------------------------------------------------------------
// Trace files

void write_trace_csv(std::ostream& out, const RunTrace& trace, bool timing) {
  out << "# " << kTraceSchema << '\n';
  out << "# scenario: " << trace.scenario << '\n';
  out << "# policy: " << trace.policy << '\n';
  out << "# seed: " << trace.seed << '\n';
  out << "# tenants: " << trace.tenants << '\n';
  if (!trace.scenario_json.empty()) out << "# scenario_json: " << trace.scenario_json << '\n';
  out << "cycle,utility_obs,utility_true,latency_ms";
  if (timing) out << ",decision_ns";
  out << ",global_scan,active_size,touched,comparisons,valid";
  for (std::size_t i = 0; i < trace.tenants; ++i) {
    out << fmt::format(",pages_{0},ops_{0},hr_{0},true_hr_{0},ops_exp_{0}", i);
  }
  out << '\n';
  for (const auto& r : trace.records) {
    out << fmt::format("{},{:.17g},{:.17g},{:.17g}", r.cycle, r.utility_obs, r.utility_true, r.latency_ms);
    if (timing) out << ',' << r.decision_ns;
    out << fmt::format(",{},{},{},{},{}", r.stats.global_scan ? 1 : 0, r.stats.active_size, r.stats.touched,
                       r.stats.comparisons, r.valid ? 1 : 0);
    for (std::size_t i = 0; i < trace.tenants; ++i) {
      out << fmt::format(",{},{:.17g},{:.17g},{:.17g},{:.17g}", r.plan[i], r.obs[i].ops, r.obs[i].hit_rate,
                         r.true_hr[i], r.expected_ops[i]);
    }
    out << '\n';
  }
}

RunTrace read_trace_csv(std::istream& in) {
  RunTrace t;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw ConfigError(fmt::format("trace line {}: {}", line_no, why));
  };
  if (!std::getline(in, line)) throw ConfigError("empty trace file");
  ++line_no;
  if (line != fmt::format("# {}", kTraceSchema)) {
    fail(fmt::format("unsupported trace schema '{}', expected '# {}'", line, kTraceSchema));
  }
  std::vector<std::string> columns;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.starts_with("# ")) {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) continue;
      const auto key = line.substr(2, colon - 2);
      const auto value = line.substr(colon + 2);
      if (key == "scenario") t.scenario = value;
      else if (key == "policy") t.policy = value;
      else if (key == "seed") t.seed = std::stoull(value);
      else if (key == "tenants") t.tenants = std::stoull(value);
      else if (key == "scenario_json") t.scenario_json = value;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) columns.push_back(cell);
    break;
  }
  if (columns.empty()) fail("missing column header");
  const bool timing = std::find(columns.begin(), columns.end(), "decision_ns") != columns.end();
  const std::size_t fixed = timing ? 10 : 9;
  if (columns.size() != fixed + 5 * t.tenants) fail("column count does not match the tenant count");

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != columns.size()) fail(fmt::format("expected {} fields, got {}", columns.size(), cells.size()));
    try {
      CycleRecord r;
      std::size_t c = 0;
      r.cycle = std::stoll(cells[c++]);
      r.utility_obs = std::stod(cells[c++]);
      r.utility_true = std::stod(cells[c++]);
      r.latency_ms = std::stod(cells[c++]);
      if (timing) r.decision_ns = std::stoll(cells[c++]);
      r.stats.global_scan = cells[c++] == "1";
      r.stats.active_size = std::stoull(cells[c++]);
      r.stats.touched = std::stoull(cells[c++]);
      r.stats.comparisons = std::stoull(cells[c++]);
      r.valid = cells[c++] == "1";
      for (std::size_t i = 0; i < t.tenants; ++i) {
        r.plan.push_back(std::stoll(cells[c++]));
        TenantObservation o;
        o.ops = std::stod(cells[c++]);
        o.hit_rate = std::stod(cells[c++]);
        o.hits = o.ops * o.hit_rate;
        o.misses = o.ops - o.hits;
        o.current_pages = r.plan.back();
        r.obs.push_back(o);
        r.true_hr.push_back(std::stod(cells[c++]));
        r.expected_ops.push_back(std::stod(cells[c++]));
      }
      if (!t.records.empty() && r.cycle <= t.records.back().cycle) fail("cycles must be strictly increasing");
      t.records.push_back(std::move(r));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      fail("malformed number");
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Fits

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  LinearFit f;
  f.n = std::min(x.size(), y.size());
  if (f.n < 2) return f;
  const double n = static_cast<double>(f.n);
  const double mx = std::accumulate(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(f.n), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(f.n), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < f.n; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx <= 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double sse = std::max(syy - f.slope * sxy, 0.0);
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  if (f.n > 2) f.slope_stderr = std::sqrt(sse / (n - 2.0) / sxx);
  return f;
}

namespace {

// y = c x with no intercept; r2 against the mean of y.
LinearFit origin_fit(std::span<const double> x, std::span<const double> y) {
  LinearFit f;
  f.n = x.size();
  if (f.n == 0) return f;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < f.n; ++k) {
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  if (sxx <= 0.0) return f;
  f.slope = sxy / sxx;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(f.n);
  double sse = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < f.n; ++k) {
    sse += (y[k] - f.slope * x[k]) * (y[k] - f.slope * x[k]);
    syy += (y[k] - my) * (y[k] - my);
  }
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : (sse == 0.0 ? 1.0 : 0.0);
  if (f.n > 1) f.slope_stderr = std::sqrt(sse / static_cast<double>(f.n - 1) / sxx);
  return f;
}

}  // namespace

std::vector<double> plan_utility_series(const EnvironmentModel& env, std::span<const AllocationPlan> plan_per_phase,
                                        std::int64_t cycles) {
  std::vector<double> u;
  u.reserve(static_cast<std::size_t>(std::max<std::int64_t>(cycles, 0)));
  for (std::int64_t c = 0; c < cycles; ++c) {
    u.push_back(expected_utility(env, plan_per_phase[env.schedule.phase_of(c)], c));
  }
  return u;
}

std::vector<double> regret_series(const RunTrace& trace, std::span<const double> reference_utility) {
  std::vector<double> reg(trace.records.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < reg.size(); ++k) {
    sum += reference_utility[k] - trace.records[k].utility_true;
    reg[k] = sum;
  }
  return reg;
}

SlopeFit loglog_slope(std::span<const double> series, double window) {
  SlopeFit out;
  const std::size_t n = series.size();
  if (n == 0) return out;
  window = std::clamp(window, 0.0, 1.0);
  std::size_t first = n - static_cast<std::size_t>(std::ceil(window * static_cast<double>(n)));
  for (std::size_t k = first; k < n; ++k) {
    if (!(series[k] > 0.0)) {
      first = k + 1;
      out.window_shrunk = true;
    }
  }
  out.first_index = first;
  std::vector<double> lx, ly;
  for (std::size_t k = first; k < n; ++k) {
    lx.push_back(std::log(static_cast<double>(k + 1)));
    ly.push_back(std::log(series[k]));
  }
  out.fit = linear_fit(lx, ly);
  return out;
}

double stddev(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return std::sqrt(var / n);
}

JitterStats jitter_series(const RunTrace& trace) {
  JitterStats j;
  const std::size_t n = trace.records.size();
  j.delta.assign(n, 0.0);
  j.cumulative.assign(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const auto& a = trace.records[k].plan;
    const auto& b = trace.records[k - 1].plan;
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += static_cast<double>(std::abs(a[i] - b[i]));
    j.delta[k] = d;
    j.cumulative[k] = j.cumulative[k - 1] + d;
  }
  if (n > 0) j.sigma = stddev(std::span<const double>(j.delta).subspan(n / 2));
  return j;
}

DecayFit jitter_decay_fit(const JitterStats& jitter, std::size_t warmup, std::size_t bins) {
  DecayFit out;
  // A frozen plan satisfies any decay bound; fit up to the last move.
  std::size_t n = jitter.delta.size();
  while (n > 0 && jitter.delta[n - 1] == 0.0) --n;
  out.fit_end = n;
  if (n <= warmup + 1 || bins == 0) return out;
  // Log-spaced bins over cycle numbers (warmup, n].
  std::vector<double> inv_t, mean_delta;
  const double lo = std::log(static_cast<double>(warmup + 1));
  const double hi = std::log(static_cast<double>(n));
  std::size_t start = warmup + 1;
  for (std::size_t b = 1; b <= bins && start < n; ++b) {
    const auto end = std::min<std::size_t>(
        n, std::max<std::size_t>(start + 1, static_cast<std::size_t>(std::ceil(
                                                std::exp(lo + (hi - lo) * static_cast<double>(b) / bins)))));
    double sum = 0.0;
    for (std::size_t k = start; k < end; ++k) {
      sum += jitter.delta[k];
    }
    const double cnt = static_cast<double>(end - start);
    // The bin mean of c / t is exactly c times the bin mean of 1 / t.
    double inv = 0.0;
    for (std::size_t k = start; k < end; ++k) inv += 1.0 / static_cast<double>(k);
    inv_t.push_back(inv / cnt);
    mean_delta.push_back(sum / cnt);
    start = end;
  }
  out.inverse_t = origin_fit(inv_t, mean_delta);

  std::vector<double> log_t, cum;
  for (std::size_t k = warmup + 1; k < n; ++k) {
    log_t.push_back(std::log(static_cast<double>(k)));
    cum.push_back(jitter.cumulative[k] - jitter.cumulative[warmup]);
  }
  out.cumulative_log = linear_fit(log_t, cum);
  return out;
}

std::vector<double> stability_sigma_tps(const RunTrace& trace, const WorkloadSchedule& schedule, std::size_t window) {
  std::vector<double> out;
  const auto u = trace.utility_true();
  window = std::max<std::size_t>(window, 2);
  for (std::size_t ph = 0; ph < schedule.phases.size(); ++ph) {
    const auto start = static_cast<std::size_t>(schedule.phase_start(ph));
    const auto len = static_cast<std::size_t>(schedule.phases[ph].duration);
    const std::size_t from = start + len / 2;
    const std::size_t to = std::min(start + len, u.size());
    if (to <= from || to - from < window) {
      out.push_back(to > from ? stddev(std::span<const double>(u).subspan(from, to - from)) : 0.0);
      continue;
    }
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t k = from; k + window <= to; ++k, ++count) {
      acc += stddev(std::span<const double>(u).subspan(k, window));
    }
    out.push_back(acc / static_cast<double>(count));
  }
  return out;
}

LagResult adaptation_lag(const RunTrace& trace, std::int64_t boundary, double target_utility, double threshold,
                         std::int64_t phase_end) {
  const auto end = phase_end < 0 ? static_cast<std::int64_t>(trace.records.size())
                                 : std::min<std::int64_t>(phase_end, static_cast<std::int64_t>(trace.records.size()));
  for (std::int64_t k = boundary; k < end; ++k) {
    if (trace.records[static_cast<std::size_t>(k)].utility_true >= threshold * target_utility) return {k - boundary, false};
  }
  return {std::max<std::int64_t>(end - boundary, 0), true};
}

LagResult sigma_adjusted_lag(const RunTrace& trace, std::int64_t boundary, double target_utility, double threshold,
                             std::size_t window, std::int64_t phase_end) {
  const auto end = phase_end < 0 ? static_cast<std::int64_t>(trace.records.size())
                                 : std::min<std::int64_t>(phase_end, static_cast<std::int64_t>(trace.records.size()));
  const auto u = trace.utility_true();
  const auto w = static_cast<std::int64_t>(std::max<std::size_t>(window, 1));
  for (std::int64_t k = boundary; k + w <= end; ++k) {
    const auto win = std::span<const double>(u).subspan(static_cast<std::size_t>(k), static_cast<std::size_t>(w));
    const double mean = std::accumulate(win.begin(), win.end(), 0.0) / static_cast<double>(w);
    if (mean - stddev(win) >= threshold * target_utility) return {k - boundary, false};
  }
  return {std::max<std::int64_t>(end - boundary, 0), true};
}

namespace {

double percentile95(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double rank = 0.95 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (rank - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

CostStats amortized_cost(const RunTrace& trace, std::size_t from, std::int64_t to) {
  CostStats c;
  const std::size_t end =
      to < 0 ? trace.records.size() : std::min<std::size_t>(static_cast<std::size_t>(to), trace.records.size());
  if (from >= end) return c;
  std::vector<double> dur, touched;
  double scans = 0.0, comparisons = 0.0;
  for (std::size_t k = from; k < end; ++k) {
    const auto& r = trace.records[k];
    dur.push_back(static_cast<double>(r.decision_ns));
    touched.push_back(static_cast<double>(r.stats.touched));
    scans += r.stats.global_scan ? 1.0 : 0.0;
    comparisons += static_cast<double>(r.stats.comparisons);
    ++c.touched_histogram[r.stats.touched];
  }
  const double n = static_cast<double>(end - from);
  c.mean_duration_ns = std::accumulate(dur.begin(), dur.end(), 0.0) / n;
  c.p95_duration_ns = percentile95(dur);
  c.scan_fraction = scans / n;
  c.mean_touched = std::accumulate(touched.begin(), touched.end(), 0.0) / n;
  c.p95_touched = percentile95(touched);
  c.mean_comparisons = comparisons / n;
  return c;
}

double TheoryParams::regret_bound(double T) const { return G * D * std::sqrt(2.0 * T) + delta * T; }

TheoryParams TheoryParams::estimate(const Scenario& scenario) {
  TheoryParams p;
  const auto& env = scenario.env;
  const auto floors = effective_lower_bounds(scenario.pool);
  const double spare =
      static_cast<double>(scenario.pool.total_pages - std::accumulate(floors.begin(), floors.end(), Pages{0}));
  // Two vertices of the shifted simplex differ in two coordinates.
  p.D = std::sqrt(2.0) * spare;
  double g2 = 0.0;
  for (TenantId i = 0; i < env.tenants(); ++i) {
    double max_ops = 0.0;
    for (std::int64_t c = 0; c < env.schedule.total_cycles(); ++c) max_ops = std::max(max_ops, env.schedule.expected_ops(i, c));
    // Steepest slope of the curve over the feasible range, sampled per page.
    double slope = 0.0;
    for (Pages x = floors[i]; x < scenario.pool.total_pages; ++x) {
      slope = std::max(slope, true_hit_rate(env.curves[i], x + 1) - true_hit_rate(env.curves[i], x));
    }
    const double g = max_ops * slope;
    g2 += g * g;
    p.L = std::max(p.L, g);
  }
  p.G = std::sqrt(g2);
  // Rounding moves at most one page per tenant.
  p.delta = p.L * static_cast<double>(env.tenants());
  return p;
}

}  // namespace sam
