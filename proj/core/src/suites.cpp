#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "sam/aura.hpp"
#include "sam/oracle.hpp"
#include "sam/runner.hpp"

namespace sam {

namespace {

constexpr std::uint64_t kSeeds[] = {1, 2, 3};

double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct Window {
  std::size_t from = 0, to = 0;
};

// Final half of a phase.
Window steady_window(const WorkloadSchedule& s, std::size_t phase) {
  const auto start = static_cast<std::size_t>(s.phase_start(phase));
  const auto len = static_cast<std::size_t>(s.phases[phase].duration);
  return {start + len / 2, start + len};
}

double window_mean(std::span<const double> v, Window w) {
  w.to = std::min(w.to, v.size());
  return w.to > w.from ? mean_of(v.subspan(w.from, w.to - w.from)) : 0.0;
}

std::vector<AllocationPlan> oracle_plans(const Scenario& sc, Pages chunk) {
  std::vector<AllocationPlan> plans;
  for (std::size_t ph = 0; ph < sc.env.schedule.phases.size(); ++ph) {
    plans.push_back(oracle_for_phase(sc.env, sc.pool, ph, chunk).plan);
  }
  return plans;
}

void save_trace(const SuiteOptions& opt, const RunTrace& trace, const std::string& tag) {
  if (opt.out_dir.empty()) return;
  std::filesystem::create_directories(opt.out_dir);
  std::ofstream out(opt.out_dir / fmt::format("{}__{}__seed{}.csv", tag, trace.policy, trace.seed));
  write_trace_csv(out, trace);
}

std::string verdict(bool ok) { return ok ? "ok" : "FAIL"; }

// ---------------------------------------------------------------------------

CriterionResult criterion_regret(const SuiteOptions& opt) {
  CriterionResult c{1, "regret slope on stationary_concave in [0.40, 0.60], runtime < 60 s", true, "", {}};
  const auto sc = make_scenario("stationary_concave", {.tenants = 10, .cycles = 5000, .noise = {}});
  const auto ref = plan_utility_series(sc.env, oracle_plans(sc, 1), sc.env.schedule.total_cycles());
  std::vector<std::string> parts;
  for (const char* kind : {"sam_core", "aura"}) {
    for (auto seed : kSeeds) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto trace = run_single(sc, {kind, {}, ""}, seed);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      save_trace(opt, trace, "regret");
      const auto reg = regret_series(trace, ref);
      const auto fit = loglog_slope(reg, 0.5);
      const bool ok = fit.fit.slope >= 0.40 && fit.fit.slope <= 0.60 && secs < 60.0;
      c.passed = c.passed && ok;
      c.metrics[fmt::format("slope_{}_s{}", kind, seed)] = fit.fit.slope;
      c.metrics[fmt::format("final_regret_{}_s{}", kind, seed)] = reg.empty() ? 0.0 : reg.back();
      c.metrics[fmt::format("runtime_s_{}_s{}", kind, seed)] = secs;
      parts.push_back(fmt::format("{} seed {}: slope {:.3f}±{:.3f} ({:.2f}s) {}", kind, seed, fit.fit.slope,
                                  fit.fit.slope_stderr, secs, verdict(ok)));
    }
  }
  c.detail = fmt::format("{}", fmt::join(parts, "; "));
  return c;
}

CriterionResult criterion_gap(const SuiteOptions& opt) {
  CriterionResult c{2, "hotspot_shift steady utility >= 0.90 x oracle per phase; AURA >= SAM-Core", true, "", {}};
  const auto sc = make_scenario("hotspot_shift");
  const auto& sched = sc.env.schedule;
  const auto ref = plan_utility_series(sc.env, oracle_plans(sc, 1), sched.total_cycles());
  double aura_total = 0.0, core_total = 0.0, worst = std::numeric_limits<double>::infinity();
  std::vector<std::string> parts;
  for (auto seed : kSeeds) {
    for (const char* kind : {"aura", "sam_core"}) {
      const auto trace = run_single(sc, {kind, {}, ""}, seed);
      save_trace(opt, trace, "gap");
      const auto u = trace.utility_true();
      std::vector<double> ratios;
      for (std::size_t ph = 0; ph < sched.phases.size(); ++ph) {
        const auto w = steady_window(sched, ph);
        ratios.push_back(window_mean(u, w) / window_mean(ref, w));
        c.metrics[fmt::format("ratio_{}_s{}_phase{}", kind, seed, ph)] = ratios.back();
      }
      const double avg = mean_of(ratios);
      if (std::string(kind) == "aura") {
        aura_total += avg;
        worst = std::min(worst, *std::min_element(ratios.begin(), ratios.end()));
      } else {
        core_total += avg;
      }
      parts.push_back(fmt::format("{} s{} ratios [{:.3f}]", kind, seed, fmt::join(ratios, ", ")));
    }
  }
  const bool floor_ok = worst >= 0.90;
  const bool order_ok = aura_total >= core_total;
  c.passed = floor_ok && order_ok;
  c.metrics["aura_worst_ratio"] = worst;
  c.metrics["aura_mean_ratio"] = aura_total / std::size(kSeeds);
  c.metrics["core_mean_ratio"] = core_total / std::size(kSeeds);
  c.detail = fmt::format("worst AURA ratio {:.3f} {}; mean AURA {:.3f} vs SAM-Core {:.3f} {}; {}", worst,
                         verdict(floor_ok), aura_total / std::size(kSeeds), core_total / std::size(kSeeds),
                         verdict(order_ok), fmt::join(parts, "; "));
  return c;
}

CriterionResult criterion_jitter(const SuiteOptions& opt) {
  CriterionResult c{3, "jitter decays as c/t (R2 >= 0.8), cumulative ~ log T (R2 >= 0.9), sigma ratio <= 0.6", true,
                    "", {}};
  const auto sc = make_scenario("stationary_concave");
  constexpr std::size_t kWarmup = 50;
  std::vector<std::string> parts;
  for (auto seed : kSeeds) {
    const auto full = run_single(sc, {"aura", {}, ""}, seed);
    const auto damped_off = run_single(sc, {"aura", {{"disable_momentum", 1.0}, {"gate_frac", 0.0}}, "aura_nomomentum"}, seed);
    save_trace(opt, full, "jitter");
    save_trace(opt, damped_off, "jitter");
    const auto j = jitter_series(full);
    const auto j0 = jitter_series(damped_off);
    const auto fit = jitter_decay_fit(j, kWarmup);
    const double ratio = j0.sigma > 0.0 ? j.sigma / j0.sigma : (j.sigma == 0.0 ? 0.0 : INFINITY);
    const bool ok = fit.inverse_t.r2 >= 0.8 && fit.cumulative_log.r2 >= 0.9 && ratio <= 0.6;
    c.passed = c.passed && ok;
    c.metrics[fmt::format("r2_inverse_t_s{}", seed)] = fit.inverse_t.r2;
    c.metrics[fmt::format("r2_cumulative_log_s{}", seed)] = fit.cumulative_log.r2;
    c.metrics[fmt::format("sigma_ratio_s{}", seed)] = ratio;
    parts.push_back(fmt::format("seed {}: c/t R2 {:.3f}, log-T R2 {:.3f}, sigma {:.2f}/{:.2f} = {:.3f} {}", seed,
                                fit.inverse_t.r2, fit.cumulative_log.r2, j.sigma, j0.sigma, ratio, verdict(ok)));
  }
  c.detail = fmt::format("{}", fmt::join(parts, "; "));
  return c;
}

CriterionResult criterion_robustness(const SuiteOptions& opt) {
  CriterionResult c{4, "pollution_attack: VIP:attacker elastic >= 1 (AURA), < 1 (B7); VIP HR drop <= 2 pp", true, "",
                    {}};
  const auto sc = make_scenario("pollution_attack");
  const auto& sched = sc.env.schedule;
  const auto fixed = apportion_fixed_pool(sc.pool);
  const auto attack = steady_window(sched, 1);
  const auto baseline = steady_window(sched, 0);
  std::vector<std::string> parts;
  for (const char* kind : {"aura", "b7"}) {
    std::vector<double> ratios;
    for (auto seed : kSeeds) {
      const auto trace = run_single(sc, {kind, {}, ""}, seed);
      save_trace(opt, trace, "robustness");
      double vip = 0.0, att = 0.0;
      for (std::size_t k = attack.from; k < attack.to; ++k) {
        vip += static_cast<double>(trace.records[k].plan[0] - fixed[0]);
        att += static_cast<double>(trace.records[k].plan[1] - fixed[1]);
      }
      const double ratio = att > 0.0 ? vip / att : INFINITY;
      ratios.push_back(ratio);
      c.metrics[fmt::format("vip_attacker_ratio_{}_s{}", kind, seed)] = ratio;

      if (std::string(kind) == "aura") {
        double base_hr = 0.0, burst_hr = 0.0;
        std::size_t bursts = 0;
        for (std::size_t k = baseline.from; k < baseline.to; ++k) base_hr += trace.records[k].true_hr[0];
        base_hr /= static_cast<double>(baseline.to - baseline.from);
        const auto attack_start = static_cast<std::size_t>(sched.phase_start(1));
        for (std::size_t k = attack_start; k < trace.records.size(); ++k) {
          if (sched.bursts[1]->active(static_cast<std::int64_t>(k))) {
            burst_hr += trace.records[k].true_hr[0];
            ++bursts;
          }
        }
        burst_hr /= static_cast<double>(std::max<std::size_t>(bursts, 1));
        const double drop = base_hr - burst_hr;
        const bool ok = drop <= 0.02;
        c.passed = c.passed && ok;
        c.metrics[fmt::format("vip_hr_drop_s{}", seed)] = drop;
        parts.push_back(fmt::format("AURA s{} VIP HR drop {:.4f} {}", seed, drop, verdict(ok)));
      }
    }
    const bool ok = std::string(kind) == "aura"
                        ? std::all_of(ratios.begin(), ratios.end(), [](double r) { return r >= 1.0; })
                        : std::all_of(ratios.begin(), ratios.end(), [](double r) { return r < 1.0; });
    c.passed = c.passed && ok;
    parts.push_back(fmt::format("{} VIP:attacker elastic [{:.3f}] {}", kind, fmt::join(ratios, ", "), verdict(ok)));
  }
  c.detail = fmt::format("{}", fmt::join(parts, "; "));
  return c;
}

CriterionResult criterion_adaptation(const SuiteOptions& opt) {
  CriterionResult c{5, "hotspot_shift phase 3: AURA lag < B8 lag and < B12 sigma-lag; >= 50% elastic moved in 50 cycles",
                    true, "", {}};
  const auto sc = make_scenario("hotspot_shift");
  const auto& sched = sc.env.schedule;
  const std::size_t phase = 2;
  const std::int64_t boundary = sched.phase_start(phase);
  const std::int64_t end = boundary + sched.phases[phase].duration;
  const double target = expected_utility(sc.env, oracle_for_phase(sc.env, sc.pool, phase, 1).plan, boundary);
  const Pages elastic = sc.pool.elastic_pages();

  double aura_lag = 0.0, b8_lag = 0.0, b12_lag = 0.0;
  bool moved_ok = true;
  std::vector<std::string> parts;
  for (auto seed : kSeeds) {
    const auto aura = run_single(sc, {"aura", {}, ""}, seed);
    const auto b8 = run_single(sc, {"b8", {}, ""}, seed);
    const auto b12 = run_single(sc, {"b12", {}, ""}, seed);
    for (const auto* t : {&aura, &b8, &b12}) save_trace(opt, *t, "adaptation");
    const auto la = adaptation_lag(aura, boundary, target, 0.95, end);
    const auto l8 = adaptation_lag(b8, boundary, target, 0.95, end);
    const auto l12 = sigma_adjusted_lag(b12, boundary, target, 0.95, 10, end);
    aura_lag += static_cast<double>(la.cycles);
    b8_lag += static_cast<double>(l8.cycles);
    b12_lag += static_cast<double>(l12.cycles);
    const auto b = static_cast<std::size_t>(boundary);
    const Pages moved = aura.records[b + 50].plan[1] - aura.records[b].plan[1];
    const bool ok = static_cast<double>(moved) >= 0.5 * static_cast<double>(elastic);
    moved_ok = moved_ok && ok;
    c.metrics[fmt::format("lag_aura_s{}", seed)] = static_cast<double>(la.cycles);
    c.metrics[fmt::format("lag_b8_s{}", seed)] = static_cast<double>(l8.cycles);
    c.metrics[fmt::format("sigma_lag_b12_s{}", seed)] = static_cast<double>(l12.cycles);
    c.metrics[fmt::format("moved_frac_s{}", seed)] = static_cast<double>(moved) / static_cast<double>(elastic);
    parts.push_back(fmt::format("s{}: lag AURA {}{} B8 {}{} B12(sigma) {}{}; moved {:.2f} of elastic {}", seed,
                                la.cycles, la.censored ? "+" : "", l8.cycles, l8.censored ? "+" : "", l12.cycles,
                                l12.censored ? "+" : "",
                                static_cast<double>(moved) / static_cast<double>(elastic), verdict(ok)));
  }
  const double n = std::size(kSeeds);
  const bool lag_ok = aura_lag < b8_lag && aura_lag < b12_lag;
  c.passed = lag_ok && moved_ok;
  c.metrics["mean_lag_aura"] = aura_lag / n;
  c.metrics["mean_lag_b8"] = b8_lag / n;
  c.metrics["mean_sigma_lag_b12"] = b12_lag / n;
  c.detail = fmt::format("mean lag AURA {:.1f} vs B8 {:.1f} vs B12 {:.1f} {}; {}", aura_lag / n, b8_lag / n,
                         b12_lag / n, verdict(lag_ok), fmt::join(parts, "; "));
  return c;
}

CriterionResult criterion_scalability(const SuiteOptions& opt) {
  CriterionResult c{6, "scale_K: touched grows < 2x from K=20 to 120, scan fraction <= 0.15, fast path >= 85%", true,
                    "", {}};
  std::map<std::size_t, CostStats> cost;
  std::vector<std::string> parts;
  double fast_ns = 0.0, scan_ns = 0.0;
  for (std::size_t k : {20u, 60u, 120u}) {
    const auto sc = make_scenario(fmt::format("scale_{}", k));
    const auto trace = run_single(sc, {"aura", {{"k_max", 8}}, ""}, 1);
    save_trace(opt, trace, "scalability");
    const std::size_t from = trace.records.size() / 2;
    cost[k] = amortized_cost(trace, from);
    c.metrics[fmt::format("mean_touched_K{}", k)] = cost[k].mean_touched;
    c.metrics[fmt::format("scan_fraction_K{}", k)] = cost[k].scan_fraction;
    c.metrics[fmt::format("mean_decision_us_K{}", k)] = cost[k].mean_duration_ns / 1000.0;
    const bool ok = cost[k].scan_fraction <= 0.15;
    c.passed = c.passed && ok;
    parts.push_back(fmt::format("K={}: touched {:.2f}, scans {:.3f} {}, {:.1f} us/decision", k, cost[k].mean_touched,
                                cost[k].scan_fraction, verdict(ok), cost[k].mean_duration_ns / 1000.0));
    if (k == 120) {
      std::vector<double> fast, scan;
      for (std::size_t r = from; r < trace.records.size(); ++r) {
        (trace.records[r].stats.global_scan ? scan : fast).push_back(static_cast<double>(trace.records[r].decision_ns));
      }
      fast_ns = mean_of(fast);
      scan_ns = mean_of(scan);
    }
  }
  const double growth = cost[120].mean_touched / std::max(cost[20].mean_touched, 1e-9);
  const double fast_frac = 1.0 - cost[120].scan_fraction;
  const bool growth_ok = growth < 2.0;
  const bool fast_ok = fast_frac >= 0.85;
  c.passed = c.passed && growth_ok && fast_ok;
  c.metrics["touched_growth_20_to_120"] = growth;
  c.metrics["fast_path_fraction_K120"] = fast_frac;
  c.metrics["fast_path_mean_us_K120"] = fast_ns / 1000.0;
  c.metrics["scan_mean_us_K120"] = scan_ns / 1000.0;
  c.detail = fmt::format("touched growth {:.2f}x {}; fast path {:.3f} {} (mean {:.1f} us vs scan {:.1f} us); {}",
                         growth, verdict(growth_ok), fast_frac, verdict(fast_ok), fast_ns / 1000.0, scan_ns / 1000.0,
                         fmt::join(parts, "; "));
  return c;
}

Scenario tiny_scenario(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> nt(1, 3);
  const int n = nt(rng);
  Scenario s;
  s.name = "tiny";
  for (int i = 0; i < n; ++i) {
    const double pick = u(rng);
    if (pick < 0.5) {
      s.env.curves.push_back(HitRateCurve::exp_saturating(0.2 + 0.8 * u(rng), 1.0 + 30.0 * u(rng)));
    } else if (pick < 0.8) {
      s.env.curves.push_back(HitRateCurve::logistic(0.2 + 0.8 * u(rng), 0.5 + 5.0 * u(rng), 32.0 * u(rng)));
    } else {
      s.env.curves.push_back(HitRateCurve::polluter(0.3 * u(rng)));
    }
    s.env.schedule.base_ops.push_back(1.0 + 100.0 * u(rng));
    s.pool.base_priority.push_back(1.0);
  }
  s.env.schedule.phases = {{1, std::vector<double>(static_cast<std::size_t>(n), 1.0)}};
  s.env.noise = NoiseModel{0.0, 0.0, 1};
  s.pool.total_pages = 1 + static_cast<Pages>(u(rng) * 32.0);
  for (int i = 0; i < n; ++i) {
    s.pool.lower_bound.push_back(static_cast<Pages>(u(rng) * static_cast<double>(s.pool.total_pages) / n));
  }
  s.pool.fixed_pages = 0;
  s.profiles.resize(static_cast<std::size_t>(n));
  s.check();
  return s;
}

CriterionResult criterion_oracle(const SuiteOptions&) {
  CriterionResult c{7, "solve_mckp == brute force on 200 tiny instances; chunk refinement monotone on 50", true, "", {}};
  std::mt19937_64 rng(7);
  std::size_t mismatches = 0, generic_mismatches = 0;
  for (int k = 0; k < 200; ++k) {
    const auto s = tiny_scenario(rng);
    const auto dp = oracle_for_phase(s.env, s.pool, 0, 1);
    const auto bf = brute_force_best(s.env, 0, s.pool);
    if (dp.plan_value != bf.value || dp.grid_value != bf.value) ++mismatches;

    // Arbitrary (non-monotone) item tables against the enumeration oracle.
    std::uniform_int_distribution<int> groups(1, 3), items(1, 6), weight(0, 12);
    std::uniform_real_distribution<double> value(-5.0, 50.0);
    MckpInstance inst;
    inst.budget = 1 + static_cast<std::int64_t>(rng() % 32);
    const int g = groups(rng);
    for (int i = 0; i < g; ++i) {
      std::vector<MckpItem> row{{0, value(rng)}};
      const int m = items(rng);
      for (int j = 1; j < m; ++j) row.push_back({weight(rng), value(rng)});
      inst.groups.push_back(std::move(row));
    }
    if (solve_mckp(inst).value != brute_force_mckp(inst).value) ++generic_mismatches;
  }
  std::size_t refinement_violations = 0;
  std::uniform_int_distribution<int> chunk_exp(1, 4);
  for (int k = 0; k < 50; ++k) {
    auto s = random_scenario(rng, 6, 10);
    const Pages coarse = Pages{1} << chunk_exp(rng);
    const auto a = oracle_for_phase(s.env, s.pool, 0, coarse);
    const auto b = oracle_for_phase(s.env, s.pool, 0, coarse / 2);
    if (b.grid_value < a.grid_value) ++refinement_violations;
  }
  c.passed = mismatches == 0 && generic_mismatches == 0 && refinement_violations == 0;
  c.metrics["plan_mismatches"] = static_cast<double>(mismatches);
  c.metrics["generic_mismatches"] = static_cast<double>(generic_mismatches);
  c.metrics["refinement_violations"] = static_cast<double>(refinement_violations);
  c.detail = fmt::format("{} of 200 allocation instances differ, {} of 200 generic MCKP instances differ, {} of 50 "
                         "refinements decrease",
                         mismatches, generic_mismatches, refinement_violations);
  return c;
}

CriterionResult criterion_invariants(const SuiteOptions&) {
  CriterionResult c{8, "1e5 fuzzed decision cycles yield only feasible plans; B5 breaks a lower bound", true, "", {}};
  std::vector<std::string> kinds;
  for (const auto& k : policy_kinds()) {
    if (k != "b5") kinds.push_back(k);
  }
  constexpr std::int64_t kTotal = 100000;
  constexpr std::int64_t kPerScenario = 400;
  const std::int64_t per_policy = (kTotal + static_cast<std::int64_t>(kinds.size()) - 1) / static_cast<std::int64_t>(kinds.size());
  std::mt19937_64 rng(11);
  std::int64_t cycles = 0, invalid = 0;
  std::vector<std::string> offenders;
  for (const auto& kind : kinds) {
    for (std::int64_t done = 0; done < per_policy; done += kPerScenario) {
      const auto sc = random_scenario(rng, 12, std::min(kPerScenario, per_policy - done));
      const auto trace = run_single(sc, {kind, {}, ""}, rng());
      for (const auto& r : trace.records) {
        ++cycles;
        if (!r.valid) {
          ++invalid;
          if (offenders.size() < 5) offenders.push_back(fmt::format("{}@{}", kind, r.cycle));
        }
      }
    }
  }
  std::size_t b5_violations = 0;
  for (const char* name : {"pollution_attack", "hotspot_shift"}) {
    const auto sc = make_scenario(name);
    const auto trace = run_single(sc, {"b5", {}, ""}, 1);
    for (const auto& r : trace.records) b5_violations += r.valid ? 0 : 1;
  }
  const bool fuzz_ok = invalid == 0 && cycles >= kTotal;
  const bool b5_ok = b5_violations > 0;
  c.passed = fuzz_ok && b5_ok;
  c.metrics["fuzz_cycles"] = static_cast<double>(cycles);
  c.metrics["invalid_plans"] = static_cast<double>(invalid);
  c.metrics["b5_invalid_plans"] = static_cast<double>(b5_violations);
  c.detail = fmt::format("{} cycles over {} policies, {} invalid {}{}; B5 infeasible plans {} {}", cycles, kinds.size(),
                         invalid, verdict(fuzz_ok),
                         offenders.empty() ? "" : fmt::format(" (first: {})", fmt::join(offenders, ", ")),
                         b5_violations, verdict(b5_ok));
  return c;
}

CriterionResult criterion_archetypes(const SuiteOptions& opt) {
  CriterionResult c{9, "archetypes: |V_saturated| < 0.05, score_polluter < 0.05, score_quiescent = 0, polluter at floor",
                    true, "", {}};
  const auto sc = make_scenario("archetypes");
  const std::size_t total = static_cast<std::size_t>(sc.env.schedule.total_cycles());
  std::vector<double> v_sat, s_pol;
  bool quiescent_zero = true;
  const auto trace = run_single(sc, {"aura", {}, ""}, 1, std::nullopt, [&](const Policy& p, std::int64_t t) {
    if (static_cast<std::size_t>(t) < total / 2) return;
    const auto& st = dynamic_cast<const AuraPolicy&>(p).state();
    v_sat.push_back(std::abs(st.last_v[0]));
    s_pol.push_back(st.last_score[2]);
    quiescent_zero = quiescent_zero && st.last_score[3] == 0.0;
  });
  save_trace(opt, trace, "archetypes");
  const Pages floor = effective_lower_bounds(sc.pool)[2];
  const Pages final_pages = trace.records.back().plan[2];
  const double v = mean_of(v_sat), s = mean_of(s_pol);
  const bool ok_v = v < 0.05, ok_s = s < 0.05, ok_floor = final_pages == floor;
  c.passed = ok_v && ok_s && quiescent_zero && ok_floor;
  c.metrics["saturated_abs_v"] = v;
  c.metrics["polluter_score"] = s;
  c.metrics["quiescent_score_zero"] = quiescent_zero ? 1.0 : 0.0;
  c.metrics["polluter_pages"] = static_cast<double>(final_pages);
  c.metrics["polluter_floor"] = static_cast<double>(floor);
  c.detail = fmt::format("|V_sat| {:.4f} {}; polluter score {:.4f} {}; quiescent zero {}; polluter pages {} vs floor {} {}",
                         v, verdict(ok_v), s, verdict(ok_s), verdict(quiescent_zero), final_pages, floor,
                         verdict(ok_floor));
  return c;
}

using SuiteFn = CriterionResult (*)(const SuiteOptions&);

const std::vector<std::pair<std::string, SuiteFn>>& suites() {
  static const std::vector<std::pair<std::string, SuiteFn>> table{
      {"regret", criterion_regret},         {"gap", criterion_gap},
      {"stability", criterion_jitter},      {"robustness", criterion_robustness},
      {"adaptation", criterion_adaptation}, {"scalability", criterion_scalability},
      {"oracle", criterion_oracle},         {"invariants", criterion_invariants},
      {"archetypes", criterion_archetypes},
  };
  return table;
}

}  // namespace

std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : suites()) names.push_back(name);
  names.emplace_back("all");
  return names;
}

SuiteReport run_suite(std::string_view name, const SuiteOptions& options) {
  SuiteReport report;
  report.suite = std::string(name);
  bool found = false;
  for (const auto& [suite, fn] : suites()) {
    if (name == "all" || name == suite) {
      report.criteria.push_back(fn(options));
      found = true;
    }
  }
  if (!found) throw ConfigError(fmt::format("unknown suite '{}'", name));
  return report;
}

}  // namespace sam
