#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "sam/analysis.hpp"
#include "sam/oracle.hpp"
#include "sam/runner.hpp"

using namespace sam;

namespace {

RunTrace trace_of(const std::vector<std::vector<Pages>>& plans, const std::vector<double>& utility) {
  RunTrace t;
  t.scenario = "synthetic";
  t.policy = "test";
  t.tenants = plans.empty() ? 0 : plans.front().size();
  for (std::size_t k = 0; k < utility.size(); ++k) {
    CycleRecord r;
    r.cycle = static_cast<std::int64_t>(k);
    r.plan = plans[std::min(k, plans.size() - 1)];
    r.utility_true = utility[k];
    t.records.push_back(r);
  }
  return t;
}

WorkloadSchedule one_phase(std::int64_t len) {
  WorkloadSchedule s;
  s.base_ops = {1.0};
  s.phases = {{len, {1.0}}};
  return s;
}

}  // namespace

TEST_CASE("linear_fit on exact data") {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  const auto f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("regret is zero for the reference and linear for a constant gap") {
  const std::vector<double> ref(100, 10.0);
  const auto same = trace_of({{1}}, ref);
  for (double r : regret_series(same, ref)) CHECK(r == 0.0);
  const auto worse = trace_of({{1}}, std::vector<double>(100, 7.5));
  const auto reg = regret_series(worse, ref);
  for (std::size_t k = 0; k < reg.size(); ++k) CHECK(reg[k] == doctest::Approx(2.5 * static_cast<double>(k + 1)));
  CHECK(loglog_slope(reg).fit.slope == doctest::Approx(1.0));
}

TEST_CASE("static average on asymmetric tenants has linear regret") {
  Scenario sc;
  sc.name = "asym";
  sc.env = testutil::quiet_env({HitRateCurve::exp_saturating(0.9, 300.0), HitRateCurve::exp_saturating(0.9, 5.0)},
                               {100, 100}, 400);
  sc.pool = testutil::pool(400, 0, {1, 1}, {0, 0});
  sc.profiles = {{"a", 1, 0.8}, {"b", 1, 0.8}};
  const auto oracle = oracle_for_phase(sc.env, sc.pool, 0, 1).plan;
  const auto ref = plan_utility_series(sc.env, std::vector<AllocationPlan>{oracle}, 400);
  const auto trace = run_single(sc, {"b1", {}, ""}, 1);
  const auto reg = regret_series(trace, ref);
  const double gap = ref[0] - expected_utility(sc.env, even_plan(sc.pool), 0);
  CHECK(gap > 0.0);
  CHECK(reg.back() == doctest::Approx(gap * 400.0));
  CHECK(loglog_slope(reg).fit.slope == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("log-log slope of power laws") {
  std::vector<double> sq(2000), noisy(2000);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (std::size_t k = 0; k < sq.size(); ++k) {
    sq[k] = 3.0 * std::sqrt(static_cast<double>(k + 1));
    noisy[k] = sq[k] * (1.0 + 0.05 * n01(rng));
  }
  CHECK(loglog_slope(sq).fit.slope == doctest::Approx(0.5));
  const double s = loglog_slope(noisy).fit.slope;
  CHECK(s >= 0.45);
  CHECK(s <= 0.55);

  std::vector<double> with_zero(sq);
  with_zero[1500] = 0.0;
  const auto f = loglog_slope(with_zero);
  CHECK(f.window_shrunk);
  CHECK(f.first_index == 1501);
}

TEST_CASE("jitter of static and alternating plans") {
  const auto st = jitter_series(trace_of({{5, 5}}, std::vector<double>(50, 1.0)));
  for (double d : st.delta) CHECK(d == 0.0);
  CHECK(st.sigma == 0.0);

  std::vector<std::vector<Pages>> plans;
  for (int k = 0; k < 50; ++k) plans.push_back(k % 2 ? std::vector<Pages>{7, 3} : std::vector<Pages>{4, 6});
  const auto alt = jitter_series(trace_of(plans, std::vector<double>(50, 1.0)));
  for (std::size_t k = 1; k < alt.delta.size(); ++k) CHECK(alt.delta[k] == 6.0);
  CHECK(alt.cumulative.back() == 6.0 * 49);
  CHECK(alt.sigma == 0.0);
}

TEST_CASE("decay fit recognizes c/t and ignores a frozen tail") {
  JitterStats j;
  const std::size_t n = 3000;
  j.delta.assign(n, 0.0);
  j.cumulative.assign(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    j.delta[k] = k < 2000 ? 40.0 / static_cast<double>(k) : 0.0;
    j.cumulative[k] = j.cumulative[k - 1] + j.delta[k];
  }
  const auto fit = jitter_decay_fit(j, 50);
  CHECK(fit.fit_end == 2000);
  CHECK(fit.inverse_t.slope == doctest::Approx(40.0));
  CHECK(fit.inverse_t.r2 > 0.99);
  CHECK(fit.cumulative_log.slope == doctest::Approx(40.0).epsilon(0.01));
  CHECK(fit.cumulative_log.r2 > 0.99);
}

TEST_CASE("sigma_TPS: constant is zero, sine gives A / sqrt 2") {
  const auto sched = one_phase(4000);
  CHECK(stability_sigma_tps(trace_of({{1}}, std::vector<double>(4000, 5.0)), sched)[0] == 0.0);
  std::vector<double> u(4000);
  const double amp = 3.0;
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = 10.0 + amp * std::sin(2.0 * std::numbers::pi * k / 20.0);
  CHECK(stability_sigma_tps(trace_of({{1}}, u), sched, 1000)[0] == doctest::Approx(amp / std::sqrt(2.0)).epsilon(1e-3));
  CHECK(stddev(std::vector<double>{1, 3}) == doctest::Approx(1.0));
}

TEST_CASE("sigma_TPS: B12 is noisier than AURA on hotspot_shift") {
  const auto sc = make_scenario("hotspot_shift");
  const auto b12 = stability_sigma_tps(run_single(sc, {"b12", {}, ""}, 1), sc.env.schedule);
  const auto aura = stability_sigma_tps(run_single(sc, {"aura", {}, ""}, 1), sc.env.schedule);
  double sb = 0.0, sa = 0.0;
  for (std::size_t k = 0; k < b12.size(); ++k) {
    sb += b12[k];
    sa += aura[k];
  }
  CHECK(sb > sa);
}

TEST_CASE("adaptation lag") {
  std::vector<double> u(100, 5.0);
  for (std::size_t k = 30; k < 100; ++k) u[k] = k < 42 ? 5.0 : 10.0;
  const auto t = trace_of({{1}}, u);
  CHECK(adaptation_lag(t, 30, 10.0).cycles == 12);
  CHECK_FALSE(adaptation_lag(t, 30, 10.0).censored);
  CHECK(adaptation_lag(t, 50, 10.0).cycles == 0);
  const auto never = adaptation_lag(t, 30, 20.0);
  CHECK(never.censored);
  CHECK(never.cycles == 70);
  CHECK(adaptation_lag(t, 30, 20.0, 0.95, 60).cycles == 30);

  // The window must also be steady: 10 cycles at 10 after cycle 42.
  CHECK(sigma_adjusted_lag(t, 30, 10.0, 0.95, 10).cycles == 12);
  std::vector<double> jumpy(u);
  for (std::size_t k = 42; k < 60; k += 2) jumpy[k] = 5.0;
  CHECK(sigma_adjusted_lag(trace_of({{1}}, jumpy), 30, 10.0, 0.95, 10).cycles == 29);
}

TEST_CASE("adaptation lag of an oracle is zero, a static plan is censored") {
  const auto sc = make_scenario("hotspot_shift", {.tenants = {}, .cycles = {}, .noise = NoiseModel{0.0, 0.0, 1}});
  const auto b = sc.env.schedule.phase_start(2);
  const auto oracle = oracle_for_phase(sc.env, sc.pool, 2, 1);
  const double target = expected_utility(sc.env, oracle.plan, b);
  CHECK(adaptation_lag(run_single(sc, {"b14", {}, ""}, 1), b, target).cycles == 0);
  CHECK(adaptation_lag(run_single(sc, {"b1", {}, ""}, 1), b, target).censored);
}

TEST_CASE("amortized cost counts") {
  auto t = trace_of({{1}}, std::vector<double>(4, 1.0));
  for (std::size_t k = 0; k < 4; ++k) {
    t.records[k].stats = {k == 0, 2, k == 0 ? 10u : 2u, 3};
    t.records[k].decision_ns = static_cast<std::int64_t>(100 * (k + 1));
  }
  const auto c = amortized_cost(t);
  CHECK(c.scan_fraction == 0.25);
  CHECK(c.mean_touched == 4.0);
  CHECK(c.mean_duration_ns == 250.0);
  CHECK(c.mean_comparisons == 3.0);
  CHECK(c.touched_histogram.at(2) == 3);
  CHECK(amortized_cost(t, 1).scan_fraction == 0.0);
}

TEST_CASE("AAS disabled scans every cycle; a converged stationary run rarely scans") {
  const auto sc = make_scenario("stationary_concave", {.tenants = 20, .cycles = 1000, .noise = {}});
  CHECK(amortized_cost(run_single(sc, {"aura", {{"disable_aas", 1.0}}, ""}, 1)).scan_fraction == 1.0);
  CHECK(amortized_cost(run_single(sc, {"aura", {}, ""}, 1), 500).scan_fraction < 0.1);
}

TEST_CASE("trace CSV round trip and schema check") {
  const auto sc = make_scenario("archetypes", {.tenants = {}, .cycles = 30, .noise = {}});
  const auto t = run_single(sc, {"aura", {}, ""}, 2);
  std::stringstream ss;
  write_trace_csv(ss, t);
  const auto back = read_trace_csv(ss);
  CHECK(back.policy == t.policy);
  CHECK(back.seed == t.seed);
  REQUIRE(back.records.size() == t.records.size());
  for (std::size_t k = 0; k < t.records.size(); ++k) {
    CHECK(back.records[k].plan == t.records[k].plan);
    CHECK(back.records[k].utility_true == doctest::Approx(t.records[k].utility_true));
    CHECK(back.records[k].stats.touched == t.records[k].stats.touched);
  }
  std::stringstream bad("# sam-trace v0\ncycle\n");
  CHECK_THROWS_AS(read_trace_csv(bad), ConfigError);
  std::stringstream empty;
  CHECK_THROWS_AS(read_trace_csv(empty), ConfigError);
}

TEST_CASE("theory bound grows like sqrt T when delta is zero") {
  TheoryParams p;
  p.G = 2.0;
  p.D = 3.0;
  CHECK(p.regret_bound(50.0) == doctest::Approx(2.0 * 3.0 * 10.0));
}
