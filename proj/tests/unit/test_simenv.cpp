#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sam/simenv.hpp"

using namespace sam;

TEST_CASE("true_hit_rate closed forms") {
  const auto c = HitRateCurve::exp_saturating(0.9, 100.0);
  CHECK(true_hit_rate(c, Pages{0}) == 0.0);
  CHECK(true_hit_rate(c, Pages{100000}) == doctest::Approx(0.9));
  CHECK(true_hit_rate(c, Pages{100}) == doctest::Approx(0.9 * (1.0 - std::exp(-1.0))).epsilon(1e-12));
  CHECK(true_hit_rate(c, Pages{100}) == doctest::Approx(0.5689).epsilon(1e-4));

  const auto l = HitRateCurve::logistic(0.8, 10.0, 50.0);
  CHECK(true_hit_rate(l, Pages{50}) == doctest::Approx(0.4));
  CHECK(true_hit_rate(l, Pages{70}) == doctest::Approx(0.8 / (1.0 + std::exp(-2.0))));
  CHECK(true_hit_rate(HitRateCurve::polluter(0.07), Pages{5000}) == 0.07);
  CHECK(true_hit_rate(HitRateCurve::quiescent(), Pages{5000}) == 0.0);
}

TEST_CASE("curves are monotone; exp_saturating is concave") {
  const std::vector<HitRateCurve> curves{HitRateCurve::exp_saturating(0.95, 37.0),
                                         HitRateCurve::logistic(0.9, 12.0, 80.0), HitRateCurve::polluter(0.1),
                                         HitRateCurve::quiescent()};
  for (const auto& c : curves) {
    for (Pages p = 0; p < 400; ++p) CHECK(true_hit_rate(c, p) <= true_hit_rate(c, p + 1));
  }
  const auto& e = curves[0];
  for (int a = 0; a <= 300; a += 7) {
    for (int b = a + 1; b <= 300; b += 11) {
      const double mid = true_hit_rate(e, 0.5 * (a + b));
      CHECK(mid >= 0.5 * (true_hit_rate(e, Pages{a}) + true_hit_rate(e, Pages{b})) - 1e-9);
    }
  }
  // The S-shape is convex below its midpoint.
  const auto& s = curves[1];
  CHECK(true_hit_rate(s, 30.0) < 0.5 * (true_hit_rate(s, 10.0) + true_hit_rate(s, 50.0)));
}

TEST_CASE("step: zero noise equals ground truth; quiescent tenants are silent") {
  auto env = testutil::quiet_env({HitRateCurve::exp_saturating(0.9, 50.0), HitRateCurve::quiescent()}, {120.0, 80.0});
  const AllocationPlan plan{{40, 60}};
  const auto obs = step(env, plan, 3);
  REQUIRE(obs);
  const double hr = 0.9 * (1.0 - std::exp(-40.0 / 50.0));
  CHECK((*obs)[0].ops == 120.0);
  CHECK((*obs)[0].hit_rate == doctest::Approx(hr));
  CHECK((*obs)[0].hits == doctest::Approx(120.0 * hr));
  CHECK((*obs)[0].misses == doctest::Approx(120.0 * (1.0 - hr)));
  CHECK((*obs)[0].current_pages == 40);
  CHECK((*obs)[1].ops == 0.0);
  CHECK((*obs)[1].hits == 0.0);
  CHECK((*obs)[1].misses == 0.0);
  CHECK_FALSE(step(env, plan, 10));
}

TEST_CASE("step is deterministic per (seed, cycle) and noise changes with the seed") {
  auto env = testutil::quiet_env({HitRateCurve::exp_saturating(0.9, 50.0)}, {100.0});
  env.noise = {0.05, 0.05, 9};
  const AllocationPlan plan{{30}};
  const auto a = step(env, plan, 4);
  const auto b = step(env, plan, 4);
  CHECK((*a)[0].ops == (*b)[0].ops);
  CHECK((*a)[0].hit_rate == (*b)[0].hit_rate);
  env.noise.seed = 10;
  CHECK((*step(env, plan, 4))[0].hit_rate != (*a)[0].hit_rate);
  for (std::int64_t t = 0; t < 10; ++t) {
    const auto o = step(env, plan, t);
    CHECK((*o)[0].hit_rate >= 0.0);
    CHECK((*o)[0].hit_rate <= 1.0);
  }
}

TEST_CASE("effective_throughput sums ops times hit rate") {
  const std::vector<TenantObservation> silent{testutil::obs(0, 0, 1), testutil::obs(0, 0, 1)};
  CHECK(effective_throughput(silent) == 0.0);
  const std::vector<TenantObservation> one{testutil::obs(100, 0.5, 1)};
  CHECK(effective_throughput(one) == doctest::Approx(50.0));

  // Three curves evaluated by hand.
  auto env = testutil::quiet_env({HitRateCurve::exp_saturating(0.8, 20.0), HitRateCurve::logistic(0.6, 5.0, 10.0),
                                  HitRateCurve::polluter(0.2)},
                                 {10.0, 20.0, 30.0});
  const AllocationPlan plan{{20, 10, 7}};
  const double expected = 10.0 * 0.8 * (1.0 - std::exp(-1.0)) + 20.0 * 0.3 + 30.0 * 0.2;
  const auto obs = step(env, plan, 0);
  CHECK(effective_throughput(*obs) == doctest::Approx(expected));
  CHECK(expected_utility(env, plan, 0) == doctest::Approx(expected));
  CHECK(effective_throughput(*obs, true_hit_rates(env, plan)) == doctest::Approx(expected));
}

TEST_CASE("schedule phases and bursts") {
  WorkloadSchedule s;
  s.base_ops = {10.0, 4.0};
  s.phases = {{5, {1.0, 1.0}}, {3, {2.0, 0.5}}};
  s.bursts = {std::nullopt, BurstPattern{5, -1, 1, 1, 10.0}};
  CHECK(s.total_cycles() == 8);
  CHECK(s.phase_of(4) == 0);
  CHECK(s.phase_of(5) == 1);
  CHECK(s.phase_start(1) == 5);
  CHECK(s.expected_ops(0, 6) == 20.0);
  CHECK(s.expected_ops(1, 5) == doctest::Approx(20.0));
  CHECK(s.expected_ops(1, 6) == doctest::Approx(2.0));
}

TEST_CASE("built-in scenarios") {
  const auto hot = make_scenario("hotspot_shift");
  CHECK(hot.env.schedule.phases.size() == 3);
  CHECK(hot.env.schedule.phases[0].duration == 60);
  CHECK(hot.env.schedule.phases[1].duration == 300);
  CHECK(hot.env.schedule.phases[2].duration == 300);
  CHECK(hot.env.schedule.phases[1].multiplier[0] == 30.0);
  CHECK(hot.env.schedule.phases[2].multiplier[1] == 30.0);
  CHECK(hot.pool.base_priority[0] > hot.pool.base_priority[1]);
  CHECK(hot.pool.base_priority[1] > hot.pool.base_priority[2]);

  const auto pol = make_scenario("pollution_attack");
  CHECK(pol.env.curves[1].kind == CurveKind::kPolluterFlat);
  CHECK(true_hit_rate(pol.env.curves[1], Pages{1}) == true_hit_rate(pol.env.curves[1], Pages{500}));

  auto stat = make_scenario("stationary_concave", {.tenants = 4, .cycles = 30, .noise = NoiseModel{0.0, 0.0, 1}});
  for (const auto& c : stat.env.curves) CHECK(c.kind == CurveKind::kExpSaturating);
  const auto plan = even_plan(stat.pool);
  const double u0 = expected_utility(stat.env, plan, 0);
  for (std::int64_t t = 1; t < 30; ++t) {
    CHECK(effective_throughput(*step(stat.env, plan, t)) == doctest::Approx(u0).epsilon(1e-12));
  }

  CHECK(make_scenario("scale_40").tenants() == 40);
  CHECK_THROWS_AS(make_scenario("nope"), ConfigError);
  CHECK_THROWS_AS(make_scenario("scale_x"), ConfigError);
}

TEST_CASE("scenario documents round-trip") {
  for (const auto& name : scenario_names()) {
    const auto s = make_scenario(name);
    const auto text = dump_scenario(s);
    const auto back = parse_scenario(text);
    CHECK(back.tenants() == s.tenants());
    CHECK(back.pool.total_pages == s.pool.total_pages);
    CHECK(back.env.schedule.total_cycles() == s.env.schedule.total_cycles());
    CHECK(dump_scenario(back) == text);
  }
  CHECK_THROWS_AS(parse_scenario("{\"name\": 3"), ConfigError);
}
