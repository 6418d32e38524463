#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "sam/oracle.hpp"
#include "sam/runner.hpp"

using namespace sam;

namespace {

// Independent enumeration of every split of `budget` over the tenants.
double best_split(const std::vector<HitRateCurve>& curves, const std::vector<double>& ops,
                  const std::vector<Pages>& floors, Pages budget) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<Pages> p(curves.size());
  auto rec = [&](auto&& self, std::size_t i, Pages left) -> void {
    if (i + 1 == curves.size()) {
      if (left < floors[i]) return;
      p[i] = left;
      double v = 0.0;
      for (std::size_t t = 0; t < p.size(); ++t) v += ops[t] * true_hit_rate(curves[t], p[t]);
      best = std::max(best, v);
      return;
    }
    for (Pages x = floors[i]; x <= left; ++x) {
      p[i] = x;
      self(self, i + 1, left - x);
    }
  };
  rec(rec, 0, budget);
  return best;
}

}  // namespace

TEST_CASE("profiles of noiseless curves are exact") {
  auto env = testutil::quiet_env({HitRateCurve::exp_saturating(0.9, 50.0), HitRateCurve::polluter(0.1)}, {10, 50});
  const auto grid = oracle_grid(0, 200, 25);
  CHECK(grid.size() == 9);
  const auto prof = profile_phase(env, 0, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(prof[0].hr_at[k] == doctest::Approx(true_hit_rate(env.curves[0], grid[k])));
    CHECK(prof[1].hr_at[k] == doctest::Approx(0.1));
  }
  CHECK(prof[1].ops == doctest::Approx(50.0));
}

TEST_CASE("noisy profiles are non-decreasing") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto env = testutil::quiet_env({HitRateCurve::logistic(0.9, 20.0, 100.0)}, {10});
    env.noise = {0.05, 0.05, seed};
    const auto prof = profile_phase(env, 0, oracle_grid(0, 300, 10));
    CHECK(std::is_sorted(prof[0].hr_at.begin(), prof[0].hr_at.end()));
  }
}

TEST_CASE("isotonic regression pools adjacent violators") {
  CHECK(isotonic_non_decreasing(std::vector<double>{1, 3, 2, 4}) == std::vector<double>{1, 2.5, 2.5, 4});
  CHECK(isotonic_non_decreasing(std::vector<double>{3, 2, 1}) == std::vector<double>{2, 2, 2});
  const auto w = isotonic_non_decreasing(std::vector<double>{4, 1}, std::vector<double>{1, 3});
  CHECK(w[0] == doctest::Approx(1.75));
  CHECK(w[1] == doctest::Approx(1.75));
}

TEST_CASE("MCKP examples") {
  MckpInstance one{{{{0, 0.0}, {3, 5.0}, {5, 6.0}}}, 5};
  CHECK(solve_mckp(one).value == 6.0);
  CHECK(solve_mckp(one).choice == std::vector<std::size_t>{2});

  MckpInstance two{{{{0, 0}, {1, 4}, {2, 5}, {3, 6}}, {{0, 0}, {1, 3}, {2, 6}, {3, 7}}}, 3};
  // enumeration by hand: (1,2) -> 4+6 = 10 is the best split of 3
  CHECK(solve_mckp(two).value == 10.0);
  CHECK(brute_force_mckp(two).value == 10.0);

  MckpInstance heavy{{{{4, 1.0}}, {{4, 1.0}}}, 7};
  CHECK_THROWS_AS(solve_mckp(heavy), InfeasibleError);
}

TEST_CASE("MCKP dynamic program equals enumeration on random instances") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int k = 0; k < 300; ++k) {
    MckpInstance inst;
    inst.budget = static_cast<std::int64_t>(rng() % 12);
    const std::size_t groups = 1 + rng() % 4;
    for (std::size_t g = 0; g < groups; ++g) {
      std::vector<MckpItem> items{{0, u(rng)}};
      for (std::size_t j = rng() % 4; j > 0; --j) items.push_back({static_cast<std::int64_t>(rng() % 6), u(rng)});
      inst.groups.push_back(items);
    }
    const auto a = solve_mckp(inst);
    const auto b = brute_force_mckp(inst);
    CHECK(a.value == doctest::Approx(b.value));
    CHECK(a.weight <= inst.budget);
  }
}

TEST_CASE("oracle: single tenant takes the whole budget") {
  const auto env = testutil::quiet_env({HitRateCurve::exp_saturating(0.9, 30.0)}, {10});
  const auto cfg = testutil::pool(40, 0, {1}, {5});
  const auto r = oracle_for_phase(env, cfg, 0, 1);
  CHECK(r.plan.pages == std::vector<Pages>{40});
  CHECK(brute_force_best(env, 0, cfg).plan.pages == std::vector<Pages>{40});
}

TEST_CASE("oracle: budget equal to the floors has one feasible plan") {
  const auto env = testutil::quiet_env(
      {HitRateCurve::exp_saturating(0.9, 30.0), HitRateCurve::exp_saturating(0.5, 3.0)}, {10, 20});
  const auto cfg = testutil::pool(30, 0, {1, 1}, {12, 18});
  CHECK(oracle_for_phase(env, cfg, 0, 1).plan.pages == std::vector<Pages>{12, 18});
  CHECK(brute_force_best(env, 0, cfg).plan.pages == std::vector<Pages>{12, 18});
}

TEST_CASE("oracle: two tenants, budget 32, matches enumeration") {
  const std::vector<HitRateCurve> curves{HitRateCurve::exp_saturating(0.9, 10.0),
                                         HitRateCurve::logistic(0.95, 3.0, 16.0)};
  const std::vector<double> ops{30, 20};
  const auto env = testutil::quiet_env(curves, ops);
  const auto cfg = testutil::pool(32, 0, {1, 1}, {0, 0});
  const double truth = best_split(curves, ops, {0, 0}, 32);
  CHECK(oracle_for_phase(env, cfg, 0, 1).plan_value == doctest::Approx(truth));
  CHECK(brute_force_best(env, 0, cfg).value == doctest::Approx(truth));
}

TEST_CASE("oracle: identical concave tenants reach the even-split value") {
  const auto c = HitRateCurve::exp_saturating(0.9, 20.0);
  const auto env = testutil::quiet_env({c, c, c}, {10, 10, 10});
  const auto cfg = testutil::pool(60, 0, {1, 1, 1}, {0, 0, 0});
  CHECK(oracle_for_phase(env, cfg, 0, 1).plan_value == doctest::Approx(30.0 * true_hit_rate(c, Pages{20})));
}

TEST_CASE("oracle agrees with enumeration on random tiny instances") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1 + rng() % 3;
    std::vector<HitRateCurve> curves;
    std::vector<double> ops;
    std::vector<Pages> floors;
    for (std::size_t i = 0; i < n; ++i) {
      switch (rng() % 3) {
        case 0: curves.push_back(HitRateCurve::exp_saturating(u(rng), 1.0 + 30.0 * u(rng))); break;
        case 1: curves.push_back(HitRateCurve::logistic(u(rng), 1.0 + 5.0 * u(rng), 30.0 * u(rng))); break;
        default: curves.push_back(HitRateCurve::polluter(0.3 * u(rng)));
      }
      ops.push_back(100.0 * u(rng));
      floors.push_back(static_cast<Pages>(rng() % 5));
    }
    const Pages budget = 20 + static_cast<Pages>(rng() % 40);
    const auto env = testutil::quiet_env(curves, ops);
    const auto cfg = testutil::pool(budget, 0, std::vector<double>(n, 1.0), floors);
    const double truth = best_split(curves, ops, floors, budget);
    const auto r = oracle_for_phase(env, cfg, 0, 1);
    CHECK(r.plan_value == doctest::Approx(truth).epsilon(1e-9));
    CHECK(validate_plan(r.plan, cfg).ok());
  }
}

TEST_CASE("finer chunks never lose value") {
  const auto sc = make_scenario("hotspot_shift");
  for (std::size_t ph = 0; ph < sc.env.schedule.phases.size(); ++ph) {
    const auto coarse = oracle_for_phase(sc.env, sc.pool, ph, 64);
    const auto fine = oracle_for_phase(sc.env, sc.pool, ph, 32);
    CHECK(fine.grid_value >= coarse.grid_value - 1e-9);
    CHECK(fine.plan_value >= fine.grid_value - 1e-9);
  }
}

TEST_CASE("brute force rejects oversized instances") {
  const auto env = testutil::quiet_env(std::vector<HitRateCurve>(4, HitRateCurve::polluter(0.1)), {1, 1, 1, 1});
  CHECK_THROWS_AS(brute_force_best(env, 0, testutil::pool(40, 0, {1, 1, 1, 1}, {0, 0, 0, 0})), std::invalid_argument);
  const auto e2 = testutil::quiet_env({HitRateCurve::polluter(0.1)}, {1});
  CHECK_THROWS_AS(brute_force_best(e2, 0, testutil::pool(65, 0, {1}, {0})), std::invalid_argument);
}

TEST_CASE("profiles round-trip through CSV") {
  const auto env = testutil::quiet_env({HitRateCurve::exp_saturating(0.9, 50.0), HitRateCurve::quiescent()}, {10, 0});
  const auto prof = profile_phase(env, 0, oracle_grid(0, 100, 20));
  std::stringstream ss;
  write_profiles_csv(ss, prof);
  const auto back = read_profiles_csv(ss);
  REQUIRE(back.size() == prof.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].grid == prof[i].grid);
    CHECK(back[i].ops == doctest::Approx(prof[i].ops));
    for (std::size_t k = 0; k < back[i].hr_at.size(); ++k) CHECK(back[i].hr_at[k] == doctest::Approx(prof[i].hr_at[k]));
  }
  const auto a = oracle_from_profiles(prof, testutil::pool(100, 0, {1, 1}, {0, 0}), 20);
  const auto b = oracle_from_profiles(back, testutil::pool(100, 0, {1, 1}, {0, 0}), 20);
  CHECK(a.plan == b.plan);
}

TEST_CASE("B14 replays the per-phase oracle plan") {
  const auto sc = make_scenario("hotspot_shift", {.tenants = {}, .cycles = {}, .noise = NoiseModel{0.0, 0.0, 1}});
  const auto trace = run_single(sc, {"b14", {}, ""}, 1);
  for (std::size_t ph = 0; ph < sc.env.schedule.phases.size(); ++ph) {
    const auto want = oracle_for_phase(sc.env, sc.pool, ph, 1).plan;
    const auto mid = static_cast<std::size_t>(sc.env.schedule.phase_start(ph) + sc.env.schedule.phases[ph].duration / 2);
    CHECK(trace.records[mid].plan == want.pages);
  }
}
