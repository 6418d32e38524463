#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "sam/domain.hpp"

using namespace sam;
using testutil::pool;

TEST_CASE("apportion_fixed_pool: floor shares plus remainder by priority") {
  CHECK(apportion_fixed_pool(pool(100, 0, {5, 1, 2}, {0, 0, 0})) == std::vector<Pages>{0, 0, 0});
  CHECK(apportion_fixed_pool(pool(200, 100, {1, 1, 1, 1}, {0, 0, 0, 0})) == std::vector<Pages>{25, 25, 25, 25});
  CHECK(apportion_fixed_pool(pool(50, 10, {3, 1}, {0, 0})) == std::vector<Pages>{8, 2});
  CHECK(apportion_fixed_pool(pool(50, 11, {3, 1}, {0, 0})) == std::vector<Pages>{9, 2});
}

TEST_CASE("apportion_fixed_pool: tie rule gives remainder to the lower id") {
  CHECK(apportion_fixed_pool(pool(10, 5, {1, 1}, {0, 0})) == std::vector<Pages>{3, 2});
  CHECK(apportion_fixed_pool(pool(10, 5, {1, 2, 2}, {0, 0, 0})) == std::vector<Pages>{1, 2, 2});
}

TEST_CASE("apportion_fixed_pool: all-zero priorities with a fixed pool is a config error") {
  CHECK_THROWS_AS(apportion_fixed_pool(pool(10, 4, {0, 0}, {0, 0})), ConfigError);
}

TEST_CASE("apportion_fixed_pool: sums exactly and is permutation-equivariant for distinct priorities") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> w(0.1, 10.0);
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 2 + rng() % 6;
    std::vector<double> prio(n);
    for (auto& p : prio) p = w(rng);
    const Pages fixed = static_cast<Pages>(rng() % 1000);
    const auto shares = apportion_fixed_pool(pool(fixed + 10, fixed, prio, std::vector<Pages>(n, 0)));
    CHECK(testutil::sum_of(shares) == doctest::Approx(static_cast<double>(fixed)));

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> permuted(n);
    for (std::size_t i = 0; i < n; ++i) permuted[i] = prio[perm[i]];
    const auto shares_p = apportion_fixed_pool(pool(fixed + 10, fixed, permuted, std::vector<Pages>(n, 0)));
    for (std::size_t i = 0; i < n; ++i) CHECK(shares_p[i] == shares[perm[i]]);
  }
}

TEST_CASE("validate_plan reports each violation") {
  const auto cfg = pool(100, 0, {1, 1}, {10, 20});
  CHECK(validate_plan({{50, 50}}, cfg).ok());

  const auto deficit = validate_plan({{50, 49}}, cfg);
  REQUIRE(deficit.violations.size() == 1);
  CHECK(deficit.violations[0].kind == PlanViolation::Kind::kSumMismatch);
  CHECK(deficit.violations[0].amount == 1);

  const auto bound = validate_plan({{81, 19}}, cfg);
  REQUIRE(bound.violations.size() == 1);
  CHECK(bound.violations[0].kind == PlanViolation::Kind::kBelowLowerBound);
  CHECK(bound.violations[0].tenant == 1);

  CHECK_FALSE(validate_plan({{101, -1}}, cfg).ok());
  CHECK_FALSE(validate_plan({{100}}, cfg).ok());
}

TEST_CASE("validate_plan counts the fixed share toward the floor") {
  const auto cfg = pool(100, 40, {1, 1}, {0, 0});
  CHECK(validate_plan({{20, 80}}, cfg).ok());
  CHECK_FALSE(validate_plan({{19, 81}}, cfg).ok());
}

TEST_CASE("project_to_feasible examples") {
  SUBCASE("feasible integral input is unchanged") {
    const auto cfg = pool(10, 0, {1, 1, 1}, {1, 2, 3});
    const std::vector<double> raw{2, 3, 5};
    CHECK(project_to_feasible(raw, cfg).pages == std::vector<Pages>{2, 3, 5});
  }
  SUBCASE("largest fractional part wins the remainder") {
    const auto cfg = pool(10, 0, {1, 1}, {0, 0});
    const std::vector<double> raw{7.6, 2.4};
    CHECK(project_to_feasible(raw, cfg).pages == std::vector<Pages>{8, 2});
  }
  SUBCASE("all raw values below bounds: slack goes to the largest raw value") {
    const auto cfg = pool(20, 0, {1, 1, 1}, {5, 5, 5});
    const std::vector<double> raw{1, 3, 2};
    CHECK(project_to_feasible(raw, cfg).pages == std::vector<Pages>{5, 10, 5});
  }
  SUBCASE("bounds above the budget are infeasible") {
    const auto cfg = pool(10, 0, {1, 1}, {6, 6});
    const std::vector<double> raw{1, 1};
    CHECK_THROWS_AS(project_to_feasible(raw, cfg), InfeasibleError);
  }
}

TEST_CASE("project_to_feasible: fuzz over 1e5 random inputs") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-50.0, 500.0);
  std::size_t failures = 0;
  for (int k = 0; k < 100000; ++k) {
    const std::size_t n = 1 + rng() % 8;
    std::vector<Pages> lower(n);
    std::vector<double> prio(n), raw(n);
    for (std::size_t i = 0; i < n; ++i) {
      lower[i] = static_cast<Pages>(rng() % 40);
      prio[i] = 1.0 + static_cast<double>(rng() % 4);
      raw[i] = u(rng);
    }
    const Pages total = static_cast<Pages>(testutil::sum_of(lower)) + static_cast<Pages>(rng() % 400) + 1;
    const Pages fixed = static_cast<Pages>(rng() % static_cast<std::uint64_t>(total / 2 + 1));
    auto cfg = pool(total, fixed, prio, lower);
    const auto floors = effective_lower_bounds(cfg);
    if (testutil::sum_of(floors) > static_cast<double>(total)) continue;
    const auto plan = project_to_feasible(raw, cfg);
    // Independent check of the constraints.
    Pages sum = 0;
    bool ok = plan.size() == n;
    for (std::size_t i = 0; ok && i < n; ++i) {
      sum += plan[i];
      ok = plan[i] >= floors[i];
    }
    if (!ok || sum != total) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("even_plan splits the elastic pool with remainder by tenant id") {
  const auto cfg = pool(100, 0, {1, 1, 1}, {0, 0, 0});
  CHECK(even_plan(cfg).pages == std::vector<Pages>{34, 33, 33});
  CHECK(l1_distance({{1, 2, 3}}, {{3, 2, 1}}) == 4);
}
