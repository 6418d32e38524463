#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "sam/signals.hpp"

using namespace sam;
using testutil::obs;

TEST_CASE("update_emas seeds with the first value then smooths") {
  SignalParams p;
  p.lambda_slow = 0.1;
  auto s = update_emas({}, obs(0.0, 0.0, 1), p);
  CHECK(s.ema_ops_slow == 0.0);
  s = update_emas(s, obs(10.0, 0.0, 1), p);
  CHECK(s.ema_ops_slow == doctest::Approx(1.0));

  p.lambda_slow = 1.0;
  auto t = update_emas({}, obs(3.0, 0.5, 1), p);
  t = update_emas(t, obs(7.0, 0.5, 1), p);
  CHECK(t.ema_ops_slow == 7.0);

  p.lambda_slow = 0.1;
  TenantSignalState c;
  for (int k = 0; k < 400; ++k) c = update_emas(c, obs(42.0, 0.3, 1), p);
  CHECK(c.ema_ops_slow == doctest::Approx(42.0));
  CHECK(c.ema_hr_slow == doctest::Approx(0.3));
}

TEST_CASE("EMAs stay within the range of their inputs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  SignalParams p;
  TenantSignalState s;
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k < 2000; ++k) {
    const double x = u(rng);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    s = update_emas(s, obs(x, 0.5, 1), p);
    CHECK(s.ema_ops_slow >= lo - 1e-9);
    CHECK(s.ema_ops_slow <= hi + 1e-9);
    CHECK(s.ema_ops_fast >= lo - 1e-9);
    CHECK(s.ema_ops_fast <= hi + 1e-9);
  }
}

TEST_CASE("raw_v is the finite-difference slope") {
  TenantSignalState s;
  s.initialized = true;
  s.last_pages = 100;
  s.last_hr = 0.5;
  CHECK(raw_v(s, obs(1, 0.7, 100)) == 0.0);
  CHECK(raw_v(s, obs(1, 0.6, 120)) == doctest::Approx(0.005));
  s.last_hr = 0.6;
  CHECK(raw_v(s, obs(1, 0.5, 110)) == doctest::Approx(-0.01));
}

TEST_CASE("smooth_v is fast up, slow down") {
  SignalParams p;
  TenantSignalState s;
  s = smooth_v(s, 0.01, p);
  CHECK(s.v_smoothed == doctest::Approx(0.004));
  TenantSignalState d;
  d.v_smoothed = 0.01;
  d = smooth_v(d, 0.0, p);
  CHECK(d.v_smoothed == doctest::Approx(0.009));
  TenantSignalState f;
  f.v_smoothed = 0.02;
  CHECK(smooth_v(f, 0.02, p).v_smoothed == doctest::Approx(0.02));

  // A symmetric impulse leaves a positive residue.
  TenantSignalState r;
  r = smooth_v(r, 1.0, p);
  r = smooth_v(r, -1.0, p);
  CHECK(r.v_smoothed > 0.0);
}

TEST_CASE("p90_normalize") {
  const std::vector<double> equal{2.0, 2.0, 2.0};
  for (double v : p90_normalize(equal, 1e-6)) CHECK(v == 1.0);
  const std::vector<double> negative{-1.0, 0.0, -3.0};
  for (double v : p90_normalize(negative, 1e-6)) CHECK(v == 0.0);
  const std::vector<double> ramp{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(p90(ramp) == doctest::Approx(9.1));
  const auto n = p90_normalize(ramp, 1e-6);
  CHECK(n[9] == 1.0);
  CHECK(n[4] == doctest::Approx(5.0 / 9.1));
  CHECK(n[4] == doctest::Approx(0.549).epsilon(1e-3));
}

TEST_CASE("saturation confidence: geometric decay on flat growth, recovery otherwise") {
  SignalParams p;
  TenantSignalState s;
  s.initialized = true;
  s.last_pages = 100;
  s.last_hr = 0.5;
  for (int k = 1; k <= 3; ++k) {
    s = update_saturation_confidence(s, obs(10, 0.5, 100 + 10 * k), p);
    s.last_pages = 100 + 10 * k;
  }
  CHECK(s.saturation_confidence == doctest::Approx(0.512));
  const auto r = update_saturation_confidence(s, obs(10, 0.6, s.last_pages), p);
  CHECK(r.saturation_confidence == doctest::Approx(0.512 + 0.1 * (1.0 - 0.512)));
  CHECK(r.v_influence() == doctest::Approx(r.v_smoothed * r.saturation_confidence));
}

TEST_CASE("saturation confidence stays in [0, 1] under fuzzing") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> hr(0.0, 1.0);
  SignalParams p;
  TenantSignalState s;
  for (int k = 0; k < 20000; ++k) {
    s = observe(s, obs(50.0, hr(rng), static_cast<Pages>(rng() % 50)), p);
    CHECK(s.saturation_confidence >= 0.0);
    CHECK(s.saturation_confidence <= 1.0);
  }
}

TEST_CASE("signal parameters must keep the asymmetry") {
  SignalParams p;
  p.v_up_rate = 0.1;
  p.v_down_rate = 0.2;
  CHECK_THROWS_AS(p.check(), ConfigError);
}
