#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "sam/domain.hpp"
#include "sam/simenv.hpp"

namespace testutil {

inline sam::PoolConfig pool(sam::Pages total, sam::Pages fixed, std::vector<double> prio,
                            std::vector<sam::Pages> lower) {
  sam::PoolConfig cfg;
  cfg.total_pages = total;
  cfg.fixed_pages = fixed;
  cfg.base_priority = std::move(prio);
  cfg.lower_bound = std::move(lower);
  return cfg;
}

inline sam::TenantObservation obs(double ops, double hr, sam::Pages pages) {
  return {ops, ops * hr, ops * (1.0 - hr), hr, pages};
}

// Single-phase, noise-free environment.
inline sam::EnvironmentModel quiet_env(std::vector<sam::HitRateCurve> curves, std::vector<double> ops,
                                       std::int64_t cycles = 10) {
  sam::EnvironmentModel env;
  env.curves = std::move(curves);
  env.schedule.base_ops = std::move(ops);
  env.schedule.phases = {{cycles, std::vector<double>(env.curves.size(), 1.0)}};
  env.noise = {0.0, 0.0, 1};
  return env;
}

inline double sum_of(const std::vector<sam::Pages>& v) {
  double s = 0.0;
  for (auto x : v) s += static_cast<double>(x);
  return s;
}

}  // namespace testutil
