#include "sam/signals.hpp"

#include <algorithm>
#include <cmath>

namespace sam {

void SignalParams::check() const {
  auto rate = [](double r) { return r > 0.0 && r <= 1.0; };
  if (!rate(lambda_slow) || !rate(lambda_fast)) throw ConfigError("EMA rates must lie in (0, 1]");
  if (!rate(v_up_rate) || !rate(v_down_rate)) throw ConfigError("V smoothing rates must lie in (0, 1]");
  if (!(v_up_rate > v_down_rate)) throw ConfigError("v_up_rate must exceed v_down_rate");
  if (!(p90_floor > 0.0)) throw ConfigError("p90_floor must be > 0");
  if (!(sat_decay > 0.0 && sat_decay < 1.0) || !(sat_recover > 0.0 && sat_recover < 1.0)) {
    throw ConfigError("saturation decay and recovery must lie in (0, 1)");
  }
  if (!(sat_delta_hr_eps >= 0.0)) throw ConfigError("sat_delta_hr_eps must be >= 0");
}

TenantSignalState update_emas(TenantSignalState state, const TenantObservation& obs, const SignalParams& params) {
  if (!state.initialized) {
    state.ema_ops_slow = obs.ops;
    state.ema_ops_fast = obs.ops;
    state.ema_hr_slow = obs.hit_rate;
    state.initialized = true;
    return state;
  }
  auto ema = [](double e, double x, double lambda) { return (1.0 - lambda) * e + lambda * x; };
  state.ema_ops_slow = ema(state.ema_ops_slow, obs.ops, params.lambda_slow);
  state.ema_ops_fast = ema(state.ema_ops_fast, obs.ops, params.lambda_fast);
  state.ema_hr_slow = ema(state.ema_hr_slow, obs.hit_rate, params.lambda_slow);
  return state;
}

double raw_v(const TenantSignalState& state, const TenantObservation& obs) {
  if (!state.initialized) return 0.0;
  const Pages dp = obs.current_pages - state.last_pages;
  if (dp == 0) return 0.0;
  return (obs.hit_rate - state.last_hr) / static_cast<double>(dp);
}

TenantSignalState smooth_v(TenantSignalState state, double v_raw, const SignalParams& params) {
  const double rate = v_raw > state.v_smoothed ? params.v_up_rate : params.v_down_rate;
  state.v_smoothed = (1.0 - rate) * state.v_smoothed + rate * v_raw;
  return state;
}

double p90(std::span<const double> values) {
  if (values.empty()) return 0.0;
  std::vector<double> pos(values.size());
  std::transform(values.begin(), values.end(), pos.begin(), [](double v) { return std::max(v, 0.0); });
  std::sort(pos.begin(), pos.end());
  const double rank = 0.9 * static_cast<double>(pos.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, pos.size() - 1);
  return pos[lo] + (rank - static_cast<double>(lo)) * (pos[hi] - pos[lo]);
}

std::vector<double> p90_normalize(std::span<const double> values, double floor) {
  const double denom = std::max(p90(values), floor);
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [denom](double v) { return std::clamp(std::max(v, 0.0) / denom, 0.0, 1.0); });
  return out;
}

TenantSignalState update_saturation_confidence(TenantSignalState state, const TenantObservation& obs,
                                               const SignalParams& params) {
  if (!state.initialized) return state;
  const bool grew = obs.current_pages > state.last_pages;
  const bool flat = std::abs(obs.hit_rate - state.last_hr) < params.sat_delta_hr_eps;
  if (grew && flat) {
    state.saturation_confidence *= params.sat_decay;
  } else {
    state.saturation_confidence += params.sat_recover * (1.0 - state.saturation_confidence);
  }
  state.saturation_confidence = std::clamp(state.saturation_confidence, 0.0, 1.0);
  return state;
}

TenantSignalState observe(TenantSignalState state, const TenantObservation& obs, const SignalParams& params) {
  const double v = raw_v(state, obs);
  if (state.initialized) state = smooth_v(state, v, params);
  state = update_saturation_confidence(state, obs, params);
  state = update_emas(state, obs, params);
  state.last_pages = obs.current_pages;
  state.last_hr = obs.hit_rate;
  return state;
}

}  // namespace sam
