#pragma once

#include <span>
#include <vector>

#include "sam/domain.hpp"

namespace sam {

/// Smoothing and saturation constants for the per-tenant signal pipeline.
struct SignalParams {
  double lambda_slow = 0.1;
  double lambda_fast = 0.5;
  double v_up_rate = 0.4;    // applied when the raw gradient is above the smoothed one
  double v_down_rate = 0.1;  // applied otherwise; must stay below v_up_rate
  double p90_floor = 1e-6;
  double sat_delta_hr_eps = 0.002;
  double sat_decay = 0.8;
  double sat_recover = 0.1;

  void check() const;
};

/// Smoothed per-tenant view of the raw observations.
struct TenantSignalState {
  bool initialized = false;
  double ema_ops_slow = 0.0;
  double ema_ops_fast = 0.0;
  double ema_hr_slow = 0.0;
  double v_smoothed = 0.0;
  Pages last_pages = 0;
  double last_hr = 0.0;
  double saturation_confidence = 1.0;

  /// Gradient after the saturation discount; the input to V normalization.
  [[nodiscard]] double v_influence() const { return v_smoothed * saturation_confidence; }
};

/// e' = (1 - lambda) e + lambda x for each EMA; the first observation seeds
/// the averages with the raw values.
TenantSignalState update_emas(TenantSignalState state, const TenantObservation& obs, const SignalParams& params);

/// Hit-rate change per page since the previous observation; 0 when the
/// allocation did not move.
double raw_v(const TenantSignalState& state, const TenantObservation& obs);

/// Asymmetric ("fast-up, slow-down") EMA of the raw gradient.
TenantSignalState smooth_v(TenantSignalState state, double v_raw, const SignalParams& params);

/// Linear-interpolated 90th percentile of the positive parts; the same
/// convention as numpy's default percentile.
double p90(std::span<const double> values);

/// Maps each value to clamp(max(v, 0) / max(p90, floor), 0, 1).
std::vector<double> p90_normalize(std::span<const double> values, double floor);

/// Multiplicative decay on flat growth (pages rose, hit rate did not),
/// linear recovery toward 1 otherwise.
TenantSignalState update_saturation_confidence(TenantSignalState state, const TenantObservation& obs,
                                               const SignalParams& params);

/// One full Sense-phase update: gradient, saturation, EMAs, then the
/// last-seen pages and hit rate.
TenantSignalState observe(TenantSignalState state, const TenantObservation& obs, const SignalParams& params);

}  // namespace sam
