#pragma once

// Causal trajectory stabilization. Translations go through an adaptive
// first-order low-pass (One Euro style) whose cutoff grows with speed;
// rotations are slerped toward the new measurement with the same factor.
//
// Unlike the classic One Euro filter there is no separate low-pass on the
// velocity estimate: speed is the raw distance between the new measurement and
// the previous smoothed position over the frame interval.

#include "streamstab/geometry.hpp"

namespace streamstab {

struct OneEuroConfig {
  double f_min = 1.0;          // Hz
  double beta_gain = 0.007;    // Hz per (unit/s)
  double default_dt = 1.0 / 30.0;  // s, used when timestamps do not advance
};

struct FilterState {
  Vec3 last_t = Vec3::Zero();
  Quaternion last_q;
  double last_timestamp = 0.0;
  bool initialized = false;
};

struct FilterOutput {
  FilterState state;
  Pose pose;
  double alpha = 1.0;  // smoothing factor used for this step
};

/// 2πf·dt / (2πf·dt + 1). Throws NonPositiveDt, InvalidArgument for f < 0.
double smoothing_alpha(double cutoff_hz, double dt);

/// f_min + beta_gain·|speed|.
double cutoff_freq(const OneEuroConfig& cfg, double speed);

/// Throws InvalidArgument for configs violating f_min > 0, beta_gain ≥ 0, default_dt > 0.
void validate(const OneEuroConfig& cfg);

/// One filter update. The first call passes `raw` through unchanged.
/// Throws NonUnitQuaternion.
FilterOutput filter_step(const FilterState& state, const Pose& raw, const OneEuroConfig& cfg);

/// Streaming fold of filter_step; output i depends only on inputs 0..i.
Trajectory stabilize_trajectory(const Trajectory& raw, const OneEuroConfig& cfg);

namespace diagnostics {

/// filter_step with the smoothing factor pinned to `alpha` instead of derived
/// from the cutoff frequency. Test hook only.
FilterOutput filter_step_pinned(const FilterState& state, const Pose& raw, double alpha);

}  // namespace diagnostics

}  // namespace streamstab
