#include "streamstab/stabilization.hpp"

#include "streamstab/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace streamstab {

namespace {

FilterOutput initialize(const Pose& raw) {
  FilterOutput out;
  out.pose = raw;
  out.state = {raw.t, quat_normalize(raw.q), raw.timestamp, true};
  out.alpha = 1.0;
  return out;
}

FilterOutput blend(const FilterState& state, const Pose& raw, double alpha) {
  FilterOutput out;
  out.alpha = alpha;
  out.pose.timestamp = raw.timestamp;
  out.pose.t = alpha * raw.t + (1.0 - alpha) * state.last_t;
  out.pose.q = slerp(state.last_q, quat_normalize(raw.q), alpha);
  out.state = {out.pose.t, out.pose.q, raw.timestamp, true};
  return out;
}

void require_unit_input(const Pose& raw) {
  if (!is_unit(raw.q)) {
    throw Error(ErrorCode::NonUnitQuaternion,
                "raw pose quaternion has norm " + std::to_string(raw.q.norm()));
  }
}

}  // namespace

double smoothing_alpha(double cutoff_hz, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::NonPositiveDt, "dt = " + std::to_string(dt));
  if (!(cutoff_hz >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative cutoff frequency");
  const double x = 2.0 * std::numbers::pi * cutoff_hz * dt;
  return x / (x + 1.0);
}

double cutoff_freq(const OneEuroConfig& cfg, double speed) {
  return cfg.f_min + cfg.beta_gain * std::abs(speed);
}

void validate(const OneEuroConfig& cfg) {
  if (!(cfg.f_min > 0.0) || !(cfg.beta_gain >= 0.0) || !(cfg.default_dt > 0.0) ||
      !std::isfinite(cfg.f_min) || !std::isfinite(cfg.beta_gain) ||
      !std::isfinite(cfg.default_dt)) {
    throw Error(ErrorCode::InvalidArgument,
                "filter config needs f_min > 0, beta_gain >= 0, default_dt > 0");
  }
}

FilterOutput filter_step(const FilterState& state, const Pose& raw, const OneEuroConfig& cfg) {
  require_unit_input(raw);
  if (!state.initialized) return initialize(raw);
  double dt = raw.timestamp - state.last_timestamp;
  if (!(dt > 0.0) || !std::isfinite(dt)) dt = cfg.default_dt;
  const double speed = (raw.t - state.last_t).norm() / dt;
  return blend(state, raw, smoothing_alpha(cutoff_freq(cfg, speed), dt));
}

Trajectory stabilize_trajectory(const Trajectory& raw, const OneEuroConfig& cfg) {
  validate(cfg);
  Trajectory out;
  out.poses.reserve(raw.size());
  FilterState state;
  for (const auto& pose : raw) {
    auto step = filter_step(state, pose, cfg);
    state = step.state;
    out.poses.push_back(step.pose);
  }
  return out;
}

namespace diagnostics {

FilterOutput filter_step_pinned(const FilterState& state, const Pose& raw, double alpha) {
  require_unit_input(raw);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidGamma, "alpha outside [0,1]");
  if (!state.initialized) return initialize(raw);
  return blend(state, raw, alpha);
}

}  // namespace diagnostics

}  // namespace streamstab
