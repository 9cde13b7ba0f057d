#include "oracles.hpp"
#include "unit/support.hpp"

#include "streamstab/stabilization.hpp"
#include "streamstab/trajectory_losses.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace streamstab;
using doctest::Approx;

namespace {

bool same_pose(const Pose& a, const Pose& b) {
  return a.t == b.t && a.q.w == b.q.w && a.q.x == b.q.x && a.q.y == b.q.y && a.q.z == b.q.z &&
         a.timestamp == b.timestamp;
}

}  // namespace

TEST_SUITE("stabilization") {

TEST_CASE("smoothing factor") {
  CHECK(smoothing_alpha(0.0, 0.1) == 0.0);
  CHECK(smoothing_alpha(1.0, 1e6) > 0.9999);
  CHECK(smoothing_alpha(1.0, 1.0 / 30.0) == Approx(0.173165).epsilon(1e-5));
  CHECK(smoothing_alpha(1.0, 1.0 / 30.0) ==
        Approx(0.2094395 / 1.2094395).epsilon(1e-7));
  CHECK(code_of([] { smoothing_alpha(1.0, 0.0); }) == ErrorCode::NonPositiveDt);
  CHECK(code_of([] { smoothing_alpha(1.0, -1.0); }) == ErrorCode::NonPositiveDt);
  CHECK(code_of([] { smoothing_alpha(-1.0, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("alpha stays in [0, 1)") {
  for (double f = 0.0; f < 1e4; f = f * 3 + 0.1) {
    for (double dt = 1e-4; dt < 1e3; dt *= 7) {
      const double a = smoothing_alpha(f, dt);
      CHECK(a >= 0.0);
      CHECK(a < 1.0);
    }
  }
}

TEST_CASE("cutoff frequency") {
  OneEuroConfig cfg;
  CHECK(cutoff_freq(cfg, 0.0) == cfg.f_min);
  cfg.f_min = 1.0;
  cfg.beta_gain = 0.5;
  CHECK(cutoff_freq(cfg, 2.0) == 2.0);
  cfg.beta_gain = 0.0;
  for (double v : {0.0, 1.0, 1e6}) CHECK(cutoff_freq(cfg, v) == 1.0);
}

TEST_CASE("alpha increases with speed when the gain is positive") {
  const OneEuroConfig cfg;
  double prev = -1.0;
  for (double v = 0.0; v < 100.0; v += 0.5) {
    const double a = smoothing_alpha(cutoff_freq(cfg, v), 1.0 / 30.0);
    CHECK(a > prev);
    prev = a;
  }
}

TEST_CASE("config validation") {
  OneEuroConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.f_min = 0.0;
  CHECK(code_of([&] { validate(cfg); }) == ErrorCode::InvalidArgument);
  cfg = {};
  cfg.beta_gain = -1.0;
  CHECK(code_of([&] { validate(cfg); }) == ErrorCode::InvalidArgument);
  cfg = {};
  cfg.default_dt = 0.0;
  CHECK(code_of([&] { stabilize_trajectory(Trajectory{}, cfg); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("first frame passes through exactly") {
  Pose raw;
  raw.t = Vec3(0.1, 0.2, 0.3);
  raw.q = quat_normalize({1, 2, 3, 4});
  raw.timestamp = 5.0;
  const auto out = filter_step(FilterState{}, raw, OneEuroConfig{});
  CHECK(same_pose(out.pose, raw));
  CHECK(out.state.initialized);
  CHECK(out.state.last_t == raw.t);
}

TEST_CASE("huge cutoff passes translations through") {
  OneEuroConfig cfg;
  cfg.f_min = 1e15;
  std::mt19937_64 rng(51);
  const auto raw = oracle::random_trajectory(30, rng);
  const auto out = stabilize_trajectory(raw, cfg);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    CHECK((out[i].t - raw[i].t).norm() <= 1e-9);
    CHECK(oracle::quat_distance(out[i].q, raw[i].q) <= 1e-9);
  }
}

TEST_CASE("pinned alpha blends halfway") {
  FilterState state;
  state.initialized = true;
  state.last_t = Vec3::Zero();
  state.last_q = Quaternion{};
  Pose raw;
  raw.t = Vec3(2, 0, 0);
  raw.q = Quaternion::from_axis_angle(Vec3::UnitZ(), std::numbers::pi / 2);
  raw.timestamp = 1.0;
  const auto out = diagnostics::filter_step_pinned(state, raw, 0.5);
  CHECK((out.pose.t - Vec3(1, 0, 0)).norm() <= 1e-15);
  CHECK(out.pose.q.w == Approx(0.92388).epsilon(1e-5));
  CHECK(out.pose.q.z == Approx(0.38268).epsilon(1e-5));
  CHECK(code_of([&] { diagnostics::filter_step_pinned(state, raw, 1.5); }) == ErrorCode::InvalidGamma);
}

TEST_CASE("constant trajectory is a fixed point") {
  Trajectory t;
  const auto q = quat_normalize({0.3, -0.2, 0.5, 0.7});
  for (int i = 0; i < 50; ++i) t.poses.push_back({Vec3(1, 2, 3), q, i / 30.0});
  const auto out = stabilize_trajectory(t, OneEuroConfig{});
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK((out[i].t - t[i].t).norm() <= 1e-12);
    CHECK(oracle::quat_distance(out[i].q, q) <= 1e-12);
  }
}

TEST_CASE("causality") {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    const auto raw = oracle::random_trajectory(25, rng, 0.2);
    const auto full = stabilize_trajectory(raw, OneEuroConfig{});
    for (std::size_t k = 1; k <= raw.size(); ++k) {
      const auto part = stabilize_trajectory(raw.prefix(k), OneEuroConfig{});
      for (std::size_t i = 0; i < k; ++i) CHECK(same_pose(part[i], full[i]));
    }
  }
}

TEST_CASE("outputs are convex blends with unit rotations") {
  std::mt19937_64 rng(53);
  const auto raw = oracle::random_trajectory(60, rng, 0.5);
  FilterState state;
  for (const auto& pose : raw) {
    const auto step = filter_step(state, pose, OneEuroConfig{});
    CHECK(step.alpha >= 0.0);
    CHECK(step.alpha <= 1.0);
    CHECK(std::abs(step.pose.q.norm() - 1.0) <= 1e-9);
    if (state.initialized) {
      CHECK(step.alpha < 1.0);
      const Vec3 expect = step.alpha * pose.t + (1 - step.alpha) * state.last_t;
      CHECK((step.pose.t - expect).norm() <= 1e-12);
      // Lies on the segment between the previous output and the raw input.
      const double seg = (pose.t - state.last_t).norm();
      CHECK((step.pose.t - state.last_t).norm() + (pose.t - step.pose.t).norm() <= seg + 1e-12);
    }
    state = step.state;
  }
}

TEST_CASE("duplicate timestamps fall back to the default dt") {
  FilterState state;
  Pose a;
  state = filter_step(state, a, OneEuroConfig{}).state;
  Pose b;
  b.t = Vec3(1, 0, 0);
  b.timestamp = 0.0;
  OneEuroConfig cfg;
  cfg.beta_gain = 0.0;
  const auto out = filter_step(state, b, cfg);
  CHECK(out.alpha == Approx(smoothing_alpha(1.0, cfg.default_dt)).epsilon(1e-15));
}

TEST_CASE("non-unit input is rejected") {
  Pose p;
  p.q = Quaternion{2, 0, 0, 0};
  CHECK(code_of([&] { filter_step(FilterState{}, p, OneEuroConfig{}); }) ==
        ErrorCode::NonUnitQuaternion);
}

TEST_CASE("noisy circle gets smoother") {
  int better = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 0.05);
    Trajectory raw;
    for (int i = 0; i < 200; ++i) {
      const double phase = 2 * std::numbers::pi * i / 600.0;
      raw.poses.push_back({Vec3(2 * std::cos(phase) + n(rng), 2 * std::sin(phase) + n(rng), n(rng)),
                           Quaternion::from_axis_angle(Vec3::UnitZ(), phase), i / 30.0});
    }
    if (loss_acc(stabilize_trajectory(raw, OneEuroConfig{})) < loss_acc(raw)) ++better;
  }
  CHECK(better >= 19);
}

}  // TEST_SUITE
