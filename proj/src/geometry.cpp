#include "streamstab/geometry.hpp"

#include "streamstab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace streamstab {

namespace {

constexpr double kZeroNorm = 1e-12;
constexpr double kSlerpLinearThreshold = 1e-6;

void require_unit(const Quaternion& q, const char* what) {
  if (!is_unit(q)) {
    throw Error(ErrorCode::NonUnitQuaternion,
                std::string(what) + " has norm " + std::to_string(q.norm()));
  }
}

}  // namespace

Quaternion Quaternion::from_axis_angle(const Vec3& axis, double angle) {
  const Vec3 n = axis.normalized();
  const double h = 0.5 * angle;
  const double s = std::sin(h);
  return {std::cos(h), n.x() * s, n.y() * s, n.z() * s};
}

double Quaternion::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quaternion Quaternion::operator*(const Quaternion& o) const {
  return {w * o.w - x * o.x - y * o.y - z * o.z,
          w * o.x + x * o.w + y * o.z - z * o.y,
          w * o.y - x * o.z + y * o.w + z * o.x,
          w * o.z + x * o.y - y * o.x + z * o.w};
}

Vec3 Quaternion::rotate(const Vec3& v) const { return to_rotation_matrix() * v; }

Mat3 Quaternion::to_rotation_matrix() const {
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

Quaternion Quaternion::from_rotation_matrix(const Mat3& r) {
  // Shepperd's method: branch on the largest diagonal term for stability.
  const double trace = r.trace();
  Quaternion q;
  if (trace > r(0, 0) && trace > r(1, 1) && trace > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + trace);
    q = {0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s, (r(1, 0) - r(0, 1)) / s};
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
    q = {(r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s};
  } else if (r(1, 1) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
    q = {(r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s};
  } else {
    const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
    q = {(r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s};
  }
  return quat_normalize(q);
}

std::vector<Vec3> Trajectory::translations() const {
  std::vector<Vec3> out;
  out.reserve(poses.size());
  for (const auto& p : poses) out.push_back(p.t);
  return out;
}

Trajectory Trajectory::prefix(std::size_t count) const {
  Trajectory out;
  const auto n = std::min(count, poses.size());
  out.poses.assign(poses.begin(), poses.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

void validate_trajectory(const Trajectory& traj) {
  if (traj.empty()) throw Error(ErrorCode::EmptyTrajectory, "trajectory has no poses");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& p = traj[i];
    if (!std::isfinite(p.timestamp) || !p.t.allFinite()) {
      throw Error(ErrorCode::InvalidArgument, "non-finite pose " + std::to_string(i));
    }
    require_unit(p.q, "pose quaternion");
    if (i > 0 && !(p.timestamp > traj[i - 1].timestamp)) {
      throw Error(ErrorCode::NonMonotonicTimestamps,
                  "timestamp of pose " + std::to_string(i) + " does not increase");
    }
  }
}

Quaternion quat_normalize(const Quaternion& q) {
  const double n = q.norm();
  if (!(n >= kZeroNorm)) throw Error(ErrorCode::ZeroQuaternion, "cannot normalize");
  return q * (1.0 / n);
}

bool is_unit(const Quaternion& q) { return std::abs(q.norm() - 1.0) <= kUnitNormTolerance; }

double quat_geodesic_angle(const Quaternion& a, const Quaternion& b) {
  require_unit(a, "first quaternion");
  require_unit(b, "second quaternion");
  return 2.0 * std::acos(std::min(1.0, std::abs(a.dot(b))));
}

Quaternion align_hemisphere(const Quaternion& q, const Quaternion& reference) {
  return q.dot(reference) < 0.0 ? -q : q;
}

std::vector<Quaternion> hemisphere_aligned_sequence(const Trajectory& traj) {
  std::vector<Quaternion> out;
  out.reserve(traj.size());
  for (const auto& p : traj) {
    out.push_back(out.empty() ? p.q : align_hemisphere(p.q, out.back()));
  }
  return out;
}

Quaternion slerp(const Quaternion& a, const Quaternion& b_in, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw Error(ErrorCode::InvalidGamma, "gamma = " + std::to_string(gamma));
  }
  require_unit(a, "slerp start");
  require_unit(b_in, "slerp end");
  const Quaternion b = align_hemisphere(b_in, a);
  const double cos_theta = std::min(1.0, a.dot(b));
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  if (sin_theta < kSlerpLinearThreshold) {
    return quat_normalize(a * (1.0 - gamma) + b * gamma);
  }
  const double theta = std::atan2(sin_theta, cos_theta);
  const double wa = std::sin((1.0 - gamma) * theta) / sin_theta;
  const double wb = std::sin(gamma * theta) / sin_theta;
  return a * wa + b * wb;
}

RelativeMotion relative_pose(const Pose& prev, const Pose& cur) {
  return {cur.t - prev.t, quat_geodesic_angle(prev.q, cur.q)};
}

}  // namespace streamstab
