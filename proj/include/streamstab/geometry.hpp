#pragma once

// Quaternion and pose algebra shared by the rest of the library.
//
// Quaternions are scalar-first (w, x, y, z) everywhere in memory. Only the
// TUM reader/writer deals with the scalar-last order used on disk.

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <vector>

namespace streamstab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static Quaternion identity() { return {}; }
  /// Rotation of `angle` radians about `axis` (normalized internally).
  static Quaternion from_axis_angle(const Vec3& axis, double angle);

  double norm() const;
  double dot(const Quaternion& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }
  Quaternion conjugate() const { return {w, -x, -y, -z}; }
  Quaternion operator-() const { return {-w, -x, -y, -z}; }
  Quaternion operator*(const Quaternion& o) const;  // Hamilton product
  Quaternion operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
  Quaternion operator+(const Quaternion& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
  Quaternion operator-(const Quaternion& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }

  Vec3 rotate(const Vec3& v) const;
  Mat3 to_rotation_matrix() const;
  static Quaternion from_rotation_matrix(const Mat3& r);
};

struct Pose {
  Vec3 t = Vec3::Zero();
  Quaternion q;
  double timestamp = 0.0;
};

/// Ordered camera poses; timestamps strictly increase.
struct Trajectory {
  std::vector<Pose> poses;

  std::size_t size() const { return poses.size(); }
  bool empty() const { return poses.empty(); }
  const Pose& operator[](std::size_t i) const { return poses[i]; }
  Pose& operator[](std::size_t i) { return poses[i]; }
  auto begin() const { return poses.begin(); }
  auto end() const { return poses.end(); }

  std::vector<Vec3> translations() const;
  /// First `count` poses (clamped to the length).
  Trajectory prefix(std::size_t count) const;
};

/// Throws EmptyTrajectory, NonUnitQuaternion or NonMonotonicTimestamps.
void validate_trajectory(const Trajectory& traj);

/// Point cloud with optional per-point confidences.
struct PointSet {
  std::vector<Vec3> points;
  std::optional<std::vector<double>> confidences;

  std::size_t size() const { return points.size(); }
};

inline constexpr double kUnitNormTolerance = 1e-6;

/// Throws ZeroQuaternion when the norm is below 1e-12.
Quaternion quat_normalize(const Quaternion& q);

/// True when |‖q‖ − 1| ≤ kUnitNormTolerance.
bool is_unit(const Quaternion& q);

/// Rotation angle in [0, π] between two unit quaternions; q and −q compare
/// equal. Throws NonUnitQuaternion.
double quat_geodesic_angle(const Quaternion& a, const Quaternion& b);

/// Spherical interpolation at constant angular velocity. `b` is flipped into
/// a's hemisphere first; nearly parallel inputs fall back to normalized lerp.
/// Throws InvalidGamma outside [0, 1] and NonUnitQuaternion.
Quaternion slerp(const Quaternion& a, const Quaternion& b, double gamma);

/// Returns `q` or `-q`, whichever has nonnegative dot product with `reference`.
Quaternion align_hemisphere(const Quaternion& q, const Quaternion& reference);

/// Flips each quaternion so consecutive entries have nonnegative dot product.
std::vector<Quaternion> hemisphere_aligned_sequence(const Trajectory& traj);

struct RelativeMotion {
  Vec3 delta_t = Vec3::Zero();
  double delta_angle = 0.0;
};

RelativeMotion relative_pose(const Pose& prev, const Pose& cur);

}  // namespace streamstab
