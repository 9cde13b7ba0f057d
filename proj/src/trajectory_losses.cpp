#include "streamstab/trajectory_losses.hpp"

#include "streamstab/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <string>

namespace streamstab {

namespace {

using Vec4 = Eigen::Vector4d;

constexpr double kScaleFloor = 1e-8;

Vec4 as_vec4(const Quaternion& q) { return {q.w, q.x, q.y, q.z}; }

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::LengthMismatch, std::string(what) + ": " + std::to_string(a) +
                                               " vs " + std::to_string(b));
  }
}

void require_length(const Trajectory& t, std::size_t min, const char* term) {
  if (t.size() < min) {
    throw Error(ErrorCode::TooShort, std::string(term) + " needs at least " +
                                         std::to_string(min) + " poses, got " +
                                         std::to_string(t.size()));
  }
}

/// Unit direction of v, or zero at the origin (subgradient choice).
template <typename V>
V unit_or_zero(const V& v) {
  const double n = v.norm();
  return n > 0.0 ? V(v / n) : V(V::Zero());
}

}  // namespace

double scale_normalizer(std::span<const Vec3> vectors) {
  if (vectors.empty()) throw Error(ErrorCode::EmptyList, "scale of an empty list");
  double sum = 0.0;
  for (const auto& v : vectors) sum += v.norm();
  return std::max(sum / static_cast<double>(vectors.size()), kScaleFloor);
}

double loss_conf(const PointSet& pred, const PointSet& gt, double alpha) {
  require_same_length(pred.size(), gt.size(), "point sets");
  if (!pred.confidences) throw Error(ErrorCode::MissingConfidence, "prediction has no confidences");
  const auto& conf = *pred.confidences;
  require_same_length(conf.size(), pred.size(), "confidences");
  if (pred.points.empty()) return 0.0;
  const double sp = scale_normalizer(pred.points);
  const double sg = scale_normalizer(gt.points);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double c = conf[i];
    if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "confidences must be positive");
    sum += c * (pred.points[i] / sp - gt.points[i] / sg).norm() - alpha * std::log(c);
  }
  return sum;
}

double loss_rgb(std::span<const double> pred, std::span<const double> gt) {
  if (pred.size() != gt.size()) {
    throw Error(ErrorCode::ShapeMismatch, std::to_string(pred.size()) + " vs " +
                                              std::to_string(gt.size()) + " values");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - gt[i];
    sum += d * d;
  }
  return sum;
}

double loss_ate(const Trajectory& pred, const Trajectory& gt) {
  require_same_length(pred.size(), gt.size(), "trajectories");
  if (pred.empty()) throw Error(ErrorCode::EmptyTrajectory, "ATE of an empty trajectory");
  const double sp = scale_normalizer(pred.translations());
  const double sg = scale_normalizer(gt.translations());
  double sum = 0.0;
  for (std::size_t t = 0; t < pred.size(); ++t) {
    sum += (pred[t].t / sp - gt[t].t / sg).norm() + (1.0 - std::abs(pred[t].q.dot(gt[t].q)));
  }
  return sum / static_cast<double>(pred.size());
}

double loss_rpe(const Trajectory& pred, const Trajectory& gt) {
  require_same_length(pred.size(), gt.size(), "trajectories");
  require_length(pred, 2, "RPE loss");
  const auto qp = hemisphere_aligned_sequence(pred);
  const auto qg = hemisphere_aligned_sequence(gt);
  double sum = 0.0;
  for (std::size_t t = 1; t < pred.size(); ++t) {
    const Vec3 dx = (pred[t].t - pred[t - 1].t) - (gt[t].t - gt[t - 1].t);
    const Vec4 dq = (as_vec4(qp[t]) - as_vec4(qp[t - 1])) - (as_vec4(qg[t]) - as_vec4(qg[t - 1]));
    sum += dx.norm() + dq.norm();
  }
  return sum / static_cast<double>(pred.size() - 1);
}

double loss_acc(const Trajectory& pred) {
  require_length(pred, 3, "acceleration loss");
  const auto q = hemisphere_aligned_sequence(pred);
  double sum = 0.0;
  for (std::size_t t = 2; t < pred.size(); ++t) {
    const Vec3 ax = pred[t].t - 2.0 * pred[t - 1].t + pred[t - 2].t;
    const Vec4 aq = as_vec4(q[t]) - 2.0 * as_vec4(q[t - 1]) + as_vec4(q[t - 2]);
    sum += ax.norm() + aq.norm();
  }
  return sum / static_cast<double>(pred.size() - 2);
}

double loss_pose(const Trajectory& pred, const Trajectory& gt, const LossWeights& w) {
  double total = 0.0;
  if (w.w_ate != 0.0) total += w.w_ate * loss_ate(pred, gt);
  if (w.w_rpe != 0.0) total += w.w_rpe * loss_rpe(pred, gt);
  if (w.w_acc != 0.0) total += w.w_acc * loss_acc(pred);
  return total;
}

double loss_total(double conf, double rgb, double pose, const LossWeights& w) {
  return w.lambda_conf * conf + w.lambda_rgb * rgb + w.lambda_pose * pose;
}

std::vector<Vec3> grad_pose_translations(const Trajectory& pred, const Trajectory& gt,
                                         const LossWeights& w) {
  require_same_length(pred.size(), gt.size(), "trajectories");
  const auto n = pred.size();
  if (n == 0) throw Error(ErrorCode::EmptyTrajectory, "gradient of an empty trajectory");
  if (w.w_rpe != 0.0) require_length(pred, 2, "RPE loss");
  if (w.w_acc != 0.0) require_length(pred, 3, "acceleration loss");

  std::vector<Vec3> grad(n, Vec3::Zero());
  if (w.w_ate != 0.0) {
    const double sp = scale_normalizer(pred.translations());
    const double sg = scale_normalizer(gt.translations());
    const double k = w.w_ate / (static_cast<double>(n) * sp);
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += k * unit_or_zero<Vec3>(pred[t].t / sp - gt[t].t / sg);
    }
  }
  if (w.w_rpe != 0.0) {
    const double k = w.w_rpe / static_cast<double>(n - 1);
    for (std::size_t t = 1; t < n; ++t) {
      const Vec3 u = unit_or_zero<Vec3>((pred[t].t - pred[t - 1].t) - (gt[t].t - gt[t - 1].t));
      grad[t] += k * u;
      grad[t - 1] -= k * u;
    }
  }
  if (w.w_acc != 0.0) {
    const double k = w.w_acc / static_cast<double>(n - 2);
    for (std::size_t t = 2; t < n; ++t) {
      const Vec3 u = unit_or_zero<Vec3>(pred[t].t - 2.0 * pred[t - 1].t + pred[t - 2].t);
      grad[t] += k * u;
      grad[t - 1] -= 2.0 * k * u;
      grad[t - 2] += k * u;
    }
  }
  return grad;
}

}  // namespace streamstab
