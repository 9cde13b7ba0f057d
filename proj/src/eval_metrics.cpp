#include "streamstab/eval_metrics.hpp"

#include "stats.hpp"
#include "streamstab/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>

namespace streamstab {

namespace {

constexpr double kRankTolerance = 1e-10;

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::LengthMismatch,
                "prediction has " + std::to_string(a) + " entries, ground truth " +
                    std::to_string(b));
  }
}

}  // namespace

Similarity3 umeyama_align(std::span<const Vec3> src, std::span<const Vec3> dst, bool with_scale) {
  require_same_length(src.size(), dst.size());
  const auto n = src.size();
  if (n < 3) {
    throw Error(ErrorCode::DegenerateConfiguration,
                "alignment needs at least 3 correspondences, got " + std::to_string(n));
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  Vec3 mu_src = Vec3::Zero();
  Vec3 mu_dst = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mu_src += src[i];
    mu_dst += dst[i];
  }
  mu_src *= inv_n;
  mu_dst *= inv_n;

  Mat3 cov = Mat3::Zero();
  double var_src = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 a = src[i] - mu_src;
    cov += (dst[i] - mu_dst) * a.transpose();
    var_src += a.squaredNorm();
  }
  cov *= inv_n;
  var_src *= inv_n;

  const Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  if (!(sv[0] > 0.0) || sv[1] <= kRankTolerance * sv[0]) {
    throw Error(ErrorCode::DegenerateConfiguration,
                "points are collinear or coincident; rotation is not determined");
  }
  Mat3 s = Mat3::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) s(2, 2) = -1.0;

  Similarity3 out;
  out.rotation = svd.matrixU() * s * svd.matrixV().transpose();
  out.scale = with_scale ? (sv.asDiagonal() * s).trace() / var_src : 1.0;
  out.translation = mu_dst - out.scale * out.rotation * mu_src;
  return out;
}

double metric_ate(const Trajectory& pred, const Trajectory& gt, bool with_scale) {
  require_same_length(pred.size(), gt.size());
  const auto p = pred.translations();
  const auto g = gt.translations();
  const auto align = umeyama_align(p, g, with_scale);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += (align.apply(p[i]) - g[i]).squaredNorm();
  return std::sqrt(sum / static_cast<double>(p.size()));
}

RpeResult metric_rpe(const Trajectory& pred, const Trajectory& gt) {
  require_same_length(pred.size(), gt.size());
  if (pred.size() < 2) throw Error(ErrorCode::TooShort, "RPE needs at least 2 poses");

  struct Motion {
    Quaternion q;
    Vec3 t;
  };
  // Pose i⁻¹ ∘ pose i+1.
  auto relative = [](const Pose& a, const Pose& b) {
    const Quaternion inv = a.q.conjugate();
    return Motion{inv * b.q, inv.rotate(b.t - a.t)};
  };

  double trans2 = 0.0;
  double rot2 = 0.0;
  const auto pairs = pred.size() - 1;
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto mp = relative(pred[i], pred[i + 1]);
    const auto mg = relative(gt[i], gt[i + 1]);
    // Error motion (gt_rel)⁻¹ ∘ pred_rel.
    const Quaternion ginv = mg.q.conjugate();
    const Quaternion qe = ginv * mp.q;
    const Vec3 te = ginv.rotate(mp.t - mg.t);
    const double vec = std::sqrt(qe.x * qe.x + qe.y * qe.y + qe.z * qe.z);
    const double angle = 2.0 * std::atan2(vec, std::abs(qe.w)) * 180.0 / std::numbers::pi;
    trans2 += te.squaredNorm();
    rot2 += angle * angle;
  }
  const double inv = 1.0 / static_cast<double>(pairs);
  return {std::sqrt(trans2 * inv), std::sqrt(rot2 * inv)};
}

const char* to_string(DepthEvalMode mode) {
  switch (mode) {
    case DepthEvalMode::Original: return "original";
    case DepthEvalMode::Scale: return "scale";
    case DepthEvalMode::ScaleAndShift: return "scale_and_shift";
  }
  return "unknown";
}

DepthEvalMode parse_depth_eval_mode(const std::string& text) {
  if (text == "original") return DepthEvalMode::Original;
  if (text == "scale") return DepthEvalMode::Scale;
  if (text == "scale_and_shift") return DepthEvalMode::ScaleAndShift;
  throw Error(ErrorCode::InvalidArgument, "unknown depth evaluation mode '" + text + "'");
}

DepthMetrics metric_depth(const DepthMap& pred, const DepthMap& gt, DepthEvalMode mode) {
  if (pred.width != gt.width || pred.height != gt.height) {
    throw Error(ErrorCode::ShapeMismatch, "depth maps differ in size");
  }
  std::vector<double> p;
  std::vector<double> g;
  for (std::size_t i = 0; i < gt.depths.size(); ++i) {
    if (pred.valid[i] && gt.valid[i]) {
      p.push_back(pred.depths[i]);
      g.push_back(gt.depths[i]);
    }
  }
  if (p.empty()) throw Error(ErrorCode::NoOverlappingValidity, "no pixel is valid in both maps");
  const auto n = static_cast<double>(p.size());

  if (mode == DepthEvalMode::Scale) {
    std::vector<double> ratios(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) ratios[i] = g[i] / p[i];
    const double s = detail::median(std::move(ratios));
    for (auto& v : p) v *= s;
  } else if (mode == DepthEvalMode::ScaleAndShift) {
    double mp = 0.0, mg = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      mp += p[i];
      mg += g[i];
    }
    mp /= n;
    mg /= n;
    double cov = 0.0, var = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      cov += (p[i] - mp) * (g[i] - mg);
      var += (p[i] - mp) * (p[i] - mp);
    }
    // A constant prediction leaves only the shift to fit.
    const double a = var > 0.0 ? cov / var : 0.0;
    const double b = mg - a * mp;
    for (auto& v : p) v = a * v + b;
  }

  double abs_rel = 0.0;
  std::size_t inliers = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    abs_rel += std::abs(p[i] - g[i]) / g[i];
    if (p[i] > 0.0 && std::max(p[i] / g[i], g[i] / p[i]) < 1.25) ++inliers;
  }
  return {abs_rel / n, 100.0 * static_cast<double>(inliers) / n};
}

std::vector<Vec3> estimate_normals(std::span<const Vec3> points, std::size_t k,
                                   NeighborIndex::Strategy strategy) {
  const NeighborIndex index(points, strategy);
  std::vector<Vec3> normals(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto nbrs = index.k_nearest(points[i], k + 1);
    Vec3 mean = Vec3::Zero();
    for (const auto& nb : nbrs) mean += points[nb.index];
    mean /= static_cast<double>(nbrs.size());
    Mat3 cov = Mat3::Zero();
    for (const auto& nb : nbrs) {
      const Vec3 d = points[nb.index] - mean;
      cov += d * d.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    Vec3 n = eig.eigenvectors().col(0);  // smallest eigenvalue
    if (n.dot(-points[i]) < 0.0) n = -n;
    normals[i] = n;
  }
  return normals;
}

ReconMetrics metric_recon(const PointSet& pred, const PointSet& gt, std::size_t k_normals,
                          NeighborIndex::Strategy strategy) {
  if (pred.size() <= k_normals || gt.size() <= k_normals) {
    throw Error(ErrorCode::TooFewPoints, "each cloud needs more than k_normals = " +
                                             std::to_string(k_normals) + " points");
  }
  const NeighborIndex gt_index(gt.points, strategy);
  const NeighborIndex pred_index(pred.points, strategy);
  const auto pred_normals = estimate_normals(pred.points, k_normals, strategy);
  const auto gt_normals = estimate_normals(gt.points, k_normals, strategy);

  ReconMetrics m;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto nb = gt_index.nearest(pred.points[i]);
    m.acc += std::sqrt(nb.dist2);
    m.nc += std::abs(pred_normals[i].dot(gt_normals[nb.index]));
  }
  for (const auto& g : gt.points) m.comp += std::sqrt(pred_index.nearest(g).dist2);
  m.acc /= static_cast<double>(pred.size());
  m.nc /= static_cast<double>(pred.size());
  m.comp /= static_cast<double>(gt.size());
  return m;
}

}  // namespace streamstab
