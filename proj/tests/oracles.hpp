#pragma once

// Independent reference implementations used only by the tests. Each one
// takes the slow, obvious route so that it shares no code path with the
// library function it checks.

#include "streamstab/eval_metrics.hpp"
#include "streamstab/frame_scoring.hpp"
#include "streamstab/geometry.hpp"
#include "streamstab/spatial_refine.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using streamstab::GrayImage;
using streamstab::Quaternion;
using streamstab::Trajectory;
using streamstab::Vec3;

// ─── random helpers ──────────────────────────────────────────────────────────

inline Quaternion random_unit_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Quaternion q{n(rng), n(rng), n(rng), n(rng)};
  const double len = std::sqrt(q.dot(q));
  return q * (1.0 / len);
}

inline Vec3 random_vec(std::mt19937_64& rng, double sigma = 1.0) {
  std::normal_distribution<double> n(0.0, sigma);
  return {n(rng), n(rng), n(rng)};
}

inline GrayImage random_image(std::size_t w, std::size_t h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GrayImage img(w, h);
  for (auto& p : img.pixels) p = u(rng);
  return img;
}

inline GrayImage checkerboard(std::size_t w, std::size_t h) {
  GrayImage img(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) img.at(x, y) = (x + y) % 2 == 0 ? 1.0 : -1.0;
  }
  return img;
}

/// Random walk with strictly increasing timestamps at 30 fps.
inline Trajectory random_trajectory(std::size_t n, std::mt19937_64& rng, double step = 0.3) {
  Trajectory t;
  Vec3 pos = random_vec(rng);
  for (std::size_t i = 0; i < n; ++i) {
    streamstab::Pose p;
    p.timestamp = static_cast<double>(i) / 30.0;
    pos += random_vec(rng, step);
    p.t = pos;
    p.q = random_unit_quaternion(rng);
    t.poses.push_back(p);
  }
  return t;
}

// ─── spectrum ────────────────────────────────────────────────────────────────

/// Double-sum DFT, magnitudes with zero frequency moved to (W/2, H/2).
inline std::vector<double> dft2_centered(const GrayImage& img) {
  const auto w = img.width;
  const auto h = img.height;
  std::vector<double> out(w * h);
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) {
      std::complex<double> acc = 0.0;
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          const double phase = -2.0 * std::numbers::pi *
                               (static_cast<double>(u * x % w) / static_cast<double>(w) +
                                static_cast<double>(v * y % h) / static_cast<double>(h));
          acc += img.at(x, y) * std::polar(1.0, phase);
        }
      }
      const auto cu = (u + w / 2) % w;
      const auto cv = (v + h / 2) % h;
      out[cv * w + cu] = std::abs(acc);
    }
  }
  return out;
}

/// Number of centered bins strictly outside radius r of the DC bin.
inline std::size_t bins_outside(std::size_t w, std::size_t h, double r) {
  std::size_t count = 0;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double du = static_cast<double>(x) - static_cast<double>(w / 2);
      const double dv = static_cast<double>(y) - static_cast<double>(h / 2);
      if (du * du + dv * dv > r * r) ++count;
    }
  }
  return count;
}

inline double ratio_outside(const std::vector<double>& mag, std::size_t w, std::size_t h,
                            double r, double eps) {
  double high = 0.0;
  double total = 0.0;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double du = static_cast<double>(x) - static_cast<double>(w / 2);
      const double dv = static_cast<double>(y) - static_cast<double>(h / 2);
      total += mag[y * w + x];
      if (du * du + dv * dv > r * r) high += mag[y * w + x];
    }
  }
  return high / (total + eps);
}

// ─── quaternion power ────────────────────────────────────────────────────────

/// Unit quaternion → rotation vector (half-angle · axis).
inline Vec3 quat_log(const Quaternion& q) {
  const Vec3 v(q.x, q.y, q.z);
  const double s = v.norm();
  if (s < 1e-15) return Vec3::Zero();
  return std::atan2(s, q.w) * v / s;
}

inline Quaternion quat_exp(const Vec3& r) {
  const double a = r.norm();
  if (a < 1e-15) return {};
  const Vec3 v = std::sin(a) * r / a;
  return {std::cos(a), v.x(), v.y(), v.z()};
}

/// a·(a⁻¹b)^γ along the shorter arc.
inline Quaternion slerp_power(const Quaternion& a, const Quaternion& b, double gamma) {
  Quaternion rel = a.conjugate() * b;
  if (rel.w < 0.0) rel = -rel;
  return a * quat_exp(gamma * quat_log(rel));
}

/// Quaternions agree up to sign.
inline double quat_distance(const Quaternion& a, const Quaternion& b) {
  const double plus = std::sqrt((a - b).dot(a - b));
  const double minus = std::sqrt((a + b).dot(a + b));
  return std::min(plus, minus);
}

// ─── pose losses with frozen normalizers ─────────────────────────────────────

struct FrozenPoseLoss {
  std::vector<Vec3> gt_t;
  std::vector<Eigen::Vector4d> pred_q;  // hemisphere aligned
  std::vector<Eigen::Vector4d> gt_q;
  double sp = 1.0;
  double sg = 1.0;
  double w_ate = 1.0, w_rpe = 1.0, w_acc = 1.0;

  static std::vector<Eigen::Vector4d> aligned(const Trajectory& t) {
    std::vector<Eigen::Vector4d> out;
    for (const auto& p : t) {
      Eigen::Vector4d q(p.q.w, p.q.x, p.q.y, p.q.z);
      if (!out.empty() && q.dot(out.back()) < 0.0) q = -q;
      out.push_back(q);
    }
    return out;
  }

  FrozenPoseLoss(const Trajectory& pred, const Trajectory& gt, double wa, double wr, double ws)
      : w_ate(wa), w_rpe(wr), w_acc(ws) {
    double sum_p = 0.0, sum_g = 0.0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      gt_t.push_back(gt[i].t);
      sum_p += pred[i].t.norm();
      sum_g += gt[i].t.norm();
    }
    sp = std::max(sum_p / static_cast<double>(gt.size()), 1e-8);
    sg = std::max(sum_g / static_cast<double>(gt.size()), 1e-8);
    pred_q = aligned(pred);
    gt_q = aligned(gt);
  }

  double operator()(const std::vector<Vec3>& x) const {
    const auto n = x.size();
    double ate = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ate += (x[i] / sp - gt_t[i] / sg).norm() + 1.0 - std::abs(pred_q[i].dot(gt_q[i]));
    }
    ate /= static_cast<double>(n);
    double rpe = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      rpe += ((x[i] - x[i - 1]) - (gt_t[i] - gt_t[i - 1])).norm() +
             ((pred_q[i] - pred_q[i - 1]) - (gt_q[i] - gt_q[i - 1])).norm();
    }
    rpe /= static_cast<double>(n - 1);
    double acc = 0.0;
    for (std::size_t i = 2; i < n; ++i) {
      acc += (x[i] - 2.0 * x[i - 1] + x[i - 2]).norm() +
             (pred_q[i] - 2.0 * pred_q[i - 1] + pred_q[i - 2]).norm();
    }
    acc /= static_cast<double>(n - 2);
    return w_ate * ate + w_rpe * rpe + w_acc * acc;
  }
};

// ─── depth ───────────────────────────────────────────────────────────────────

/// Gaussian blur restricted to valid pixels inside the (2w+1)² window.
inline std::vector<double> truncated_gaussian_blur(const streamstab::DepthMap& m, int window,
                                                   double sigma_s) {
  std::vector<double> out = m.depths;
  const long w = static_cast<long>(m.width);
  const long h = static_cast<long>(m.height);
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      if (!m.valid[static_cast<std::size_t>(y * w + x)]) continue;
      double num = 0.0, den = 0.0;
      for (long dy = -window; dy <= window; ++dy) {
        for (long dx = -window; dx <= window; ++dx) {
          const long qx = x + dx, qy = y + dy;
          if (qx < 0 || qy < 0 || qx >= w || qy >= h) continue;
          const auto qi = static_cast<std::size_t>(qy * w + qx);
          if (!m.valid[qi]) continue;
          const double g = std::exp(-static_cast<double>(dx * dx + dy * dy) / (2.0 * sigma_s * sigma_s));
          num += g * m.depths[qi];
          den += g;
        }
      }
      out[static_cast<std::size_t>(y * w + x)] = num / den;
    }
  }
  return out;
}

// ─── alignment ───────────────────────────────────────────────────────────────

/// Horn's closed-form absolute orientation: the rotation is the top
/// eigenvector of a symmetric 4×4 matrix rather than an SVD.
inline streamstab::Similarity3 horn_align(const std::vector<Vec3>& src,
                                          const std::vector<Vec3>& dst, bool with_scale) {
  const auto n = static_cast<double>(src.size());
  Vec3 ms = Vec3::Zero(), md = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    ms += src[i] / n;
    md += dst[i] / n;
  }
  streamstab::Mat3 s = streamstab::Mat3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) s += (src[i] - ms) * (dst[i] - md).transpose();
  Eigen::Matrix4d m;
  m << s(0, 0) + s(1, 1) + s(2, 2), s(1, 2) - s(2, 1), s(2, 0) - s(0, 2), s(0, 1) - s(1, 0),
      s(1, 2) - s(2, 1), s(0, 0) - s(1, 1) - s(2, 2), s(0, 1) + s(1, 0), s(2, 0) + s(0, 2),
      s(2, 0) - s(0, 2), s(0, 1) + s(1, 0), -s(0, 0) + s(1, 1) - s(2, 2), s(1, 2) + s(2, 1),
      s(0, 1) - s(1, 0), s(2, 0) + s(0, 2), s(1, 2) + s(2, 1), -s(0, 0) - s(1, 1) + s(2, 2);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(m);
  const Eigen::Vector4d q = eig.eigenvectors().col(3);
  streamstab::Similarity3 out;
  out.rotation = Quaternion{q[0], q[1], q[2], q[3]}.to_rotation_matrix();
  if (with_scale) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
      num += (dst[i] - md).dot(out.rotation * (src[i] - ms));
      den += (src[i] - ms).squaredNorm();
    }
    out.scale = num / den;
  }
  out.translation = md - out.scale * out.rotation * ms;
  return out;
}

// ─── reconstruction ──────────────────────────────────────────────────────────

/// Indices of the k closest points, ordered by (squared distance, index).
inline std::vector<std::size_t> brute_knn(const std::vector<Vec3>& pts, const Vec3& q,
                                          std::size_t k) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < pts.size(); ++i) all.emplace_back((pts[i] - q).squaredNorm(), i);
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < std::min(k, all.size()); ++i) out.push_back(all[i].second);
  return out;
}

inline std::vector<Vec3> pca_normals(const std::vector<Vec3>& pts, std::size_t k) {
  std::vector<Vec3> normals;
  for (const auto& p : pts) {
    const auto nb = brute_knn(pts, p, k + 1);
    Vec3 mean = Vec3::Zero();
    for (auto i : nb) mean += pts[i];
    mean /= static_cast<double>(nb.size());
    streamstab::Mat3 cov = streamstab::Mat3::Zero();
    for (auto i : nb) cov += (pts[i] - mean) * (pts[i] - mean).transpose();
    const Eigen::SelfAdjointEigenSolver<streamstab::Mat3> eig(cov);
    Vec3 n = eig.eigenvectors().col(0);
    if (n.dot(-p) < 0.0) n = -n;
    normals.push_back(n);
  }
  return normals;
}

inline streamstab::ReconMetrics recon(const std::vector<Vec3>& pred, const std::vector<Vec3>& gt,
                                      std::size_t k) {
  const auto np = pca_normals(pred, k);
  const auto ng = pca_normals(gt, k);
  streamstab::ReconMetrics m;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto j = brute_knn(gt, pred[i], 1)[0];
    m.acc += std::sqrt((gt[j] - pred[i]).squaredNorm());
    m.nc += std::abs(np[i].dot(ng[j]));
  }
  for (const auto& g : gt) {
    const auto j = brute_knn(pred, g, 1)[0];
    m.comp += std::sqrt((pred[j] - g).squaredNorm());
  }
  m.acc /= static_cast<double>(pred.size());
  m.nc /= static_cast<double>(pred.size());
  m.comp /= static_cast<double>(gt.size());
  return m;
}

}  // namespace oracle
