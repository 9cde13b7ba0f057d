#include "streamstab/state_update.hpp"

#include "streamstab/errors.hpp"
#include "streamstab/format.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <random>

namespace streamstab {

namespace {

void check_dims(const MemoryState& s, const Observation& obs) {
  if (obs.key.size() != s.c() || obs.value.size() != s.n()) {
    throw Error(ErrorCode::DimensionMismatch,
                "state is " + std::to_string(s.n()) + "x" + std::to_string(s.c()) +
                    ", key has " + std::to_string(obs.key.size()) + " entries, value has " +
                    std::to_string(obs.value.size()));
  }
}

double relative_recall(const MemoryState& s, const Observation& obs) {
  check_dims(s, obs);
  return (s.values * obs.key - obs.value).norm() / std::max(obs.value.norm(), 1e-12);
}

}  // namespace

Eigen::MatrixXd associative_gradient(const MemoryState& state, const Observation& obs) {
  check_dims(state, obs);
  const Eigen::VectorXd residual = state.values * obs.key - obs.value;
  return residual * obs.key.transpose();
}

MemoryState apply_update(const MemoryState& state, const Eigen::MatrixXd& gradient, double beta) {
  if (gradient.rows() != state.n() || gradient.cols() != state.c()) {
    throw Error(ErrorCode::DimensionMismatch, "gradient shape differs from state");
  }
  if (!std::isfinite(beta)) throw Error(ErrorCode::InvalidArgument, "beta must be finite");
  if (beta == 0.0) return state;
  return MemoryState(state.values - beta * gradient);
}

StepResult stream_step(const MemoryState& state, const Pose& prev, const Pose& cur,
                       const GrayImage& img, const Observation& obs, const ScoreConfig& cfg) {
  const double beta = score_frame(prev, cur, img, cfg);
  return {apply_update(state, associative_gradient(state, obs), beta), beta};
}

double recall_error(const MemoryState& state, std::span<const Observation> observations) {
  if (observations.empty()) throw Error(ErrorCode::EmptySet, "no observations to recall");
  double sum = 0.0;
  for (const auto& obs : observations) sum += relative_recall(state, obs);
  return sum / static_cast<double>(observations.size());
}

UpdatePolicy UpdatePolicy::parse(const std::string& text) {
  if (text == "adaptive") return {};
  const std::string prefix = "constant:";
  if (text.rfind(prefix, 0) == 0) {
    const auto rest = text.substr(prefix.size());
    std::size_t used = 0;
    double beta = 0.0;
    try {
      beta = std::stod(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == rest.size() && !rest.empty() && beta >= 0.0 && beta <= 1.0) {
      return {Kind::Constant, beta};
    }
  }
  throw Error(ErrorCode::InvalidArgument,
              "policy must be 'adaptive' or 'constant:<beta>' with beta in [0,1], got '" +
                  text + "'");
}

namespace {

class SyntheticStream {
 public:
  explicit SyntheticStream(const SimulationConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  Observation next_observation() {
    const auto d = static_cast<Eigen::Index>(cfg_.state_dim);
    if (basis_used_ == 0 || basis_used_ == cfg_.state_dim) {
      Eigen::MatrixXd raw(d, d);
      for (Eigen::Index i = 0; i < raw.size(); ++i) raw.data()[i] = normal_(rng_);
      basis_ = Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ() *
               Eigen::MatrixXd::Identity(d, d);
      basis_used_ = 0;
    }
    Observation obs;
    obs.key = basis_.col(static_cast<Eigen::Index>(basis_used_++));
    obs.value.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) obs.value[i] = normal_(rng_);
    return obs;
  }

  Pose next_pose(const Pose& prev) {
    Pose p = prev;
    p.timestamp = prev.timestamp + 1.0 / 30.0;
    if (uniform_(rng_) < 0.1) {
      p.t += Vec3(normal_(rng_), normal_(rng_), normal_(rng_)) * 0.5;
      const Vec3 axis(normal_(rng_), normal_(rng_), normal_(rng_));
      p.q = quat_normalize(prev.q * Quaternion::from_axis_angle(axis, 0.3 * uniform_(rng_)));
    } else {
      p.t += Vec3(0.01, 0.0, 0.0) + Vec3(normal_(rng_), normal_(rng_), normal_(rng_)) * 0.002;
    }
    return p;
  }

  /// Smooth gradient plus per-frame noise of random strength.
  GrayImage next_image() {
    const auto n = cfg_.image_size;
    GrayImage img(n, n);
    const double texture = 0.5 * uniform_(rng_);
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t x = 0; x < n; ++x) {
        const double base = 0.25 + 0.5 * static_cast<double>(x + y) / static_cast<double>(2 * n);
        img.at(x, y) = std::clamp(base + texture * normal_(rng_), 0.0, 1.0);
      }
    }
    return img;
  }

 private:
  const SimulationConfig& cfg_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  Eigen::MatrixXd basis_;
  std::size_t basis_used_ = 0;
};

}  // namespace

std::vector<SimulationRow> simulate_stream(const SimulationConfig& cfg) {
  if (cfg.state_dim == 0) throw Error(ErrorCode::InvalidArgument, "state dimension must be positive");
  const auto d = static_cast<Eigen::Index>(cfg.state_dim);
  SyntheticStream stream(cfg);
  MemoryState state(d, d);
  std::vector<Observation> written;
  std::vector<SimulationRow> rows;
  rows.reserve(cfg.frames);
  written.reserve(cfg.frames);
  Pose pose;

  for (std::size_t step = 0; step < cfg.frames; ++step) {
    written.push_back(stream.next_observation());
    double beta = cfg.policy.constant_beta;
    if (cfg.policy.kind == UpdatePolicy::Kind::Adaptive) {
      const GrayImage img = stream.next_image();
      if (step == 0) {
        beta = score_first_frame(img, cfg.score);
      } else {
        const Pose next = stream.next_pose(pose);
        beta = score_frame(pose, next, img, cfg.score);
        pose = next;
      }
    }
    state = apply_update(state, associative_gradient(state, written.back()), beta);
    rows.push_back({step, beta, relative_recall(state, written.front()),
                    relative_recall(state, written.back())});
  }
  return rows;
}

void write_simulation_csv(std::ostream& out, std::span<const SimulationRow> rows) {
  out << "step,beta,recall_first,recall_latest\n";
  for (const auto& r : rows) {
    out << r.step << ',' << format_real(r.beta) << ',' << format_real(r.recall_first) << ','
        << format_real(r.recall_latest) << '\n';
  }
}

}  // namespace streamstab
