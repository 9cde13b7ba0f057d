#pragma once

// Fast-weight memory updated once per frame: S ← S − β·∇(S, X).
//
// The gradient is the delta rule of a linear associative memory,
// ∇ = (S·k − v)·kᵀ, i.e. the gradient of ½‖S·k − v‖². β comes from the frame
// scorer, so frames with little new viewpoint information barely touch the
// state.

#include "streamstab/frame_scoring.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace streamstab {

/// n×c state matrix; its shape is fixed for the lifetime of a stream.
struct MemoryState {
  Eigen::MatrixXd values;

  MemoryState() = default;
  MemoryState(Eigen::Index n, Eigen::Index c) : values(Eigen::MatrixXd::Zero(n, c)) {}
  explicit MemoryState(Eigen::MatrixXd v) : values(std::move(v)) {}

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index c() const { return values.cols(); }
};

struct Observation {
  Eigen::VectorXd key;    // length c
  Eigen::VectorXd value;  // length n
};

/// (S·k − v)·kᵀ. Throws DimensionMismatch.
Eigen::MatrixXd associative_gradient(const MemoryState& state, const Observation& obs);

/// S − β·G. Throws DimensionMismatch, InvalidArgument for non-finite β.
MemoryState apply_update(const MemoryState& state, const Eigen::MatrixXd& gradient, double beta);

struct StepResult {
  MemoryState state;
  double beta = 0.0;
};

StepResult stream_step(const MemoryState& state, const Pose& prev, const Pose& cur,
                       const GrayImage& img, const Observation& obs, const ScoreConfig& cfg);

/// Mean relative recall error ‖S·k − v‖ / max(‖v‖, 1e-12). Throws EmptySet.
double recall_error(const MemoryState& state, std::span<const Observation> observations);

// Synthetic streams for studying forgetting under different update policies.

struct UpdatePolicy {
  enum class Kind { Adaptive, Constant };
  Kind kind = Kind::Adaptive;
  double constant_beta = 1.0;

  /// Parses "adaptive" or "constant:<beta>". Throws InvalidArgument.
  static UpdatePolicy parse(const std::string& text);
};

struct SimulationConfig {
  std::size_t frames = 100;
  std::size_t state_dim = 64;  // n = c
  std::uint64_t seed = 0;
  UpdatePolicy policy;
  std::size_t image_size = 32;  // synthetic frames are square
  ScoreConfig score;
};

struct SimulationRow {
  std::size_t step = 0;
  double beta = 0.0;
  double recall_first = 0.0;
  double recall_latest = 0.0;
};

/// Keys come in blocks of `state_dim` orthonormal vectors (a fresh random
/// basis per block); values are standard normal. Under the adaptive policy
/// each frame also gets a synthetic camera pose and image: the camera mostly
/// creeps forward with occasional jumps, and image texture varies per frame.
std::vector<SimulationRow> simulate_stream(const SimulationConfig& cfg);

void write_simulation_csv(std::ostream& out, std::span<const SimulationRow> rows);

}  // namespace streamstab
