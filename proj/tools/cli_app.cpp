#include "cli_app.hpp"

#include "streamstab/errors.hpp"
#include "streamstab/eval_metrics.hpp"
#include "streamstab/format.hpp"
#include "streamstab/frame_scoring.hpp"
#include "streamstab/io_formats.hpp"
#include "streamstab/spatial_refine.hpp"
#include "streamstab/stabilization.hpp"
#include "streamstab/state_update.hpp"
#include "streamstab/trajectory_losses.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>

namespace streamstab::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kSubcommands = {"score",      "stabilize",  "refine",
                                               "eval-traj",  "eval-depth", "eval-recon",
                                               "eval-loss",  "simulate"};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

/// Flat key=value file, '#' comments. Keys are long option names without
/// the leading dashes.
std::vector<std::string> config_arguments(const fs::path& path) {
  const auto text = io::read_file(path);
  std::vector<std::string> args;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = trim(std::string_view(text).substr(pos, nl == std::string::npos ? std::string::npos : nl - pos));
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    const auto key = eq == std::string::npos ? std::string{} : trim(line.substr(0, eq));
    if (key.empty() || key.front() == '-') {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    args.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
  }
  return args;
}

/// Splices config-file values in front of the command-line flags so that
/// explicit flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<fs::path> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file argument");
      config = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!config) return args;
  const auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) {
    return std::find(kSubcommands.begin(), kSubcommands.end(), a) != kSubcommands.end();
  });
  if (sub == args.end()) throw UsageError("--config needs a subcommand");
  const auto extra = config_arguments(*config);
  args.insert(sub + 1, extra.begin(), extra.end());
  return args;
}

void add_config_option(CLI::App* app) {
  // Consumed by expand_config before parsing; declared here for --help.
  static std::string unused;
  app->add_option("--config", unused, "key=value file with defaults for this command's flags "
                              "(long names without dashes); explicit flags override");
}

std::string csv(double v) { return format_real(v); }

/// Frame files from a directory (*.pgm, lexicographic) or a list file
/// (one path per line, relative to the list).
std::vector<fs::path> frame_paths(const fs::path& source) {
  std::vector<fs::path> out;
  if (fs::is_directory(source)) {
    for (const auto& entry : fs::directory_iterator(source)) {
      if (entry.is_regular_file() && entry.path().extension() == ".pgm") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
      return a.filename().string() < b.filename().string();
    });
    return out;
  }
  const auto text = io::read_file(source);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = trim(std::string_view(text).substr(pos, nl == std::string::npos ? std::string::npos : nl - pos));
    pos = nl == std::string::npos ? text.size() : nl + 1;
    if (line.empty() || line.front() == '#') continue;
    out.push_back(source.parent_path() / line);
  }
  return out;
}

Trajectory load_trajectory(const std::string& path) {
  try {
    return io::read_trajectory_tum(io::read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

template <typename F>
auto load_with_path(const std::string& path, F&& reader) {
  try {
    return reader(io::read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    throw Error(e.code(), path + ": " + e.what());
  }
}

// ─── score ───────────────────────────────────────────────────────────────────

struct ScoreArgs {
  std::string traj;
  std::string frames;
  ScoreConfig cfg;
  double radius = 0.0;
};

void run_score(const ScoreArgs& a, std::ostream& out) {
  const auto traj = load_trajectory(a.traj);
  const auto paths = frame_paths(a.frames);
  if (paths.size() != traj.size()) {
    throw Error(ErrorCode::CountMismatch, std::to_string(paths.size()) + " frames for " +
                                              std::to_string(traj.size()) + " poses");
  }
  ScoreConfig cfg = a.cfg;
  if (a.radius > 0.0) cfg.radius = a.radius;

  out << "index,delta_x,delta_q,s1,R,s2,weight\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto img = load_with_path(paths[i].string(), io::read_pgm);
    const auto s = i == 0 ? score_first_frame_detailed(img, cfg)
                          : score_frame_detailed(traj[i - 1], traj[i], img, cfg);
    out << i << ',' << csv(s.delta_x) << ',' << csv(s.delta_q) << ',' << csv(s.s1) << ','
        << csv(s.ratio) << ',' << csv(s.s2) << ',' << csv(s.weight) << '\n';
  }
}

// ─── stabilize ───────────────────────────────────────────────────────────────

struct StabilizeArgs {
  std::string in;
  std::string out;
  OneEuroConfig cfg;
};

void run_stabilize(const StabilizeArgs& a) {
  const auto traj = load_trajectory(a.in);
  io::write_file(a.out, io::write_trajectory_tum(stabilize_trajectory(traj, a.cfg)));
}

// ─── refine ──────────────────────────────────────────────────────────────────

struct RefineArgs {
  std::string in;
  std::string out;
  std::string ply;
  int window = 2;
  double sigma_s = 1.5;
  double sigma_r = 0.0;
  bool sigma_r_adaptive = false;
  double adaptive_factor = 0.05;
  std::string distance = "pixel";
  std::string average = "neighbor";
  std::optional<double> fx, fy, cx, cy;
};

bool is_ply(const std::string& path) { return fs::path(path).extension() == ".ply"; }

void run_refine(const RefineArgs& a) {
  const bool wants_cloud = is_ply(a.out) || !a.ply.empty();
  const bool have_k = a.fx && a.fy && a.cx && a.cy;
  if ((wants_cloud || a.distance == "point") && !have_k) {
    throw UsageError("point-cloud output and --distance point need --fx --fy --cx --cy");
  }
  BilateralConfig cfg;
  cfg.window = a.window;
  cfg.sigma_s = a.sigma_s;
  if (!a.sigma_r_adaptive && a.sigma_r > 0.0) cfg.sigma_r = a.sigma_r;
  cfg.adaptive_sigma_r_factor = a.adaptive_factor;
  cfg.distance = a.distance == "point" ? BilateralConfig::Distance::BackProjected
                                       : BilateralConfig::Distance::Pixel;
  cfg.average = a.average == "center" ? BilateralConfig::Average::Center
                                      : BilateralConfig::Average::Neighbor;
  Intrinsics k;
  if (have_k) {
    k = {*a.fx, *a.fy, *a.cx, *a.cy};
    cfg.intrinsics = k;
  }

  const auto map = load_with_path(a.in, io::read_pfm);
  const auto filtered = bilateral_depth(map, cfg);
  if (is_ply(a.out)) {
    io::write_file(a.out, io::write_ply_ascii(depth_to_points(filtered, k)));
  } else {
    io::write_file(a.out, io::write_pfm(filtered));
  }
  if (!a.ply.empty()) io::write_file(a.ply, io::write_ply_ascii(depth_to_points(filtered, k)));
}

// ─── eval-* ──────────────────────────────────────────────────────────────────

struct EvalTrajArgs {
  std::string pred;
  std::string gt;
  std::vector<std::size_t> prefixes;
  std::string align = "se3";
};

void run_eval_traj(const EvalTrajArgs& a, std::ostream& out, std::ostream& err) {
  const auto pred = load_trajectory(a.pred);
  const auto gt = load_trajectory(a.gt);
  if (pred.size() != gt.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(pred.size()) + " predicted poses vs " +
                                               std::to_string(gt.size()) + " ground-truth poses");
  }
  std::vector<std::size_t> prefixes = a.prefixes;
  if (prefixes.empty()) prefixes.push_back(pred.size());
  const bool sim3 = a.align == "sim3";

  out << "frames,ate,rpe_trans,rpe_rot_deg\n";
  for (auto k : prefixes) {
    if (k > pred.size()) {
      err << "warning: --prefix-frames " << k << " exceeds the " << pred.size()
          << " available frames; clamping\n";
      k = pred.size();
    }
    const auto p = pred.prefix(k);
    const auto g = gt.prefix(k);
    const double ate = metric_ate(p, g, sim3);
    const auto rpe = metric_rpe(p, g);
    out << k << ',' << csv(ate) << ',' << csv(rpe.trans) << ',' << csv(rpe.rot_deg) << '\n';
  }
}

struct EvalDepthArgs {
  std::string pred;
  std::string gt;
  std::string mode = "all";
};

void run_eval_depth(const EvalDepthArgs& a, std::ostream& out) {
  const auto pred = load_with_path(a.pred, io::read_pfm);
  const auto gt = load_with_path(a.gt, io::read_pfm);
  std::vector<DepthEvalMode> modes;
  if (a.mode == "all") {
    modes = {DepthEvalMode::Original, DepthEvalMode::Scale, DepthEvalMode::ScaleAndShift};
  } else {
    modes = {parse_depth_eval_mode(a.mode)};
  }
  out << "mode,abs_rel,delta_125\n";
  for (auto m : modes) {
    const auto r = metric_depth(pred, gt, m);
    out << to_string(m) << ',' << csv(r.abs_rel) << ',' << csv(r.delta_125) << '\n';
  }
}

struct EvalReconArgs {
  std::string pred;
  std::string gt;
  std::size_t k_normals = 16;
};

void run_eval_recon(const EvalReconArgs& a, std::ostream& out) {
  const auto pred = load_with_path(a.pred, io::read_ply_ascii);
  const auto gt = load_with_path(a.gt, io::read_ply_ascii);
  const auto r = metric_recon(pred, gt, a.k_normals);
  out << "acc,comp,nc\n" << csv(r.acc) << ',' << csv(r.comp) << ',' << csv(r.nc) << '\n';
}

struct EvalLossArgs {
  std::string pred;
  std::string gt;
  std::string pred_cloud, gt_cloud;
  std::string pred_rgb, gt_rgb;
  LossWeights w;
};

void run_eval_loss(const EvalLossArgs& a, std::ostream& out) {
  if (a.pred_cloud.empty() != a.gt_cloud.empty()) {
    throw UsageError("--pred-cloud and --gt-cloud go together");
  }
  if (a.pred_rgb.empty() != a.gt_rgb.empty()) {
    throw UsageError("--pred-rgb and --gt-rgb go together");
  }
  const auto pred = load_trajectory(a.pred);
  const auto gt = load_trajectory(a.gt);
  const double ate = loss_ate(pred, gt);
  const double rpe = loss_rpe(pred, gt);
  const double acc = loss_acc(pred);
  const double pose = a.w.w_ate * ate + a.w.w_rpe * rpe + a.w.w_acc * acc;
  double conf = 0.0;
  if (!a.pred_cloud.empty()) {
    conf = loss_conf(load_with_path(a.pred_cloud, io::read_ply_ascii),
                     load_with_path(a.gt_cloud, io::read_ply_ascii), a.w.alpha_conf);
  }
  double rgb = 0.0;
  if (!a.pred_rgb.empty()) {
    const auto p = load_with_path(a.pred_rgb, io::read_pgm);
    const auto g = load_with_path(a.gt_rgb, io::read_pgm);
    if (p.width != g.width || p.height != g.height) {
      throw Error(ErrorCode::ShapeMismatch, "RGB rasters differ in size");
    }
    rgb = loss_rgb(p.pixels, g.pixels);
  }
  out << "ate,rpe,acc,pose,conf,rgb,total\n"
      << csv(ate) << ',' << csv(rpe) << ',' << csv(acc) << ',' << csv(pose) << ',' << csv(conf)
      << ',' << csv(rgb) << ',' << csv(loss_total(conf, rgb, pose, a.w)) << '\n';
}

// ─── simulate ────────────────────────────────────────────────────────────────

struct SimulateArgs {
  SimulationConfig cfg;
  std::string policy = "adaptive";
};

void run_simulate(SimulateArgs a, std::ostream& out) {
  a.cfg.policy = UpdatePolicy::parse(a.policy);
  write_simulation_csv(out, simulate_stream(a.cfg));
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming reconstruction stabilization and evaluation toolkit", "streamstab"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);

  ScoreArgs score;
  auto* cmd_score = app.add_subcommand("score", "Per-frame adaptive update weights as CSV");
  cmd_score->add_option("--traj", score.traj, "TUM trajectory")->required();
  cmd_score->add_option("--frames", score.frames,
                        "Directory of .pgm frames (lexicographic order) or a list file")
      ->required();
  cmd_score->add_option("--w1", score.cfg.w1, "Translation weight")->check(CLI::NonNegativeNumber);
  cmd_score->add_option("--w2", score.cfg.w2, "Rotation weight (per radian)")
      ->check(CLI::NonNegativeNumber);
  cmd_score->add_option("--radius", score.radius,
                        "High-pass radius in pixels; 0 selects max(1, floor(min(W,H)/8))")
      ->check(CLI::NonNegativeNumber);
  cmd_score->add_option("--clip-max", score.cfg.clip_max, "Upper clip of the weight")
      ->check(CLI::NonNegativeNumber);
  cmd_score->add_option("--initial-weight", score.cfg.initial_weight, "Weight of the first frame")
      ->check(CLI::NonNegativeNumber);
  cmd_score->add_option("--sigmoid-gain", score.cfg.sigmoid_gain, "Quality sigmoid gain")
      ->check(CLI::PositiveNumber);
  cmd_score->add_option("--sigmoid-midpoint", score.cfg.sigmoid_midpoint,
                        "Quality sigmoid midpoint");
  cmd_score->add_option("--epsilon", score.cfg.epsilon, "Ratio denominator guard")
      ->check(CLI::NonNegativeNumber);
  add_config_option(cmd_score);

  StabilizeArgs stab;
  auto* cmd_stab = app.add_subcommand("stabilize", "Causal One Euro + slerp trajectory smoothing");
  cmd_stab->add_option("--in", stab.in, "Input TUM trajectory")->required();
  cmd_stab->add_option("--out", stab.out, "Output TUM trajectory")->required();
  cmd_stab->add_option("--fmin", stab.cfg.f_min, "Minimum cutoff frequency (Hz)")
      ->check(CLI::PositiveNumber);
  cmd_stab->add_option("--beta-gain", stab.cfg.beta_gain, "Cutoff gain per unit speed")
      ->check(CLI::NonNegativeNumber);
  cmd_stab->add_option("--default-dt", stab.cfg.default_dt,
                       "Frame interval (s) when timestamps do not advance")
      ->check(CLI::PositiveNumber);
  add_config_option(cmd_stab);

  RefineArgs refine;
  auto* cmd_refine = app.add_subcommand("refine", "Bilateral depth filtering, PFM/PLY output");
  cmd_refine->add_option("--in", refine.in, "Input PFM depth map")->required();
  cmd_refine->add_option("--out", refine.out, "Output file; .ply writes a point cloud, else PFM")
      ->required();
  cmd_refine->add_option("--ply", refine.ply, "Additional point-cloud output");
  cmd_refine->add_option("--window", refine.window, "Half-width of the square neighborhood")
      ->check(CLI::PositiveNumber);
  cmd_refine->add_option("--sigma-s", refine.sigma_s, "Spatial sigma (pixels, or scene units "
                                                      "with --distance point)")
      ->check(CLI::PositiveNumber);
  auto* sr = cmd_refine->add_option("--sigma-r", refine.sigma_r, "Fixed range sigma (depth units)")
                 ->check(CLI::PositiveNumber);
  auto* sra = cmd_refine->add_flag("--sigma-r-adaptive", refine.sigma_r_adaptive,
                                   "Range sigma = adaptive factor x median depth (the default "
                                   "when --sigma-r is absent)");
  sr->excludes(sra);
  cmd_refine->add_option("--adaptive-factor", refine.adaptive_factor,
                         "Median-depth multiplier for the adaptive range sigma")
      ->check(CLI::PositiveNumber);
  cmd_refine->add_option("--distance", refine.distance, "Spatial distance: pixel or point")
      ->check(CLI::IsMember({"pixel", "point"}));
  cmd_refine->add_option("--average", refine.average,
                         "Averaged depth: neighbor (bilateral) or center (identity reference)")
      ->check(CLI::IsMember({"neighbor", "center"}));
  cmd_refine->add_option("--fx", refine.fx, "Focal length x (pixels)")->check(CLI::PositiveNumber);
  cmd_refine->add_option("--fy", refine.fy, "Focal length y (pixels)")->check(CLI::PositiveNumber);
  cmd_refine->add_option("--cx", refine.cx, "Principal point x (pixels)");
  cmd_refine->add_option("--cy", refine.cy, "Principal point y (pixels)");
  add_config_option(cmd_refine);

  EvalTrajArgs etraj;
  auto* cmd_etraj = app.add_subcommand("eval-traj", "ATE / RPE of a predicted trajectory");
  cmd_etraj->add_option("--pred", etraj.pred, "Predicted TUM trajectory")->required();
  cmd_etraj->add_option("--gt", etraj.gt, "Ground-truth TUM trajectory")->required();
  cmd_etraj->add_option("--prefix-frames", etraj.prefixes,
                        "Comma-separated prefix lengths, one CSV row each (default: all frames)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  cmd_etraj->add_option("--align", etraj.align, "Alignment for ATE: se3 or sim3")
      ->check(CLI::IsMember({"se3", "sim3"}));
  add_config_option(cmd_etraj);

  EvalDepthArgs edepth;
  auto* cmd_edepth = app.add_subcommand("eval-depth", "Abs Rel and delta<1.25 of a depth map");
  cmd_edepth->add_option("--pred", edepth.pred, "Predicted PFM depth")->required();
  cmd_edepth->add_option("--gt", edepth.gt, "Ground-truth PFM depth")->required();
  cmd_edepth->add_option("--mode", edepth.mode, "original, scale, scale_and_shift or all")
      ->check(CLI::IsMember({"original", "scale", "scale_and_shift", "all"}));
  add_config_option(cmd_edepth);

  EvalReconArgs erecon;
  auto* cmd_erecon = app.add_subcommand("eval-recon", "Accuracy, completeness, normal consistency");
  cmd_erecon->add_option("--pred", erecon.pred, "Predicted ASCII PLY cloud")->required();
  cmd_erecon->add_option("--gt", erecon.gt, "Ground-truth ASCII PLY cloud")->required();
  cmd_erecon->add_option("--k-normals", erecon.k_normals, "Neighbors for PCA normals")
      ->check(CLI::PositiveNumber);
  add_config_option(cmd_erecon);

  EvalLossArgs eloss;
  auto* cmd_eloss = app.add_subcommand("eval-loss", "Training-loss components and totals");
  cmd_eloss->add_option("--pred", eloss.pred, "Predicted TUM trajectory")->required();
  cmd_eloss->add_option("--gt", eloss.gt, "Ground-truth TUM trajectory")->required();
  cmd_eloss->add_option("--pred-cloud", eloss.pred_cloud, "Predicted PLY with confidence");
  cmd_eloss->add_option("--gt-cloud", eloss.gt_cloud, "Ground-truth PLY");
  cmd_eloss->add_option("--pred-rgb", eloss.pred_rgb, "Predicted PGM raster");
  cmd_eloss->add_option("--gt-rgb", eloss.gt_rgb, "Ground-truth PGM raster");
  cmd_eloss->add_option("--w-ate", eloss.w.w_ate, "Weight of the ATE term")
      ->check(CLI::NonNegativeNumber);
  cmd_eloss->add_option("--w-rpe", eloss.w.w_rpe, "Weight of the RPE term")
      ->check(CLI::NonNegativeNumber);
  cmd_eloss->add_option("--w-acc", eloss.w.w_acc, "Weight of the acceleration term")
      ->check(CLI::NonNegativeNumber);
  cmd_eloss->add_option("--lambda-conf", eloss.w.lambda_conf, "Weight of the confidence loss")
      ->check(CLI::NonNegativeNumber);
  cmd_eloss->add_option("--lambda-rgb", eloss.w.lambda_rgb, "Weight of the RGB loss")
      ->check(CLI::NonNegativeNumber);
  cmd_eloss->add_option("--lambda-pose", eloss.w.lambda_pose, "Weight of the pose loss")
      ->check(CLI::NonNegativeNumber);
  cmd_eloss->add_option("--alpha-conf", eloss.w.alpha_conf, "Confidence regularizer alpha")
      ->check(CLI::PositiveNumber);
  add_config_option(cmd_eloss);

  SimulateArgs sim;
  auto* cmd_sim = app.add_subcommand("simulate", "Synthetic fast-weight stream, recall per step");
  cmd_sim->add_option("--frames", sim.cfg.frames, "Number of frames")->check(CLI::PositiveNumber);
  cmd_sim->add_option("--state-dim", sim.cfg.state_dim, "State size n = c")
      ->check(CLI::PositiveNumber);
  cmd_sim->add_option("--seed", sim.cfg.seed, "Random seed");
  cmd_sim->add_option("--policy", sim.policy, "adaptive or constant:<beta>");
  cmd_sim->add_option("--image-size", sim.cfg.image_size, "Side of the synthetic square frames")
      ->check(CLI::Range(4, 4096));
  add_config_option(cmd_sim);

  try {
    auto args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (cmd_score->parsed()) run_score(score, out);
    else if (cmd_stab->parsed()) run_stabilize(stab);
    else if (cmd_refine->parsed()) run_refine(refine);
    else if (cmd_etraj->parsed()) run_eval_traj(etraj, out, err);
    else if (cmd_edepth->parsed()) run_eval_depth(edepth, out);
    else if (cmd_erecon->parsed()) run_eval_recon(erecon, out);
    else if (cmd_eloss->parsed()) run_eval_loss(eloss, out);
    else if (cmd_sim->parsed()) run_simulate(sim, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (e.code() == ErrorCode::InvalidArgument) return kUsageError;
    return is_input_error(e.code()) ? kUsageError : kNumericalError;
  }
  return kSuccess;
}

}  // namespace streamstab::cli
