#include "oracles.hpp"
#include "unit/support.hpp"

#include "streamstab/spatial_refine.hpp"

#include <doctest.h>

#include <cmath>

using namespace streamstab;
using doctest::Approx;

namespace {

DepthMap random_map(std::size_t w, std::size_t h, std::mt19937_64& rng, double lo = 0.5,
                    double hi = 5.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  DepthMap m(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) m.set(x, y, u(rng));
  }
  return m;
}

DepthMap step_map() {
  DepthMap m(32, 32, 1.0);
  for (std::size_t y = 0; y < 32; ++y) {
    for (std::size_t x = 16; x < 32; ++x) m.set(x, y, 10.0);
  }
  return m;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

TEST_SUITE("spatial_refine") {

TEST_CASE("constant map is unchanged") {
  BilateralConfig cfg;
  const DepthMap m(20, 10, 3.25);
  CHECK(max_diff(bilateral_depth(m, cfg).depths, m.depths) <= 1e-12);
  cfg.sigma_r = 0.01;
  cfg.window = 4;
  CHECK(max_diff(bilateral_depth(m, cfg).depths, m.depths) <= 1e-12);
}

TEST_CASE("huge range sigma reduces to a Gaussian blur") {
  std::mt19937_64 rng(61);
  auto m = random_map(17, 11, rng);
  m.set(5, 5, 0.0);
  m.set(0, 10, std::nan(""));
  for (const int window : {1, 2, 3}) {
    BilateralConfig cfg;
    cfg.window = window;
    cfg.sigma_s = 1.7;
    cfg.sigma_r = 1e12;
    CHECK(max_diff(bilateral_depth(m, cfg).depths, oracle::truncated_gaussian_blur(m, window, 1.7)) <=
          1e-9);
  }
}

TEST_CASE("step edge is preserved") {
  BilateralConfig cfg;
  cfg.sigma_r = 0.1;
  const auto m = step_map();
  CHECK(max_diff(bilateral_depth(m, cfg).depths, m.depths) < 1e-6);
}

TEST_CASE("adaptive range sigma follows the median depth") {
  const auto m = step_map();
  BilateralConfig cfg;
  CHECK(effective_sigma_r(m, cfg) == Approx(0.05 * 5.5));
  CHECK(effective_sigma_r(DepthMap(3, 3, 4.0), cfg) == Approx(0.2));
  cfg.sigma_r = 0.7;
  CHECK(effective_sigma_r(m, cfg) == 0.7);
  // Adaptive mode also keeps the edge.
  CHECK(max_diff(bilateral_depth(m, BilateralConfig{}).depths, m.depths) < 1e-6);
}

TEST_CASE("outputs stay inside the window range") {
  std::mt19937_64 rng(62);
  const auto m = random_map(15, 12, rng);
  BilateralConfig cfg;
  cfg.sigma_r = 0.8;
  const auto out = bilateral_depth(m, cfg);
  const long w = 15, h = 12;
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      double lo = 1e300, hi = -1e300;
      for (long qy = std::max(0L, y - 2); qy <= std::min(h - 1, y + 2); ++qy) {
        for (long qx = std::max(0L, x - 2); qx <= std::min(w - 1, x + 2); ++qx) {
          lo = std::min(lo, m.depth(qx, qy));
          hi = std::max(hi, m.depth(qx, qy));
        }
      }
      CHECK(out.depth(x, y) >= lo - 1e-12);
      CHECK(out.depth(x, y) <= hi + 1e-12);
    }
  }
}

TEST_CASE("global depth offset commutes with the filter") {
  std::mt19937_64 rng(63);
  const auto m = random_map(16, 16, rng);
  BilateralConfig cfg;
  cfg.sigma_r = 0.5;
  auto shifted = m;
  for (auto& d : shifted.depths) d += 2.5;
  const auto a = bilateral_depth(shifted, cfg);
  auto b = bilateral_depth(m, cfg);
  for (auto& d : b.depths) d += 2.5;
  CHECK(max_diff(a.depths, b.depths) <= 1e-9);
}

TEST_CASE("validity mask is preserved and invalid pixels pass through") {
  std::mt19937_64 rng(64);
  auto m = random_map(12, 9, rng);
  m.set(3, 3, 0.0);
  m.set(7, 2, -1.0);
  m.set(11, 8, std::numeric_limits<double>::infinity());
  const auto out = bilateral_depth(m, BilateralConfig{});
  CHECK(out.valid == m.valid);
  CHECK(out.depth(7, 2) == -1.0);
  CHECK(out.depth(3, 3) == 0.0);
}

TEST_CASE("tiny spatial sigma is the identity") {
  std::mt19937_64 rng(65);
  const auto m = random_map(10, 10, rng);
  BilateralConfig cfg;
  cfg.sigma_s = 1e-6;
  CHECK(max_diff(bilateral_depth(m, cfg).depths, m.depths) <= 1e-9);
}

TEST_CASE("center averaging mode is the identity") {
  std::mt19937_64 rng(66);
  const auto m = random_map(10, 8, rng);
  BilateralConfig cfg;
  cfg.average = BilateralConfig::Average::Center;
  CHECK(max_diff(bilateral_depth(m, cfg).depths, m.depths) <= 1e-12);
}

TEST_CASE("back-projected distance mode") {
  const auto m = step_map();
  BilateralConfig cfg;
  cfg.distance = BilateralConfig::Distance::BackProjected;
  CHECK(code_of([&] { bilateral_depth(m, cfg); }) == ErrorCode::InvalidArgument);
  cfg.intrinsics = Intrinsics{30, 30, 16, 16};
  cfg.sigma_s = 0.05;
  cfg.sigma_r = 0.1;
  CHECK(max_diff(bilateral_depth(m, cfg).depths, m.depths) < 1e-6);
  const DepthMap flat(8, 8, 2.0);
  CHECK(max_diff(bilateral_depth(flat, cfg).depths, flat.depths) <= 1e-12);

  // With a huge range sigma this is a blur weighted by 3D distance.
  std::mt19937_64 rng(67);
  const auto noisy = random_map(9, 9, rng, 1.9, 2.1);
  cfg.sigma_r = 1e12;
  cfg.sigma_s = 0.1;
  const auto out = bilateral_depth(noisy, cfg);
  const auto k = *cfg.intrinsics;
  auto point = [&](long x, long y) {
    const double d = noisy.depth(x, y);
    return Vec3((x - k.cx) * d / k.fx, (y - k.cy) * d / k.fy, d);
  };
  double num = 0.0, den = 0.0;
  for (long y = 2; y <= 6; ++y) {
    for (long x = 2; x <= 6; ++x) {
      const double g = std::exp(-(point(x, y) - point(4, 4)).squaredNorm() / (2 * 0.01));
      num += g * noisy.depth(x, y);
      den += g;
    }
  }
  CHECK(out.depth(4, 4) == Approx(num / den).epsilon(1e-12));
}

TEST_CASE("bilateral errors") {
  CHECK(code_of([] { bilateral_depth(DepthMap(4, 4, 0.0), BilateralConfig{}); }) ==
        ErrorCode::NoValidPixels);
  BilateralConfig cfg;
  cfg.window = 0;
  CHECK(code_of([&] { bilateral_depth(DepthMap(4, 4, 1.0), cfg); }) == ErrorCode::InvalidArgument);
  cfg = {};
  cfg.sigma_s = 0.0;
  CHECK(code_of([&] { bilateral_depth(DepthMap(4, 4, 1.0), cfg); }) == ErrorCode::InvalidArgument);
  cfg = {};
  cfg.sigma_r = -1.0;
  CHECK(code_of([&] { bilateral_depth(DepthMap(4, 4, 1.0), cfg); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("isolated pixel survives a vanishing spatial weight") {
  DepthMap m(5, 5, 0.0);
  m.set(2, 2, 3.0);
  BilateralConfig cfg;
  cfg.sigma_s = 1e-200;
  CHECK(bilateral_depth(m, cfg).depth(2, 2) == 3.0);
}

TEST_CASE("noisy plane gets flatter") {
  int better = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 0.02);
    DepthMap plane(32, 24);
    for (std::size_t y = 0; y < 24; ++y) {
      for (std::size_t x = 0; x < 32; ++x) plane.set(x, y, 5.0 + n(rng));
    }
    const Intrinsics k{40, 40, 16, 12};
    const auto before = depth_to_points(plane, k);
    const auto after = refine_cloud(plane, k, BilateralConfig{});
    double e0 = 0.0, e1 = 0.0;
    for (std::size_t i = 0; i < before.size(); ++i) {
      e0 += std::pow(before.points[i].z() - 5.0, 2);
      e1 += std::pow(after.points[i].z() - 5.0, 2);
    }
    if (e1 < e0) ++better;
  }
  CHECK(better >= 95);
}

TEST_CASE("back-projection examples") {
  DepthMap m(5, 5, 0.0);
  m.set(2, 3, 2.0);
  const auto principal = depth_to_points(m, Intrinsics{100, 100, 2, 3});
  REQUIRE(principal.size() == 1);
  CHECK(principal.points[0] == Vec3(0, 0, 2));

  m.set(3, 4, 1.0);
  m.set(2, 3, 0.0);
  const auto unit = depth_to_points(m, Intrinsics{1, 1, 0, 0});
  REQUIRE(unit.size() == 1);
  CHECK(unit.points[0] == Vec3(3, 4, 1));

  CHECK(code_of([&] { depth_to_points(m, Intrinsics{0, 1, 0, 0}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("projection round trip") {
  std::mt19937_64 rng(68);
  const auto m = random_map(13, 7, rng);
  const Intrinsics k{52.5, 48.0, 6.3, 3.1};
  const auto cloud = depth_to_points(m, k);
  std::size_t i = 0;
  for (std::size_t y = 0; y < m.height; ++y) {
    for (std::size_t x = 0; x < m.width; ++x, ++i) {
      const auto& p = cloud.points[i];
      CHECK(k.fx * p.x() / p.z() + k.cx == Approx(static_cast<double>(x)).epsilon(1e-12));
      CHECK(k.fy * p.y() / p.z() + k.cy == Approx(static_cast<double>(y)).epsilon(1e-12));
      CHECK(p.z() == m.depth(x, y));
    }
  }
}

TEST_CASE("refined cloud examples") {
  const Intrinsics k{30, 30, 16, 16};
  const DepthMap flat(10, 10, 4.0);
  const auto a = refine_cloud(flat, k, BilateralConfig{});
  const auto b = depth_to_points(flat, k);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK((a.points[i] - b.points[i]).norm() <= 1e-12);

  BilateralConfig cfg;
  cfg.sigma_r = 0.1;
  const auto step = step_map();
  const auto c = refine_cloud(step, k, cfg);
  const auto d = depth_to_points(step, k);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK((c.points[i] - d.points[i]).norm() < 1e-6);
}

}  // TEST_SUITE
