#include "streamstab/fft.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>

namespace streamstab::fft {

namespace {

// Prime factors up to this size use the direct O(p²) butterfly.
constexpr std::size_t kBluesteinThreshold = 64;

std::size_t smallest_factor(std::size_t n) {
  if (n % 2 == 0) return 2;
  for (std::size_t f = 3; f * f <= n; f += 2) {
    if (n % f == 0) return f;
  }
  return n;
}

std::vector<std::size_t> large_prime_factors(std::size_t n) {
  std::vector<std::size_t> out;
  while (n > 1) {
    const auto p = smallest_factor(n);
    if (p > kBluesteinThreshold && std::find(out.begin(), out.end(), p) == out.end()) {
      out.push_back(p);
    }
    n /= p;
  }
  return out;
}

// Plain complex product; std::complex's operator* goes through the slow
// NaN-recovery path without -ffast-math.
inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

}  // namespace

// Chirp-z evaluation of a prime-length DFT through a power-of-two convolution.
struct Plan::Bluestein {
  explicit Bluestein(std::size_t n)
      : n(n), conv(next_pow2(2 * n - 1)), chirp(n), kernel(conv.length()),
        buffer(conv.length()) {
    const double pi = std::numbers::pi;
    for (std::size_t k = 0; k < n; ++k) {
      // k² mod 2n keeps the phase argument small.
      const auto k2 = (k * k) % (2 * n);
      const double phase = -pi * static_cast<double>(k2) / static_cast<double>(n);
      chirp[k] = {std::cos(phase), std::sin(phase)};
    }
    const auto m = conv.length();
    std::fill(kernel.begin(), kernel.end(), Complex{});
    kernel[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) {
      kernel[k] = std::conj(chirp[k]);
      kernel[m - k] = std::conj(chirp[k]);
    }
    conv.forward(kernel);
  }

  void run(Complex* data) const {
    const auto m = conv.length();
    std::fill(buffer.begin(), buffer.end(), Complex{});
    for (std::size_t k = 0; k < n; ++k) buffer[k] = mul(data[k], chirp[k]);
    conv.forward(buffer);
    for (std::size_t k = 0; k < m; ++k) buffer[k] = std::conj(mul(buffer[k], kernel[k]));
    conv.forward(buffer);  // inverse via conjugation
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) data[k] = mul(std::conj(buffer[k]) * scale, chirp[k]);
  }

  std::size_t n;
  Plan conv;
  std::vector<Complex> chirp;
  std::vector<Complex> kernel;
  mutable std::vector<Complex> buffer;
};

Plan::Plan(std::size_t length) : length_(length), twiddles_(length), work_(length) {
  assert(length >= 1);
  const double pi = std::numbers::pi;
  for (std::size_t k = 0; k <= length / 2; ++k) {
    Complex w;
    if ((4 * k) % length == 0) {
      // Quarter turns are exact so that zeros stay zeros.
      constexpr Complex kQuarter[] = {{1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}};
      w = kQuarter[4 * k / length];
    } else {
      const double phase = -2.0 * pi * static_cast<double>(k) / static_cast<double>(length);
      w = {std::cos(phase), std::sin(phase)};
    }
    twiddles_[k] = w;
    if (k > 0) twiddles_[length - k] = std::conj(w);
  }
  std::size_t widest = 2;
  for (auto p : large_prime_factors(length)) {
    bluestein_.push_back(std::make_unique<Bluestein>(p));
  }
  for (std::size_t n = length; n > 1;) {
    const auto p = smallest_factor(n);
    if (p <= kBluesteinThreshold) widest = std::max(widest, p);
    n /= p;
  }
  scratch_.resize(widest);
}

Plan::~Plan() = default;
Plan::Plan(Plan&&) noexcept = default;
Plan& Plan::operator=(Plan&&) noexcept = default;

void Plan::forward(std::span<Complex> data) const {
  assert(data.size() == length_);
  std::copy(data.begin(), data.end(), work_.begin());
  recurse(work_.data(), 1, data.data(), length_, 1, scratch_.data());
}

void Plan::recurse(const Complex* in, std::size_t in_stride, Complex* out, std::size_t n,
                   std::size_t twiddle_stride, Complex* scratch) const {
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  if (n == 2) {
    out[0] = in[0] + in[in_stride];
    out[1] = in[0] - in[in_stride];
    return;
  }
  const auto p = smallest_factor(n);
  const Complex* tw = twiddles_.data();

  if (p == n) {
    if (n > kBluesteinThreshold) {
      for (std::size_t j = 0; j < n; ++j) out[j] = in[j * in_stride];
      for (const auto& b : bluestein_) {
        if (b->n == n) {
          b->run(out);
          return;
        }
      }
      assert(false && "missing Bluestein plan");
    }
    for (std::size_t k = 0; k < n; ++k) {
      Complex acc = in[0];
      std::size_t power = k;  // j·k mod n
      for (std::size_t j = 1; j < n; ++j) {
        acc += mul(in[j * in_stride], tw[power * twiddle_stride]);
        power += k;
        if (power >= n) power -= n;
      }
      out[k] = acc;
    }
    return;
  }

  const auto m = n / p;
  for (std::size_t r = 0; r < p; ++r) {
    recurse(in + r * in_stride, in_stride * p, out + r * m, m, twiddle_stride * p, scratch);
  }

  if (p == 2) {
    for (std::size_t k = 0; k < m; ++k) {
      const Complex a = out[k];
      const Complex b = mul(out[k + m], tw[k * twiddle_stride]);
      out[k] = a + b;
      out[k + m] = a - b;
    }
    return;
  }

  const std::size_t root_stride = m * twiddle_stride;  // p-th roots of unity
  for (std::size_t k = 0; k < m; ++k) {
    scratch[0] = out[k];
    for (std::size_t r = 1; r < p; ++r) scratch[r] = mul(out[r * m + k], tw[r * k * twiddle_stride]);
    for (std::size_t q = 0; q < p; ++q) {
      Complex acc = scratch[0];
      std::size_t power = q;  // r·q mod p
      for (std::size_t r = 1; r < p; ++r) {
        acc += mul(scratch[r], tw[power * root_stride]);
        power += q;
        if (power >= p) power -= p;
      }
      out[q * m + k] = acc;
    }
  }
}

void forward_2d(std::span<Complex> data, std::size_t width, std::size_t height) {
  assert(data.size() == width * height);
  const Plan rows(width);
  for (std::size_t y = 0; y < height; ++y) rows.forward(data.subspan(y * width, width));

  const Plan cols(height);
  std::vector<Complex> column(height);
  for (std::size_t x = 0; x < width; ++x) {
    for (std::size_t y = 0; y < height; ++y) column[y] = data[y * width + x];
    cols.forward(column);
    for (std::size_t y = 0; y < height; ++y) data[y * width + x] = column[y];
  }
}

}  // namespace streamstab::fft
