#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace streamstab::fft {

using Complex = std::complex<double>;

/// Forward DFT of a fixed length, X[k] = Σ x[n]·exp(−2πi·kn/N).
///
/// Lengths are factored into primes and transformed by recursive
/// Cooley–Tukey; powers of two reduce to the radix-2 butterfly. Prime factors
/// above a small threshold go through Bluestein's chirp-z algorithm so every
/// length runs in O(N log N).
class Plan {
 public:
  explicit Plan(std::size_t length);
  ~Plan();
  Plan(Plan&&) noexcept;
  Plan& operator=(Plan&&) noexcept;

  std::size_t length() const { return length_; }

  /// In-place transform; `data.size()` must equal length().
  void forward(std::span<Complex> data) const;

 private:
  struct Bluestein;

  void recurse(const Complex* in, std::size_t in_stride, Complex* out, std::size_t n,
               std::size_t twiddle_stride, Complex* scratch) const;

  std::size_t length_;
  std::vector<Complex> twiddles_;  // exp(-2πi k / length), k < length
  std::vector<std::unique_ptr<Bluestein>> bluestein_;  // one per large prime factor
  mutable std::vector<Complex> work_;
  mutable std::vector<Complex> scratch_;
};

/// Row–column 2D DFT of a row-major width×height buffer, in place.
void forward_2d(std::span<Complex> data, std::size_t width, std::size_t height);

}  // namespace streamstab::fft
