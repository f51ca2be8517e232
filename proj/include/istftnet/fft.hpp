#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace istftnet {

/// Iterative in-place radix-2 FFT for power-of-two sizes. Twiddles and the
/// bit-reversal table are computed once per plan; a plan is immutable after
/// construction and may be shared between threads.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const { return n_; }

  /// X[k] = sum_j x[j] exp(-2 pi i jk / n), unnormalized.
  void forward(std::span<std::complex<double>> data) const;
  /// Inverse transform including the 1/n factor.
  void inverse(std::span<std::complex<double>> data) const;

  /// One-sided spectrum (n/2 + 1 bins) of a real signal of length n.
  std::vector<std::complex<double>> rfft(std::span<const double> x) const;
  /// Real signal of length n from its one-sided spectrum. Imaginary parts of
  /// the DC and Nyquist bins are ignored.
  std::vector<double> irfft(std::span<const std::complex<double>> half) const;

 private:
  void transform(std::span<std::complex<double>> data, bool inverse) const;

  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  std::vector<std::complex<double>> twiddles_;
};

bool is_power_of_two(std::size_t n);

}  // namespace istftnet
