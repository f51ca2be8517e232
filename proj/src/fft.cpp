#include "istftnet/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace istftnet {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("fft: size must be a power of two, got " + std::to_string(n));
  }
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  bitrev_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
    bitrev_[i] = r;
  }
  twiddles_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    twiddles_[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / n);
  }
}

void FftPlan::transform(std::span<std::complex<double>> data, bool inverse) const {
  if (data.size() != n_) throw std::invalid_argument("fft: buffer size does not match plan");
  for (std::size_t i = 0; i < n_; ++i) {
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        std::complex<double> w = twiddles_[j * step];
        if (inverse) w = std::conj(w);
        const std::complex<double> u = data[start + j];
        const std::complex<double> v = data[start + j + half] * w;
        data[start + j] = u + v;
        data[start + j + half] = u - v;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& v : data) v *= scale;
  }
}

void FftPlan::forward(std::span<std::complex<double>> data) const { transform(data, false); }
void FftPlan::inverse(std::span<std::complex<double>> data) const { transform(data, true); }

std::vector<std::complex<double>> FftPlan::rfft(std::span<const double> x) const {
  if (x.size() != n_) throw std::invalid_argument("rfft: input size does not match plan");
  std::vector<std::complex<double>> buf(x.begin(), x.end());
  forward(buf);
  buf.resize(n_ / 2 + 1);
  return buf;
}

std::vector<double> FftPlan::irfft(std::span<const std::complex<double>> half) const {
  if (half.size() != n_ / 2 + 1) {
    throw std::invalid_argument("irfft: expected " + std::to_string(n_ / 2 + 1) + " bins");
  }
  std::vector<std::complex<double>> buf(n_);
  buf[0] = half[0].real();
  for (std::size_t k = 1; k < n_ / 2; ++k) {
    buf[k] = half[k];
    buf[n_ - k] = std::conj(half[k]);
  }
  if (n_ > 1) buf[n_ / 2] = half[n_ / 2].real();
  inverse(buf);
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = buf[i].real();
  return out;
}

}  // namespace istftnet
