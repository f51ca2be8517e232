#include "istftnet/pqmf.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace istftnet {

namespace {

std::vector<double> kaiser(std::size_t n, double beta) {
  std::vector<double> w(n);
  const double denom = std::cyl_bessel_i(0.0, beta);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = n == 1 ? 0.0 : 2.0 * static_cast<double>(i) / (n - 1) - 1.0;
    w[i] = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / denom;
  }
  return w;
}

}  // namespace

PqmfBank PqmfBank::design(std::size_t bands, std::size_t taps, double cutoff, double beta) {
  if (bands == 0 || taps == 0 || taps % 2 != 0) {
    throw std::invalid_argument("pqmf: need bands >= 1 and an even, positive tap count");
  }
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw std::invalid_argument("pqmf: cutoff must be in (0, 1)");

  const std::size_t len = taps + 1;
  const double wc = std::numbers::pi * cutoff;
  const auto window = kaiser(len, beta);
  std::vector<double> proto(len);
  for (std::size_t i = 0; i < len; ++i) {
    const double n = static_cast<double>(i) - 0.5 * static_cast<double>(taps);
    const double sinc = i == taps / 2 ? cutoff : std::sin(wc * n) / (std::numbers::pi * n);
    proto[i] = sinc * window[i];
  }

  PqmfBank bank;
  bank.bands = bands;
  bank.taps = taps;
  bank.cutoff = cutoff;
  bank.beta = beta;
  bank.prototype = Tensor({len});
  bank.analysis = Tensor({bands, len});
  bank.synthesis = Tensor({bands, len});
  for (std::size_t i = 0; i < len; ++i) bank.prototype[i] = static_cast<float>(proto[i]);
  for (std::size_t k = 0; k < bands; ++k) {
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < len; ++i) {
      const double n = static_cast<double>(i) - 0.5 * static_cast<double>(taps);
      const double arg = (2.0 * k + 1.0) * (std::numbers::pi / (2.0 * bands)) * n;
      bank.analysis.at(k, i) =
          static_cast<float>(2.0 * proto[i] * std::cos(arg + sign * std::numbers::pi / 4.0));
      bank.synthesis.at(k, i) =
          static_cast<float>(2.0 * proto[i] * std::cos(arg - sign * std::numbers::pi / 4.0));
    }
  }
  return bank;
}

Tensor pqmf_analysis(const PqmfBank& bank, std::span<const float> x) {
  const std::size_t b = bank.bands;
  if (x.empty() || x.size() % b != 0) {
    throw std::invalid_argument("pqmf_analysis: length " + std::to_string(x.size()) +
                                " is not a positive multiple of " + std::to_string(b));
  }
  const std::size_t frames = x.size() / b;
  const std::size_t len = bank.taps + 1;
  const long long half = static_cast<long long>(bank.taps / 2);
  const long long n = static_cast<long long>(x.size());
  Tensor out({b, frames});
  for (std::size_t k = 0; k < b; ++k) {
    const float* h = bank.analysis.ptr() + k * len;
    for (std::size_t t = 0; t < frames; ++t) {
      const long long base = static_cast<long long>(t * b) - half;
      double sum = 0.0;
      for (std::size_t j = 0; j < len; ++j) {
        const long long idx = base + static_cast<long long>(j);
        if (idx >= 0 && idx < n) sum += static_cast<double>(h[j]) * x[idx];
      }
      out.at(k, t) = static_cast<float>(sum);
    }
  }
  return out;
}

std::vector<float> pqmf_synthesis(const PqmfBank& bank, const Tensor& sub) {
  const std::size_t b = bank.bands;
  if (sub.rank() != 2 || sub.dim(0) != b) {
    throw std::invalid_argument("pqmf_synthesis: expected [" + std::to_string(b) +
                                ", T] sub-bands, got " + shape_str(sub.shape()));
  }
  const std::size_t frames = sub.dim(1);
  const std::size_t len = bank.taps + 1;
  const long long half = static_cast<long long>(bank.taps / 2);
  const long long n = static_cast<long long>(frames * b);
  std::vector<double> acc(frames * b, 0.0);
  // Only every b-th upsampled sample is nonzero: scatter each one through the
  // synthesis taps, y[p + half - j] += b * s[j] * v.
  for (std::size_t k = 0; k < b; ++k) {
    const float* g = bank.synthesis.ptr() + k * len;
    for (std::size_t t = 0; t < frames; ++t) {
      const double v = static_cast<double>(b) * sub.at(k, t);
      if (v == 0.0) continue;
      const long long p = static_cast<long long>(t * b) + half;
      for (std::size_t j = 0; j < len; ++j) {
        const long long idx = p - static_cast<long long>(j);
        if (idx >= 0 && idx < n) acc[static_cast<std::size_t>(idx)] += g[j] * v;
      }
    }
  }
  return std::vector<float>(acc.begin(), acc.end());
}

}  // namespace istftnet
