#include "istftnet/reference.hpp"

#include <cmath>
#include <numbers>

namespace istftnet::reference {

namespace {

long long as_ll(std::size_t v) { return static_cast<long long>(v); }

}  // namespace

Tensor conv1d(const Tensor& x, const ConvParams& p) {
  const long long t_in = as_ll(x.dim(1));
  const long long k = as_ll(p.kernel[0]), s = as_ll(p.stride[0]);
  const long long pad = as_ll(p.padding[0]), d = as_ll(p.dilation[0]);
  const long long t_out = (t_in + 2 * pad - d * (k - 1) - 1) / s + 1;
  Tensor y({p.out_channels, static_cast<std::size_t>(t_out)});
  for (std::size_t o = 0; o < p.out_channels; ++o) {
    for (long long t = 0; t < t_out; ++t) {
      double sum = p.bias[o];
      for (std::size_t i = 0; i < p.in_channels; ++i) {
        for (long long kk = 0; kk < k; ++kk) {
          const long long src = t * s + kk * d - pad;
          if (src < 0 || src >= t_in) continue;
          sum += static_cast<double>(p.weight[(o * p.in_channels + i) * k + kk]) *
                 x.at(i, static_cast<std::size_t>(src));
        }
      }
      y.at(o, static_cast<std::size_t>(t)) = static_cast<float>(sum);
    }
  }
  return y;
}

Tensor conv_transpose1d(const Tensor& x, const ConvParams& p) {
  const long long t_in = as_ll(x.dim(1));
  const long long k = as_ll(p.kernel[0]), s = as_ll(p.stride[0]);
  const long long pad = as_ll(p.padding[0]), d = as_ll(p.dilation[0]);
  const long long t_out = (t_in - 1) * s - 2 * pad + d * (k - 1) + 1;
  std::vector<double> acc(p.out_channels * static_cast<std::size_t>(t_out), 0.0);
  // Scatter every input sample through every tap.
  for (std::size_t i = 0; i < p.in_channels; ++i) {
    for (long long t = 0; t < t_in; ++t) {
      for (std::size_t o = 0; o < p.out_channels; ++o) {
        for (long long kk = 0; kk < k; ++kk) {
          const long long dst = t * s + kk * d - pad;
          if (dst < 0 || dst >= t_out) continue;
          acc[o * t_out + dst] += static_cast<double>(p.weight[(o * p.in_channels + i) * k + kk]) *
                                  x.at(i, static_cast<std::size_t>(t));
        }
      }
    }
  }
  Tensor y({p.out_channels, static_cast<std::size_t>(t_out)});
  for (std::size_t o = 0; o < p.out_channels; ++o) {
    for (long long t = 0; t < t_out; ++t) {
      y.at(o, static_cast<std::size_t>(t)) = static_cast<float>(acc[o * t_out + t] + p.bias[o]);
    }
  }
  return y;
}

Tensor conv2d(const Tensor& x, const ConvParams& p) {
  const long long f_in = as_ll(x.dim(1)), t_in = as_ll(x.dim(2));
  const long long kf = as_ll(p.kernel[0]), kt = as_ll(p.kernel[1]);
  const long long sf = as_ll(p.stride[0]), st = as_ll(p.stride[1]);
  const long long pf = as_ll(p.padding[0]), pt = as_ll(p.padding[1]);
  const long long df = as_ll(p.dilation[0]), dt = as_ll(p.dilation[1]);
  const long long f_out = (f_in + 2 * pf - df * (kf - 1) - 1) / sf + 1;
  const long long t_out = (t_in + 2 * pt - dt * (kt - 1) - 1) / st + 1;
  Tensor y({p.out_channels, static_cast<std::size_t>(f_out), static_cast<std::size_t>(t_out)});
  for (std::size_t o = 0; o < p.out_channels; ++o) {
    for (long long f = 0; f < f_out; ++f) {
      for (long long t = 0; t < t_out; ++t) {
        double sum = p.bias[o];
        for (std::size_t i = 0; i < p.in_channels; ++i) {
          for (long long a = 0; a < kf; ++a) {
            for (long long b = 0; b < kt; ++b) {
              const long long sf_idx = f * sf + a * df - pf;
              const long long st_idx = t * st + b * dt - pt;
              if (sf_idx < 0 || sf_idx >= f_in || st_idx < 0 || st_idx >= t_in) continue;
              const double w = p.weight[((o * p.in_channels + i) * kf + a) * kt + b];
              sum += w * x.at(i, static_cast<std::size_t>(sf_idx), static_cast<std::size_t>(st_idx));
            }
          }
        }
        y.at(o, static_cast<std::size_t>(f), static_cast<std::size_t>(t)) = static_cast<float>(sum);
      }
    }
  }
  return y;
}

Tensor conv_transpose2d(const Tensor& x, const ConvParams& p) {
  const long long f_in = as_ll(x.dim(1)), t_in = as_ll(x.dim(2));
  const long long kf = as_ll(p.kernel[0]), kt = as_ll(p.kernel[1]);
  const long long sf = as_ll(p.stride[0]), st = as_ll(p.stride[1]);
  const long long pf = as_ll(p.padding[0]), pt = as_ll(p.padding[1]);
  const long long df = as_ll(p.dilation[0]), dt = as_ll(p.dilation[1]);
  const long long f_out = (f_in - 1) * sf - 2 * pf + df * (kf - 1) + 1;
  const long long t_out = (t_in - 1) * st - 2 * pt + dt * (kt - 1) + 1;
  std::vector<double> acc(p.out_channels * static_cast<std::size_t>(f_out * t_out), 0.0);
  for (std::size_t i = 0; i < p.in_channels; ++i) {
    for (long long f = 0; f < f_in; ++f) {
      for (long long t = 0; t < t_in; ++t) {
        const double v = x.at(i, static_cast<std::size_t>(f), static_cast<std::size_t>(t));
        for (std::size_t o = 0; o < p.out_channels; ++o) {
          for (long long a = 0; a < kf; ++a) {
            for (long long b = 0; b < kt; ++b) {
              const long long df_idx = f * sf + a * df - pf;
              const long long dt_idx = t * st + b * dt - pt;
              if (df_idx < 0 || df_idx >= f_out || dt_idx < 0 || dt_idx >= t_out) continue;
              const double w = p.weight[((o * p.in_channels + i) * kf + a) * kt + b];
              acc[(o * f_out + df_idx) * t_out + dt_idx] += w * v;
            }
          }
        }
      }
    }
  }
  Tensor y({p.out_channels, static_cast<std::size_t>(f_out), static_cast<std::size_t>(t_out)});
  for (std::size_t o = 0; o < p.out_channels; ++o) {
    for (long long j = 0; j < f_out * t_out; ++j) {
      y[o * f_out * t_out + j] = static_cast<float>(acc[o * f_out * t_out + j] + p.bias[o]);
    }
  }
  return y;
}

std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((k * j) % n) / n;
      sum += x[j] * std::polar(1.0, angle);
    }
    out[k] = sum;
  }
  return out;
}

std::vector<std::complex<double>> idft(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::complex<double> sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((k * j) % n) / n;
      sum += x[k] * std::polar(1.0, angle);
    }
    out[j] = sum / static_cast<double>(n);
  }
  return out;
}

}  // namespace istftnet::reference
