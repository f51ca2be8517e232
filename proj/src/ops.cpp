#include "istftnet/ops.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace istftnet {

ConvParams ConvParams::conv1d(std::size_t in, std::size_t out, std::size_t kernel,
                              std::size_t stride, std::size_t padding,
                              std::size_t dilation) {
  ConvParams p;
  p.in_channels = in;
  p.out_channels = out;
  p.kernel = {kernel};
  p.stride = {stride};
  p.padding = {padding};
  p.dilation = {dilation};
  p.weight = Tensor({out, in, kernel});
  p.bias = Tensor({out});
  p.validate();
  return p;
}

ConvParams ConvParams::conv2d(std::size_t in, std::size_t out,
                              std::pair<std::size_t, std::size_t> kernel,
                              std::pair<std::size_t, std::size_t> stride,
                              std::pair<std::size_t, std::size_t> padding,
                              std::pair<std::size_t, std::size_t> dilation) {
  ConvParams p;
  p.in_channels = in;
  p.out_channels = out;
  p.kernel = {kernel.first, kernel.second};
  p.stride = {stride.first, stride.second};
  p.padding = {padding.first, padding.second};
  p.dilation = {dilation.first, dilation.second};
  p.weight = Tensor({out, in, kernel.first, kernel.second});
  p.bias = Tensor({out});
  p.validate();
  return p;
}

void ConvParams::validate() const {
  const std::size_t r = kernel.size();
  if (r != 1 && r != 2) throw std::invalid_argument("conv: spatial rank must be 1 or 2");
  if (stride.size() != r || padding.size() != r || dilation.size() != r) {
    throw std::invalid_argument("conv: per-axis geometry vectors disagree in rank");
  }
  if (in_channels == 0 || out_channels == 0) {
    throw std::invalid_argument("conv: channel counts must be positive");
  }
  for (std::size_t a = 0; a < r; ++a) {
    if (kernel[a] == 0 || stride[a] == 0 || dilation[a] == 0) {
      throw std::invalid_argument("conv: kernel, stride and dilation must be >= 1");
    }
  }
  Shape expected{out_channels, in_channels};
  expected.insert(expected.end(), kernel.begin(), kernel.end());
  if (weight.shape() != expected) {
    throw std::invalid_argument("conv: weight shape " + shape_str(weight.shape()) +
                                " != expected " + shape_str(expected));
  }
  if (bias.shape() != Shape{out_channels}) {
    throw std::invalid_argument("conv: bias shape " + shape_str(bias.shape()) +
                                " != [" + std::to_string(out_channels) + "]");
  }
}

std::size_t conv_output_length(std::size_t n, std::size_t kernel, std::size_t stride,
                               std::size_t padding, std::size_t dilation) {
  const long long span = static_cast<long long>(dilation) * (static_cast<long long>(kernel) - 1) + 1;
  const long long padded = static_cast<long long>(n) + 2 * static_cast<long long>(padding);
  if (padded < span) {
    throw std::invalid_argument("conv: non-positive output length (input " +
                                std::to_string(n) + ", receptive span " +
                                std::to_string(span) + ")");
  }
  return static_cast<std::size_t>((padded - span) / static_cast<long long>(stride) + 1);
}

std::size_t conv_transpose_output_length(std::size_t n, std::size_t kernel,
                                         std::size_t stride, std::size_t padding,
                                         std::size_t dilation) {
  const long long len = (static_cast<long long>(n) - 1) * static_cast<long long>(stride) -
                        2 * static_cast<long long>(padding) +
                        static_cast<long long>(dilation) * (static_cast<long long>(kernel) - 1) + 1;
  if (len < 1) {
    throw std::invalid_argument("conv_transpose: non-positive output length");
  }
  return static_cast<std::size_t>(len);
}

namespace {

void check_input(const Tensor& x, const ConvParams& p, std::size_t rank, const char* op) {
  p.validate();
  if (p.spatial_rank() + 1 != rank) {
    throw std::invalid_argument(std::string(op) + ": params are for a different rank");
  }
  if (x.rank() != rank) {
    throw std::invalid_argument(std::string(op) + ": expected rank-" + std::to_string(rank) +
                                " input, got " + shape_str(x.shape()));
  }
  if (x.dim(0) != p.in_channels) {
    throw std::invalid_argument(std::string(op) + ": channel mismatch (input " +
                                std::to_string(x.dim(0)) + ", expected " +
                                std::to_string(p.in_channels) + ")");
  }
}

// Half-open range of output indices t with 0 <= t*stride + offset < n.
std::pair<long long, long long> valid_range(long long offset, long long stride, long long n,
                                            long long out_len) {
  long long lo = 0;
  if (offset < 0) lo = (-offset + stride - 1) / stride;
  long long hi = 0;
  if (n - 1 - offset >= 0) hi = (n - 1 - offset) / stride + 1;
  hi = std::min(hi, out_len);
  return {lo, std::max(lo, hi)};
}

}  // namespace

Tensor conv1d(const Tensor& x, const ConvParams& p) {
  check_input(x, p, 2, "conv1d");
  const std::size_t t_in = x.dim(1);
  const std::size_t k = p.kernel[0];
  const long long s = static_cast<long long>(p.stride[0]);
  const long long pad = static_cast<long long>(p.padding[0]);
  const long long d = static_cast<long long>(p.dilation[0]);
  const std::size_t t_out = conv_output_length(t_in, k, p.stride[0], p.padding[0], p.dilation[0]);

  Tensor y({p.out_channels, t_out});
  std::vector<double> acc(t_out);
  const float* w = p.weight.ptr();
  for (std::size_t o = 0; o < p.out_channels; ++o) {
    std::fill(acc.begin(), acc.end(), static_cast<double>(p.bias[o]));
    for (std::size_t i = 0; i < p.in_channels; ++i) {
      const float* xr = x.ptr() + i * t_in;
      const float* wr = w + (o * p.in_channels + i) * k;
      for (std::size_t kk = 0; kk < k; ++kk) {
        const double wv = wr[kk];
        if (wv == 0.0) continue;
        const long long off = static_cast<long long>(kk) * d - pad;
        auto [lo, hi] = valid_range(off, s, static_cast<long long>(t_in),
                                    static_cast<long long>(t_out));
        if (s == 1) {
          for (long long t = lo; t < hi; ++t) acc[t] += wv * xr[t + off];
        } else {
          for (long long t = lo; t < hi; ++t) acc[t] += wv * xr[t * s + off];
        }
      }
    }
    float* yr = y.ptr() + o * t_out;
    for (std::size_t t = 0; t < t_out; ++t) yr[t] = static_cast<float>(acc[t]);
  }
  return y;
}

Tensor conv_transpose1d(const Tensor& x, const ConvParams& p) {
  check_input(x, p, 2, "conv_transpose1d");
  const std::size_t t_in = x.dim(1);
  const std::size_t k = p.kernel[0];
  const long long s = static_cast<long long>(p.stride[0]);
  const long long pad = static_cast<long long>(p.padding[0]);
  const long long d = static_cast<long long>(p.dilation[0]);
  const std::size_t t_out =
      conv_transpose_output_length(t_in, k, p.stride[0], p.padding[0], p.dilation[0]);

  Tensor y({p.out_channels, t_out});
  std::vector<double> acc(t_out);
  const float* w = p.weight.ptr();
  for (std::size_t o = 0; o < p.out_channels; ++o) {
    std::fill(acc.begin(), acc.end(), static_cast<double>(p.bias[o]));
    for (std::size_t i = 0; i < p.in_channels; ++i) {
      const float* xr = x.ptr() + i * t_in;
      const float* wr = w + (o * p.in_channels + i) * k;
      for (std::size_t kk = 0; kk < k; ++kk) {
        const double wv = wr[kk];
        if (wv == 0.0) continue;
        // output index u = t*s + off must lie in [0, t_out)
        const long long off = static_cast<long long>(kk) * d - pad;
        auto [lo, hi] = valid_range(off, s, static_cast<long long>(t_out),
                                    static_cast<long long>(t_in));
        for (long long t = lo; t < hi; ++t) acc[t * s + off] += wv * xr[t];
      }
    }
    float* yr = y.ptr() + o * t_out;
    for (std::size_t t = 0; t < t_out; ++t) yr[t] = static_cast<float>(acc[t]);
  }
  return y;
}

Tensor conv2d(const Tensor& x, const ConvParams& p) {
  check_input(x, p, 3, "conv2d");
  const std::size_t f_in = x.dim(1), t_in = x.dim(2);
  const std::size_t kf = p.kernel[0], kt = p.kernel[1];
  const long long sf = static_cast<long long>(p.stride[0]), st = static_cast<long long>(p.stride[1]);
  const long long pf = static_cast<long long>(p.padding[0]), pt = static_cast<long long>(p.padding[1]);
  const long long df = static_cast<long long>(p.dilation[0]), dt = static_cast<long long>(p.dilation[1]);
  const std::size_t f_out = conv_output_length(f_in, kf, p.stride[0], p.padding[0], p.dilation[0]);
  const std::size_t t_out = conv_output_length(t_in, kt, p.stride[1], p.padding[1], p.dilation[1]);

  Tensor y({p.out_channels, f_out, t_out});
  std::vector<double> acc(f_out * t_out);
  const float* w = p.weight.ptr();
  for (std::size_t o = 0; o < p.out_channels; ++o) {
    std::fill(acc.begin(), acc.end(), static_cast<double>(p.bias[o]));
    for (std::size_t i = 0; i < p.in_channels; ++i) {
      const float* xc = x.ptr() + i * f_in * t_in;
      const float* wc = w + (o * p.in_channels + i) * kf * kt;
      for (std::size_t a = 0; a < kf; ++a) {
        const long long off_f = static_cast<long long>(a) * df - pf;
        auto [flo, fhi] = valid_range(off_f, sf, static_cast<long long>(f_in),
                                      static_cast<long long>(f_out));
        for (std::size_t b = 0; b < kt; ++b) {
          const double wv = wc[a * kt + b];
          if (wv == 0.0) continue;
          const long long off_t = static_cast<long long>(b) * dt - pt;
          auto [tlo, thi] = valid_range(off_t, st, static_cast<long long>(t_in),
                                        static_cast<long long>(t_out));
          for (long long fo = flo; fo < fhi; ++fo) {
            const float* xr = xc + (fo * sf + off_f) * static_cast<long long>(t_in);
            double* ar = acc.data() + fo * static_cast<long long>(t_out);
            if (st == 1) {
              for (long long t = tlo; t < thi; ++t) ar[t] += wv * xr[t + off_t];
            } else {
              for (long long t = tlo; t < thi; ++t) ar[t] += wv * xr[t * st + off_t];
            }
          }
        }
      }
    }
    float* yc = y.ptr() + o * f_out * t_out;
    for (std::size_t j = 0; j < acc.size(); ++j) yc[j] = static_cast<float>(acc[j]);
  }
  return y;
}

Tensor conv_transpose2d(const Tensor& x, const ConvParams& p) {
  check_input(x, p, 3, "conv_transpose2d");
  const std::size_t f_in = x.dim(1), t_in = x.dim(2);
  const std::size_t kf = p.kernel[0], kt = p.kernel[1];
  const long long sf = static_cast<long long>(p.stride[0]), st = static_cast<long long>(p.stride[1]);
  const long long pf = static_cast<long long>(p.padding[0]), pt = static_cast<long long>(p.padding[1]);
  const long long df = static_cast<long long>(p.dilation[0]), dt = static_cast<long long>(p.dilation[1]);
  const std::size_t f_out =
      conv_transpose_output_length(f_in, kf, p.stride[0], p.padding[0], p.dilation[0]);
  const std::size_t t_out =
      conv_transpose_output_length(t_in, kt, p.stride[1], p.padding[1], p.dilation[1]);

  Tensor y({p.out_channels, f_out, t_out});
  std::vector<double> acc(f_out * t_out);
  const float* w = p.weight.ptr();
  for (std::size_t o = 0; o < p.out_channels; ++o) {
    std::fill(acc.begin(), acc.end(), static_cast<double>(p.bias[o]));
    for (std::size_t i = 0; i < p.in_channels; ++i) {
      const float* xc = x.ptr() + i * f_in * t_in;
      const float* wc = w + (o * p.in_channels + i) * kf * kt;
      for (std::size_t a = 0; a < kf; ++a) {
        const long long off_f = static_cast<long long>(a) * df - pf;
        auto [flo, fhi] = valid_range(off_f, sf, static_cast<long long>(f_out),
                                      static_cast<long long>(f_in));
        for (std::size_t b = 0; b < kt; ++b) {
          const double wv = wc[a * kt + b];
          if (wv == 0.0) continue;
          const long long off_t = static_cast<long long>(b) * dt - pt;
          auto [tlo, thi] = valid_range(off_t, st, static_cast<long long>(t_out),
                                        static_cast<long long>(t_in));
          for (long long fi = flo; fi < fhi; ++fi) {
            const float* xr = xc + fi * static_cast<long long>(t_in);
            double* ar = acc.data() + (fi * sf + off_f) * static_cast<long long>(t_out);
            if (st == 1) {
              for (long long t = tlo; t < thi; ++t) ar[t + off_t] += wv * xr[t];
            } else {
              for (long long t = tlo; t < thi; ++t) ar[t * st + off_t] += wv * xr[t];
            }
          }
        }
      }
    }
    float* yc = y.ptr() + o * f_out * t_out;
    for (std::size_t j = 0; j < acc.size(); ++j) yc[j] = static_cast<float>(acc[j]);
  }
  return y;
}

Tensor leaky_relu(const Tensor& x, float slope) {
  Tensor y = x;
  leaky_relu_inplace(y, slope);
  return y;
}

void leaky_relu_inplace(Tensor& x, float slope) {
  for (float& v : x.data()) v = v >= 0.0f ? v : slope * v;
}

void add_inplace(Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument("add: shape mismatch " + shape_str(a.shape()) + " vs " +
                                shape_str(b.shape()));
  }
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < ad.size(); ++i) ad[i] += bd[i];
}

Tensor channel_shuffle(const Tensor& x, std::size_t groups) {
  const std::size_t c = x.dim(0);
  if (groups == 0 || c % groups != 0) {
    throw std::invalid_argument("channel_shuffle: groups " + std::to_string(groups) +
                                " does not divide channels " + std::to_string(c));
  }
  const std::size_t per_group = c / groups;
  const std::size_t stride = x.channel_stride();
  Tensor y(x.shape());
  for (std::size_t ch = 0; ch < c; ++ch) {
    const std::size_t dst = (ch % groups) * per_group + ch / groups;
    std::copy_n(x.ptr() + ch * stride, stride, y.ptr() + dst * stride);
  }
  return y;
}

std::pair<Tensor, Tensor> channel_split(const Tensor& x) {
  const std::size_t c = x.dim(0);
  if (c % 2 != 0) {
    throw std::invalid_argument("channel_split: odd channel count " + std::to_string(c));
  }
  Shape half_shape = x.shape();
  half_shape[0] = c / 2;
  const std::size_t half = x.size() / 2;
  std::vector<float> lo(x.ptr(), x.ptr() + half);
  std::vector<float> hi(x.ptr() + half, x.ptr() + x.size());
  return {Tensor(half_shape, std::move(lo)), Tensor(half_shape, std::move(hi))};
}

Tensor channel_concat(const Tensor& a, const Tensor& b) {
  return channel_concat(std::vector<Tensor>{a, b});
}

Tensor channel_concat(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("channel_concat: no inputs");
  Shape out_shape = parts.front().shape();
  std::size_t channels = 0;
  for (const auto& t : parts) {
    if (t.rank() != out_shape.size() ||
        !std::equal(t.shape().begin() + 1, t.shape().end(), out_shape.begin() + 1)) {
      throw std::invalid_argument("channel_concat: shape mismatch " +
                                  shape_str(parts.front().shape()) + " vs " +
                                  shape_str(t.shape()));
    }
    channels += t.dim(0);
  }
  out_shape[0] = channels;
  std::vector<float> data;
  data.reserve(shape_numel(out_shape));
  for (const auto& t : parts) data.insert(data.end(), t.data().begin(), t.data().end());
  return Tensor(std::move(out_shape), std::move(data));
}

}  // namespace istftnet
