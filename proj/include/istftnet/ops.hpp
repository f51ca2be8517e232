#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "istftnet/tensor.hpp"

namespace istftnet {

/// Weights and geometry of a 1D or 2D convolution. Spatial vectors hold one
/// entry per axis: {time} for 1D, {freq, time} for 2D. The weight layout is
/// [out, in, k...] for both regular and transposed convolutions.
struct ConvParams {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::vector<std::size_t> kernel;
  std::vector<std::size_t> stride;
  std::vector<std::size_t> padding;
  std::vector<std::size_t> dilation;
  Tensor weight;
  Tensor bias;

  /// Zero-initialized 1D convolution.
  static ConvParams conv1d(std::size_t in, std::size_t out, std::size_t kernel,
                           std::size_t stride = 1, std::size_t padding = 0,
                           std::size_t dilation = 1);
  /// Zero-initialized 2D convolution; pairs are (freq, time).
  static ConvParams conv2d(std::size_t in, std::size_t out,
                           std::pair<std::size_t, std::size_t> kernel,
                           std::pair<std::size_t, std::size_t> stride = {1, 1},
                           std::pair<std::size_t, std::size_t> padding = {0, 0},
                           std::pair<std::size_t, std::size_t> dilation = {1, 1});

  std::size_t spatial_rank() const { return kernel.size(); }
  std::size_t param_count() const { return weight.size() + bias.size(); }

  /// Throws std::invalid_argument when the geometry or weight shapes are inconsistent.
  void validate() const;
};

/// floor((n + 2p - d(k-1) - 1)/s) + 1; throws when that is < 1.
std::size_t conv_output_length(std::size_t n, std::size_t kernel, std::size_t stride,
                               std::size_t padding, std::size_t dilation);
/// (n-1)s - 2p + d(k-1) + 1; throws when that is < 1.
std::size_t conv_transpose_output_length(std::size_t n, std::size_t kernel,
                                         std::size_t stride, std::size_t padding,
                                         std::size_t dilation);

// Cross-correlation (no kernel flip), zero padding, float32 storage with
// float64 accumulation.
Tensor conv1d(const Tensor& x, const ConvParams& p);
Tensor conv_transpose1d(const Tensor& x, const ConvParams& p);
Tensor conv2d(const Tensor& x, const ConvParams& p);
Tensor conv_transpose2d(const Tensor& x, const ConvParams& p);

Tensor leaky_relu(const Tensor& x, float slope);
void leaky_relu_inplace(Tensor& x, float slope);

/// Elementwise a += b; shapes must match.
void add_inplace(Tensor& a, const Tensor& b);

/// Channel c moves to (c mod g) * (C/g) + c / g.
Tensor channel_shuffle(const Tensor& x, std::size_t groups);
std::pair<Tensor, Tensor> channel_split(const Tensor& x);
Tensor channel_concat(const Tensor& a, const Tensor& b);
Tensor channel_concat(const std::vector<Tensor>& parts);

}  // namespace istftnet
