#include "istftnet/blocks.hpp"

#include <stdexcept>
#include <string>

namespace istftnet {

namespace {

void expect_channels(const Shape& in, std::size_t rank, std::size_t channels, const char* what) {
  if (in.size() != rank) {
    throw std::invalid_argument(std::string(what) + ": expected rank-" + std::to_string(rank) +
                                " input, got " + shape_str(in));
  }
  if (in[0] != channels) {
    throw std::invalid_argument(std::string(what) + ": channel mismatch (input " +
                                std::to_string(in[0]) + ", expected " + std::to_string(channels) +
                                ")");
  }
}

std::size_t same_padding(std::size_t kernel, std::size_t dilation) {
  if (kernel % 2 == 0) throw std::invalid_argument("same padding needs an odd kernel");
  return dilation * (kernel - 1) / 2;
}

}  // namespace

void Mrf1dConfig::validate() const {
  if (channels == 0) throw std::invalid_argument("mrf1d: channels must be positive");
  if (kernel_sizes.empty()) throw std::invalid_argument("mrf1d: need at least one branch");
  if (dilations.size() != kernel_sizes.size()) {
    throw std::invalid_argument("mrf1d: one dilation list per kernel size required");
  }
  for (std::size_t b = 0; b < kernel_sizes.size(); ++b) {
    if (kernel_sizes[b] % 2 == 0) throw std::invalid_argument("mrf1d: kernel sizes must be odd");
    if (dilations[b].empty()) throw std::invalid_argument("mrf1d: empty dilation list");
  }
}

Mrf1d Mrf1d::make(const Mrf1dConfig& cfg) {
  cfg.validate();
  Mrf1d m;
  m.config = cfg;
  for (std::size_t b = 0; b < cfg.kernel_sizes.size(); ++b) {
    const std::size_t k = cfg.kernel_sizes[b];
    std::vector<Unit> units;
    for (std::size_t d : cfg.dilations[b]) {
      units.push_back({ConvParams::conv1d(cfg.channels, cfg.channels, k, 1, same_padding(k, d), d),
                       ConvParams::conv1d(cfg.channels, cfg.channels, k, 1, same_padding(k, 1), 1)});
    }
    m.branches.push_back(std::move(units));
  }
  return m;
}

Shape Mrf1d::output_shape(const Shape& in) const {
  expect_channels(in, 2, config.channels, "mrf1d");
  return {config.out_channels(), in[1]};
}

Tensor Mrf1d::forward(const Tensor& x) const {
  output_shape(x.shape());
  std::vector<Tensor> outs;
  outs.reserve(branches.size());
  for (const auto& branch : branches) {
    Tensor y = x;
    for (const auto& unit : branch) {
      Tensor h = leaky_relu(y, kBlockSlope);
      h = conv1d(h, unit.dilated);
      leaky_relu_inplace(h, kBlockSlope);
      h = conv1d(h, unit.plain);
      add_inplace(y, h);
    }
    outs.push_back(std::move(y));
  }
  if (config.fusion == Fusion::concat) return channel_concat(outs);

  Tensor sum = std::move(outs[0]);
  for (std::size_t b = 1; b < outs.size(); ++b) add_inplace(sum, outs[b]);
  const float inv = 1.0f / static_cast<float>(outs.size());
  for (float& v : sum.data()) v *= inv;
  return sum;
}

Upsample1d Upsample1d::make(std::size_t channels, std::size_t factor, std::size_t plain_kernel) {
  Upsample1d u;
  u.factor = factor;
  switch (factor) {
    case 1:
      u.conv = ConvParams::conv1d(channels, channels, plain_kernel, 1,
                                  same_padding(plain_kernel, 1));
      break;
    case 2:
    case 4:
    case 8:
      if (channels < 2) throw std::invalid_argument("upsample1d: cannot halve fewer than 2 channels");
      u.conv = ConvParams::conv1d(channels, channels / 2, 2 * factor, factor, factor / 2);
      break;
    default:
      throw std::invalid_argument("upsample1d: unsupported factor " + std::to_string(factor) +
                                  " (expected 1, 2, 4 or 8)");
  }
  return u;
}

Shape Upsample1d::output_shape(const Shape& in) const {
  expect_channels(in, 2, conv.in_channels, "upsample1d");
  const std::size_t t = factor == 1
                            ? conv_output_length(in[1], conv.kernel[0], 1, conv.padding[0], 1)
                            : conv_transpose_output_length(in[1], conv.kernel[0], conv.stride[0],
                                                           conv.padding[0], 1);
  return {conv.out_channels, t};
}

Tensor Upsample1d::forward(const Tensor& x) const {
  const Tensor h = leaky_relu(x, kBlockSlope);
  return factor == 1 ? conv1d(h, conv) : conv_transpose1d(h, conv);
}

Shape Conv1dLayer::output_shape(const Shape& in) const {
  expect_channels(in, 2, conv.in_channels, "conv1d");
  return {conv.out_channels, conv_output_length(in[1], conv.kernel[0], conv.stride[0],
                                                conv.padding[0], conv.dilation[0])};
}

Tensor Conv1dLayer::forward(const Tensor& x) const {
  if (pre_slope) return conv1d(leaky_relu(x, *pre_slope), conv);
  return conv1d(x, conv);
}

To2d To2d::make(std::size_t in_channels, std::size_t channels, std::size_t freq) {
  if (channels == 0 || freq == 0) throw std::invalid_argument("to2d: empty target plane");
  To2d t;
  t.channels = channels;
  t.freq = freq;
  t.conv = ConvParams::conv1d(in_channels, channels * freq, 1);
  return t;
}

Shape To2d::output_shape(const Shape& in) const {
  expect_channels(in, 2, conv.in_channels, "to2d");
  return {channels, freq, in[1]};
}

Tensor To2d::forward(const Tensor& x) const {
  const Tensor flat = conv1d(leaky_relu(x, kBlockSlope), conv);
  const std::size_t t = flat.dim(1);
  Tensor out({channels, freq, t});
  for (std::size_t f = 0; f < freq; ++f) {
    for (std::size_t c = 0; c < channels; ++c) {
      std::copy_n(flat.ptr() + (f * channels + c) * t, t, out.ptr() + (c * freq + f) * t);
    }
  }
  return out;
}

void Block2dConfig::validate() const {
  if (channels == 0 || repeats == 0) {
    throw std::invalid_argument("block2d: channels and repeats must be >= 1");
  }
  if (kernel.first % 2 == 0 || kernel.second % 2 == 0) {
    throw std::invalid_argument("block2d: kernel sizes must be odd for same padding");
  }
  if (kind == Block2dKind::shuffle) {
    if (channels % 2 != 0) {
      throw std::invalid_argument("block2d: shuffle blocks need an even channel count, got " +
                                  std::to_string(channels));
    }
    if (expansion == 0) throw std::invalid_argument("block2d: expansion must be >= 1");
  }
}

Block2d Block2d::make(const Block2dConfig& cfg) {
  cfg.validate();
  Block2d b;
  b.config = cfg;
  const std::pair<std::size_t, std::size_t> pad{cfg.kernel.first / 2, cfg.kernel.second / 2};
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    if (cfg.kind == Block2dKind::res) {
      b.units.push_back({ConvParams::conv2d(cfg.channels, cfg.channels, cfg.kernel, {1, 1}, pad),
                         ConvParams::conv2d(cfg.channels, cfg.channels, cfg.kernel, {1, 1}, pad)});
    } else {
      const std::size_t half = cfg.channels / 2;
      const std::size_t hidden = half * cfg.expansion;
      b.units.push_back({ConvParams::conv2d(half, hidden, cfg.kernel, {1, 1}, pad),
                         ConvParams::conv2d(hidden, half, cfg.kernel, {1, 1}, pad)});
    }
  }
  return b;
}

Shape Block2d::output_shape(const Shape& in) const {
  expect_channels(in, 3, config.channels, "block2d");
  return in;
}

Tensor Block2d::forward(const Tensor& x) const {
  output_shape(x.shape());
  Tensor y = x;
  for (const auto& unit : units) {
    if (config.kind == Block2dKind::res) {
      Tensor h = leaky_relu(y, kBlockSlope);
      h = conv2d(h, unit.first);
      leaky_relu_inplace(h, kBlockSlope);
      h = conv2d(h, unit.second);
      add_inplace(y, h);
    } else {
      auto [skip, branch] = channel_split(y);
      leaky_relu_inplace(branch, kBlockSlope);
      branch = conv2d(branch, unit.first);
      leaky_relu_inplace(branch, kBlockSlope);
      branch = conv2d(branch, unit.second);
      y = channel_shuffle(channel_concat(skip, branch), 2);
    }
  }
  return y;
}

FreqHead FreqHead::make(std::size_t in_channels, std::size_t in_freq, std::size_t target_freq,
                        std::size_t out_channels, std::pair<std::size_t, std::size_t> kernel) {
  if (in_freq == 0 || target_freq < in_freq) {
    throw std::invalid_argument("freq head: target frequency " + std::to_string(target_freq) +
                                " is below input frequency " + std::to_string(in_freq));
  }
  FreqHead h;
  h.in_freq = in_freq;
  h.target_freq = target_freq;
  std::size_t f = in_freq;
  std::size_t c = in_channels;
  while (2 * f <= target_freq) {
    if (c < 2) throw std::invalid_argument("freq head: ran out of channels to halve");
    h.rungs.push_back(ConvParams::conv2d(c, c / 2, {4, 1}, {2, 1}, {1, 0}));
    f *= 2;
    c /= 2;
  }
  if (f != target_freq && f + 1 != target_freq) {
    throw std::invalid_argument("freq head: cannot reach " + std::to_string(target_freq) +
                                " bins from " + std::to_string(in_freq) + " by doubling");
  }
  h.output = ConvParams::conv2d(c, out_channels, kernel, {1, 1}, {kernel.first / 2, kernel.second / 2});
  return h;
}

Shape FreqHead::output_shape(const Shape& in) const {
  const std::size_t c_in = rungs.empty() ? output.in_channels : rungs.front().in_channels;
  expect_channels(in, 3, c_in, "freq head");
  if (in[1] != in_freq) {
    throw std::invalid_argument("freq head: expected " + std::to_string(in_freq) +
                                " frequency rows, got " + std::to_string(in[1]));
  }
  return {output.out_channels, target_freq, in[2]};
}

Tensor FreqHead::forward(const Tensor& x) const {
  output_shape(x.shape());
  Tensor y = x;
  for (const auto& rung : rungs) {
    leaky_relu_inplace(y, kBlockSlope);
    y = conv_transpose2d(y, rung);
  }
  leaky_relu_inplace(y, kBlockSlope);
  if (y.dim(1) + 1 == target_freq) {
    const std::size_t c = y.dim(0), f = y.dim(1), t = y.dim(2);
    Tensor padded({c, f + 1, t});
    for (std::size_t ch = 0; ch < c; ++ch) {
      std::copy_n(y.ptr() + ch * f * t, f * t, padded.ptr() + ch * (f + 1) * t);
    }
    y = std::move(padded);
  }
  return conv2d(y, output);
}

}  // namespace istftnet
