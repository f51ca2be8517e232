#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "istftnet/ops.hpp"
#include "istftnet/tensor.hpp"

namespace istftnet {

inline constexpr float kBlockSlope = 0.1f;   // LReLU inside residual / 2D blocks
inline constexpr float kOutputSlope = 0.01f;  // LReLU before the output conv

enum class Fusion { add, concat };

struct Mrf1dConfig {
  std::size_t channels = 0;
  std::vector<std::size_t> kernel_sizes{3, 7, 11};
  std::vector<std::vector<std::size_t>> dilations{{1, 3, 5}, {1, 3, 5}, {1, 3, 5}};
  Fusion fusion = Fusion::add;

  std::size_t out_channels() const {
    return fusion == Fusion::add ? channels : channels * kernel_sizes.size();
  }
  void validate() const;
};

/// Multi-receptive-field fusion block. Each branch is a chain of residual
/// units (LReLU -> dilated conv -> LReLU -> conv, plus skip), one unit per
/// dilation. Branch outputs are averaged (add) or stacked (concat).
struct Mrf1d {
  struct Unit {
    ConvParams dilated;
    ConvParams plain;
  };
  Mrf1dConfig config;
  std::vector<std::vector<Unit>> branches;

  static Mrf1d make(const Mrf1dConfig& cfg);
  Shape output_shape(const Shape& in) const;
  Tensor forward(const Tensor& x) const;
};

/// LReLU(0.1) followed by x`factor` temporal upsampling. factor > 1 uses a
/// transposed conv (kernel 2s, stride s, padding s/2) and halves channels;
/// factor 1 is a same-padded conv that keeps the channel count.
struct Upsample1d {
  std::size_t factor = 1;
  ConvParams conv;

  static Upsample1d make(std::size_t channels, std::size_t factor, std::size_t plain_kernel = 7);
  std::size_t out_channels() const { return conv.out_channels; }
  Shape output_shape(const Shape& in) const;
  Tensor forward(const Tensor& x) const;
};

/// Plain 1D convolution with an optional leaky-ReLU applied to its input.
struct Conv1dLayer {
  ConvParams conv;
  std::optional<float> pre_slope;

  Shape output_shape(const Shape& in) const;
  Tensor forward(const Tensor& x) const;
};

/// LReLU(0.1) then a pointwise conv to channels*freq, viewed as
/// [channels, freq, T]. Conv output channel f*channels + c maps to (c, f).
struct To2d {
  std::size_t channels = 0;
  std::size_t freq = 0;
  ConvParams conv;

  static To2d make(std::size_t in_channels, std::size_t channels, std::size_t freq);
  Shape output_shape(const Shape& in) const;
  Tensor forward(const Tensor& x) const;
};

enum class Block2dKind { res, shuffle };

struct Block2dConfig {
  std::size_t channels = 32;
  std::pair<std::size_t, std::size_t> kernel{3, 3};
  std::size_t repeats = 3;
  Block2dKind kind = Block2dKind::res;
  /// Shuffle only: width of the transform branch's hidden layer as a
  /// multiple of the split width (2 = C/2 -> C -> C/2, 1 = half-width).
  std::size_t expansion = 2;

  void validate() const;
};

/// Stack of `repeats` 2D ResBlocks or 2D ShuffleBlocks on [C, F, T].
struct Block2d {
  struct Unit {
    ConvParams first;
    ConvParams second;
  };
  Block2dConfig config;
  std::vector<Unit> units;

  static Block2d make(const Block2dConfig& cfg);
  Shape output_shape(const Shape& in) const;
  Tensor forward(const Tensor& x) const;
};

/// Frequency-only transposed-conv ladder (stride (2,1), halving channels per
/// rung), an appended zero Nyquist row when the target is one past the ladder,
/// and a same-padded conv to the output channels.
struct FreqHead {
  std::size_t in_freq = 0;
  std::size_t target_freq = 0;
  std::vector<ConvParams> rungs;
  ConvParams output;

  static FreqHead make(std::size_t in_channels, std::size_t in_freq, std::size_t target_freq,
                       std::size_t out_channels,
                       std::pair<std::size_t, std::size_t> kernel = {3, 3});
  Shape output_shape(const Shape& in) const;
  Tensor forward(const Tensor& x) const;
};

// Parameter visitation. `Fn` is called as fn(name, conv) with conv being
// ConvParams& or const ConvParams& depending on the constness of the block.

template <typename T>
concept ConvBlock = std::is_same_v<std::remove_const_t<T>, Mrf1d> ||
                    std::is_same_v<std::remove_const_t<T>, Upsample1d> ||
                    std::is_same_v<std::remove_const_t<T>, Conv1dLayer> ||
                    std::is_same_v<std::remove_const_t<T>, To2d> ||
                    std::is_same_v<std::remove_const_t<T>, Block2d> ||
                    std::is_same_v<std::remove_const_t<T>, FreqHead>;

template <ConvBlock B, typename Fn>
void for_each_conv(B& block, const std::string& prefix, Fn&& fn) {
  using Plain = std::remove_const_t<B>;
  if constexpr (std::is_same_v<Plain, Mrf1d>) {
    for (std::size_t b = 0; b < block.branches.size(); ++b) {
      for (std::size_t u = 0; u < block.branches[b].size(); ++u) {
        const std::string base =
            prefix + ".branch" + std::to_string(b) + ".unit" + std::to_string(u);
        fn(base + ".conv1", block.branches[b][u].dilated);
        fn(base + ".conv2", block.branches[b][u].plain);
      }
    }
  } else if constexpr (std::is_same_v<Plain, Block2d>) {
    for (std::size_t u = 0; u < block.units.size(); ++u) {
      const std::string base = prefix + ".unit" + std::to_string(u);
      fn(base + ".conv1", block.units[u].first);
      fn(base + ".conv2", block.units[u].second);
    }
  } else if constexpr (std::is_same_v<Plain, FreqHead>) {
    for (std::size_t r = 0; r < block.rungs.size(); ++r) {
      fn(prefix + ".rung" + std::to_string(r), block.rungs[r]);
    }
    fn(prefix + ".output", block.output);
  } else {
    fn(prefix + ".conv", block.conv);
  }
}

template <ConvBlock B>
std::size_t block_param_count(const B& block) {
  std::size_t n = 0;
  for_each_conv(block, "", [&](const std::string&, const ConvParams& c) { n += c.param_count(); });
  return n;
}

}  // namespace istftnet
