#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "istftnet/arch.hpp"
#include "istftnet/blocks.hpp"
#include "istftnet/pqmf.hpp"

namespace istftnet {

struct Hyper {
  std::size_t mel_channels = kMelChannels;
  std::size_t base_channels = 128;  // HiFi-GAN V2 width
  std::vector<std::size_t> mrf_kernels{3, 7, 11};
  std::vector<std::vector<std::size_t>> mrf_dilations{{1, 3, 5}, {1, 3, 5}, {1, 3, 5}};
  std::size_t input_kernel = 7;
  std::size_t output_kernel = 7;
  std::size_t plain_stage_kernel = 7;  // kernel of a x1 (C1) stage
  std::size_t trunk2d_channels = 32;
  std::size_t repeats2d = 3;
  std::pair<std::size_t, std::size_t> kernel2d{3, 3};
  /// The 2D trunk runs at (F - 1) / freq_downsample frequency rows.
  std::size_t freq_downsample = 8;
  std::size_t shuffle_expansion = 2;

  /// Defaults for an architecture. Multi-band 2D models double the trunk
  /// width and use half-width shuffle transforms to stay near the size of
  /// their 1D multi-band counterpart.
  static Hyper defaults_for(const ArchSpec& arch);
  void validate() const;
};

struct InitPolicy {
  std::uint64_t seed = 0;
  float weight_std = 0.01f;
  float bias_std = 0.0f;
};

using LayerOp = std::variant<Conv1dLayer, Upsample1d, Mrf1d, To2d, Block2d, FreqHead>;

struct Layer {
  std::string name;
  LayerOp op;
};

enum class HeadKind {
  waveform,    // [bands, T] samples, tanh
  spectrum1d,  // [bands * 2F, T]: per band F log-magnitudes then F phases
  spectrum2d,  // [2 * bands, F, T]: channel 2k log-magnitude, 2k + 1 phase
};

struct HeadInfo {
  HeadKind kind = HeadKind::waveform;
  std::size_t freq_bins = 0;
  std::size_t bands = 1;
  std::size_t channels = 1;
};

struct ModelGraph {
  ArchSpec arch;
  Hyper hyper;
  std::vector<Layer> layers;
  HeadInfo head;
  std::optional<PqmfBank> pqmf;
};

ModelGraph build(const ArchSpec& arch, const Hyper& hyper,
                 const std::optional<InitPolicy>& init = std::nullopt);
/// Parses `arch` and builds it with Hyper::defaults_for.
ModelGraph build(std::string_view arch, const std::optional<InitPolicy>& init = std::nullopt);

/// Fresh Gaussian weights (biases from `bias_std`), deterministic per seed.
ModelGraph init_random(ModelGraph graph, const InitPolicy& policy);
ModelGraph init_random(ModelGraph graph, std::uint64_t seed);

/// Visits every learnable tensor in a stable order as fn(name, tensor).
void for_each_param(ModelGraph& graph, const std::function<void(const std::string&, Tensor&)>& fn);
void for_each_param(const ModelGraph& graph,
                    const std::function<void(const std::string&, const Tensor&)>& fn);

std::size_t count_params(const ModelGraph& graph);

/// Shapes after every layer for a mel input of `frames` frames, computed
/// without running any kernel. Throws on any inconsistency.
std::vector<std::pair<std::string, Shape>> infer_shapes(const ModelGraph& graph,
                                                        std::size_t frames);

struct ForwardOptions {
  /// Throw if any activation is NaN/Inf, naming the layer.
  bool check_finite = false;
  /// Called with each layer's name and runtime output shape.
  std::function<void(const std::string&, const Shape&)> trace;
};

Tensor layer_forward(const Layer& layer, const Tensor& x);

/// Network only: mel [mel_channels, T] -> raw head tensor.
Tensor run_network(const ModelGraph& graph, const Tensor& mel, const ForwardOptions& opts = {});
/// Head tensor -> waveform (exp/phase split, iSTFT per band, PQMF merge).
std::vector<float> synthesize_from_head(const ModelGraph& graph, const Tensor& head);
/// mel [mel_channels, T] -> 256 * T waveform samples.
std::vector<float> forward(const ModelGraph& graph, const Tensor& mel,
                           const ForwardOptions& opts = {});

}  // namespace istftnet
