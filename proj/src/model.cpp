#include "istftnet/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace istftnet {

Hyper Hyper::defaults_for(const ArchSpec& arch) {
  Hyper h;
  if (arch.bands > 1 && arch.has_2d()) {
    h.trunk2d_channels = 64;
    h.shuffle_expansion = 1;
  }
  return h;
}

void Hyper::validate() const {
  if (mel_channels == 0 || base_channels == 0 || trunk2d_channels == 0 || repeats2d == 0 ||
      freq_downsample == 0 || shuffle_expansion == 0) {
    throw std::invalid_argument("hyper: all sizes must be positive");
  }
  if (mrf_kernels.size() != mrf_dilations.size()) {
    throw std::invalid_argument("hyper: one dilation list per MRF kernel required");
  }
  for (auto k : {input_kernel, output_kernel, plain_stage_kernel}) {
    if (k % 2 == 0) throw std::invalid_argument("hyper: 1D kernels must be odd");
  }
}

namespace {

std::size_t same_pad(std::size_t k) { return (k - 1) / 2; }

}  // namespace

ModelGraph build(const ArchSpec& arch, const Hyper& hyper, const std::optional<InitPolicy>& init) {
  arch.validate();
  hyper.validate();

  ModelGraph g;
  g.arch = arch;
  g.hyper = hyper;

  std::size_t channels = hyper.base_channels;
  g.layers.push_back({"input_conv",
                      Conv1dLayer{ConvParams::conv1d(hyper.mel_channels, channels, hyper.input_kernel,
                                                     1, same_pad(hyper.input_kernel)),
                                  std::nullopt}});

  const auto factors = arch.conv_factors();
  const bool to_2d = arch.has_2d();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const std::string stage = "stage" + std::to_string(i);
    auto up = Upsample1d::make(channels, factors[i], hyper.plain_stage_kernel);
    channels = up.out_channels();
    g.layers.push_back({stage + ".upsample", std::move(up)});

    Mrf1dConfig mrf{channels, hyper.mrf_kernels, hyper.mrf_dilations,
                    to_2d && i + 1 == factors.size() ? Fusion::concat : Fusion::add};
    channels = mrf.out_channels();
    g.layers.push_back({stage + ".mrf", Mrf1d::make(mrf)});
  }

  const std::size_t bands = arch.bands;
  if (to_2d) {
    const std::size_t bins = arch.head_freq_bins();
    if ((bins - 1) % hyper.freq_downsample != 0 || bins - 1 < hyper.freq_downsample) {
      throw std::invalid_argument("build: " + std::to_string(bins) +
                                  " bins cannot be reached from a x" +
                                  std::to_string(hyper.freq_downsample) + " downsampled plane");
    }
    const std::size_t low_freq = (bins - 1) / hyper.freq_downsample;
    const auto kind = std::get<Blocks2dStage>(arch.stages.back()).kind;
    g.layers.push_back({"to2d", To2d::make(channels, hyper.trunk2d_channels, low_freq)});
    g.layers.push_back({"trunk2d", Block2d::make({hyper.trunk2d_channels, hyper.kernel2d,
                                                  hyper.repeats2d, kind, hyper.shuffle_expansion})});
    g.layers.push_back({"head2d", FreqHead::make(hyper.trunk2d_channels, low_freq, bins,
                                                 2 * bands, hyper.kernel2d)});
    g.head = {HeadKind::spectrum2d, bins, bands, 2 * bands};
  } else if (arch.has_istft()) {
    const std::size_t bins = arch.head_freq_bins();
    const std::size_t out = bands * 2 * bins;
    g.layers.push_back({"output_conv",
                        Conv1dLayer{ConvParams::conv1d(channels, out, hyper.output_kernel, 1,
                                                       same_pad(hyper.output_kernel)),
                                    kOutputSlope}});
    g.head = {HeadKind::spectrum1d, bins, bands, out};
  } else {
    g.layers.push_back({"output_conv",
                        Conv1dLayer{ConvParams::conv1d(channels, bands, hyper.output_kernel, 1,
                                                       same_pad(hyper.output_kernel)),
                                    kOutputSlope}});
    g.head = {HeadKind::waveform, 0, bands, bands};
  }
  if (bands > 1) g.pqmf = PqmfBank::design(bands);

  if (init) return init_random(std::move(g), *init);
  return g;
}

ModelGraph build(std::string_view arch, const std::optional<InitPolicy>& init) {
  const ArchSpec spec = parse_arch(arch);
  return build(spec, Hyper::defaults_for(spec), init);
}

void for_each_param(ModelGraph& graph,
                    const std::function<void(const std::string&, Tensor&)>& fn) {
  for (auto& layer : graph.layers) {
    std::visit(
        [&](auto& block) {
          for_each_conv(block, layer.name, [&](const std::string& name, ConvParams& conv) {
            fn(name + ".weight", conv.weight);
            fn(name + ".bias", conv.bias);
          });
        },
        layer.op);
  }
}

void for_each_param(const ModelGraph& graph,
                    const std::function<void(const std::string&, const Tensor&)>& fn) {
  for (const auto& layer : graph.layers) {
    std::visit(
        [&](const auto& block) {
          for_each_conv(block, layer.name, [&](const std::string& name, const ConvParams& conv) {
            fn(name + ".weight", conv.weight);
            fn(name + ".bias", conv.bias);
          });
        },
        layer.op);
  }
}

ModelGraph init_random(ModelGraph graph, const InitPolicy& policy) {
  std::mt19937_64 rng(policy.seed);
  std::normal_distribution<float> weight_dist(0.0f, policy.weight_std);
  std::normal_distribution<float> bias_dist(0.0f, policy.bias_std > 0.0f ? policy.bias_std : 1.0f);
  for_each_param(graph, [&](const std::string& name, Tensor& t) {
    const bool is_bias = name.ends_with(".bias");
    for (float& v : t.data()) {
      if (is_bias) {
        v = policy.bias_std > 0.0f ? bias_dist(rng) : 0.0f;
      } else {
        v = weight_dist(rng);
      }
    }
  });
  return graph;
}

ModelGraph init_random(ModelGraph graph, std::uint64_t seed) {
  return init_random(std::move(graph), InitPolicy{seed});
}

std::size_t count_params(const ModelGraph& graph) {
  std::size_t n = 0;
  for_each_param(graph, [&](const std::string&, const Tensor& t) { n += t.size(); });
  return n;
}

std::vector<std::pair<std::string, Shape>> infer_shapes(const ModelGraph& graph,
                                                        std::size_t frames) {
  std::vector<std::pair<std::string, Shape>> out;
  Shape shape{graph.hyper.mel_channels, frames};
  for (const auto& layer : graph.layers) {
    shape = std::visit([&](const auto& block) { return block.output_shape(shape); }, layer.op);
    out.emplace_back(layer.name, shape);
  }
  return out;
}

Tensor layer_forward(const Layer& layer, const Tensor& x) {
  return std::visit([&](const auto& block) { return block.forward(x); }, layer.op);
}

Tensor run_network(const ModelGraph& graph, const Tensor& mel, const ForwardOptions& opts) {
  if (mel.rank() != 2 || mel.dim(0) != graph.hyper.mel_channels) {
    throw std::invalid_argument("forward: expected mel of shape [" +
                                std::to_string(graph.hyper.mel_channels) + ", T], got " +
                                shape_str(mel.shape()));
  }
  Tensor h = mel;
  for (const auto& layer : graph.layers) {
    h = layer_forward(layer, h);
    if (opts.trace) opts.trace(layer.name, h.shape());
    if (opts.check_finite) {
      for (float v : h.data()) {
        if (!std::isfinite(v)) {
          throw std::runtime_error("forward: non-finite activation after layer '" + layer.name + "'");
        }
      }
    }
  }
  return h;
}

std::vector<float> synthesize_from_head(const ModelGraph& graph, const Tensor& head) {
  const HeadInfo& info = graph.head;
  const std::size_t bands = info.bands;
  std::vector<std::vector<float>> band_audio(bands);

  switch (info.kind) {
    case HeadKind::waveform: {
      if (head.rank() != 2 || head.dim(0) != bands) {
        throw std::invalid_argument("synthesize: waveform head shape mismatch");
      }
      const std::size_t t = head.dim(1);
      for (std::size_t b = 0; b < bands; ++b) {
        band_audio[b].resize(t);
        for (std::size_t i = 0; i < t; ++i) band_audio[b][i] = std::tanh(head.at(b, i));
      }
      break;
    }
    case HeadKind::spectrum1d:
    case HeadKind::spectrum2d: {
      const std::size_t bins = info.freq_bins;
      const bool flat = info.kind == HeadKind::spectrum1d;
      const Shape expected = flat ? Shape{bands * 2 * bins, head.dim(head.rank() - 1)}
                                  : Shape{2 * bands, bins, head.dim(head.rank() - 1)};
      if (head.shape() != expected) {
        throw std::invalid_argument("synthesize: head shape " + shape_str(head.shape()) +
                                    " != " + shape_str(expected));
      }
      const std::size_t frames = expected.back();
      const StftConfig cfg = graph.arch.istft_config();
      const std::size_t plane = bins * frames;
      std::vector<float> magnitude(plane);
      for (std::size_t b = 0; b < bands; ++b) {
        // Both layouts store band b as [log-magnitude plane | phase plane].
        const float* mag_src = head.ptr() + 2 * b * plane;
        const float* phase_src = mag_src + plane;
        for (std::size_t i = 0; i < plane; ++i) magnitude[i] = std::exp(mag_src[i]);
        band_audio[b] = istft(magnitude, std::span<const float>(phase_src, plane), frames, cfg,
                              cfg.hop * frames);
      }
      break;
    }
  }

  if (bands == 1) return std::move(band_audio[0]);
  const std::size_t len = band_audio[0].size();
  Tensor sub({bands, len});
  for (std::size_t b = 0; b < bands; ++b) {
    std::copy(band_audio[b].begin(), band_audio[b].end(), sub.ptr() + b * len);
  }
  return pqmf_synthesis(*graph.pqmf, sub);
}

std::vector<float> forward(const ModelGraph& graph, const Tensor& mel, const ForwardOptions& opts) {
  return synthesize_from_head(graph, run_network(graph, mel, opts));
}

}  // namespace istftnet
