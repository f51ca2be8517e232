#include "istftnet/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

namespace istftnet {

std::size_t bench_frames(double duration) {
  if (!(duration > 0.0)) throw std::invalid_argument("bench: duration must be positive");
  const StftConfig cfg = default_stft_config();
  return static_cast<std::size_t>(std::ceil(duration * kSampleRate / static_cast<double>(cfg.hop)));
}

Tensor random_mel(std::size_t frames, std::uint64_t seed, std::size_t mel_channels) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(-4.0f, 4.0f);
  Tensor mel({mel_channels, frames});
  for (float& v : mel.data()) v = dist(rng);
  return mel;
}

double time_forward(const ModelGraph& graph, const Tensor& mel) {
  const auto start = std::chrono::steady_clock::now();
  const auto audio = forward(graph, mel);
  const auto stop = std::chrono::steady_clock::now();
  if (audio.empty()) throw std::logic_error("bench: empty synthesis");
  return std::chrono::duration<double>(stop - start).count();
}

Spread summarize(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: no samples");
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {quantile(0.5), quantile(0.75) - quantile(0.25)};
}

double param_ratio_vs_v2(std::size_t params) {
  static const std::size_t v2 = count_params(build("hifigan-v2"));
  return static_cast<double>(params) / static_cast<double>(v2);
}

BenchResult run_bench(const BenchConfig& cfg) {
  if (cfg.threads != 1) {
    throw std::invalid_argument("bench: only single-threaded measurement is supported (--threads 1)");
  }
  if (cfg.repeats < 1 || cfg.warmup < 0) {
    throw std::invalid_argument("bench: repeats must be >= 1 and warmup >= 0");
  }
  BenchResult result;
  result.frames = bench_frames(cfg.duration);

  const ModelGraph graph = build(cfg.arch, InitPolicy{cfg.seed});
  const Tensor mel = random_mel(result.frames, cfg.seed + 1, graph.hyper.mel_channels);
  result.arch = graph.arch.canonical();
  result.samples = result.frames * graph.arch.base.hop;
  result.params = count_params(graph);
  result.ratio_vs_v2 = param_ratio_vs_v2(result.params);
  result.warmup = cfg.warmup;
  result.repeats = cfg.repeats;

  for (int i = 0; i < cfg.warmup; ++i) time_forward(graph, mel);
  for (int i = 0; i < cfg.repeats; ++i) {
    result.rtfs.push_back(time_forward(graph, mel) / cfg.duration);
  }
  const Spread s = summarize(result.rtfs);
  result.rtf_median = s.median;
  result.rtf_iqr = s.iqr;
  return result;
}

}  // namespace istftnet
