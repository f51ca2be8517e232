#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "istftnet/model.hpp"

namespace istftnet {

struct BenchConfig {
  std::string arch;
  double duration = 1.0;  // seconds of synthesized speech per run
  int warmup = 5;
  int repeats = 30;
  int threads = 1;
  std::uint64_t seed = 0;
};

struct BenchResult {
  std::string arch;      // canonical arch string
  std::size_t frames = 0;
  std::size_t samples = 0;
  int warmup = 0;
  int repeats = 0;
  std::vector<double> rtfs;
  double rtf_median = 0.0;
  double rtf_iqr = 0.0;
  std::size_t params = 0;
  double ratio_vs_v2 = 0.0;
};

/// Mel frames needed to cover `duration` seconds at 22.05 kHz, hop 256.
std::size_t bench_frames(double duration);

/// Uniform noise in [-4, 4], the typical log-mel range.
Tensor random_mel(std::size_t frames, std::uint64_t seed, std::size_t mel_channels = kMelChannels);

/// Wall-clock seconds of one forward pass (network + iSTFT + PQMF).
double time_forward(const ModelGraph& graph, const Tensor& mel);

struct Spread {
  double median = 0.0;
  double iqr = 0.0;
};
/// Median and interquartile range with linear interpolation between order statistics.
Spread summarize(std::vector<double> values);

/// count / count(hifigan-v2).
double param_ratio_vs_v2(std::size_t params);

/// Builds a seeded random model, runs `warmup` untimed passes, then times
/// `repeats` passes. RTF = forward time / duration. Only threads == 1 is
/// supported.
BenchResult run_bench(const BenchConfig& cfg);

}  // namespace istftnet
