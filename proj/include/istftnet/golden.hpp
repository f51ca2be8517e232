#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "istftnet/tensor.hpp"

namespace istftnet {

// Cross-validation against externally generated reference vectors.
//
// A manifest (JSON) lists cases; each case names an op, a tensor file in the
// checkpoint container format (arch string unused) relative to the manifest,
// op attributes and a tolerance ("rtol" or "atol"):
//
//   {"version": 1, "cases": [
//     {"name": "c0", "op": "conv1d", "file": "c0.isn2",
//      "stride": [2], "padding": [4], "dilation": [2], "rtol": 1e-5},
//     {"name": "fb", "op": "mel_filterbank", "file": "fb.isn2", "sample_rate": 22050,
//      "n_fft": 1024, "n_mels": 80, "fmin": 0, "fmax": 8000, "atol": 1e-4},
//     {"name": "s0", "op": "stft", "file": "s0.isn2", "fft_size": 1024, "hop": 256,
//      "win_length": 1024, "rtol": 1e-4},
//     {"name": "pq", "op": "pqmf_prototype", "file": "pq.isn2", "bands": 4, "taps": 62,
//      "cutoff": 0.142, "beta": 9.0, "atol": 1e-6}]}
//
// Tensors per op: conv* -> input, weight, bias, expected; mel_filterbank ->
// filterbank; stft -> signal, magnitude; pqmf_prototype -> prototype.
// rtol compares max|a - b| / max|b|; atol compares max|a - b|.

struct GoldenResult {
  std::string name;
  std::string op;
  bool passed = false;
  double error = 0.0;
  double tolerance = 0.0;
  bool relative = false;
  std::string detail;
};

std::vector<GoldenResult> verify_golden(const std::filesystem::path& manifest);

double max_abs_diff(const Tensor& a, const Tensor& b);
/// max|a - b| / max|b| (max|a - b| when b is all zeros).
double max_rel_diff(const Tensor& a, const Tensor& b);

}  // namespace istftnet
