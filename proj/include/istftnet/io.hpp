#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "istftnet/model.hpp"
#include "istftnet/tensor.hpp"

namespace istftnet {

/// Malformed or incompatible file contents.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct TensorEntry {
  std::string name;
  Tensor tensor;
};

/// Generic container behind checkpoints (and golden vectors):
///   "ISN2" | u32 version | u32 len + arch UTF-8 | u32 count |
///   count x (u32 len + name | u32 ndim | u32 dims[ndim] | f32 data[prod(dims)])
/// All integers and floats little-endian, data row-major.
struct TensorFile {
  std::string arch;
  std::vector<TensorEntry> entries;

  const Tensor& get(const std::string& name) const;
};

void write_tensor_file(const std::filesystem::path& path, const TensorFile& file);
TensorFile read_tensor_file(const std::filesystem::path& path);

void save_checkpoint(const ModelGraph& graph, const std::filesystem::path& path);
/// Rebuilds the graph from the stored arch string and fills it, validating
/// every tensor's name and shape against the rebuilt graph.
ModelGraph load_checkpoint(const std::filesystem::path& path);

/// "MEL0" | u32 sample_rate | u32 n_mels | u32 frames | f32 data[n_mels * frames]
struct MelFile {
  std::uint32_t sample_rate = 22050;
  Tensor features;  // [n_mels, frames]
};

void write_mel(const MelFile& mel, const std::filesystem::path& path);
MelFile read_mel(const std::filesystem::path& path);

/// 16-bit PCM mono RIFF/WAVE; samples are clamped to [-1, 1] and scaled by 32767.
void write_wav(std::span<const float> audio, std::uint32_t sample_rate,
               const std::filesystem::path& path);

struct WavData {
  std::uint32_t sample_rate = 0;
  std::vector<std::int16_t> samples;
};
/// Reads the 16-bit mono files produced by write_wav.
WavData read_wav(const std::filesystem::path& path);

}  // namespace istftnet
