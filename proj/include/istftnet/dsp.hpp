#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "istftnet/tensor.hpp"

namespace istftnet {

enum class WindowKind { hann, rectangular };

/// FFT size / hop / window length triple. The analysis window of length
/// `win_length` is centered inside the `fft_size` frame.
struct StftConfig {
  std::size_t fft_size = 1024;
  std::size_t hop = 256;
  std::size_t win_length = 1024;
  WindowKind window = WindowKind::hann;
  /// Frames are centered on t * hop (reflection-padded by fft_size / 2).
  bool center = true;

  std::size_t freq_bins() const { return fft_size / 2 + 1; }
  /// Throws std::invalid_argument unless 1 <= hop <= win_length <= fft_size,
  /// fft_size is a power of two.
  void validate() const;

  bool operator==(const StftConfig&) const = default;
};

inline constexpr double kSampleRate = 22050.0;
inline constexpr std::size_t kMelChannels = 80;
inline constexpr double kMelFmin = 0.0;
inline constexpr double kMelFmax = 8000.0;
inline constexpr float kLogFloor = 1e-5f;
inline constexpr double kEnvelopeEpsilon = 1e-11;

/// Analysis configuration of the 80-band log-mel features (22.05 kHz).
inline StftConfig default_stft_config() { return StftConfig{1024, 256, 1024}; }

/// The (f/s, h/s, w/s) configuration required after x`s` temporal upsampling.
StftConfig istft_params(const StftConfig& base, std::size_t s);

struct Spectrogram {
  Tensor magnitude;  // [F, frames]
  Tensor phase;      // [F, frames], radians
};

/// Window of `win_length` samples zero-padded (centered) to `fft_size`.
std::vector<double> padded_window(const StftConfig& cfg);

/// Frames: floor(len / hop) + 1 when centered.
Spectrogram stft(std::span<const float> x, const StftConfig& cfg);

/// Weighted overlap-add inverse normalized by the summed squared window,
/// trimmed to `out_len` samples.
std::vector<float> istft(const Spectrogram& spec, const StftConfig& cfg, std::size_t out_len);
/// Same, taking separate magnitude / phase planes of shape [F, frames].
std::vector<float> istft(std::span<const float> magnitude, std::span<const float> phase,
                         std::size_t frames, const StftConfig& cfg, std::size_t out_len);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// HTK-scale triangular filterbank, [n_mels, fft_size/2 + 1].
Tensor mel_filterbank(double sample_rate, std::size_t fft_size, std::size_t n_mels,
                      double fmin, double fmax);

/// ln(max(mel_fb * |STFT(x)|, 1e-5)), [n_mels, frames].
Tensor log_mel(std::span<const float> x, double sample_rate, const StftConfig& cfg,
               std::size_t n_mels = kMelChannels, double fmin = kMelFmin,
               double fmax = kMelFmax);

}  // namespace istftnet
