#include "istftnet/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "istftnet/fft.hpp"

namespace istftnet {

void StftConfig::validate() const {
  if (hop == 0 || win_length == 0 || fft_size == 0) {
    throw std::invalid_argument("stft config: sizes must be positive");
  }
  if (win_length > fft_size) throw std::invalid_argument("stft config: win_length > fft_size");
  if (hop > win_length) throw std::invalid_argument("stft config: hop > win_length");
  if (!is_power_of_two(fft_size)) {
    throw std::invalid_argument("stft config: fft_size must be a power of two, got " +
                                std::to_string(fft_size));
  }
}

StftConfig istft_params(const StftConfig& base, std::size_t s) {
  if (s == 0 || base.fft_size % s || base.hop % s || base.win_length % s) {
    throw std::invalid_argument("istft_params: factor " + std::to_string(s) +
                                " does not divide (" + std::to_string(base.fft_size) + ", " +
                                std::to_string(base.hop) + ", " +
                                std::to_string(base.win_length) + ")");
  }
  StftConfig out = base;
  out.fft_size /= s;
  out.hop /= s;
  out.win_length /= s;
  return out;
}

std::vector<double> padded_window(const StftConfig& cfg) {
  std::vector<double> w(cfg.fft_size, 0.0);
  const std::size_t offset = (cfg.fft_size - cfg.win_length) / 2;
  for (std::size_t n = 0; n < cfg.win_length; ++n) {
    double v = 1.0;
    if (cfg.window == WindowKind::hann) {
      // periodic Hann
      v = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / cfg.win_length);
    }
    w[offset + n] = v;
  }
  return w;
}

Spectrogram stft(std::span<const float> x, const StftConfig& cfg) {
  cfg.validate();
  const std::size_t n = x.size();
  if (n < cfg.win_length) {
    throw std::invalid_argument("stft: signal of " + std::to_string(n) +
                                " samples is shorter than the window (" +
                                std::to_string(cfg.win_length) + ")");
  }
  const std::size_t half = cfg.fft_size / 2;
  std::vector<double> padded;
  if (cfg.center) {
    if (n <= half) {
      throw std::invalid_argument("stft: reflection padding needs more than fft_size/2 samples");
    }
    padded.resize(n + 2 * half);
    for (std::size_t i = 0; i < n; ++i) padded[half + i] = x[i];
    for (std::size_t i = 1; i <= half; ++i) {
      padded[half - i] = x[i];
      padded[half + n - 1 + i] = x[n - 1 - i];
    }
  } else {
    if (n < cfg.fft_size) throw std::invalid_argument("stft: signal shorter than fft_size");
    padded.assign(x.begin(), x.end());
  }
  const std::size_t frames = (padded.size() - cfg.fft_size) / cfg.hop + 1;
  const std::size_t bins = cfg.freq_bins();
  const auto window = padded_window(cfg);
  const FftPlan plan(cfg.fft_size);

  Spectrogram spec{Tensor({bins, frames}), Tensor({bins, frames})};
  std::vector<double> frame(cfg.fft_size);
  for (std::size_t t = 0; t < frames; ++t) {
    const double* src = padded.data() + t * cfg.hop;
    for (std::size_t i = 0; i < cfg.fft_size; ++i) frame[i] = src[i] * window[i];
    const auto bins_c = plan.rfft(frame);
    for (std::size_t k = 0; k < bins; ++k) {
      spec.magnitude.at(k, t) = static_cast<float>(std::abs(bins_c[k]));
      spec.phase.at(k, t) = static_cast<float>(std::arg(bins_c[k]));
    }
  }
  return spec;
}

std::vector<float> istft(const Spectrogram& spec, const StftConfig& cfg, std::size_t out_len) {
  if (spec.magnitude.shape() != spec.phase.shape() || spec.magnitude.rank() != 2) {
    throw std::invalid_argument("istft: magnitude and phase must share a [F, frames] shape");
  }
  return istft(spec.magnitude.data(), spec.phase.data(), spec.magnitude.dim(1), cfg, out_len);
}

std::vector<float> istft(std::span<const float> magnitude, std::span<const float> phase,
                         std::size_t frames, const StftConfig& cfg, std::size_t out_len) {
  cfg.validate();
  const std::size_t bins = cfg.freq_bins();
  if (frames == 0 || magnitude.size() != bins * frames || phase.size() != bins * frames) {
    throw std::invalid_argument("istft: spectrum shape does not match [" + std::to_string(bins) +
                                ", " + std::to_string(frames) + "]");
  }
  const std::size_t f = cfg.fft_size;
  const std::size_t total = f + cfg.hop * (frames - 1);
  const std::size_t start = cfg.center ? f / 2 : 0;
  if (start + out_len > total) {
    throw std::invalid_argument("istft: requested " + std::to_string(out_len) +
                                " samples but frames only cover " +
                                std::to_string(total - start));
  }
  const auto window = padded_window(cfg);
  const FftPlan plan(f);

  std::vector<double> ola(total, 0.0);
  std::vector<double> env(total, 0.0);
  std::vector<std::complex<double>> half(bins);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t k = 0; k < bins; ++k) {
      half[k] = std::polar(static_cast<double>(magnitude[k * frames + t]),
                           static_cast<double>(phase[k * frames + t]));
    }
    const auto frame = plan.irfft(half);
    double* o = ola.data() + t * cfg.hop;
    double* e = env.data() + t * cfg.hop;
    for (std::size_t i = 0; i < f; ++i) {
      o[i] += frame[i] * window[i];
      e[i] += window[i] * window[i];
    }
  }

  std::vector<float> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    const double denom = env[start + i];
    if (denom < kEnvelopeEpsilon) {
      throw std::invalid_argument("istft: NOLA violated, squared-window envelope is zero at sample " +
                                  std::to_string(i));
    }
    out[i] = static_cast<float>(ola[start + i] / denom);
  }
  return out;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Tensor mel_filterbank(double sample_rate, std::size_t fft_size, std::size_t n_mels,
                      double fmin, double fmax) {
  if (!(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0)) {
    throw std::invalid_argument("mel_filterbank: need 0 <= fmin < fmax <= sr/2");
  }
  if (n_mels == 0 || fft_size < 2) throw std::invalid_argument("mel_filterbank: empty bank");
  const std::size_t bins = fft_size / 2 + 1;
  const double mel_lo = hz_to_mel(fmin), mel_hi = hz_to_mel(fmax);
  std::vector<double> edges(n_mels + 2);
  for (std::size_t m = 0; m < edges.size(); ++m) {
    edges[m] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(m) / (n_mels + 1));
  }
  Tensor fb({n_mels, bins});
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double hz = static_cast<double>(k) * sample_rate / static_cast<double>(fft_size);
      const double rising = (hz - left) / (center - left);
      const double falling = (right - hz) / (right - center);
      fb.at(m, k) = static_cast<float>(std::max(0.0, std::min(rising, falling)));
    }
  }
  return fb;
}

Tensor log_mel(std::span<const float> x, double sample_rate, const StftConfig& cfg,
               std::size_t n_mels, double fmin, double fmax) {
  const Tensor fb = mel_filterbank(sample_rate, cfg.fft_size, n_mels, fmin, fmax);
  const Spectrogram spec = stft(x, cfg);
  const std::size_t bins = cfg.freq_bins();
  const std::size_t frames = spec.magnitude.dim(1);
  Tensor out({n_mels, frames});
  for (std::size_t m = 0; m < n_mels; ++m) {
    for (std::size_t t = 0; t < frames; ++t) {
      double sum = 0.0;
      for (std::size_t k = 0; k < bins; ++k) {
        sum += static_cast<double>(fb.at(m, k)) * spec.magnitude.at(k, t);
      }
      out.at(m, t) = std::log(std::max(static_cast<float>(sum), kLogFloor));
    }
  }
  return out;
}

}  // namespace istftnet
