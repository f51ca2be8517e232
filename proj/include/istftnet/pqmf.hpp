#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "istftnet/tensor.hpp"

namespace istftnet {

/// Cosine-modulated pseudo-QMF bank built from one Kaiser-windowed sinc
/// prototype of `taps + 1` coefficients. Both directions pad by taps/2 on
/// each side, so the bank is zero-phase (no group delay to compensate).
struct PqmfBank {
  std::size_t bands = 4;
  std::size_t taps = 62;
  double cutoff = 0.142;
  double beta = 9.0;
  Tensor prototype;  // [taps + 1]
  Tensor analysis;   // [bands, taps + 1]
  Tensor synthesis;  // [bands, taps + 1]

  static PqmfBank design(std::size_t bands = 4, std::size_t taps = 62, double cutoff = 0.142,
                         double beta = 9.0);
};

/// Filter then decimate: audio[b*T] -> [b, T].
Tensor pqmf_analysis(const PqmfBank& bank, std::span<const float> x);
/// Zero-insert upsample by b, filter with b-scaled synthesis filters, sum bands.
std::vector<float> pqmf_synthesis(const PqmfBank& bank, const Tensor& sub);

}  // namespace istftnet
