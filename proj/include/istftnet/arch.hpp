#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "istftnet/blocks.hpp"
#include "istftnet/dsp.hpp"

namespace istftnet {

/// `C<x>`: 1D upsampling stage (x`x` temporal upsampling) followed by an MRF block.
struct Conv1dStage {
  std::size_t factor = 1;
  bool operator==(const Conv1dStage&) const = default;
};

/// `R` / `S`: a 2D trunk of ResBlocks / ShuffleBlocks (no temporal upsampling).
struct Blocks2dStage {
  Block2dKind kind = Block2dKind::res;
  bool operator==(const Blocks2dStage&) const = default;
};

using Stage = std::variant<Conv1dStage, Blocks2dStage>;

/// Parsed architecture string, e.g. "C8C8I4", "C8SI32", "C4C4I4B4".
///
/// The `I<y>` token is the iSTFT's own temporal upsampling, i.e. its hop.
/// The iSTFT frame geometry follows from the time-frequency trade-off: after
/// the network upsamples by s = prod(C factors) and splits into b bands, the
/// iSTFT runs at (f, h, w) / (s * b) of the base analysis configuration.
/// Without an `I` token the network emits waveform samples directly.
struct ArchSpec {
  std::vector<Stage> stages;
  std::size_t istft_hop = 0;  // 0: no iSTFT (waveform head)
  std::size_t bands = 1;
  StftConfig base = default_stft_config();

  bool has_istft() const { return istft_hop != 0; }
  bool has_2d() const;
  std::size_t neural_upsampling() const;
  std::vector<std::size_t> conv_factors() const;
  /// s * b, the divisor applied to the base STFT configuration.
  std::size_t istft_scale() const { return neural_upsampling() * bands; }
  StftConfig istft_config() const;
  /// Frequency bins of the spectrum the network predicts per band.
  std::size_t head_freq_bins() const;
  std::string canonical() const;

  /// Budget and divisibility checks; throws std::invalid_argument.
  void validate() const;

  bool operator==(const ArchSpec&) const = default;
};

/// Grammar: (C<int>)+ [R|S]? (I<int>)? (B<int>)?, or one of the named aliases
/// (hifigan-v2, istftnet-c8c8i4, istftnet-c8c1i32, istftnet2-base,
/// istftnet2-small, istftnet-mb, istftnet2-mb).
ArchSpec parse_arch(std::string_view text, const StftConfig& base = default_stft_config());

struct NamedArch {
  std::string_view alias;
  std::string_view canonical;
};
const std::vector<NamedArch>& named_archs();

}  // namespace istftnet
