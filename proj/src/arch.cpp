#include "istftnet/arch.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace istftnet {

const std::vector<NamedArch>& named_archs() {
  static const std::vector<NamedArch> archs{
      {"hifigan-v2", "C8C8C2C2"},
      {"istftnet-c8c8i4", "C8C8I4"},
      {"istftnet-c8c1i32", "C8C1I32"},
      {"istftnet2-base", "C8RI32"},
      {"istftnet2-small", "C8SI32"},
      {"istftnet-mb", "C4C4I4B4"},
      {"istftnet2-mb", "C4SI16B4"},
  };
  return archs;
}

bool ArchSpec::has_2d() const {
  return std::any_of(stages.begin(), stages.end(),
                     [](const Stage& s) { return std::holds_alternative<Blocks2dStage>(s); });
}

std::vector<std::size_t> ArchSpec::conv_factors() const {
  std::vector<std::size_t> out;
  for (const auto& s : stages) {
    if (const auto* c = std::get_if<Conv1dStage>(&s)) out.push_back(c->factor);
  }
  return out;
}

std::size_t ArchSpec::neural_upsampling() const {
  std::size_t p = 1;
  for (auto f : conv_factors()) p *= f;
  return p;
}

StftConfig ArchSpec::istft_config() const {
  if (!has_istft()) throw std::logic_error("arch has no iSTFT stage");
  return istft_params(base, istft_scale());
}

std::size_t ArchSpec::head_freq_bins() const {
  return has_istft() ? istft_config().freq_bins() : 0;
}

std::string ArchSpec::canonical() const {
  std::string out;
  for (const auto& s : stages) {
    if (const auto* c = std::get_if<Conv1dStage>(&s)) {
      out += "C" + std::to_string(c->factor);
    } else {
      out += std::get<Blocks2dStage>(s).kind == Block2dKind::res ? "R" : "S";
    }
  }
  if (has_istft()) out += "I" + std::to_string(istft_hop);
  if (bands != 1) out += "B" + std::to_string(bands);
  return out;
}

void ArchSpec::validate() const {
  base.validate();
  const auto factors = conv_factors();
  if (factors.empty()) throw std::invalid_argument("arch: at least one C stage is required");
  for (auto f : factors) {
    if (f != 1 && f != 2 && f != 4 && f != 8) {
      throw std::invalid_argument("arch: unsupported C factor " + std::to_string(f) +
                                  " (expected 1, 2, 4 or 8)");
    }
  }
  const auto n2d = std::count_if(stages.begin(), stages.end(), [](const Stage& s) {
    return std::holds_alternative<Blocks2dStage>(s);
  });
  if (n2d > 1) throw std::invalid_argument("arch: at most one 2D stage is allowed");
  if (n2d == 1) {
    if (!std::holds_alternative<Blocks2dStage>(stages.back())) {
      throw std::invalid_argument("arch: the 2D stage must follow all C stages");
    }
    if (!has_istft()) throw std::invalid_argument("arch: a 2D stage requires an iSTFT (I) token");
  }
  if (bands != 1 && bands != 4) {
    throw std::invalid_argument("arch: unsupported band count " + std::to_string(bands) +
                                " (PQMF is designed for 1 or 4 bands)");
  }
  const std::size_t hop = has_istft() ? istft_hop : 1;
  const std::size_t total = neural_upsampling() * hop * bands;
  if (total != base.hop) {
    throw std::invalid_argument("arch: temporal budget " + std::to_string(total) +
                                " != hop length " + std::to_string(base.hop));
  }
  if (has_istft()) {
    const std::size_t s = istft_scale();
    if (base.fft_size % s || base.hop % s || base.win_length % s) {
      throw std::invalid_argument("arch: scale " + std::to_string(s) +
                                  " does not divide the base STFT configuration");
    }
    if (istft_config().hop != istft_hop) {
      throw std::logic_error("arch: iSTFT hop inconsistent with budget");
    }
  }
}

namespace {

std::size_t read_int(std::string_view text, std::size_t& pos) {
  const std::size_t start = pos;
  std::size_t value = 0;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    value = value * 10 + static_cast<std::size_t>(text[pos] - '0');
    if (value > 1'000'000) throw std::invalid_argument("arch: number too large");
    ++pos;
  }
  if (pos == start) {
    throw std::invalid_argument("arch: expected a number at position " + std::to_string(start));
  }
  if (value == 0) throw std::invalid_argument("arch: factors must be positive");
  return value;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

ArchSpec parse_arch(std::string_view text, const StftConfig& base) {
  const std::string key = lower(text);
  for (const auto& named : named_archs()) {
    if (key == named.alias) return parse_arch(named.canonical, base);
  }

  std::string upper(text);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  const std::string_view src = upper;

  ArchSpec spec;
  spec.base = base;
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("arch: cannot parse '" + std::string(text) + "': " + why);
  };
  while (pos < src.size() && src[pos] == 'C') {
    ++pos;
    spec.stages.push_back(Conv1dStage{read_int(src, pos)});
  }
  if (spec.stages.empty()) fail("expected a C<int> stage first");
  if (pos < src.size() && (src[pos] == 'R' || src[pos] == 'S')) {
    spec.stages.push_back(Blocks2dStage{src[pos] == 'R' ? Block2dKind::res : Block2dKind::shuffle});
    ++pos;
  }
  if (pos < src.size() && src[pos] == 'I') {
    ++pos;
    spec.istft_hop = read_int(src, pos);
  }
  if (pos < src.size() && src[pos] == 'B') {
    ++pos;
    spec.bands = read_int(src, pos);
  }
  if (pos != src.size()) fail("unexpected '" + std::string(1, src[pos]) + "'");
  spec.validate();
  return spec;
}

}  // namespace istftnet
