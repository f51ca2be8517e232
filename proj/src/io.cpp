#include "istftnet/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <set>

namespace istftnet {

namespace {

constexpr char kCheckpointMagic[4] = {'I', 'S', 'N', '2'};
constexpr char kMelMagic[4] = {'M', 'E', 'L', '0'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const char*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  void u16(std::uint16_t v) {
    buf_.push_back(static_cast<char>(v & 0xff));
    buf_.push_back(static_cast<char>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (!out) throw std::runtime_error("write failed: '" + path.string() + "'");
  }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    buf_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  void need(std::size_t n) const {
    if (buf_.size() - pos_ < n) throw FormatError("truncated file");
  }
  void bytes(void* p, std::size_t n) {
    need(n);
    std::copy_n(buf_.data() + pos_, n, static_cast<char*>(p));
    pos_ += n;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::uint16_t u16() {
    need(2);
    const auto lo = static_cast<unsigned char>(buf_[pos_]);
    const auto hi = static_cast<unsigned char>(buf_[pos_ + 1]);
    pos_ += 2;
    return static_cast<std::uint16_t>(lo | (hi << 8));
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(buf_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == buf_.size(); }
  std::size_t remaining() const { return buf_.size() - pos_; }

 private:
  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

void expect_magic(Reader& r, const char (&magic)[4]) {
  char got[4];
  try {
    r.bytes(got, 4);
  } catch (const FormatError&) {
    throw FormatError("bad magic");
  }
  if (!std::equal(got, got + 4, magic)) throw FormatError("bad magic");
}

}  // namespace

const Tensor& TensorFile::get(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return e.tensor;
  }
  throw FormatError("missing tensor: " + name);
}

void write_tensor_file(const std::filesystem::path& path, const TensorFile& file) {
  std::set<std::string> names;
  Writer w;
  w.bytes(kCheckpointMagic, 4);
  w.u32(kCheckpointVersion);
  w.str(file.arch);
  w.u32(static_cast<std::uint32_t>(file.entries.size()));
  for (const auto& e : file.entries) {
    if (!names.insert(e.name).second) throw FormatError("duplicate tensor name: " + e.name);
    w.str(e.name);
    w.u32(static_cast<std::uint32_t>(e.tensor.rank()));
    for (auto d : e.tensor.shape()) w.u32(static_cast<std::uint32_t>(d));
    for (float v : e.tensor.data()) w.f32(v);
  }
  w.save(path);
}

TensorFile read_tensor_file(const std::filesystem::path& path) {
  Reader r(path);
  expect_magic(r, kCheckpointMagic);
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("version mismatch: file has " + std::to_string(version) + ", expected " +
                      std::to_string(kCheckpointVersion));
  }
  TensorFile file;
  file.arch = r.str();
  const std::uint32_t count = r.u32();
  std::set<std::string> names;
  for (std::uint32_t i = 0; i < count; ++i) {
    TensorEntry e;
    e.name = r.str();
    if (!names.insert(e.name).second) throw FormatError("duplicate tensor name: " + e.name);
    const std::uint32_t ndim = r.u32();
    if (ndim == 0 || ndim > 8) throw FormatError("bad rank for tensor: " + e.name);
    Shape shape(ndim);
    std::size_t numel = 1;
    for (auto& d : shape) {
      d = r.u32();
      if (d == 0) throw FormatError("zero dimension in tensor: " + e.name);
      numel *= d;
    }
    r.need(numel * 4);
    std::vector<float> data(numel);
    for (auto& v : data) v = r.f32();
    e.tensor = Tensor(std::move(shape), std::move(data));
    file.entries.push_back(std::move(e));
  }
  if (!r.at_end()) throw FormatError("trailing bytes after last tensor");
  return file;
}

void save_checkpoint(const ModelGraph& graph, const std::filesystem::path& path) {
  TensorFile file;
  file.arch = graph.arch.canonical();
  for_each_param(graph, [&](const std::string& name, const Tensor& t) {
    file.entries.push_back({name, t});
  });
  write_tensor_file(path, file);
}

ModelGraph load_checkpoint(const std::filesystem::path& path) {
  TensorFile file = read_tensor_file(path);
  ArchSpec arch;
  try {
    arch = parse_arch(file.arch);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid arch string in checkpoint: ") + e.what());
  }
  ModelGraph graph = build(arch, Hyper::defaults_for(arch));

  std::map<std::string, Tensor*> expected;
  for_each_param(graph, [&](const std::string& name, Tensor& t) { expected[name] = &t; });
  for (auto& e : file.entries) {
    auto it = expected.find(e.name);
    if (it == expected.end()) throw FormatError("unknown tensor: " + e.name);
    if (it->second->shape() != e.tensor.shape()) throw FormatError("shape mismatch: " + e.name);
  }
  if (file.entries.size() != expected.size()) {
    std::set<std::string> present;
    for (const auto& e : file.entries) present.insert(e.name);
    for (const auto& [name, _] : expected) {
      if (!present.contains(name)) throw FormatError("missing tensor: " + name);
    }
  }
  for (auto& e : file.entries) *expected[e.name] = std::move(e.tensor);
  return graph;
}

void write_mel(const MelFile& mel, const std::filesystem::path& path) {
  if (mel.features.rank() != 2) throw std::invalid_argument("write_mel: features must be [n_mels, frames]");
  Writer w;
  w.bytes(kMelMagic, 4);
  w.u32(mel.sample_rate);
  w.u32(static_cast<std::uint32_t>(mel.features.dim(0)));
  w.u32(static_cast<std::uint32_t>(mel.features.dim(1)));
  for (float v : mel.features.data()) w.f32(v);
  w.save(path);
}

MelFile read_mel(const std::filesystem::path& path) {
  Reader r(path);
  expect_magic(r, kMelMagic);
  MelFile mel;
  mel.sample_rate = r.u32();
  const std::uint32_t n_mels = r.u32();
  const std::uint32_t frames = r.u32();
  if (n_mels == 0 || frames == 0) throw FormatError("empty mel header");
  const std::size_t numel = std::size_t{n_mels} * frames;
  if (r.remaining() != numel * 4) {
    throw FormatError(r.remaining() < numel * 4 ? "truncated file" : "length mismatch");
  }
  std::vector<float> data(numel);
  for (auto& v : data) v = r.f32();
  mel.features = Tensor({n_mels, frames}, std::move(data));
  return mel;
}

void write_wav(std::span<const float> audio, std::uint32_t sample_rate,
               const std::filesystem::path& path) {
  if (sample_rate == 0) throw std::invalid_argument("write_wav: sample rate must be positive");
  const auto data_bytes = static_cast<std::uint32_t>(audio.size() * 2);
  Writer w;
  w.bytes("RIFF", 4);
  w.u32(36 + data_bytes);
  w.bytes("WAVE", 4);
  w.bytes("fmt ", 4);
  w.u32(16);
  w.u16(1);  // PCM
  w.u16(1);  // mono
  w.u32(sample_rate);
  w.u32(sample_rate * 2);
  w.u16(2);
  w.u16(16);
  w.bytes("data", 4);
  w.u32(data_bytes);
  for (float v : audio) {
    if (!std::isfinite(v)) throw std::invalid_argument("write_wav: non-finite sample");
    const float clamped = std::clamp(v, -1.0f, 1.0f);
    w.u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(clamped * 32767.0f))));
  }
  w.save(path);
}

WavData read_wav(const std::filesystem::path& path) {
  Reader r(path);
  char tag[4];
  r.bytes(tag, 4);
  if (!std::equal(tag, tag + 4, "RIFF")) throw FormatError("bad magic");
  r.u32();
  r.bytes(tag, 4);
  if (!std::equal(tag, tag + 4, "WAVE")) throw FormatError("bad magic");
  r.bytes(tag, 4);
  if (!std::equal(tag, tag + 4, "fmt ") || r.u32() != 16) throw FormatError("unsupported wav layout");
  if (r.u16() != 1 || r.u16() != 1) throw FormatError("only PCM mono is supported");
  WavData wav;
  wav.sample_rate = r.u32();
  r.u32();
  r.u16();
  if (r.u16() != 16) throw FormatError("only 16-bit samples are supported");
  r.bytes(tag, 4);
  if (!std::equal(tag, tag + 4, "data")) throw FormatError("missing data chunk");
  const std::uint32_t bytes = r.u32();
  if (r.remaining() != bytes || bytes % 2) throw FormatError("truncated file");
  wav.samples.resize(bytes / 2);
  for (auto& s : wav.samples) s = static_cast<std::int16_t>(r.u16());
  return wav;
}

}  // namespace istftnet
