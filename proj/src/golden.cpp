#include "istftnet/golden.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "istftnet/dsp.hpp"
#include "istftnet/io.hpp"
#include "istftnet/ops.hpp"
#include "istftnet/pqmf.hpp"

namespace istftnet {

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument("compare: shape " + shape_str(a.shape()) + " vs " +
                                shape_str(b.shape()));
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(static_cast<double>(a[i]) - b[i]));
  }
  return m;
}

double max_rel_diff(const Tensor& a, const Tensor& b) {
  double scale = 0.0;
  for (float v : b.data()) scale = std::max(scale, std::abs(static_cast<double>(v)));
  const double diff = max_abs_diff(a, b);
  return scale > 0.0 ? diff / scale : diff;
}

namespace {

using nlohmann::json;

std::vector<std::size_t> axis_list(const json& c, const char* key, std::size_t rank,
                                   std::size_t fallback) {
  if (!c.contains(key)) return std::vector<std::size_t>(rank, fallback);
  auto v = c.at(key).get<std::vector<std::size_t>>();
  if (v.size() != rank) throw FormatError(std::string("golden: '") + key + "' has wrong rank");
  return v;
}

Tensor run_conv(const std::string& op, const json& c, const TensorFile& file) {
  const Tensor& input = file.get("input");
  const bool two_d = op == "conv2d" || op == "conv_transpose2d";
  const std::size_t rank = two_d ? 2 : 1;
  ConvParams p;
  p.weight = file.get("weight");
  p.bias = file.get("bias");
  if (p.weight.rank() != rank + 2) throw FormatError("golden: weight rank mismatch");
  p.out_channels = p.weight.dim(0);
  p.in_channels = p.weight.dim(1);
  p.kernel.assign(p.weight.shape().begin() + 2, p.weight.shape().end());
  p.stride = axis_list(c, "stride", rank, 1);
  p.padding = axis_list(c, "padding", rank, 0);
  p.dilation = axis_list(c, "dilation", rank, 1);
  if (op == "conv1d") return conv1d(input, p);
  if (op == "conv_transpose1d") return conv_transpose1d(input, p);
  if (op == "conv2d") return conv2d(input, p);
  return conv_transpose2d(input, p);
}

GoldenResult run_case(const json& c, const std::filesystem::path& dir) {
  GoldenResult r;
  r.name = c.at("name").get<std::string>();
  r.op = c.at("op").get<std::string>();
  if (c.contains("rtol")) {
    r.relative = true;
    r.tolerance = c.at("rtol").get<double>();
  } else {
    r.tolerance = c.at("atol").get<double>();
  }
  const TensorFile file = read_tensor_file(dir / c.at("file").get<std::string>());

  Tensor actual, expected;
  if (r.op == "conv1d" || r.op == "conv_transpose1d" || r.op == "conv2d" ||
      r.op == "conv_transpose2d") {
    actual = run_conv(r.op, c, file);
    expected = file.get("expected");
  } else if (r.op == "mel_filterbank") {
    actual = mel_filterbank(c.at("sample_rate").get<double>(), c.at("n_fft").get<std::size_t>(),
                            c.at("n_mels").get<std::size_t>(), c.value("fmin", kMelFmin),
                            c.value("fmax", kMelFmax));
    expected = file.get("filterbank");
  } else if (r.op == "stft") {
    StftConfig cfg{c.at("fft_size").get<std::size_t>(), c.at("hop").get<std::size_t>(),
                   c.at("win_length").get<std::size_t>()};
    actual = stft(file.get("signal").data(), cfg).magnitude;
    expected = file.get("magnitude");
  } else if (r.op == "pqmf_prototype") {
    actual = PqmfBank::design(c.value("bands", std::size_t{4}), c.value("taps", std::size_t{62}),
                              c.value("cutoff", 0.142), c.value("beta", 9.0))
                 .prototype;
    expected = file.get("prototype");
  } else {
    throw FormatError("golden: unknown op '" + r.op + "'");
  }
  r.error = r.relative ? max_rel_diff(actual, expected) : max_abs_diff(actual, expected);
  r.passed = r.error <= r.tolerance;
  return r;
}

}  // namespace

std::vector<GoldenResult> verify_golden(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw std::runtime_error("cannot open manifest '" + manifest.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(std::string("golden: malformed manifest: ") + e.what());
  }
  if (doc.value("version", 0) != 1) throw FormatError("golden: unsupported manifest version");

  std::vector<GoldenResult> results;
  for (const auto& c : doc.at("cases")) {
    try {
      results.push_back(run_case(c, manifest.parent_path()));
    } catch (const std::exception& e) {
      GoldenResult r;
      r.name = c.value("name", std::string("?"));
      r.op = c.value("op", std::string("?"));
      r.detail = e.what();
      results.push_back(std::move(r));
    }
  }
  return results;
}

}  // namespace istftnet
