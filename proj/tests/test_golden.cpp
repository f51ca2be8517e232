#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

#include "istftnet/dsp.hpp"
#include "istftnet/golden.hpp"
#include "istftnet/io.hpp"
#include "istftnet/pqmf.hpp"
#include "istftnet/reference.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace istftnet;
using nlohmann::json;
using istftnet::testing::random_tensor;
using istftnet::testing::randomize;

namespace {

struct GoldenDir {
  fs::path dir;
  json cases = json::array();

  explicit GoldenDir(const std::string& name)
      : dir(fs::temp_directory_path() / ("istftnet_golden_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }

  void add(json c, std::vector<TensorEntry> tensors) {
    const std::string file = c.at("name").get<std::string>() + ".isn2";
    write_tensor_file(dir / file, TensorFile{"", std::move(tensors)});
    c["file"] = file;
    cases.push_back(std::move(c));
  }

  fs::path write(int version = 1) const {
    const fs::path m = dir / "manifest.json";
    std::ofstream(m) << json{{"version", version}, {"cases", cases}}.dump(2);
    return m;
  }
};

void add_conv(GoldenDir& g, const std::string& name, const std::string& op, ConvParams p,
              const Tensor& x, const Tensor& expected) {
  json c{{"name", name}, {"op", op}, {"stride", p.stride}, {"padding", p.padding},
         {"dilation", p.dilation}, {"rtol", 1e-5}};
  g.add(c, {{"input", x}, {"weight", p.weight}, {"bias", p.bias}, {"expected", expected}});
}

}  // namespace

TEST_CASE("golden conv vectors from the direct-loop oracle pass", "[golden]") {
  GoldenDir g("conv");
  std::mt19937 rng(1);
  {
    ConvParams p = ConvParams::conv1d(3, 2, 5, 2, 4, 2);
    randomize(p, rng);
    const Tensor x = random_tensor({3, 20}, rng);
    add_conv(g, "c1", "conv1d", p, x, reference::conv1d(x, p));
  }
  {
    ConvParams p = ConvParams::conv1d(4, 2, 16, 8, 4);
    randomize(p, rng);
    const Tensor x = random_tensor({4, 5}, rng);
    add_conv(g, "t1", "conv_transpose1d", p, x, reference::conv_transpose1d(x, p));
  }
  {
    ConvParams p = ConvParams::conv2d(2, 3, {3, 3}, {1, 1}, {1, 1});
    randomize(p, rng);
    const Tensor x = random_tensor({2, 6, 7}, rng);
    add_conv(g, "c2", "conv2d", p, x, reference::conv2d(x, p));
  }
  {
    ConvParams p = ConvParams::conv2d(4, 2, {4, 1}, {2, 1}, {1, 0});
    randomize(p, rng);
    const Tensor x = random_tensor({4, 8, 3}, rng);
    add_conv(g, "t2", "conv_transpose2d", p, x, reference::conv_transpose2d(x, p));
  }
  {
    // a deliberately wrong expectation must be caught
    ConvParams p = ConvParams::conv1d(1, 1, 3, 1, 1);
    randomize(p, rng);
    const Tensor x = random_tensor({1, 8}, rng);
    Tensor wrong = reference::conv1d(x, p);
    wrong[3] += 1.0f;
    add_conv(g, "bad", "conv1d", p, x, wrong);
  }
  const auto results = verify_golden(g.write());
  REQUIRE(results.size() == 5);
  for (std::size_t i = 0; i < 4; ++i) {
    INFO(results[i].name << " error " << results[i].error << " " << results[i].detail);
    CHECK(results[i].passed);
    CHECK(results[i].relative);
  }
  CHECK_FALSE(results[4].passed);
  CHECK(results[4].error > 1e-3);
}

TEST_CASE("golden dsp vectors", "[golden]") {
  GoldenDir g("dsp");
  {
    // bin-centered sine; expected magnitudes from a direct dft per frame
    const std::size_t n = 64, hop = 16, len = 512;
    std::vector<float> x(len);
    for (std::size_t i = 0; i < len; ++i) {
      x[i] = static_cast<float>(std::sin(2.0 * std::numbers::pi * 6.0 * i / n));
    }
    StftConfig cfg{n, hop, n};
    const auto w = padded_window(cfg);
    const std::size_t frames = len / hop + 1;
    Tensor mag({n / 2 + 1, frames});
    for (std::size_t t = 0; t < frames; ++t) {
      std::vector<std::complex<double>> frame(n);
      for (std::size_t i = 0; i < n; ++i) {
        long j = static_cast<long>(t * hop + i) - static_cast<long>(n / 2);
        if (j < 0) j = -j;
        if (j >= static_cast<long>(len)) j = 2 * static_cast<long>(len) - 2 - j;
        frame[i] = w[i] * x[static_cast<std::size_t>(j)];
      }
      const auto spec = reference::dft(frame);
      for (std::size_t k = 0; k <= n / 2; ++k) mag.at(k, t) = static_cast<float>(std::abs(spec[k]));
    }
    g.add({{"name", "sine"}, {"op", "stft"}, {"fft_size", n}, {"hop", hop}, {"win_length", n},
           {"rtol", 1e-4}},
          {{"signal", Tensor({len}, x)}, {"magnitude", mag}});
  }
  {
    Tensor fb = mel_filterbank(22050.0, 1024, 80, 0.0, 8000.0);
    g.add({{"name", "fb"}, {"op", "mel_filterbank"}, {"sample_rate", 22050}, {"n_fft", 1024},
           {"n_mels", 80}, {"fmin", 0.0}, {"fmax", 8000.0}, {"atol", 1e-4}},
          {{"filterbank", fb}});
    fb[100] += 0.01f;
    g.add({{"name", "fb_bad"}, {"op", "mel_filterbank"}, {"sample_rate", 22050}, {"n_fft", 1024},
           {"n_mels", 80}, {"atol", 1e-4}},
          {{"filterbank", fb}});
  }
  g.add({{"name", "pq"}, {"op", "pqmf_prototype"}, {"atol", 1e-6}},
        {{"prototype", PqmfBank::design().prototype}});
  g.add({{"name", "odd"}, {"op", "fft_of_something"}, {"atol", 1.0}}, {{"x", Tensor({1})}});

  const auto r = verify_golden(g.write());
  REQUIRE(r.size() == 5);
  CHECK(r[0].passed);
  CHECK(r[1].passed);
  CHECK_FALSE(r[2].passed);
  CHECK(r[3].passed);
  CHECK_FALSE(r[4].passed);
  CHECK_THAT(r[4].detail, Catch::Matchers::ContainsSubstring("unknown op"));
}

TEST_CASE("golden manifest errors", "[golden]") {
  GoldenDir g("errors");
  CHECK_THROWS_AS(verify_golden(g.write(2)), FormatError);
  std::ofstream(g.dir / "broken.json") << "{not json";
  CHECK_THROWS_AS(verify_golden(g.dir / "broken.json"), FormatError);
  CHECK_THROWS(verify_golden(g.dir / "absent.json"));

  g.add({{"name", "missing"}, {"op", "conv1d"}, {"rtol", 1e-5}}, {{"input", Tensor({1, 4})}});
  const auto r = verify_golden(g.write());
  REQUIRE(r.size() == 1);
  CHECK_FALSE(r[0].passed);
  CHECK_THAT(r[0].detail, Catch::Matchers::ContainsSubstring("missing tensor"));
}
