#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "istftnet/dsp.hpp"
#include "istftnet/fft.hpp"
#include "istftnet/pqmf.hpp"
#include "istftnet/reference.hpp"
#include "test_util.hpp"

using namespace istftnet;
using istftnet::testing::random_signal;
using istftnet::testing::rel_l2;

namespace {

StftConfig config(std::size_t n, std::size_t hop, std::size_t win) {
  StftConfig c;
  c.fft_size = n;
  c.hop = hop;
  c.win_length = win;
  return c;
}

double snr_db(const std::vector<float>& y, const std::vector<float>& x, std::size_t begin,
              std::size_t end) {
  return 20.0 * std::log10(rel_l2(y, x, begin, end));
}

}  // namespace

TEST_CASE("fft matches the naive dft", "[fft]") {
  std::mt19937 rng(1);
  for (std::size_t n : {1u, 2u, 8u, 64u, 256u}) {
    const std::vector<float> xf = random_signal(n, rng);
    const std::vector<double> x(xf.begin(), xf.end());
    FftPlan plan(n);
    const auto fast = plan.rfft(x);
    std::vector<std::complex<double>> xc(x.begin(), x.end());
    const auto slow = reference::dft(xc);
    REQUIRE(fast.size() == n / 2 + 1);
    for (std::size_t k = 0; k < fast.size(); ++k) {
      CHECK(std::abs(fast[k] - slow[k]) < 1e-9 * static_cast<double>(n));
    }
    const auto back = plan.irfft(fast);
    for (std::size_t i = 0; i < n; ++i) CHECK(back[i] == Catch::Approx(x[i]).margin(1e-9));
  }
  CHECK_THROWS_AS(FftPlan(12), std::invalid_argument);
}

TEST_CASE("istft parameters scale with upsampling", "[dsp]") {
  const StftConfig base = default_stft_config();
  const StftConfig a = istft_params(base, 64);
  CHECK(a.fft_size == 16);
  CHECK(a.hop == 4);
  CHECK(a.win_length == 16);
  CHECK(a.freq_bins() == 9);
  const StftConfig b = istft_params(base, 8);
  CHECK(b.fft_size == 128);
  CHECK(b.hop == 32);
  CHECK(b.freq_bins() == 65);
  CHECK_THROWS_AS(istft_params(base, 3), std::invalid_argument);
  CHECK_THROWS_AS(istft_params(base, 512), std::invalid_argument);

  SECTION("length consistency: T frames at hop h produce hop*T samples") {
    for (std::size_t s : {1u, 4u, 8u, 16u, 32u, 64u}) {
      const StftConfig c = istft_params(base, s);
      CHECK(c.hop * s == base.hop);
      const std::size_t frames = 13;
      Tensor mag({c.freq_bins(), frames});
      Tensor ph({c.freq_bins(), frames});
      const auto y = istft(Spectrogram{mag, ph}, c, c.hop * frames);
      CHECK(y.size() == c.hop * frames);
    }
  }
}

TEST_CASE("stft examples", "[dsp][stft]") {
  SECTION("constant signal concentrates in bin 0") {
    const StftConfig c = config(16, 4, 16);
    const std::vector<float> x(64, 1.0f);
    const Spectrogram s = stft(x, c);
    CHECK(s.magnitude.shape() == Shape{9, 17});
    double wsum = 0.0;
    for (double w : padded_window(c)) wsum += w;
    for (std::size_t t = 0; t < 17; ++t) {
      CHECK(s.magnitude.at(0, t) == Catch::Approx(wsum).epsilon(1e-5));
      for (std::size_t k = 2; k < 9; ++k) CHECK(s.magnitude.at(k, t) < 1e-4);
    }
  }
  SECTION("bin-centered sine puts its energy in bin k0") {
    const StftConfig c = config(64, 16, 64);
    const std::size_t k0 = 5;
    std::vector<float> x(640);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = static_cast<float>(std::cos(2.0 * std::numbers::pi * k0 * i / 64.0));
    }
    const Spectrogram s = stft(x, c);
    const std::size_t t = 20;
    double total = 0.0, near = 0.0;
    for (std::size_t k = 0; k < c.freq_bins(); ++k) {
      const double e = static_cast<double>(s.magnitude.at(k, t)) * s.magnitude.at(k, t);
      total += e;
      if (k + 1 >= k0 && k <= k0 + 1) near += e;
    }
    CHECK(near / total >= 0.9);
    CHECK(s.magnitude.at(k0, t) > s.magnitude.at(k0 - 1, t));
    CHECK(s.magnitude.at(k0, t) > s.magnitude.at(k0 + 1, t));
  }
  SECTION("frames match a direct dft of the windowed frame") {
    const StftConfig c = config(32, 8, 24);
    std::mt19937 rng(3);
    const std::vector<float> x = random_signal(200, rng);
    const Spectrogram s = stft(x, c);
    const std::vector<double> w = padded_window(c);
    const std::size_t t = 10;  // interior frame, starts at t*hop - n/2
    std::vector<std::complex<double>> frame(32);
    for (std::size_t i = 0; i < 32; ++i) frame[i] = w[i] * x[t * 8 - 16 + i];
    const auto ref = reference::dft(frame);
    for (std::size_t k = 0; k < c.freq_bins(); ++k) {
      CHECK(s.magnitude.at(k, t) == Catch::Approx(std::abs(ref[k])).margin(1e-5));
    }
  }
  SECTION("zero signal") {
    const Spectrogram s = stft(std::vector<float>(100, 0.0f), config(16, 4, 16));
    for (float v : s.magnitude.data()) CHECK(v == 0.0f);
  }
  SECTION("too short for reflection padding") {
    CHECK_THROWS_AS(stft(std::vector<float>(8, 0.0f), config(32, 8, 32)), std::invalid_argument);
  }
  SECTION("invalid configurations") {
    CHECK_THROWS_AS(config(24, 4, 16).validate(), std::invalid_argument);
    CHECK_THROWS_AS(config(16, 20, 16).validate(), std::invalid_argument);
    CHECK_THROWS_AS(config(16, 4, 32).validate(), std::invalid_argument);
    CHECK_THROWS_AS(config(16, 0, 16).validate(), std::invalid_argument);
  }
}

TEST_CASE("parseval on rectangular single frames", "[dsp][stft]") {
  StftConfig c = config(64, 64, 64);
  c.window = WindowKind::rectangular;
  c.center = false;
  std::mt19937 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<float> x = random_signal(64, rng);
    const Spectrogram s = stft(x, c);
    REQUIRE(s.magnitude.shape() == Shape{33, 1});
    double time_energy = 0.0, freq_energy = 0.0;
    for (float v : x) time_energy += static_cast<double>(v) * v;
    for (std::size_t k = 0; k < 33; ++k) {
      const double m = s.magnitude.at(k, 0);
      freq_energy += (k == 0 || k == 32 ? 1.0 : 2.0) * m * m;
    }
    CHECK(freq_energy / 64.0 == Catch::Approx(time_energy).epsilon(1e-4));
  }
}

TEST_CASE("single rectangular frame inverse equals the idft", "[dsp][istft]") {
  StftConfig c = config(16, 16, 16);
  c.window = WindowKind::rectangular;
  c.center = false;
  std::mt19937 rng(5);
  const std::vector<float> x = random_signal(16, rng);
  const Spectrogram s = stft(x, c);
  const auto y = istft(s, c, 16);
  for (std::size_t i = 0; i < 16; ++i) CHECK(y[i] == Catch::Approx(x[i]).margin(1e-5));
}

TEST_CASE("stft -> istft reconstructs random signals", "[dsp][istft][property]") {
  std::mt19937 rng(6);
  double worst = 0.0;
  int count = 0;
  for (std::size_t n : {16u, 64u, 128u, 1024u}) {
    for (std::size_t div : {2u, 4u}) {
      const StftConfig c = config(n, n / div, n);
      for (int i = 0; i < 7; ++i) {
        const std::size_t frames = 8 + rng() % 24;
        const std::vector<float> x = random_signal(c.hop * frames, rng);
        const auto y = istft(stft(x, c), c, x.size());
        REQUIRE(y.size() == x.size());
        // interior excludes the window-length ramps at either end
        worst = std::max(worst, rel_l2(y, x, n, x.size() - n));
        ++count;
      }
    }
  }
  CHECK(count >= 50);
  CHECK(worst <= 1e-6);
}

TEST_CASE("istft rejects ill-conditioned windows", "[dsp][istft]") {
  // periodic Hann is zero at its first sample, so hop == win leaves gaps
  StftConfig c = config(16, 16, 16);
  c.center = false;
  Tensor mag({9, 4}, std::vector<float>(36, 1.0f));
  CHECK_THROWS_WITH(istft(Spectrogram{mag, Tensor({9, 4})}, c, 64),
                    Catch::Matchers::ContainsSubstring("NOLA"));

  const StftConfig ok = config(16, 4, 16);
  CHECK_THROWS_AS(istft(Spectrogram{Tensor({8, 4}), Tensor({8, 4})}, ok, 16),
                  std::invalid_argument);
  CHECK_THROWS_AS(istft(Spectrogram{Tensor({9, 4}), Tensor({9, 5})}, ok, 16),
                  std::invalid_argument);
}

TEST_CASE("mel filterbank", "[dsp][mel]") {
  const Tensor fb = mel_filterbank(22050.0, 1024, 80, 0.0, 8000.0);
  REQUIRE(fb.shape() == Shape{80, 513});
  const double bin_hz = 22050.0 / 1024.0;
  for (std::size_t m = 0; m < 80; ++m) {
    std::size_t peak = 0;
    float peak_v = -1.0f;
    bool any = false;
    for (std::size_t k = 0; k < 513; ++k) {
      const float v = fb.at(m, k);
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
      if (v > 0.0f) any = true;
      if (v > peak_v) {
        peak_v = v;
        peak = k;
      }
    }
    CHECK(any);
    CHECK(peak * bin_hz <= 8000.0 + bin_hz);
    // rises to the peak and falls after it
    for (std::size_t k = 1; k <= peak; ++k) CHECK(fb.at(m, k) >= fb.at(m, k - 1));
    for (std::size_t k = peak + 1; k < 513; ++k) CHECK(fb.at(m, k) <= fb.at(m, k - 1));
  }
  CHECK(hz_to_mel(mel_to_hz(1234.5)) == Catch::Approx(1234.5));
  CHECK(hz_to_mel(0.0) == 0.0);
  CHECK_THROWS_AS(mel_filterbank(22050.0, 1024, 80, 8000.0, 100.0), std::invalid_argument);
  CHECK_THROWS_AS(mel_filterbank(22050.0, 1024, 80, 0.0, 12000.0), std::invalid_argument);
  CHECK_THROWS_AS(mel_filterbank(22050.0, 1024, 0, 0.0, 8000.0), std::invalid_argument);
}

TEST_CASE("log mel of silence sits at the floor", "[dsp][mel]") {
  const std::vector<float> x(22050, 0.0f);
  const Tensor m = log_mel(x, 22050.0, default_stft_config());
  CHECK(m.shape() == Shape{80, 22050 / 256 + 1});
  for (float v : m.data()) CHECK(v == Catch::Approx(std::log(1e-5f)));
}

TEST_CASE("pqmf bank", "[pqmf]") {
  const PqmfBank bank = PqmfBank::design();
  REQUIRE(bank.prototype.size() == 63);
  double sum = 0.0;
  for (float v : bank.prototype.data()) sum += v;
  CHECK(sum == Catch::Approx(1.0).epsilon(1e-3));
  for (std::size_t i = 0; i < 63; ++i) {
    CHECK(bank.prototype[i] == Catch::Approx(bank.prototype[62 - i]).margin(1e-7));
  }

  SECTION("analysis then synthesis reconstructs random audio") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
      const std::vector<float> x = random_signal(4 * 512, rng);
      const Tensor sub = pqmf_analysis(bank, x);
      CHECK(sub.shape() == Shape{4, 512});
      const auto y = pqmf_synthesis(bank, sub);
      REQUIRE(y.size() == x.size());
      CHECK(snr_db(y, x, 64, x.size() - 64) <= -35.0);
    }
  }
  SECTION("zero in, zero out") {
    const auto y = pqmf_synthesis(bank, Tensor({4, 10}));
    CHECK(y.size() == 40);
    for (float v : y) CHECK(v == 0.0f);
  }
  SECTION("errors") {
    CHECK_THROWS_AS(pqmf_analysis(bank, std::vector<float>(10)), std::invalid_argument);
    CHECK_THROWS_AS(pqmf_synthesis(bank, Tensor({3, 10})), std::invalid_argument);
    CHECK_THROWS_AS(PqmfBank::design(4, 61), std::invalid_argument);
  }
}
