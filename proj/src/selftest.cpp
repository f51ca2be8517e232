#include "istftnet/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "istftnet/arch.hpp"
#include "istftnet/dsp.hpp"
#include "istftnet/golden.hpp"
#include "istftnet/pqmf.hpp"
#include "istftnet/reference.hpp"

namespace istftnet {

namespace {

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

void fill(Tensor& t, std::mt19937& rng) {
  std::normal_distribution<float> d(0.0f, 1.0f);
  for (float& v : t.data()) v = d(rng);
}

SuiteResult conv_suite(bool inject_fault) {
  std::mt19937 rng(20230520);
  double worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    ConvParams c1 = ConvParams::conv1d(3, 4, 5, 2, 4, 2);
    ConvParams c2 = ConvParams::conv2d(2, 3, {3, 3}, {1, 1}, {1, 1});
    ConvParams t1 = ConvParams::conv1d(3, 2, 8, 4, 2);
    ConvParams t2 = ConvParams::conv2d(4, 2, {4, 1}, {2, 1}, {1, 0});
    for (ConvParams* p : {&c1, &c2, &t1, &t2}) {
      fill(p->weight, rng);
      fill(p->bias, rng);
    }
    Tensor x1({3, 17}), x2({2, 6, 9}), x4({4, 5, 7});
    fill(x1, rng);
    fill(x2, rng);
    fill(x4, rng);
    Tensor fast = conv1d(x1, c1);
    if (inject_fault && i == 0) fast[0] += 1.0f;
    worst = std::max(worst, max_rel_diff(fast, reference::conv1d(x1, c1)));
    worst = std::max(worst, max_rel_diff(conv2d(x2, c2), reference::conv2d(x2, c2)));
    worst = std::max(worst, max_rel_diff(conv_transpose1d(x1, t1), reference::conv_transpose1d(x1, t1)));
    worst = std::max(worst, max_rel_diff(conv_transpose2d(x4, t2), reference::conv_transpose2d(x4, t2)));
  }
  return {"conv-oracle", worst <= 1e-5, fmt("max rel err %.3g (tol %.0e)", worst, 1e-5)};
}

SuiteResult istft_suite() {
  std::mt19937 rng(7);
  std::normal_distribution<float> d(0.0f, 1.0f);
  const StftConfig cfg{1024, 256, 1024};
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<float> x(4096);
    for (float& v : x) v = d(rng);
    const auto y = istft(stft(x, cfg), cfg, x.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = cfg.fft_size; i + cfg.fft_size < x.size(); ++i) {
      num += (static_cast<double>(y[i]) - x[i]) * (static_cast<double>(y[i]) - x[i]);
      den += static_cast<double>(x[i]) * x[i];
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  return {"istft-roundtrip", worst <= 1e-6, fmt("max rel err %.3g (tol %.0e)", worst, 1e-6)};
}

SuiteResult pqmf_suite() {
  const PqmfBank bank = PqmfBank::design();
  std::mt19937 rng(11);
  std::normal_distribution<float> d(0.0f, 1.0f);
  std::vector<float> x(4 * 2048);
  for (float& v : x) v = d(rng);
  const auto y = pqmf_synthesis(bank, pqmf_analysis(bank, x));
  double num = 0.0, den = 0.0;
  for (std::size_t i = 128; i + 128 < x.size(); ++i) {
    num += (static_cast<double>(y[i]) - x[i]) * (static_cast<double>(y[i]) - x[i]);
    den += static_cast<double>(x[i]) * x[i];
  }
  const double db = 10.0 * std::log10(num / den);
  return {"pqmf-roundtrip", db <= -35.0, fmt("error %.1f dB (bound %.0f dB)", db, -35.0)};
}

SuiteResult budget_suite() {
  int failures = 0;
  for (const auto& named : named_archs()) {
    try {
      parse_arch(named.alias);
    } catch (const std::exception&) {
      ++failures;
    }
  }
  for (const char* bad : {"C8C8I8", "C8C8I2", "I4", "C8C8I4X", "C3C8I4", "C4C4I4B2"}) {
    try {
      parse_arch(bad);
      ++failures;
    } catch (const std::invalid_argument&) {
    }
  }
  const bool ok = failures == 0 && istft_params(default_stft_config(), 64).freq_bins() == 9 &&
                  istft_params(default_stft_config(), 8).freq_bins() == 65;
  return {"arch-budget", ok, std::to_string(failures) + " unexpected parse outcomes"};
}

}  // namespace

std::vector<SuiteResult> run_selftest(bool inject_fault) {
  return {conv_suite(inject_fault), istft_suite(), pqmf_suite(), budget_suite()};
}

}  // namespace istftnet
