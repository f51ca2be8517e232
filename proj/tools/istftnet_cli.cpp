// istftnet: synthesis, RTF benchmarking, parameter reporting and self-test for
// the iSTFTNet / iSTFTNet2 vocoder family.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "istftnet/bench.hpp"
#include "istftnet/dsp.hpp"
#include "istftnet/io.hpp"
#include "istftnet/model.hpp"
#include "istftnet/selftest.hpp"

namespace fs = std::filesystem;
using namespace istftnet;

namespace {

constexpr int kExitError = 1;
constexpr int kExitMissingInput = 2;
constexpr int kExitArchMismatch = 3;

struct SynthArgs {
  std::string arch;
  std::string ckpt;
  std::string mel;
  std::string out;
  std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& a) {
  if (!fs::exists(a.mel)) {
    std::cerr << "error: mel file not found: " << a.mel << "\n";
    return kExitMissingInput;
  }
  const ArchSpec arch = parse_arch(a.arch);
  ModelGraph graph;
  if (!a.ckpt.empty()) {
    if (!fs::exists(a.ckpt)) {
      std::cerr << "error: checkpoint not found: " << a.ckpt << "\n";
      return kExitMissingInput;
    }
    graph = load_checkpoint(a.ckpt);
    if (graph.arch.canonical() != arch.canonical()) {
      std::cerr << "error: checkpoint architecture " << graph.arch.canonical()
                << " does not match --arch " << arch.canonical() << "\n";
      return kExitArchMismatch;
    }
  } else {
    graph = build(arch, Hyper::defaults_for(arch), InitPolicy{a.seed});
  }

  const MelFile mel = read_mel(a.mel);
  if (mel.features.dim(0) != graph.hyper.mel_channels) {
    std::cerr << "error: expected " << graph.hyper.mel_channels << " mel channels, file has "
              << mel.features.dim(0) << "\n";
    return kExitError;
  }
  ForwardOptions opts;
  opts.check_finite = true;
  const auto audio = forward(graph, mel.features, opts);
  write_wav(audio, mel.sample_rate, a.out);

  float peak = 0.0f;
  for (float v : audio) peak = std::max(peak, std::abs(v));
  std::printf("wrote %s: %zu samples, %.3f s at %u Hz, peak %.4f\n", a.out.c_str(), audio.size(),
              static_cast<double>(audio.size()) / mel.sample_rate, mel.sample_rate, peak);
  return 0;
}

int cmd_bench(const BenchConfig& cfg, bool as_json) {
  const BenchResult r = run_bench(cfg);
  if (as_json) {
    nlohmann::json j{{"arch", r.arch},           {"rtf_median", r.rtf_median},
                     {"rtf_iqr", r.rtf_iqr},     {"params", r.params},
                     {"ratio_vs_v2", r.ratio_vs_v2}, {"warmup", r.warmup},
                     {"repeats", r.repeats},     {"frames", r.frames}};
    std::cout << j.dump() << "\n";
    return 0;
  }
  std::printf("arch        %s\n", r.arch.c_str());
  std::printf("input       %zu mel frames (%zu samples, %.3f s timed)\n", r.frames, r.samples,
              cfg.duration);
  std::printf("threads     1\n");
  std::printf("warmup      %d\n", r.warmup);
  std::printf("repeats     %d\n", r.repeats);
  std::printf("RTF median  %.5f\n", r.rtf_median);
  std::printf("RTF IQR     %.5f\n", r.rtf_iqr);
  std::printf("params      %zu (%.1f%% of hifigan-v2)\n", r.params, 100.0 * r.ratio_vs_v2);
  return 0;
}

int cmd_params(const std::string& arch, bool as_json) {
  const ModelGraph graph = build(arch);
  const std::size_t n = count_params(graph);
  const double ratio = param_ratio_vs_v2(n);
  if (as_json) {
    std::cout << nlohmann::json{{"arch", graph.arch.canonical()}, {"params", n},
                                {"ratio_vs_v2", ratio}}
                     .dump()
              << "\n";
  } else {
    std::printf("%s: %zu parameters (%.2fM), %.1f%% of hifigan-v2\n",
                graph.arch.canonical().c_str(), n, n / 1e6, 100.0 * ratio);
  }
  return 0;
}

int cmd_selftest(bool inject_fault) {
  bool ok = true;
  for (const auto& s : run_selftest(inject_fault)) {
    std::printf("[%s] %s: %s\n", s.passed ? "PASS" : "FAIL", s.name.c_str(), s.detail.c_str());
    ok = ok && s.passed;
  }
  return ok ? 0 : kExitError;
}

int cmd_mel(const std::string& wav_path, const std::string& out) {
  if (!fs::exists(wav_path)) {
    std::cerr << "error: wav file not found: " << wav_path << "\n";
    return kExitMissingInput;
  }
  const WavData wav = read_wav(wav_path);
  std::vector<float> x(wav.samples.size());
  std::transform(wav.samples.begin(), wav.samples.end(), x.begin(),
                 [](std::int16_t s) { return static_cast<float>(s) / 32768.0f; });
  MelFile mel;
  mel.sample_rate = wav.sample_rate;
  mel.features = log_mel(x, wav.sample_rate, default_stft_config());
  write_mel(mel, out);
  std::printf("wrote %s: %zu x %zu\n", out.c_str(), mel.features.dim(0), mel.features.dim(1));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iSTFTNet / iSTFTNet2 CPU vocoder"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Synthesize a WAV file from a mel file");
  s->add_option("--arch", synth.arch, "Architecture string or alias")->required();
  s->add_option("--ckpt", synth.ckpt, "Checkpoint (default: seeded random weights)");
  s->add_option("--mel", synth.mel, "Input mel file")->required();
  s->add_option("--out", synth.out, "Output WAV path")->required();
  s->add_option("--seed", synth.seed, "Seed for random weights");

  BenchConfig bench;
  bool bench_json = false;
  auto* b = app.add_subcommand("bench", "Measure the real-time factor");
  b->add_option("--arch", bench.arch, "Architecture string or alias")->required();
  b->add_option("--duration", bench.duration, "Seconds of speech per run")->capture_default_str();
  b->add_option("--warmup", bench.warmup, "Untimed runs")->capture_default_str();
  b->add_option("--repeats", bench.repeats, "Timed runs")->capture_default_str();
  b->add_option("--threads", bench.threads, "Compute threads (must be 1)")->capture_default_str();
  b->add_option("--seed", bench.seed, "Seed for weights and input")->capture_default_str();
  b->add_flag("--json", bench_json, "Machine-readable output");

  std::string params_arch;
  bool params_json = false;
  auto* p = app.add_subcommand("params", "Report the parameter count");
  p->add_option("--arch", params_arch, "Architecture string or alias")->required();
  p->add_flag("--json", params_json, "Machine-readable output");

  bool inject_fault = false;
  auto* t = app.add_subcommand("selftest", "Run the embedded invariant suites");
  t->add_flag("--inject-fault", inject_fault)->group("");

  std::string mel_wav, mel_out;
  auto* m = app.add_subcommand("mel", "Extract an 80-band log-mel file from a 16-bit WAV");
  m->add_option("--wav", mel_wav, "Input WAV")->required();
  m->add_option("--out", mel_out, "Output mel file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*s) return cmd_synth(synth);
    if (*b) return cmd_bench(bench, bench_json);
    if (*p) return cmd_params(params_arch, params_json);
    if (*t) return cmd_selftest(inject_fault);
    if (*m) return cmd_mel(mel_wav, mel_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
