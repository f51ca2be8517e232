#include <catch_amalgamated.hpp>

#include "istftnet/bench.hpp"

using namespace istftnet;

TEST_CASE("bench frame count", "[bench]") {
  CHECK(bench_frames(1.0) == 87);
  CHECK(bench_frames(0.5) == 44);
  CHECK_THROWS_AS(bench_frames(0.0), std::invalid_argument);
}

TEST_CASE("random mel is seeded and bounded", "[bench]") {
  const Tensor a = random_mel(10, 1);
  CHECK(a.shape() == Shape{80, 10});
  CHECK(a == random_mel(10, 1));
  CHECK_FALSE(a == random_mel(10, 2));
  for (float v : a.data()) {
    CHECK(v >= -4.0f);
    CHECK(v <= 4.0f);
  }
}

TEST_CASE("summary statistics", "[bench]") {
  const Spread s = summarize({4.0, 1.0, 3.0, 2.0, 5.0});
  CHECK(s.median == 3.0);
  CHECK(s.iqr == Catch::Approx(2.0));
  const Spread e = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(e.median == 2.5);
  CHECK(e.iqr == Catch::Approx(1.5));
  CHECK(summarize({7.0}).iqr == 0.0);
  CHECK_THROWS_AS(summarize({}), std::invalid_argument);
}

TEST_CASE("run_bench", "[bench]") {
  BenchConfig cfg;
  cfg.arch = "istftnet2-small";
  cfg.duration = 0.1;
  cfg.warmup = 1;
  cfg.repeats = 3;
  const BenchResult r = run_bench(cfg);
  CHECK(r.arch == "C8SI32");
  CHECK(r.rtfs.size() == 3);
  CHECK(r.rtf_median > 0.0);
  CHECK(r.rtf_iqr >= 0.0);
  CHECK(r.params == 800182);
  CHECK(r.ratio_vs_v2 < 1.0);
  CHECK(param_ratio_vs_v2(925985) == 1.0);

  cfg.threads = 4;
  CHECK_THROWS_AS(run_bench(cfg), std::invalid_argument);
  cfg.threads = 1;
  cfg.repeats = 0;
  CHECK_THROWS_AS(run_bench(cfg), std::invalid_argument);
}
