#include <catch_amalgamated.hpp>

#include <random>

#include "istftnet/blocks.hpp"
#include "istftnet/reference.hpp"
#include "test_util.hpp"

using namespace istftnet;
using istftnet::testing::random_tensor;
using istftnet::testing::randomize;

namespace {

template <ConvBlock B>
void randomize_block(B& block, std::mt19937& rng, float stddev = 0.1f) {
  for_each_conv(block, "b", [&](const std::string&, ConvParams& c) {
    istftnet::testing::fill_normal(c.weight, rng, stddev);
    istftnet::testing::fill_normal(c.bias, rng, stddev);
  });
}

}  // namespace

TEST_CASE("mrf with zero weights is the identity", "[mrf]") {
  Mrf1dConfig cfg;
  cfg.channels = 8;
  const Mrf1d mrf = Mrf1d::make(cfg);
  std::mt19937 rng(1);
  const Tensor x = random_tensor({8, 20}, rng);
  const Tensor y = mrf.forward(x);
  CHECK(max_abs_diff(y, x) <= 1e-6);
}

TEST_CASE("mrf shapes", "[mrf]") {
  std::mt19937 rng(2);
  Mrf1dConfig cfg;
  cfg.channels = 64;
  Mrf1d add = Mrf1d::make(cfg);
  randomize_block(add, rng);
  cfg.fusion = Fusion::concat;
  Mrf1d cat = Mrf1d::make(cfg);
  randomize_block(cat, rng);
  for (std::size_t t : {1u, 7u, 64u}) {
    const Tensor x = random_tensor({64, t}, rng);
    CHECK(add.forward(x).shape() == Shape{64, t});
    CHECK(cat.forward(x).shape() == Shape{192, t});
    CHECK(cat.output_shape({64, t}) == Shape{192, t});
  }
  CHECK_THROWS_AS(add.forward(Tensor({32, 10})), std::invalid_argument);
  Mrf1dConfig bad;
  bad.channels = 4;
  bad.kernel_sizes = {4};
  bad.dilations = {{1}};
  CHECK_THROWS_AS(Mrf1d::make(bad), std::invalid_argument);
}

TEST_CASE("mrf branch matches a manual composition", "[mrf]") {
  std::mt19937 rng(3);
  Mrf1dConfig cfg;
  cfg.channels = 4;
  cfg.kernel_sizes = {3, 5};
  cfg.dilations = {{1, 3}, {2}};
  Mrf1d mrf = Mrf1d::make(cfg);
  randomize_block(mrf, rng);
  const Tensor x = random_tensor({4, 30}, rng);

  Tensor expected({4, 30});
  for (const auto& branch : mrf.branches) {
    Tensor h = x;
    for (const auto& unit : branch) {
      Tensor r = reference::conv1d(leaky_relu(h, 0.1f), unit.dilated);
      r = reference::conv1d(leaky_relu(r, 0.1f), unit.plain);
      add_inplace(h, r);
    }
    add_inplace(expected, h);
  }
  for (float& v : expected.data()) v /= 2.0f;
  CHECK(max_rel_diff(mrf.forward(x), expected) <= 1e-5);
}

TEST_CASE("upsample", "[upsample]") {
  std::mt19937 rng(4);
  Upsample1d up = Upsample1d::make(128, 8);
  randomize_block(up, rng);
  const Tensor x = random_tensor({128, 10}, rng);
  CHECK(up.forward(x).shape() == Shape{64, 80});
  CHECK(up.conv.kernel == std::vector<std::size_t>{16});

  Upsample1d same = Upsample1d::make(32, 1);
  CHECK(same.forward(Tensor({32, 10})).shape() == Shape{32, 10});
  CHECK(same.conv.kernel == std::vector<std::size_t>{7});

  CHECK_THROWS_AS(Upsample1d::make(128, 3), std::invalid_argument);
  CHECK_THROWS_AS(Upsample1d::make(128, 16), std::invalid_argument);
}

TEST_CASE("to2d layout", "[to2d]") {
  To2d t = To2d::make(2, 3, 4);
  CHECK(t.conv.out_channels == 12);
  // route input channel 0 to conv channel f*3 + c; LReLU keeps positives
  for (std::size_t f = 0; f < 4; ++f) {
    for (std::size_t c = 0; c < 3; ++c) t.conv.bias[f * 3 + c] = static_cast<float>(10 * c + f);
  }
  const Tensor y = t.forward(Tensor({2, 5}));
  REQUIRE(y.shape() == Shape{3, 4, 5});
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t f = 0; f < 4; ++f) CHECK(y.at(c, f, 2) == static_cast<float>(10 * c + f));
  }
}

TEST_CASE("2d residual blocks", "[block2d]") {
  Block2dConfig cfg;
  cfg.channels = 8;
  std::mt19937 rng(5);
  const Tensor x = random_tensor({8, 9, 12}, rng);

  SECTION("zero weights give the identity") {
    CHECK(Block2d::make(cfg).forward(x) == x);
  }
  SECTION("matches a manual composition") {
    Block2d blk = Block2d::make(cfg);
    randomize_block(blk, rng);
    Tensor y = x;
    for (const auto& u : blk.units) {
      Tensor h = reference::conv2d(leaky_relu(y, 0.1f), u.first);
      h = reference::conv2d(leaky_relu(h, 0.1f), u.second);
      add_inplace(y, h);
    }
    CHECK(max_rel_diff(blk.forward(x), y) <= 1e-5);
    CHECK(blk.forward(x).shape() == x.shape());
  }
}

TEST_CASE("2d shuffle blocks", "[block2d]") {
  Block2dConfig cfg;
  cfg.channels = 8;
  cfg.kind = Block2dKind::shuffle;
  std::mt19937 rng(6);

  SECTION("zero weights give a fixed channel mapping") {
    const Block2d blk = Block2d::make(cfg);
    const Tensor x = random_tensor({8, 3, 4}, rng);
    Tensor expected = x;
    for (int r = 0; r < 3; ++r) {
      auto [skip, branch] = channel_split(expected);
      expected = channel_shuffle(channel_concat(skip, Tensor::zeros(branch.shape())), 2);
    }
    CHECK(blk.forward(x) == expected);
    // input-independent: the same mapping applies to any input
    const Tensor x2 = random_tensor({8, 3, 4}, rng);
    const Tensor y2 = blk.forward(x2);
    for (std::size_t c = 0; c < 8; ++c) {
      const bool zeroed = expected.at(c, 0, 0) == 0.0f;
      CHECK((y2.at(c, 0, 0) == 0.0f) == zeroed);
    }
  }
  SECTION("matches a manual composition") {
    Block2d blk = Block2d::make(cfg);
    randomize_block(blk, rng);
    const Tensor x = random_tensor({8, 5, 6}, rng);
    Tensor y = x;
    for (const auto& u : blk.units) {
      auto [skip, branch] = channel_split(y);
      Tensor h = reference::conv2d(leaky_relu(branch, 0.1f), u.first);
      h = reference::conv2d(leaky_relu(h, 0.1f), u.second);
      y = channel_shuffle(channel_concat(skip, h), 2);
    }
    CHECK(max_rel_diff(blk.forward(x), y) <= 1e-5);
  }
  SECTION("half the weights of the residual stack") {
    Block2dConfig res = cfg;
    res.kind = Block2dKind::res;
    res.channels = 32;
    Block2dConfig shf = res;
    shf.kind = Block2dKind::shuffle;
    const Block2d rb = Block2d::make(res);
    const Block2d sb = Block2d::make(shf);
    std::size_t w_res = 0, w_shf = 0;
    for_each_conv(rb, "", [&](const std::string&, const ConvParams& c) {
      w_res += c.weight.size();
    });
    for_each_conv(sb, "", [&](const std::string&, const ConvParams& c) {
      w_shf += c.weight.size();
    });
    CHECK(2 * w_shf == w_res);
  }
  SECTION("odd channel counts are rejected") {
    cfg.channels = 7;
    CHECK_THROWS_AS(Block2d::make(cfg), std::invalid_argument);
  }
}

TEST_CASE("frequency head", "[head]") {
  std::mt19937 rng(7);
  for (std::size_t out : {2u, 8u}) {
    FreqHead h = FreqHead::make(32, 8, 65, out);
    CHECK(h.rungs.size() == 3);
    randomize_block(h, rng);
    const Tensor x = random_tensor({32, 8, 5}, rng);
    CHECK(h.forward(x).shape() == Shape{out, 65, 5});
    CHECK(h.output_shape({32, 8, 5}) == Shape{out, 65, 5});
  }
  const FreqHead exact = FreqHead::make(16, 4, 16, 2);
  CHECK(exact.forward(Tensor({16, 4, 3})).shape() == Shape{2, 16, 3});
  CHECK_THROWS_AS(FreqHead::make(32, 8, 40, 2), std::invalid_argument);
  CHECK_THROWS_AS(FreqHead::make(32, 8, 4, 2), std::invalid_argument);
  CHECK_THROWS_AS(FreqHead::make(2, 8, 65, 2), std::invalid_argument);
  CHECK_THROWS_AS(exact.forward(Tensor({16, 5, 3})), std::invalid_argument);
}

TEST_CASE("conv layer with pre-activation", "[conv_layer]") {
  Conv1dLayer l{ConvParams::conv1d(1, 1, 1), 0.01f};
  l.conv.weight[0] = 1.0f;
  const Tensor y = l.forward(Tensor({1, 2}, {-1.0f, 3.0f}));
  CHECK(y[0] == Catch::Approx(-0.01f));
  CHECK(y[1] == 3.0f);
}
