// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "gradcheck.hpp"
#include "lhdr/ops.hpp"

namespace lhdr {
namespace {

using ops::ConvSpec;
using testing::gradcheck;
using testing::random_tensor;

constexpr double kGradTol = 1e-4;

// Direct nested-loop convolution used as an oracle.
Tensor64 naive_conv(const Tensor64& x, const ConvSpec& s, const Tensor64& w, const Tensor64& b) {
  const int ho = s.out_size(x.h());
  const int wo = s.out_size(x.w());
  Tensor64 out(Shape{x.n(), s.out_channels, ho, wo});
  const int cig = s.in_channels / s.groups;
  const int cog = s.out_channels / s.groups;
  for (int n = 0; n < x.n(); ++n)
    for (int o = 0; o < s.out_channels; ++o)
      for (int y = 0; y < ho; ++y)
        for (int xx = 0; xx < wo; ++xx) {
          double acc = b.defined() ? b.at(0, o, 0, 0) : 0.0;
          const int g = o / cog;
          for (int ci = 0; ci < cig; ++ci)
            for (int ky = 0; ky < s.kernel; ++ky)
              for (int kx = 0; kx < s.kernel; ++kx) {
                const int iy = y * s.stride - s.padding + ky;
                const int ix = xx * s.stride - s.padding + kx;
                if (iy < 0 || ix < 0 || iy >= x.h() || ix >= x.w()) continue;
                acc += w.at(o, ci, ky, kx) * x.at(n, g * cig + ci, iy, ix);
              }
          out.at(n, o, y, xx) = acc;
        }
  return out;
}

TEST(Tensor, RejectsBadShapes) {
  EXPECT_THROW(Tensor(Shape{1, 0, 2, 2}), std::invalid_argument);
  EXPECT_THROW(Tensor(Shape{1, 1, 2, 2}, std::vector<float>(3)), std::invalid_argument);
}

TEST(Tensor, CopiesAliasAndCloneDoesNot) {
  Tensor a = Tensor::full(Shape{1, 1, 2, 2}, 1.0f);
  Tensor b = a;
  Tensor c = a.clone();
  a.at(0, 0, 0, 0) = 5.0f;
  EXPECT_EQ(b.at(0, 0, 0, 0), 5.0f);
  EXPECT_EQ(c.at(0, 0, 0, 0), 1.0f);
}

TEST(Conv2d, IdentityPointwiseKernel) {
  Rng rng(1);
  const ConvSpec s = ConvSpec::same(4, 4, 1);
  Tensor64 w(s.weight_shape());
  for (int i = 0; i < 4; ++i) w.at(i, i, 0, 0) = 1.0;
  const Tensor64 x = random_tensor(Shape{2, 4, 5, 7}, rng);
  const Tensor64 y = ops::conv2d<double>(nullptr, x, s, w, Tensor64(Shape{1, 4, 1, 1}));
  for (std::size_t i = 0; i < x.numel(); ++i) EXPECT_EQ(y.data()[i], x.data()[i]);
}

TEST(Conv2d, AllOnesCenterAndCorner) {
  const ConvSpec s = ConvSpec::same(2, 1, 3);
  const Tensor x = Tensor::full(Shape{1, 2, 3, 3}, 1.0f);
  const Tensor w = Tensor::full(s.weight_shape(), 1.0f);
  const Tensor y = ops::conv2d<float>(nullptr, x, s, w, Tensor{});
  EXPECT_EQ(y.at(0, 0, 1, 1), 18.0f);
  EXPECT_EQ(y.at(0, 0, 0, 0), 8.0f);
  EXPECT_EQ(y.at(0, 0, 2, 2), 8.0f);
}

TEST(Conv2d, GroupedWeightCount) {
  const ConvSpec s = ConvSpec::same(8, 8, 3, 4);
  EXPECT_EQ(s.weight_count(), 144);
  EXPECT_EQ((s.weight_shape() == Shape{8, 2, 3, 3}), true);
  EXPECT_EQ(ConvSpec::same(8, 8, 3).param_count(), 584);
  EXPECT_EQ(s.param_count(), 152);
}

TEST(Conv2d, Errors) {
  EXPECT_THROW((ConvSpec{6, 8, 3, 1, 1, 4}.validate()), std::invalid_argument);
  const ConvSpec s = ConvSpec::same(4, 4, 3);
  const Tensor x(Shape{1, 3, 4, 4});
  EXPECT_THROW(ops::conv2d<float>(nullptr, x, s, Tensor(s.weight_shape()), Tensor{}),
               std::invalid_argument);
  const Tensor x4(Shape{1, 4, 4, 4});
  EXPECT_THROW(ops::conv2d<float>(nullptr, x4, s, Tensor(Shape{4, 4, 1, 1}), Tensor{}),
               std::invalid_argument);
}

TEST(Conv2d, MatchesNaiveOracle) {
  Rng rng(2);
  const ConvSpec specs[] = {ConvSpec::same(4, 8, 3), ConvSpec::same(8, 8, 3, 4),
                            ConvSpec::same(6, 5, 1), ConvSpec{3, 4, 3, 2, 1, 1},
                            ConvSpec{4, 4, 5, 1, 2, 2}};
  for (const ConvSpec& s : specs) {
    const Tensor64 x = random_tensor(Shape{2, s.in_channels, 9, 11}, rng);
    const Tensor64 w = random_tensor(s.weight_shape(), rng);
    const Tensor64 b = random_tensor(Shape{1, s.out_channels, 1, 1}, rng);
    const Tensor64 got = ops::conv2d<double>(nullptr, x, s, w, b);
    const Tensor64 want = naive_conv(x, s, w, b);
    ASSERT_TRUE(got.shape() == want.shape());
    for (std::size_t i = 0; i < got.numel(); ++i) {
      EXPECT_NEAR(got.data()[i], want.data()[i], 1e-12);
    }
  }
}

TEST(Conv2d, LargeInputUsesBandsConsistently) {
  // Large enough that the column buffer is split into bands.
  Rng rng(3);
  const ConvSpec s = ConvSpec::same(16, 8, 3);
  const Tensor64 x = random_tensor(Shape{1, 16, 96, 100}, rng);
  const Tensor64 w = random_tensor(s.weight_shape(), rng);
  const Tensor64 got = ops::conv2d<double>(nullptr, x, s, w, Tensor64{});
  const Tensor64 want = naive_conv(x, s, w, Tensor64{});
  double worst = 0;
  for (std::size_t i = 0; i < got.numel(); ++i) {
    worst = std::max(worst, std::abs(got.data()[i] - want.data()[i]));
  }
  EXPECT_LT(worst, 1e-11);
}

TEST(Conv2d, GroupedEqualsBlockDiagonalDense) {
  Rng rng(4);
  const ConvSpec grouped = ConvSpec::same(8, 8, 3, 4);
  const ConvSpec dense = ConvSpec::same(8, 8, 3, 1);
  const Tensor x = random_tensor(Shape{1, 8, 10, 10}, rng).cast<float>();
  const Tensor wg = random_tensor(grouped.weight_shape(), rng).cast<float>();
  Tensor wd(dense.weight_shape());
  for (int o = 0; o < 8; ++o)
    for (int ci = 0; ci < 2; ++ci)
      for (int k = 0; k < 9; ++k) wd.at(o, (o / 2) * 2 + ci, k / 3, k % 3) = wg.at(o, ci, k / 3, k % 3);
  const Tensor a = ops::conv2d<float>(nullptr, x, grouped, wg, Tensor{});
  const Tensor b = ops::conv2d<float>(nullptr, x, dense, wd, Tensor{});
  for (std::size_t i = 0; i < a.numel(); ++i) {
    const float tol = 4 * std::numeric_limits<float>::epsilon() *
                      std::max(1.0f, std::abs(a.data()[i]));
    EXPECT_NEAR(a.data()[i], b.data()[i], tol);
  }
}

TEST(Conv2d, GroupsOneMatchesPlainPath) {
  Rng rng(5);
  const ConvSpec s = ConvSpec::same(4, 4, 3, 1);
  const Tensor x = random_tensor(Shape{1, 4, 6, 6}, rng).cast<float>();
  const Tensor w = random_tensor(s.weight_shape(), rng).cast<float>();
  const Tensor a = ops::conv2d<float>(nullptr, x, s, w, Tensor{});
  const Tensor b = ops::conv2d<float>(nullptr, x, ConvSpec{4, 4, 3, 1, 1, 1}, w, Tensor{});
  for (std::size_t i = 0; i < a.numel(); ++i) EXPECT_EQ(a.data()[i], b.data()[i]);
}

TEST(Conv2d, ForwardIsPure) {
  Rng rng(6);
  const ConvSpec s = ConvSpec::same(8, 8, 3, 4);
  const Tensor x = random_tensor(Shape{1, 8, 17, 13}, rng).cast<float>();
  const Tensor w = random_tensor(s.weight_shape(), rng).cast<float>();
  const Tensor a = ops::conv2d<float>(nullptr, x, s, w, Tensor{});
  const Tensor b = ops::conv2d<float>(nullptr, x, s, w, Tensor{});
  EXPECT_TRUE(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
}

TEST(Activation, Examples) {
  const Tensor x(Shape{1, 1, 1, 3}, {-1.0f, 3.5f, 0.0f});
  const Tensor r = ops::relu<float>(nullptr, x);
  const Tensor l = ops::leaky_relu<float>(nullptr, x, 0.2);
  EXPECT_EQ(r.data()[0], 0.0f);
  EXPECT_FLOAT_EQ(l.data()[0], -0.2f);
  EXPECT_EQ(l.data()[1], 3.5f);
  EXPECT_EQ(ops::leaky_relu<float>(nullptr, x, 0.7).data()[1], 3.5f);
}

TEST(Resample, Examples) {
  const Tensor one = Tensor::full(Shape{1, 1, 1, 1}, 7.0f);
  const Tensor up = ops::resample<float>(nullptr, one, ops::Resample::up2);
  ASSERT_TRUE((up.shape() == Shape{1, 1, 2, 2}));
  for (float v : up.data()) EXPECT_EQ(v, 7.0f);
  const Tensor block(Shape{1, 1, 2, 2}, {1, 2, 3, 4});
  EXPECT_EQ(ops::resample<float>(nullptr, block, ops::Resample::down2).item(), 2.5f);
  Rng rng(7);
  const Tensor x = random_tensor(Shape{2, 3, 5, 3}, rng).cast<float>();
  const Tensor back = ops::resample<float>(
      nullptr, ops::resample<float>(nullptr, x, ops::Resample::up2), ops::Resample::down2);
  EXPECT_TRUE(std::equal(x.data().begin(), x.data().end(), back.data().begin()));
  EXPECT_THROW(ops::resample<float>(nullptr, Tensor(Shape{1, 1, 3, 2}), ops::Resample::down2),
               std::invalid_argument);
}

TEST(Concat, ShapeAndRoundtrip) {
  Rng rng(8);
  const Tensor a = random_tensor(Shape{1, 2, 4, 4}, rng).cast<float>();
  const Tensor b = random_tensor(Shape{1, 3, 4, 4}, rng).cast<float>();
  const Tensor c = ops::concat_channels<float>(nullptr, a, b);
  EXPECT_TRUE((c.shape() == Shape{1, 5, 4, 4}));
  EXPECT_EQ(c.at(0, 0, 2, 3), a.at(0, 0, 2, 3));
  const Tensor a2 = ops::slice_channels<float>(nullptr, c, 0, 2);
  const Tensor b2 = ops::slice_channels<float>(nullptr, c, 2, 3);
  EXPECT_TRUE(std::equal(a.data().begin(), a.data().end(), a2.data().begin()));
  EXPECT_TRUE(std::equal(b.data().begin(), b.data().end(), b2.data().begin()));
  EXPECT_THROW(ops::concat_channels<float>(nullptr, a, Tensor(Shape{1, 1, 4, 5})),
               std::invalid_argument);
}

TEST(GlobalAvgPool, Examples) {
  const Tensor x(Shape{1, 1, 2, 2}, {0, 2, 4, 6});
  const Tensor p = ops::global_avg_pool<float>(nullptr, x);
  EXPECT_EQ(p.item(), 3.0f);
  EXPECT_EQ(ops::global_avg_pool<float>(nullptr, p).item(), 3.0f);
  const Tensor k = Tensor::full(Shape{2, 3, 5, 4}, 1.25f);
  const Tensor pk = ops::global_avg_pool<float>(nullptr, k);
  for (float v : pk.data()) EXPECT_EQ(v, 1.25f);
}

TEST(Backward, LinearCaseGradientIsInput) {
  Rng rng(9);
  Tensor64 w = random_tensor(Shape{1, 2, 3, 3}, rng);
  const Tensor64 x = random_tensor(Shape{1, 2, 3, 3}, rng);
  w.set_requires_grad(true);
  Tape<double> tape;
  const Tensor64 loss = ops::sum(&tape, ops::mul(&tape, w, x));
  backward(tape, loss);
  for (std::size_t i = 0; i < x.numel(); ++i) EXPECT_EQ(w.grad()[i], x.data()[i]);
  EXPECT_EQ(tape.size(), 0u);
}

TEST(Backward, ReluNegativeInputHasZeroGradient) {
  Tensor64 x(Shape{1, 1, 1, 2}, {-0.5, 2.0}, true);
  Tape<double> tape;
  backward(tape, ops::sum(&tape, ops::relu(&tape, x)));
  EXPECT_EQ(x.grad()[0], 0.0);
  EXPECT_EQ(x.grad()[1], 1.0);
}

TEST(Backward, RejectsNonScalarLoss) {
  Tensor64 x(Shape{1, 1, 2, 2}, true);
  Tape<double> tape;
  const Tensor64 y = ops::scale(&tape, x, 2.0);
  EXPECT_THROW(backward(tape, y), std::invalid_argument);
  Tape<double> other;
  EXPECT_THROW(backward(other, ops::sum(&tape, y)), std::invalid_argument);
}

TEST(Backward, NoTapeRecordsNothing) {
  Tensor64 x(Shape{1, 1, 2, 2}, true);
  const Tensor64 y = ops::scale<double>(nullptr, x, 2.0);
  EXPECT_FALSE(y.requires_grad());
}

// Gradient checks in double for every differentiable op.

struct OpCase {
  std::string name;
  std::vector<Shape> inputs;
  testing::Fn fn;
};

std::vector<OpCase> op_cases() {
  using T = Tape<double>;
  using V = std::vector<Tensor64>;
  std::vector<OpCase> cases;
  auto conv_case = [&](std::string name, ConvSpec s, Shape x, bool bias) {
    std::vector<Shape> in = {x, s.weight_shape()};
    if (bias) in.push_back(Shape{1, s.out_channels, 1, 1});
    cases.push_back({name, in, [s, bias](T* t, const V& v) {
                       return ops::conv2d(t, v[0], s, v[1], bias ? v[2] : Tensor64{});
                     }});
  };
  conv_case("conv3x3", ConvSpec::same(4, 4, 3), Shape{2, 4, 8, 8}, true);
  conv_case("conv3x3_grouped", ConvSpec::same(4, 4, 3, 4), Shape{2, 4, 8, 8}, true);
  conv_case("conv3x3_groups2", ConvSpec::same(4, 2, 3, 2), Shape{2, 4, 8, 8}, false);
  conv_case("conv1x1", ConvSpec::same(4, 3, 1), Shape{2, 4, 8, 8}, true);
  conv_case("conv3x3_stride2", ConvSpec{3, 4, 3, 2, 1, 1}, Shape{2, 3, 8, 8}, true);
  cases.push_back({"leaky_relu", {Shape{2, 4, 8, 8}},
                   [](T* t, const V& v) { return ops::leaky_relu(t, v[0], 0.2); }});
  cases.push_back({"relu", {Shape{2, 4, 8, 8}}, [](T* t, const V& v) { return ops::relu(t, v[0]); }});
  cases.push_back({"down2", {Shape{2, 4, 8, 8}},
                   [](T* t, const V& v) { return ops::resample(t, v[0], ops::Resample::down2); }});
  cases.push_back({"up2", {Shape{2, 4, 4, 4}},
                   [](T* t, const V& v) { return ops::resample(t, v[0], ops::Resample::up2); }});
  cases.push_back({"concat", {Shape{2, 1, 8, 8}, Shape{2, 3, 8, 8}},
                   [](T* t, const V& v) { return ops::concat_channels(t, v[0], v[1]); }});
  cases.push_back({"slice", {Shape{2, 4, 8, 8}},
                   [](T* t, const V& v) { return ops::slice_channels(t, v[0], 1, 2); }});
  cases.push_back({"global_avg_pool", {Shape{2, 4, 8, 8}},
                   [](T* t, const V& v) { return ops::global_avg_pool(t, v[0]); }});
  cases.push_back({"add", {Shape{2, 4, 8, 8}, Shape{2, 4, 8, 8}},
                   [](T* t, const V& v) { return ops::add(t, v[0], v[1]); }});
  cases.push_back({"mul", {Shape{2, 4, 8, 8}, Shape{2, 4, 8, 8}},
                   [](T* t, const V& v) { return ops::mul(t, v[0], v[1]); }});
  cases.push_back({"add_scalar", {Shape{2, 4, 8, 8}},
                   [](T* t, const V& v) { return ops::add_scalar(t, v[0], 0.7); }});
  cases.push_back({"scale", {Shape{2, 4, 8, 8}}, [](T* t, const V& v) { return ops::scale(t, v[0], -1.3); }});
  cases.push_back({"mul_map", {Shape{2, 4, 8, 8}}, [](T* t, const V& v) {
                     Tensor64 m(Shape{2, 1, 8, 8});
                     for (std::size_t i = 0; i < m.numel(); ++i) m.data()[i] = (i % 5) / 4.0;
                     return ops::mul_map(t, v[0], m);
                   }});
  cases.push_back({"add_bias", {Shape{2, 4, 8, 8}, Shape{1, 4, 1, 1}},
                   [](T* t, const V& v) { return ops::add_bias(t, v[0], v[1]); }});
  cases.push_back({"sum", {Shape{2, 4, 8, 8}}, [](T* t, const V& v) { return ops::sum(t, v[0]); }});
  cases.push_back({"l1_loss", {Shape{2, 3, 8, 8}, Shape{2, 3, 8, 8}},
                   [](T* t, const V& v) { return ops::l1_loss(t, v[0], v[1]); }});
  cases.push_back({"grad_map", {Shape{2, 3, 8, 8}}, [](T* t, const V& v) { return ops::grad_map(t, v[0]); }});
  cases.push_back({"pad_reflect", {Shape{2, 3, 6, 5}},
                   [](T* t, const V& v) { return ops::pad_reflect(t, v[0], 2, 3); }});
  cases.push_back({"crop", {Shape{2, 3, 8, 8}}, [](T* t, const V& v) { return ops::crop(t, v[0], 5, 6); }});
  return cases;
}

class OpGradient : public ::testing::TestWithParam<std::size_t> {};

TEST_P(OpGradient, MatchesFiniteDifferences) {
  const OpCase c = op_cases()[GetParam()];
  Rng rng(100 + GetParam());
  std::vector<Tensor64> inputs;
  for (const Shape& s : c.inputs) inputs.push_back(random_tensor(s, rng));
  const auto r = gradcheck(c.fn, inputs, rng);
  EXPECT_GT(r.checked, 0) << c.name;
  EXPECT_LT(r.max_rel_error, kGradTol) << c.name << " " << r.worst_input;
}

INSTANTIATE_TEST_SUITE_P(AllOps, OpGradient, ::testing::Range<std::size_t>(0, op_cases().size()),
                         [](const auto& info) { return op_cases()[info.param].name; });

TEST(Ops, PadReflectAndCrop) {
  const Tensor x(Shape{1, 1, 2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor p = ops::pad_reflect<float>(nullptr, x, 1, 2);
  ASSERT_TRUE((p.shape() == Shape{1, 1, 3, 5}));
  const float want[] = {1, 2, 3, 2, 1, 4, 5, 6, 5, 4, 1, 2, 3, 2, 1};
  for (int i = 0; i < 15; ++i) EXPECT_EQ(p.data()[i], want[i]);
  const Tensor c = ops::crop<float>(nullptr, p, 2, 3);
  EXPECT_TRUE(std::equal(x.data().begin(), x.data().end(), c.data().begin()));
}

TEST(Ops, GradMapRamp) {
  Tensor x(Shape{1, 3, 4, 5});
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 4; ++y)
      for (int w = 0; w < 5; ++w) x.at(0, c, y, w) = 0.1f * w;
  const Tensor g = ops::grad_map<float>(nullptr, x);
  ASSERT_TRUE((g.shape() == Shape{2, 3, 4, 5}));
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 4; ++y)
      for (int w = 0; w < 5; ++w) {
        EXPECT_NEAR(g.at(0, c, y, w), w == 4 ? 0.0f : 0.1f, 1e-6);
        EXPECT_EQ(g.at(1, c, y, w), 0.0f);
      }
}

TEST(Ops, GradMapLinearAndConstant) {
  Rng rng(11);
  const Tensor64 a = random_tensor(Shape{1, 3, 6, 6}, rng);
  const Tensor64 b = random_tensor(Shape{1, 3, 6, 6}, rng);
  const Tensor64 gs = ops::grad_map<double>(nullptr, ops::add<double>(nullptr, a, b));
  const Tensor64 ga = ops::grad_map<double>(nullptr, a);
  const Tensor64 gb = ops::grad_map<double>(nullptr, b);
  for (std::size_t i = 0; i < gs.numel(); ++i) EXPECT_NEAR(gs.data()[i], ga.data()[i] + gb.data()[i], 1e-15);
  const Tensor64 flat = ops::grad_map<double>(nullptr, Tensor64::full(Shape{1, 3, 4, 4}, 0.3));
  for (double v : flat.data()) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(Ops, WindowSums) {
  Tensor m = Tensor::full(Shape{1, 1, 3, 3}, 1.0f);
  Tensor sums;
  Tensor area;
  ops::window_sums(m, ConvSpec::same(1, 1, 3), sums, area);
  EXPECT_EQ(sums.at(0, 0, 1, 1), 9.0f);
  EXPECT_EQ(area.at(0, 0, 0, 0), 4.0f);
  EXPECT_EQ(sums.at(0, 0, 0, 2), 4.0f);
}

}  // namespace
}  // namespace lhdr
