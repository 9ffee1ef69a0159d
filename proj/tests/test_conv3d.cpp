/* Copyright 2026 The LFDA Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <gtest/gtest.h>

#include "lfda/nn/conv3d.hpp"
#include "testing/oracles.hpp"

namespace lfda {
namespace {

using testing::fill_uniform;
using testing::oracle_conv3d;
using testing::random_tensor;

template <typename T>
void randomize(Conv3DLayer<T>& l, std::mt19937_64& rng) {
  fill_uniform(rng, l.weights, -0.5, 0.5);
  fill_uniform(rng, l.bias, -0.2, 0.2);
}

TEST(Conv3D, DownShapes) {
  // The analysis stack halves h and w per layer and keeps depth.
  auto l = make_conv3d<float>(ConvMode::kDown, 3, 16, {1, 2, 2});
  Tensor4<float> x(8, 64, 64, 3);
  auto e = conv3d_output_extent(x, l);
  EXPECT_EQ(e[0], 8u);
  EXPECT_EQ(e[1], 32u);
  EXPECT_EQ(e[2], 32u);
  // Odd extents round up (SAME padding).
  Tensor4<float> odd(5, 17, 9, 3);
  e = conv3d_output_extent(odd, l);
  EXPECT_EQ(e[0], 5u);
  EXPECT_EQ(e[1], 9u);
  EXPECT_EQ(e[2], 5u);
}

TEST(Conv3D, FourLayersReach4x4) {
  Tensor4<float> x(8, 64, 64, 3);
  auto l = make_conv3d<float>(ConvMode::kDown, 3, 8, {1, 2, 2});
  for (int i = 0; i < 4; ++i) {
    l.in_channels = int(x.c());
    l.weights.assign(l.weight_count(), 0.0f);
    x = conv3d_forward(x, l);
  }
  EXPECT_EQ(x.d(), 8u);
  EXPECT_EQ(x.h(), 4u);
  EXPECT_EQ(x.w(), 4u);
}

TEST(Conv3D, IdentityKernel) {
  // Stride 1, center tap 1: convolution must reproduce the input.
  auto l = make_conv3d<float>(ConvMode::kDown, 2, 2, {1, 1, 1});
  auto rng = testing::test_rng(5);
  // weights[kd=1][kh=1][kw=1][c][c] = 1
  for (int c = 0; c < 2; ++c) {
    size_t idx = ((size_t(1) * 3 + 1) * 3 + 1) * 2 * 2 + size_t(c) * 2 +
                 size_t(c);
    l.weights[idx] = 1.0f;
  }
  auto x = random_tensor<float>(rng, 4, 6, 5, 2);
  auto y = conv3d_forward(x, l);
  ASSERT_EQ(y.size(), x.size());
  for (size_t i = 0; i < x.size(); ++i) ASSERT_EQ(y.data()[i], x.data()[i]);
}

TEST(Conv3D, DownMatchesBruteForce) {
  auto rng = testing::test_rng(7);
  for (int trial = 0; trial < 6; ++trial) {
    std::array<int, 3> stride = trial % 2 ? std::array<int, 3>{1, 2, 2}
                                          : std::array<int, 3>{1, 1, 1};
    auto l = make_conv3d<float>(ConvMode::kDown, 2 + trial % 3, 3, stride);
    randomize(l, rng);
    auto x = random_tensor<float>(rng, 3 + trial, 7, 6, size_t(l.in_channels));
    auto y = conv3d_forward(x, l);
    auto ref = oracle_conv3d(x, l);
    ASSERT_EQ(y.size(), ref.size());
    for (size_t i = 0; i < y.size(); ++i)
      ASSERT_NEAR(double(y.data()[i]), ref.data()[i], 1e-4) << "trial " << trial;
  }
}

TEST(Conv3D, UpMatchesBruteForce) {
  auto rng = testing::test_rng(8);
  for (int trial = 0; trial < 6; ++trial) {
    std::array<int, 3> stride = trial % 2 ? std::array<int, 3>{1, 2, 2}
                                          : std::array<int, 3>{1, 1, 1};
    auto l = make_conv3d<float>(ConvMode::kUp, 3, 2 + trial % 3, stride);
    randomize(l, rng);
    auto x = random_tensor<float>(rng, 2 + trial % 2, 5, 4, 3);
    auto y = conv3d_forward(x, l);
    EXPECT_EQ(y.h(), x.h() * size_t(stride[1]));
    EXPECT_EQ(y.w(), x.w() * size_t(stride[2]));
    auto ref = oracle_conv3d(x, l);
    ASSERT_EQ(y.size(), ref.size());
    for (size_t i = 0; i < y.size(); ++i)
      ASSERT_NEAR(double(y.data()[i]), ref.data()[i], 1e-4) << "trial " << trial;
  }
}

TEST(Conv3D, UpIsExactAdjointOfDown) {
  // <conv_down(x), y> == <x, conv_up(y)> when both share weights and have
  // zero bias; this pins the transposed convolution to the exact adjoint.
  auto rng = testing::test_rng(9);
  auto down = make_conv3d<double>(ConvMode::kDown, 3, 5, {1, 2, 2});
  fill_uniform(rng, down.weights, -0.5, 0.5);
  auto up = make_conv3d<double>(ConvMode::kUp, 5, 3, {1, 2, 2});
  up.weights = down.weights;  // same [k][k][k][3][5] block, reinterpreted

  auto x = random_tensor<double>(rng, 4, 8, 6, 3);
  auto y = random_tensor<double>(rng, 4, 4, 3, 5);
  auto ax = conv3d_forward(x, down);
  ASSERT_EQ(ax.size(), y.size());
  auto aty = conv3d_forward(y, up);
  ASSERT_EQ(aty.size(), x.size());
  double lhs = 0, rhs = 0;
  for (size_t i = 0; i < y.size(); ++i) lhs += ax.data()[i] * y.data()[i];
  for (size_t i = 0; i < x.size(); ++i) rhs += x.data()[i] * aty.data()[i];
  EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(lhs)));
}

template <typename T>
double loss_of(const Tensor4<T>& y) {
  // Weighted sum; arbitrary fixed weights make the gradient nontrivial.
  double acc = 0;
  for (size_t i = 0; i < y.size(); ++i)
    acc += double(y.data()[i]) * (0.5 + 0.25 * double(i % 7));
  return acc;
}

template <typename T>
Tensor4<T> loss_grad_of(const Tensor4<T>& y) {
  Tensor4<T> g(y.d(), y.h(), y.w(), y.c());
  for (size_t i = 0; i < y.size(); ++i)
    g.data()[i] = T(0.5 + 0.25 * double(i % 7));
  return g;
}

void check_gradients(ConvMode mode) {
  auto rng = testing::test_rng(mode == ConvMode::kDown ? 21 : 22);
  auto l = make_conv3d<double>(mode, 2, 3, {1, 2, 2});
  fill_uniform(rng, l.weights, -0.5, 0.5);
  fill_uniform(rng, l.bias, -0.2, 0.2);
  auto x = random_tensor<double>(rng, 2, 5, 4, 2);

  auto y = conv3d_forward(x, l);
  Tensor4<double> gin = zeros_like(x);
  std::vector<double> gw(l.weights.size(), 0.0), gb(l.bias.size(), 0.0);
  auto gout = loss_grad_of(y);
  conv3d_backward(x, l, gout, &gin, &gw, &gb);

  auto f = [&]() { return loss_of(conv3d_forward(x, l)); };
  EXPECT_LT(testing::fd_worst_gap(f, x.data(), gin.data(), x.size()), 1e-5);
  EXPECT_LT(testing::fd_worst_gap(f, l.weights.data(), gw.data(), gw.size()),
            1e-5);
  EXPECT_LT(testing::fd_worst_gap(f, l.bias.data(), gb.data(), gb.size()),
            1e-5);
}

TEST(Conv3D, DownGradients) { check_gradients(ConvMode::kDown); }
TEST(Conv3D, UpGradients) { check_gradients(ConvMode::kUp); }

TEST(Conv3D, GradientsAccumulate) {
  // Backward adds into the buffers; calling twice doubles them.
  auto rng = testing::test_rng(23);
  auto l = make_conv3d<float>(ConvMode::kDown, 2, 2, {1, 2, 2});
  randomize(l, rng);
  auto x = random_tensor<float>(rng, 2, 4, 4, 2);
  auto y = conv3d_forward(x, l);
  auto gout = loss_grad_of(y);
  std::vector<float> gw1(l.weights.size(), 0.0f), gw2(l.weights.size(), 0.0f);
  conv3d_backward<float>(x, l, gout, nullptr, &gw1, nullptr);
  conv3d_backward<float>(x, l, gout, nullptr, &gw2, nullptr);
  conv3d_backward<float>(x, l, gout, nullptr, &gw2, nullptr);
  for (size_t i = 0; i < gw1.size(); ++i)
    ASSERT_FLOAT_EQ(2.0f * gw1[i], gw2[i]);
}

TEST(Conv3D, ChannelMismatchThrows) {
  auto l = make_conv3d<float>(ConvMode::kDown, 3, 4, {1, 2, 2});
  Tensor4<float> x(2, 4, 4, 2);
  EXPECT_THROW(conv3d_forward(x, l), std::invalid_argument);
}

}  // namespace
}  // namespace lfda
