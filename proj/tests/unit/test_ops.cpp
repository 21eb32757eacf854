// Copyright 2026 The fusionkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>

#include "fusionkd/ops.hpp"
#include "test_util.hpp"

namespace fusionkd {
namespace {

TEST(Ops, SoftmaxKnownValues) {
  const Tensor y = softmax(Tensor({2}, {0.0, std::log(3.0)}), 0);
  EXPECT_NEAR(y[0], 0.25, 1e-15);
  EXPECT_NEAR(y[1], 0.75, 1e-15);
}

TEST(Ops, SoftmaxIsShiftInvariantAndStable) {
  const Tensor a = softmax(Tensor({3}, {1000.0, 1001.0, 1002.0}), 0);
  const Tensor b = softmax(Tensor({3}, {0.0, 1.0, 2.0}), 0);
  EXPECT_LT(max_abs_diff(a, b), 1e-15);
}

TEST(Ops, SigmoidSymmetry) {
  for (double x : {-3.0, -0.5, 0.0, 0.7, 8.0}) EXPECT_NEAR(sigmoid(x) + sigmoid(-x), 1.0, 1e-15);
  EXPECT_EQ(sigmoid(0.0), 0.5);
}

TEST(Ops, IdentityConvKeepsInput) {
  std::mt19937_64 rng(1);
  const Tensor x = testing::random_tensor({2, 4, 5}, rng);
  Tensor k({2, 2, 3, 3});
  k.at(0, 0, 1, 1) = 1.0;
  k.at(1, 1, 1, 1) = 1.0;
  EXPECT_EQ(conv2d(x, k, Tensor({2})), x);
}

TEST(Ops, ConvZeroPadsBorders) {
  Tensor x({1, 2, 2}, 1.0), k({1, 1, 3, 3}, 1.0);
  const Tensor y = conv2d(x, k, Tensor({1}));
  for (double v : y.data()) EXPECT_EQ(v, 4.0);
}

TEST(Ops, ConvRejectsEvenKernels) {
  EXPECT_THROW(conv2d(Tensor({1, 3, 3}), Tensor({1, 1, 2, 2}), Tensor({1})), std::invalid_argument);
}

TEST(Ops, AffineAppliesToTrailingVectors) {
  const Tensor x({2, 2}, {1, 2, 3, 4});
  const Tensor w({2, 1}, {10, 1});
  const Tensor y = affine(x, w, Tensor({1}, 0.5));
  EXPECT_EQ(y, Tensor({2, 1}, {12.5, 34.5}));
}

TEST(Ops, BilinearAtGridPointsAndOutside) {
  const Tensor map({1, 2, 2}, {1, 2, 3, 4});
  EXPECT_EQ(bilinear_sample(map, 1.0, 0.0)[0], 3.0);
  EXPECT_DOUBLE_EQ(bilinear_sample(map, 0.5, 0.5)[0], 2.5);
  EXPECT_EQ(bilinear_sample(map, -5.0, 9.0)[0], 0.0);
}

TEST(Ops, ChannelMaxPool) {
  const std::vector<Tensor> v = {Tensor({3}, {1, -5, 2}), Tensor({3}, {0, 4, -1})};
  EXPECT_EQ(channel_max_pool(v), Tensor({3}, {1, 4, 2}));
  EXPECT_EQ(channel_max_pool(std::vector<Tensor>{}, 2), Tensor({2}));
}

TEST(Ops, OuterScale) {
  EXPECT_EQ(outer_scale(Tensor({2}, {1, 2}), Tensor({2}, {3, 4})), Tensor({2, 2}, {3, 4, 6, 8}));
}

}  // namespace
}  // namespace fusionkd
