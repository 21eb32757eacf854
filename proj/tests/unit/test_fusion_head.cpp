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

#include "fusionkd/fusion.hpp"
#include "fusionkd/head.hpp"
#include "fusionkd/ops.hpp"
#include "test_util.hpp"

namespace fusionkd {
namespace {

TEST(Fusion, ResidualAddsTheQuery) {
  std::mt19937_64 rng(11);
  FusionConfig cfg;
  ParamStore ps;
  init_fusion_params(ps, 3, cfg, rng);
  const Tensor radar = testing::random_tensor({3, 5, 5}, rng), camera = testing::random_tensor({3, 5, 5}, rng);
  const Tensor ic = testing::random_tensor({1, 5, 5}, rng, 0, 1), ir = testing::random_tensor({1, 5, 5}, rng, 0, 1);
  const FusionResult with = deform_attn_fuse(radar, camera, ic, ir, cfg, ps);
  cfg.residual = false;
  const FusionResult without = deform_attn_fuse(radar, camera, ic, ir, cfg, ps);
  EXPECT_LT(max_abs_diff(with.output - without.output, radar), 1e-14);
  EXPECT_EQ(with.weights.size(), 25u * cfg.points);
}

TEST(Fusion, WeightsFormADistributionPerQuery) {
  std::mt19937_64 rng(12);
  FusionConfig cfg;
  cfg.points = 3;
  ParamStore ps;
  init_fusion_params(ps, 2, cfg, rng);
  const Tensor radar = testing::random_tensor({2, 4, 4}, rng), camera = testing::random_tensor({2, 4, 4}, rng);
  const Tensor ic = testing::random_tensor({1, 4, 4}, rng, 0, 1), ir = testing::random_tensor({1, 4, 4}, rng, 0, 1);
  const FusionResult r = deform_attn_fuse(radar, camera, ic, ir, cfg, ps);
  for (std::size_t q = 0; q < 16; ++q) {
    double s = 0.0;
    for (std::size_t j = 0; j < 3; ++j) s += r.weights[q * 3 + j];
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Fusion, GateIsSigmoidOfAffineIntensity) {
  ParamStore ps;
  ps.add("g.w", Tensor({1, 1}, 2.0));
  ps.add("g.b", Tensor({1}, -1.0));
  EXPECT_DOUBLE_EQ(gate(0.75, ps, "g"), sigmoid(0.5));
}

TEST(Fusion, RejectsMismatchedMaps) {
  std::mt19937_64 rng(13);
  FusionConfig cfg;
  ParamStore ps;
  init_fusion_params(ps, 2, cfg, rng);
  EXPECT_THROW(deform_attn_fuse(Tensor({2, 4, 4}), Tensor({2, 3, 4}), Tensor({1, 4, 4}), Tensor({1, 4, 4}), cfg, ps),
               std::invalid_argument);
  cfg.points = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

BevGridSpec grid8() {
  BevGridSpec g;
  g.x_min = g.y_min = -8.0;
  g.x_max = g.y_max = 8.0;
  g.rows = g.cols = 8;
  return g;
}

TEST(Head, HeatmapTargetPeaksAtOneOnTheCenterCell) {
  const std::vector<Box3D> boxes = {{1.3, -2.7, 0, 4, 2, 1.5, 0.3, 1}};
  const Tensor t = heatmap_targets(boxes, grid8(), 3);
  const auto c = grid8().cell_of(1.3, -2.7);
  EXPECT_EQ(t.at(1, c->row, c->col), 1.0);
  EXPECT_EQ(t.max_abs(), 1.0);
  double other = 0.0;
  for (std::size_t i = 0; i < 64; ++i) other = std::max(other, t[i] + t[128 + i]);
  EXPECT_EQ(other, 0.0);
}

TEST(Head, RegressionTargetEncodesOffsetAndLogSize) {
  const Box3D b{1.3, -2.7, 0.4, 4, 2, 1.5, 0.3, 0};
  const auto c = grid8().cell_of(b.x, b.y);
  const auto r = regression_target(b, grid8(), *c);
  ASSERT_EQ(r.size(), kRegChannels);
  EXPECT_NEAR(r[3], std::log(4.0), 1e-15);
  EXPECT_NEAR(r[6], std::sin(0.3), 1e-15);
  EXPECT_NEAR(r[7], std::cos(0.3), 1e-15);
}

TEST(Head, FocalLossIsZeroForPerfectPrediction) {
  const Tensor target({1, 2, 2}, {1.0, 0.0, 0.0, 0.0});
  const Tensor pred({1, 2, 2}, {1.0 - 1e-12, 1e-12, 1e-12, 1e-12});
  EXPECT_NEAR(gaussian_focal(pred, target).loss, 0.0, 1e-9);
  EXPECT_EQ(gaussian_focal(pred, target).positives, 1u);
}

TEST(Head, ZeroWeightsGiveHalfProbability) {
  std::mt19937_64 rng(14);
  ParamStore ps;
  init_head_params(ps, "h", 3, HeadConfig{}, rng);
  for (auto& [name, e] : ps.entries()) e.value.fill(0.0);
  const HeadOutput out = head_forward(testing::random_tensor({3, 4, 4}, rng), ps, "h").out;
  for (double v : out.heatmap.data()) EXPECT_EQ(v, 0.5);
  EXPECT_EQ(out.bbox.max_abs(), 0.0);
}

TEST(Head, DetLossCountsOneTermPerBox) {
  const std::vector<Box3D> boxes = {{1.3, -2.7, 0, 4, 2, 1.5, 0.3, 1}};
  HeadOutput pred{Tensor({3, 8, 8}, 0.1), Tensor({kRegChannels, 8, 8})};
  const HeadLoss l = det_loss(pred, boxes, grid8());
  double l1 = 0.0;
  for (double v : regression_target(boxes[0], grid8(), *grid8().cell_of(1.3, -2.7))) l1 += std::abs(v);
  EXPECT_NEAR(l.l1, l1, 1e-12);
  EXPECT_NEAR(l.value, l.focal + l.l1, 1e-12);
}

}  // namespace
}  // namespace fusionkd
