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

#include "fusionkd/distill.hpp"
#include "fusionkd/objective.hpp"
#include "test_util.hpp"

namespace fusionkd {
namespace {

TEST(Blend, Endpoints) {
  std::mt19937_64 rng(21);
  const Tensor fr = testing::random_tensor({3, 4, 4}, rng), fl = testing::random_tensor({3, 4, 4}, rng);
  const Tensor il = testing::random_tensor({1, 4, 4}, rng, 0.1, 1.0);
  EXPECT_EQ(blend(fl, fr, il, 0.0).blended, fr);
  EXPECT_EQ(blend(fl, fr, il, 10.0).blended, fl);
  const BlendResult half = blend(fl, fr, Tensor({1, 4, 4}, 0.5), 1.0);
  for (std::size_t i = 0; i < fr.size(); ++i) EXPECT_DOUBLE_EQ(half.blended[i], 0.5 * (fl[i] + fr[i]));
}

TEST(Blend, NegativeLambdaClampsToRadar) {
  std::mt19937_64 rng(22);
  const Tensor fr = testing::random_tensor({1, 2, 2}, rng), fl = testing::random_tensor({1, 2, 2}, rng);
  EXPECT_EQ(blend(fl, fr, Tensor({1, 2, 2}, 0.7), -2.0).blended, fr);
}

TEST(Igfm, HandComputedFixture) {
  const Tensor fr({1, 2, 2}, {1, 2, 3, 4}), fl({1, 2, 2}, {0, 2, 1, 5});
  const Tensor il({1, 2, 2}, {0.2, 0.5, 1.0, 0.0});
  const IgfmLoss l = igfm_loss(fr, fl, blend(fl, fr, il, 1.0).blended, 0.5);
  EXPECT_NEAR(l.align, 1.5, 1e-15);
  EXPECT_NEAR(l.consist, 1.01, 1e-15);
  EXPECT_NEAR(l.value, 1.255, 1e-12);
}

TEST(Igfm, RejectsAlphaOutsideUnitInterval) {
  const Tensor t({1, 1, 1}, 1.0);
  EXPECT_THROW(igfm_loss(t, t, t, -0.1), std::invalid_argument);
  EXPECT_THROW(igfm_loss(t, t, t, 1.1), std::invalid_argument);
  EXPECT_NO_THROW(igfm_loss(t, t, t, 1.0));
}

TEST(Swfd, ZeroWhereLidarIntensityIsZero) {
  std::mt19937_64 rng(23);
  ParamStore beta;
  init_adapter_params(beta, 2, rng);
  const Tensor fl = testing::random_tensor({2, 3, 3}, rng), ff = testing::random_tensor({2, 3, 3}, rng);
  EXPECT_EQ(swfd_loss(fl, ff, Tensor({1, 3, 3}), beta).value, 0.0);
  EXPECT_GT(swfd_loss(fl, ff, Tensor({1, 3, 3}, 1.0), beta).value, 0.0);
}

TEST(Swrd, SplitsIntoClassAndBoxParts) {
  std::mt19937_64 rng(24);
  HeadOutput t{testing::random_tensor({2, 3, 3}, rng, 0, 1), testing::random_tensor({kRegChannels, 3, 3}, rng)};
  HeadOutput s{testing::random_tensor({2, 3, 3}, rng, 0.1, 0.9), testing::random_tensor({kRegChannels, 3, 3}, rng)};
  const SwrdLoss l = swrd_loss(t, s, testing::random_tensor({1, 3, 3}, rng, 0, 1));
  EXPECT_NEAR(l.value, l.cls + l.bbox, 1e-12);
  EXPECT_GT(l.bbox, 0.0);
}

TEST(SoftMask, CenterCellIsOneAndEmptyBoxesGiveZero) {
  BevGridSpec g;
  g.rows = g.cols = 8;
  const std::vector<Box3D> boxes = {{7.7, -20.1, 0, 4, 2, 1.5, 1.1, 0}};
  const SoftLabelMask m = soft_label_mask(boxes, g);
  const auto c = g.cell_of(7.7, -20.1);
  EXPECT_EQ(m.mask.at(0, c->row, c->col), 1.0);
  EXPECT_EQ(soft_label_mask({}, g).mask.max_abs(), 0.0);
  EXPECT_THROW(soft_label_mask(boxes, g, 0.0), std::invalid_argument);
}

TEST(Ld, ZeroMaskGivesZeroLoss) {
  std::mt19937_64 rng(25);
  const Tensor a = testing::random_tensor({2, 3, 3}, rng), b = testing::random_tensor({2, 3, 3}, rng);
  EXPECT_EQ(ld_loss(a, b, SoftLabelMask{Tensor({1, 3, 3}), 1e-6}).value, 0.0);
  EXPECT_EQ(ld_loss(a, a, SoftLabelMask{Tensor({1, 3, 3}, 1.0), 1e-6}).value, 0.0);
}

TEST(LabelEncoder, IsFrozenAndShaped) {
  std::mt19937_64 rng(26);
  ParamStore ps;
  init_label_encoder_params(ps, 3, 6, rng);
  EXPECT_TRUE(ps.trainable_names().empty());
  BevGridSpec g;
  g.rows = g.cols = 8;
  const std::vector<Box3D> boxes = {{0, 0, 0, 4, 2, 1.5, 0, 2}};
  EXPECT_EQ(label_encode(boxes, g, 3, ps).dims(), (Shape{6, 8, 8}));
  EXPECT_EQ(label_splat(boxes, g, 3).dims(), (Shape{label_attributes(3), 8, 8}));
}

TEST(Objective, DefaultsAndWeightedSum) {
  const LossWeights w;
  const LossBreakdown c{1, 2, 3, 4, 5, 6, 0};
  EXPECT_NEAR(total_loss(c, w, 100.0).total, 0.3 * (1 + 2 + 4 + 5 + 6) + 100.0 * 3, 1e-12);
  EXPECT_THROW(total_loss(LossBreakdown{0, 0, -1, 0, 0, 0, 0}, w, 100.0), InvariantError);
  ParamStore ps;
  init_objective_params(ps, w);
  EXPECT_EQ(ps.value(kLambda3)[0], 100.0);
  EXPECT_EQ(ps.value(kLambdaBlend)[0], 1.0);
}

TEST(Objective, TrainStepSkipsFrozenEntries) {
  ParamStore p;
  p.add("w", Tensor({1}, 1.0));
  p.add("t", Tensor({1}, 1.0), false);
  p.accumulate("w", Tensor({1}, 2.0));
  p.accumulate("t", Tensor({1}, 2.0));
  train_step(p, 0.25);
  EXPECT_EQ(p.value("w")[0], 0.5);
  EXPECT_EQ(p.value("t")[0], 1.0);
  EXPECT_THROW(train_step(p, -0.1), std::invalid_argument);
}

TEST(Objective, FiniteDifferenceAndRelativeError) {
  const Tensor g = finite_diff_grad([](const Tensor& x) { return x[0] * x[0] + 3.0 * x[1]; }, Tensor({2}, {3.0, 1.0}),
                                    1e-5);
  EXPECT_NEAR(g[0], 6.0, 1e-8);
  EXPECT_NEAR(g[1], 3.0, 1e-8);
  EXPECT_EQ(relative_error(Tensor({2}, {1, 1}), Tensor({2}, {1, 1})), 0.0);
  EXPECT_NEAR(relative_error(Tensor({1}, 1.1), Tensor({1}, 1.0)), 0.1 / 1.1, 1e-12);
}

}  // namespace
}  // namespace fusionkd
