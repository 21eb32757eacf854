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

#include "fusionkd/camera.hpp"
#include "fusionkd/param_store.hpp"
#include "test_util.hpp"

namespace fusionkd {
namespace {

CameraConfig small_camera() {
  CameraConfig c;
  c.n_views = 2;
  c.img_h = 4;
  c.img_w = 6;
  c.depth_bins = 5;
  c.channels = 3;
  return c;
}

TEST(Camera, DepthDistributionSumsToOne) {
  std::mt19937_64 rng(3);
  const CameraConfig cfg = small_camera();
  ParamStore ps;
  init_camera_params(ps, cfg, rng);
  const auto cd = context_and_depth(testing::random_tensor({2, cfg.in_channels, 4, 6}, rng), ps, cfg);
  ASSERT_EQ(cd.depth.dims(), (Shape{2, 5, 4, 6}));
  ASSERT_EQ(cd.context.dims(), (Shape{2, 3, 4, 6}));
  for (std::size_t v = 0; v < 2; ++v) {
    for (std::size_t p = 0; p < 24; ++p) {
      double s = 0.0;
      for (std::size_t d = 0; d < 5; ++d) s += cd.depth[(v * 5 + d) * 24 + p];
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(Camera, LiftIsOuterProductPerPixel) {
  std::mt19937_64 rng(4);
  const Tensor ctx = testing::random_tensor({1, 2, 1, 1}, rng);
  const Tensor depth({1, 3, 1, 1}, {0.2, 0.3, 0.5});
  const Tensor f = lift_to_frustum(ctx, depth).values;
  ASSERT_EQ(f.dims(), (Shape{1, 2, 3, 1, 1}));
  EXPECT_DOUBLE_EQ(f.at(0, 1, 2, 0, 0), ctx[1] * 0.5);
}

TEST(Camera, SplatConservesMass) {
  std::mt19937_64 rng(5);
  const CameraConfig cfg = small_camera();
  BevGridSpec grid;
  grid.x_min = grid.y_min = -12.0;
  grid.x_max = grid.y_max = 12.0;
  const Tensor values = testing::random_tensor({2, 3, 5, 4, 6}, rng, 0.0, 1.0);
  const SplatResult s = splat_to_bev(FrustumFeatures{values}, cfg, grid);
  EXPECT_GT(s.dropped_cells, 0u);
  EXPECT_NEAR(s.bev.sum() + s.dropped_mass, values.sum(), 1e-9);
}

TEST(Camera, ProjectionInvertsUnprojection) {
  const CameraConfig cfg = small_camera();
  for (std::size_t view = 0; view < cfg.n_views; ++view) {
    for (std::size_t col = 0; col < cfg.img_w; ++col) {
      const auto [x, y] = unproject_column(cfg, view, col, 7.0);
      const auto hit = project_to_view(cfg, view, x, y, cfg.mount_height);
      ASSERT_TRUE(hit.has_value());
      EXPECT_EQ(hit->col, col);
      EXPECT_NEAR(hit->depth, 7.0, 1e-9);
    }
  }
}

TEST(Camera, PointsBehindTheCameraDoNotProject) {
  CameraConfig cfg = small_camera();
  cfg.n_views = 1;
  cfg.poses = {ViewPose{0.0, 0.0, 0.0}};
  EXPECT_FALSE(project_to_view(cfg, 0, -5.0, 0.0, 1.0).has_value());
  EXPECT_TRUE(project_to_view(cfg, 0, 5.0, 0.0, 1.5).has_value());
}

TEST(Camera, DepthBins) {
  const CameraConfig cfg = small_camera();
  EXPECT_EQ(cfg.bin_of(cfg.d_min), 0u);
  EXPECT_FALSE(cfg.bin_of(cfg.d_max).has_value());
  EXPECT_FALSE(cfg.bin_of(0.5 * cfg.d_min).has_value());
  EXPECT_DOUBLE_EQ(cfg.bin_center(0), cfg.d_min + 0.5 * cfg.bin_width());
}

}  // namespace
}  // namespace fusionkd
