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

#include "fusionkd/intensity.hpp"
#include "fusionkd/ops.hpp"
#include "fusionkd/radar.hpp"

namespace fusionkd {
namespace {

BevGridSpec grid4() {
  BevGridSpec g;
  g.x_min = g.y_min = -4.0;
  g.x_max = g.y_max = 4.0;
  g.rows = g.cols = 4;
  return g;
}

TEST(Radar, NormalizedRcsClampsToUnitRange) {
  const RadarConfig cfg;
  EXPECT_DOUBLE_EQ(normalized_rcs(5.0, cfg), 0.5);
  EXPECT_EQ(normalized_rcs(-100.0, cfg), 0.0);
  EXPECT_EQ(normalized_rcs(100.0, cfg), 1.0);
  EXPECT_DOUBLE_EQ(doppler_speed(RadarPoint{0, 0, 0, 3, 4, 0}), 5.0);
}

TEST(Radar, GridTakesChannelMaxPerCell) {
  const std::vector<RadarPoint> pts = {{-3.5, -3.5, 0, 0, 0, 0}, {-3.0, -3.9, 0, 0, 0, 0}, {3.0, 3.0, 0, 0, 0, 0}};
  const std::vector<Tensor> emb = {Tensor({2}, {1, -1}), Tensor({2}, {0, 2}), Tensor({2}, {5, 6})};
  const RadarGrid g = build_grid(pts, emb, grid4(), 2);
  EXPECT_EQ(g.features.at(0, 0, 0), 1.0);
  EXPECT_EQ(g.features.at(1, 0, 0), 2.0);
  EXPECT_EQ(g.features.at(0, 3, 3), 5.0);
  EXPECT_EQ(g.occupancy.sum(), 2.0);
  EXPECT_EQ(g.features.at(0, 1, 1), 0.0);
}

TEST(Radar, EmptyCloudGivesZeroGrid) {
  const RadarGrid g = build_grid({}, {}, grid4(), 3);
  EXPECT_EQ(g.features.dims(), (Shape{3, 4, 4}));
  EXPECT_EQ(g.features.max_abs(), 0.0);
  EXPECT_EQ(g.occupancy.max_abs(), 0.0);
}

TEST(Radar, PointsOutsideTheRangeAreIgnored) {
  const std::vector<RadarPoint> pts = {{10.0, 0, 0, 0, 0, 0}};
  const std::vector<Tensor> emb = {Tensor({1}, 1.0)};
  EXPECT_EQ(build_grid(pts, emb, grid4(), 1).occupancy.max_abs(), 0.0);
}

TEST(Radar, EncoderPreservesShape) {
  std::mt19937_64 rng(2);
  RadarConfig cfg;
  cfg.channels = 4;
  ParamStore ps;
  init_radar_params(ps, cfg, rng);
  const std::vector<RadarPoint> pts = {{1.0, 1.0, 0.5, 2.0, 0.0, 10.0}};
  const auto e = embed_points(pts, ps, cfg);
  ASSERT_EQ(e.features.size(), 1u);
  const auto grid = build_grid(pts, e.features, grid4(), cfg.channels);
  EXPECT_EQ(encode_radar(grid.features, ps, cfg).output.dims(), (Shape{4, 4, 4}));
}

TEST(Intensity, RadarLogitExample) {
  const RadarPoint p{0, 0, 0, 3, 4, 5};
  EXPECT_DOUBLE_EQ(radar_intensity(p, IntensityCoeffs{}, RadarConfig{}), sigmoid(2.0 * 0.5 + 0.2 * 5.0));
}

TEST(Intensity, RadarMapKeepsCellMaximum) {
  const std::vector<RadarPoint> pts = {{0.5, 0.5, 0, 0, 0, -20}, {0.7, 0.2, 0, 0, 0, 30}};
  const Tensor m = radar_intensity_bev(pts, IntensityCoeffs{}, RadarConfig{}, grid4());
  EXPECT_DOUBLE_EQ(m.at(0, 2, 2), sigmoid(2.0));
  EXPECT_DOUBLE_EQ(m.sum(), sigmoid(2.0));
}

TEST(Intensity, LidarMapAveragesVoxelMeans) {
  VoxelSpec voxel;
  voxel.size_x = voxel.size_y = 0.5;
  voxel.size_z = 1.0;
  const std::vector<LidarPoint> pts = {
      {0.1, 0.1, 0.1, 0.2, 0}, {0.2, 0.2, 0.2, 0.6, 0},  // one voxel, mean 0.4
      {1.6, 0.1, 0.1, 1.0, 0},                          // another voxel in the same cell
  };
  const Tensor m = lidar_intensity_bev(pts, voxel, grid4());
  EXPECT_DOUBLE_EQ(m.at(0, 2, 2), 0.7);
  EXPECT_DOUBLE_EQ(m.sum(), 0.7);
  const Tensor occ = lidar_occupancy_bev(pts, voxel, grid4());
  EXPECT_EQ(occ.sum(), 1.0);
}

TEST(Intensity, CameraIntensityInUnitInterval) {
  std::mt19937_64 rng(9);
  ParamStore ps;
  init_camera_intensity_params(ps, 3, rng);
  Tensor f({3, 4, 4});
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(i % 7) - 3.0;
  const Tensor ic = camera_intensity(f, ps);
  EXPECT_EQ(ic.dims(), (Shape{1, 4, 4}));
  for (double v : ic.data()) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

}  // namespace
}  // namespace fusionkd
