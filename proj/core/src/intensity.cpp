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

#include "fusionkd/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "fusionkd/ops.hpp"

namespace fusionkd {

namespace {

using VoxelKey = std::tuple<long, long, long>;

struct VoxelAccum {
  double sum = 0.0;
  std::size_t count = 0;
};

std::map<VoxelKey, VoxelAccum> voxelize(std::span<const LidarPoint> points, const VoxelSpec& voxel,
                                        const BevGridSpec& grid) {
  voxel.validate();
  std::map<VoxelKey, VoxelAccum> voxels;
  for (const auto& p : points) {
    if (!(p.z >= voxel.z_min && p.z < voxel.z_max)) continue;
    const VoxelKey key{static_cast<long>(std::floor((p.x - grid.x_min) / voxel.size_x)),
                       static_cast<long>(std::floor((p.y - grid.y_min) / voxel.size_y)),
                       static_cast<long>(std::floor((p.z - voxel.z_min) / voxel.size_z))};
    auto& acc = voxels[key];
    acc.sum += p.intensity;
    ++acc.count;
  }
  return voxels;
}

std::optional<Cell> voxel_cell(const VoxelKey& key, const VoxelSpec& voxel, const BevGridSpec& grid) {
  const double cx = grid.x_min + (static_cast<double>(std::get<0>(key)) + 0.5) * voxel.size_x;
  const double cy = grid.y_min + (static_cast<double>(std::get<1>(key)) + 0.5) * voxel.size_y;
  return grid.cell_of(cx, cy);
}

}  // namespace

double radar_intensity(const RadarPoint& p, const IntensityCoeffs& c, const RadarConfig& radar) {
  return finalize_scalar(sigmoid(c.alpha_rcs * normalized_rcs(p.rcs, radar) + c.beta_vel * doppler_speed(p)));
}

Tensor radar_intensity_bev(std::span<const RadarPoint> points, const IntensityCoeffs& c, const RadarConfig& radar,
                           const BevGridSpec& grid) {
  Tensor map({1, grid.rows, grid.cols});
  for (const auto& p : points) {
    const auto cell = grid.cell_of(p.x, p.y);
    if (!cell) continue;
    double& v = map[cell->row * grid.cols + cell->col];
    v = std::max(v, radar_intensity(p, c, radar));
  }
  return map.finalize();
}

void init_camera_intensity_params(ParamStore& store, std::size_t channels, std::mt19937_64& rng) {
  add_conv(store, "cam.intensity", 1, channels, 3, rng);
}

Tensor camera_intensity(const Tensor& features, const ParamStore& params) {
  const Tensor& w = params.value("cam.intensity.w");
  const Tensor& b = params.value("cam.intensity.b");
  if (features.ndim() == 4) return sigmoid(conv2d_batched(features, w, b));
  return sigmoid(conv2d(features, w, b));
}

Tensor camera_intensity_backward(const Tensor& features, const Tensor& intensity, const Tensor& grad_intensity,
                                 ParamStore& params) {
  const Tensor g_pre = sigmoid_backward(intensity, grad_intensity);
  const Tensor& w = params.value("cam.intensity.w");
  auto g = features.ndim() == 4 ? conv2d_batched_backward(features, w, g_pre) : conv2d_backward(features, w, g_pre);
  params.accumulate("cam.intensity.w", g.k);
  params.accumulate("cam.intensity.b", g.b);
  return g.x;
}

Tensor lidar_intensity_bev(std::span<const LidarPoint> points, const VoxelSpec& voxel, const BevGridSpec& grid) {
  const auto voxels = voxelize(points, voxel, grid);
  std::vector<double> num(grid.cells(), 0.0);
  std::vector<double> den(grid.cells(), 0.0);
  for (const auto& [key, acc] : voxels) {
    const auto cell = voxel_cell(key, voxel, grid);
    if (!cell) continue;
    const std::size_t k = cell->row * grid.cols + cell->col;
    num[k] += acc.sum / static_cast<double>(acc.count);
    den[k] += 1.0;
  }
  Tensor map({1, grid.rows, grid.cols});
  for (std::size_t k = 0; k < grid.cells(); ++k) map[k] = num[k] / std::max(1.0, den[k]);
  return map.finalize();
}

Tensor lidar_occupancy_bev(std::span<const LidarPoint> points, const VoxelSpec& voxel, const BevGridSpec& grid) {
  Tensor map({1, grid.rows, grid.cols});
  for (const auto& [key, acc] : voxelize(points, voxel, grid)) {
    if (const auto cell = voxel_cell(key, voxel, grid)) map[cell->row * grid.cols + cell->col] = 1.0;
  }
  return map;
}

}  // namespace fusionkd
