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

#pragma once

#include <random>
#include <span>

#include "fusionkd/geometry.hpp"
#include "fusionkd/param_store.hpp"
#include "fusionkd/radar.hpp"
#include "fusionkd/tensor.hpp"

namespace fusionkd {

/// Fixed weights of the radar intensity logit.
struct IntensityCoeffs {
  double alpha_rcs = 2.0;
  double beta_vel = 0.2;
};

/// sigmoid(alpha_rcs * rcs_norm + beta_vel * |v|).
double radar_intensity(const RadarPoint& p, const IntensityCoeffs& c, const RadarConfig& radar);

/// Per-cell maximum of point intensities, [1, rows, cols]; empty cells are 0.
Tensor radar_intensity_bev(std::span<const RadarPoint> points, const IntensityCoeffs& c, const RadarConfig& radar,
                           const BevGridSpec& grid);

void init_camera_intensity_params(ParamStore& store, std::size_t channels, std::mt19937_64& rng);

/// sigmoid(conv3x3(features)) with one output channel. Accepts a BEV map
/// [C, H, W] -> [1, H, W] or per-view maps [N, C, H, W] -> [N, 1, H, W].
Tensor camera_intensity(const Tensor& features, const ParamStore& params);
/// Returns d/dfeatures and accumulates parameter gradients.
Tensor camera_intensity_backward(const Tensor& features, const Tensor& intensity, const Tensor& grad_intensity,
                                 ParamStore& params);

/// Mean intensity per occupied voxel, then per BEV cell the sum of voxel
/// means divided by max(1, voxel count). [1, rows, cols].
Tensor lidar_intensity_bev(std::span<const LidarPoint> points, const VoxelSpec& voxel, const BevGridSpec& grid);

/// Voxel-occupancy map: 1 where any voxel of the cloud projects, else 0.
Tensor lidar_occupancy_bev(std::span<const LidarPoint> points, const VoxelSpec& voxel, const BevGridSpec& grid);

}  // namespace fusionkd
