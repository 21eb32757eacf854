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

#include <optional>
#include <span>
#include <vector>

#include "fusionkd/camera.hpp"
#include "fusionkd/geometry.hpp"
#include "fusionkd/head.hpp"
#include "fusionkd/tensor.hpp"

// Brute-force reference implementations. Nothing here calls the kernel it
// checks: every formula is written out again with plain loops.

namespace fusionkd::oracle {

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

double sigmoid(double x);

Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b);
Tensor conv2d(const Tensor& x, const Tensor& k, const Tensor& b);
Tensor max_pool(const std::vector<Tensor>& vectors, std::size_t length);
Tensor bilinear(const Tensor& map, double u, double v);
Tensor outer(const Tensor& c, const Tensor& p);

/// Cell lookup by scanning explicit cell edges.
std::optional<Cell> cell(double x, double y, const BevGridSpec& grid);

struct GridMaps {
  Tensor features;
  Tensor occupancy;
};
GridMaps build_grid(std::span<const RadarPoint> points, const std::vector<Tensor>& embeddings,
                    const BevGridSpec& grid, std::size_t channels);

Tensor lidar_intensity(std::span<const LidarPoint> points, const VoxelSpec& voxel, const BevGridSpec& grid);

/// Sum-splat of a [N, C, D, H, W] frustum, positions from the polar form of
/// each pixel ray.
Tensor splat(const Tensor& frustum, const CameraConfig& cfg, const BevGridSpec& grid);

struct AttentionParams {
  Tensor offset_w;  // [C, 2P]
  Tensor offset_b;  // [2P]
  double gate_off_w = 1.0, gate_off_b = 0.0;
  double gate_attn_w = 1.0, gate_attn_b = 0.0;
  double offset_scale = 2.0;
  bool residual = true;
  bool gated = true;  // false: both gates read as 1
};

struct Attention {
  Tensor output;
  std::vector<double> weights;  // (query * P + j)
};
Attention deform_attn(const Tensor& radar, const Tensor& camera, const Tensor& cam_intensity,
                      const Tensor& radar_intensity, const AttentionParams& p);

/// Literal per-cell evaluation of the detection loss.
double det_loss(const HeadOutput& pred, std::span<const Box3D> boxes, const BevGridSpec& grid);

}  // namespace fusionkd::oracle
