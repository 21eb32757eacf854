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
#include <random>
#include <vector>

#include "fusionkd/geometry.hpp"
#include "fusionkd/param_store.hpp"
#include "fusionkd/tensor.hpp"

namespace fusionkd {

/// Ground-plane camera pose: yaw about +z and a translation on the ground.
struct ViewPose {
  double yaw = 0.0;
  double tx = 0.0;
  double ty = 0.0;
};

/// Toy pinhole rig. Pixel columns fan out horizontally over the field of view;
/// rows only encode height, so every row of a column lands on the same BEV ray.
struct CameraConfig {
  std::size_t n_views = 4;
  std::size_t in_channels = 4;
  std::size_t backbone_channels = 8;
  std::size_t channels = 8;
  std::size_t img_h = 8;
  std::size_t img_w = 16;
  std::size_t depth_bins = 16;
  double d_min = 1.0;
  double d_max = 33.0;
  double focal = 8.0;  // pixels
  double mount_height = 1.5;
  std::vector<ViewPose> poses;  // empty: evenly spaced yaws around the origin

  void validate() const;
  ViewPose pose(std::size_t view) const;
  double bin_width() const { return (d_max - d_min) / static_cast<double>(depth_bins); }
  double bin_center(std::size_t bin) const { return d_min + (static_cast<double>(bin) + 0.5) * bin_width(); }
  std::optional<std::size_t> bin_of(double depth) const;
};

/// [N, C, D, H, W] frustum-aligned features.
struct FrustumFeatures {
  Tensor values;
};

struct PixelHit {
  std::size_t row = 0;
  std::size_t col = 0;
  double depth = 0.0;  // forward distance along the optical axis
};

/// Projects a metric point into `view`; nullopt when behind the camera or off-image.
std::optional<PixelHit> project_to_view(const CameraConfig& cfg, std::size_t view, double x, double y, double z);

/// Metric ground position of pixel column `col` at forward depth `depth`.
std::pair<double, double> unproject_column(const CameraConfig& cfg, std::size_t view, std::size_t col, double depth);

void init_camera_params(ParamStore& store, const CameraConfig& cfg, std::mt19937_64& rng);

struct ContextDepth {
  Tensor context;  // [N, C, H, W]
  Tensor depth;    // [N, D, H, W], softmax over D
  // backbone intermediates kept for the backward pass
  Tensor input, pre0, act0, pre1, act1;
};

/// Two-layer conv backbone followed by a context conv and a depth conv with
/// a softmax over depth bins.
ContextDepth context_and_depth(const Tensor& feat, const ParamStore& params, const CameraConfig& cfg);
void context_and_depth_backward(const ContextDepth& fwd, const Tensor& grad_context, const Tensor& grad_depth,
                                ParamStore& params);

FrustumFeatures lift_to_frustum(const Tensor& context, const Tensor& depth);

struct LiftGrads {
  Tensor context;
  Tensor depth;
};
LiftGrads lift_to_frustum_backward(const Tensor& context, const Tensor& depth, const Tensor& grad_frustum);

struct SplatResult {
  Tensor bev;  // [C, rows, cols]
  std::size_t dropped_cells = 0;
  double dropped_mass = 0.0;
};

/// Sum-splats every frustum cell into the BEV cell under its bin-center
/// position. Cells outside the grid are dropped and counted.
SplatResult splat_to_bev(const FrustumFeatures& frustum, const CameraConfig& cfg, const BevGridSpec& grid);
Tensor splat_to_bev_backward(const Tensor& grad_bev, const Shape& frustum_dims, const CameraConfig& cfg,
                             const BevGridSpec& grid);

}  // namespace fusionkd
