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
#include <string>
#include <vector>

#include "fusionkd/camera.hpp"
#include "fusionkd/geometry.hpp"
#include "fusionkd/param_store.hpp"
#include "fusionkd/tensor.hpp"

namespace fusionkd {

/// Regression channels: dx, dy (offset inside the center cell, in cells),
/// z, log l, log w, log h, sin yaw, cos yaw.
inline constexpr std::size_t kRegChannels = 8;

struct HeadConfig {
  std::size_t classes = 3;
  std::size_t hidden = 8;
  double heatmap_prior = -2.19;  // initial heatmap logit bias
};

struct HeadOutput {
  Tensor heatmap;  // [K, rows, cols], sigmoid output
  Tensor bbox;     // [8, rows, cols]
};

void init_head_params(ParamStore& store, const std::string& prefix, std::size_t channels, const HeadConfig& cfg,
                      std::mt19937_64& rng, bool trainable = true);

struct HeadForward {
  HeadOutput out;
  Tensor input, cls_pre, reg_pre;
};

/// Two conv stacks (3x3 -> ReLU -> 1x1); the class stack ends in a sigmoid.
HeadForward head_forward(const Tensor& features, const ParamStore& params, const std::string& prefix);
Tensor head_backward(const HeadForward& fwd, const Tensor& grad_heatmap, const Tensor& grad_bbox,
                     ParamStore& params, const std::string& prefix);

/// Unnormalized penalty-reduced Gaussian focal loss summed over all
/// elements: positives are targets equal to 1, everything else is weighted by
/// (1 - y)^4. Gradient is w.r.t. the prediction.
struct FocalTerms {
  double loss = 0.0;
  std::size_t positives = 0;
  Tensor grad;
};
FocalTerms gaussian_focal(const Tensor& pred, const Tensor& target);
/// Per-element focal loss, same dims as `pred`.
Tensor gaussian_focal_map(const Tensor& pred, const Tensor& target);

/// Gaussian target heatmap [K, rows, cols]: each box contributes a Gaussian
/// peaking at exactly 1 on its center cell; overlaps combine by max.
Tensor heatmap_targets(std::span<const Box3D> boxes, const BevGridSpec& grid, std::size_t classes);

/// Regression target vector for a box relative to its center cell.
std::vector<double> regression_target(const Box3D& box, const BevGridSpec& grid, const Cell& center);

struct HeadLoss {
  double value = 0.0;
  double focal = 0.0;
  double l1 = 0.0;
  Tensor grad_heatmap;
  Tensor grad_bbox;
};

/// Focal on the heatmap (normalized by max(1, positives)) plus L1 on the
/// regression channels at box center cells (normalized by max(1, boxes)).
HeadLoss det_loss(const HeadOutput& pred, std::span<const Box3D> boxes, const BevGridSpec& grid);

struct DepthLoss {
  double value = 0.0;
  std::size_t supervised = 0;
  Tensor grad_depth;
};

/// Mean binned cross-entropy between the predicted depth distribution and
/// the bin of every LiDAR point that projects into a view with a depth
/// inside [d_min, d_max).
DepthLoss depth_loss(const Tensor& depth, std::span<const LidarPoint> lidar, const CameraConfig& cfg);

}  // namespace fusionkd
