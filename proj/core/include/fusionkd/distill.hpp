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
#include "fusionkd/head.hpp"
#include "fusionkd/param_store.hpp"
#include "fusionkd/tensor.hpp"

// Distillation losses. Teacher-side inputs (LiDAR features, teacher head,
// label features) are constants: no gradient is returned for them.

namespace fusionkd {

struct BlendWeights {
  Tensor w_lidar;  // [1, rows, cols], clamp(lambda * I_lidar, 0, 1)
  Tensor w_radar;  // 1 - w_lidar
  double lambda_blend = 1.0;
};

struct BlendResult {
  Tensor blended;  // w_lidar * F_lidar + w_radar * F_radar, broadcast over channels
  BlendWeights weights;
};

BlendResult blend(const Tensor& lidar, const Tensor& radar, const Tensor& lidar_intensity, double lambda_blend);

struct BlendGrads {
  Tensor radar;
  double lambda_blend = 0.0;
};
BlendGrads blend_backward(const BlendResult& fwd, const Tensor& lidar, const Tensor& radar,
                          const Tensor& lidar_intensity, const Tensor& grad_blended);

struct IgfmLoss {
  double value = 0.0;
  double align = 0.0;    // mean((F_radar - F_lidar)^2)
  double consist = 0.0;  // mean((F_radar - F_blended)^2)
  Tensor grad_radar;
  Tensor grad_blended;
};

/// alpha * align + (1 - alpha) * consist. Throws on alpha outside [0, 1].
IgfmLoss igfm_loss(const Tensor& radar, const Tensor& lidar, const Tensor& blended, double alpha);

void init_adapter_params(ParamStore& store, std::size_t channels, std::mt19937_64& rng);

struct SwfdLoss {
  double value = 0.0;
  Tensor adapted;  // beta(F_fused)
  Tensor grad_fused;
};

/// mean over cells of I_lidar * ||F_lidar - beta(F_fused)||^2, beta a 1x1 conv
/// adapter registered as `distill.beta`. Accumulates `grad_scale` times the
/// adapter gradients into `grads` when given.
SwfdLoss swfd_loss(const Tensor& lidar, const Tensor& fused, const Tensor& lidar_intensity, const ParamStore& params,
                   ParamStore* grads = nullptr, double grad_scale = 1.0);

struct SwrdLoss {
  double value = 0.0;
  double cls = 0.0;   // intensity-weighted focal part
  double bbox = 0.0;  // intensity-weighted L1 part
  Tensor grad_heatmap;
  Tensor grad_bbox;
};

/// mean over cells of I_lidar * (focal(teacher heatmap -> student heatmap),
/// summed over classes, + L1 between box maps, summed over channels).
SwrdLoss swrd_loss(const HeadOutput& teacher, const HeadOutput& student, const Tensor& lidar_intensity);

struct SoftLabelMask {
  Tensor mask;  // [1, rows, cols] in [0, 1]
  double eps = 1e-6;
};

/// Per-cell maximum over boxes of the box Gaussian centered on the midpoint
/// of the cell holding the box center. That cell reads exactly 1.
SoftLabelMask soft_label_mask(std::span<const Box3D> boxes, const BevGridSpec& grid, double eps = 1e-6);

struct LdLoss {
  double value = 0.0;
  Tensor grad_fused;
};

/// sum(||F_label - F_fused||^2 * M) / (sum(M) + eps).
LdLoss ld_loss(const Tensor& label, const Tensor& fused, const SoftLabelMask& mask);

/// Number of attribute channels of the label splat: class one-hot, l, w, h, sin yaw, cos yaw.
inline std::size_t label_attributes(std::size_t classes) { return classes + 5; }

void init_label_encoder_params(ParamStore& store, std::size_t classes, std::size_t channels, std::mt19937_64& rng);

/// Attribute vectors splatted under each box Gaussian, truncated at 3 sigma
/// per axis. [classes + 5, rows, cols].
Tensor label_splat(std::span<const Box3D> boxes, const BevGridSpec& grid, std::size_t classes);

/// Frozen 3x3 conv over the label splat; the label-encoded BEV feature.
Tensor label_encode(std::span<const Box3D> boxes, const BevGridSpec& grid, std::size_t classes,
                    const ParamStore& params);

}  // namespace fusionkd
