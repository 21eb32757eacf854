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

#include <cstdint>
#include <optional>

#include "fusionkd/camera.hpp"
#include "fusionkd/distill.hpp"
#include "fusionkd/fusion.hpp"
#include "fusionkd/geometry.hpp"
#include "fusionkd/head.hpp"
#include "fusionkd/intensity.hpp"
#include "fusionkd/objective.hpp"
#include "fusionkd/param_store.hpp"
#include "fusionkd/radar.hpp"
#include "fusionkd/scene.hpp"
#include "fusionkd/teacher.hpp"

namespace fusionkd {

struct ModelConfig {
  BevGridSpec grid;
  VoxelSpec voxel;
  CameraConfig camera;
  RadarConfig radar;
  FusionConfig fusion;
  IntensityCoeffs intensity;
  HeadConfig head;
  LossWeights weights;

  /// Feature channels shared by every BEV map.
  std::size_t channels() const { return camera.channels; }
  void set_channels(std::size_t c) {
    camera.channels = c;
    radar.channels = c;
  }
  void validate() const;
};

/// Seeds every parameter group from one generator in a fixed order.
ParamStore init_model(const ModelConfig& cfg, std::uint64_t seed);

/// Everything the losses compare against that no trainable parameter reaches.
struct SceneTargets {
  Tensor lidar_intensity;  // [1, rows, cols]
  Tensor radar_intensity;  // [1, rows, cols]
  TeacherBundle teacher;
  Tensor label;  // [C, rows, cols]
  SoftLabelMask mask;
};

/// `teacher_features`, when given, replaces the stub LiDAR encoder output.
SceneTargets prepare_targets(const SceneSample& scene, const ParamStore& params, const ModelConfig& cfg,
                             const std::optional<Tensor>& teacher_features = std::nullopt);

struct ModelForward {
  ContextDepth camera;
  FrustumFeatures frustum;
  SplatResult splat;  // F_cam
  RadarEmbedding embedding;
  RadarGrid radar_grid;
  RadarEncoding radar;  // F_radar
  Tensor cam_intensity;
  FusionResult fusion;  // F_fused
  HeadForward head;
  BlendResult blend;

  HeadLoss det;
  DepthLoss depth;
  IgfmLoss igfm;
  SwfdLoss swfd;
  SwrdLoss swrd;
  LdLoss ld;
  LossBreakdown loss;
};

ModelForward model_forward(const SceneSample& scene, const SceneTargets& targets, const ParamStore& params,
                           const ModelConfig& cfg);

/// Accumulates d total / d param for every trainable entry.
void model_backward(const ModelForward& fwd, const SceneSample& scene, const SceneTargets& targets,
                    ParamStore& params, const ModelConfig& cfg);

}  // namespace fusionkd
