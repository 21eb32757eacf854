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


#include "fusionkd/model.hpp"

#include <random>
#include <stdexcept>

namespace fusionkd {

void ModelConfig::validate() const {
  grid.validate();
  voxel.validate();
  camera.validate();
  fusion.validate();
  weights.validate();
  if (radar.channels != camera.channels) {
    throw std::invalid_argument("camera and radar channel counts differ: " + std::to_string(camera.channels) +
                                " vs " + std::to_string(radar.channels));
  }
  if (radar.hidden == 0 || !(radar.rcs_max > radar.rcs_min)) throw std::invalid_argument("invalid radar config");
  if (head.classes == 0 || head.hidden == 0) throw std::invalid_argument("invalid head config");
}

ParamStore init_model(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  ParamStore p;
  const std::size_t c = cfg.channels();
  init_camera_params(p, cfg.camera, rng);
  init_camera_intensity_params(p, c, rng);
  init_radar_params(p, cfg.radar, rng);
  init_fusion_params(p, c, cfg.fusion, rng);
  init_head_params(p, "head", c, cfg.head, rng);
  init_adapter_params(p, c, rng);
  init_teacher_params(p, c, cfg.head, rng);
  init_label_encoder_params(p, cfg.head.classes, c, rng);
  init_objective_params(p, cfg.weights);
  return p;
}

SceneTargets prepare_targets(const SceneSample& scene, const ParamStore& params, const ModelConfig& cfg,
                             const std::optional<Tensor>& teacher_features) {
  SceneTargets t;
  t.lidar_intensity = lidar_intensity_bev(scene.lidar, cfg.voxel, cfg.grid);
  t.radar_intensity = radar_intensity_bev(scene.radar, cfg.intensity, cfg.radar, cfg.grid);
  if (teacher_features) {
    require(teacher_features->dims() == Shape({cfg.channels(), cfg.grid.rows, cfg.grid.cols}),
            "teacher features " + shape_str(teacher_features->dims()) + " do not match the BEV grid");
    t.teacher = teacher_from_features(*teacher_features, params);
  } else {
    t.teacher = teacher_forward(scene.lidar, cfg.voxel, cfg.grid, params);
  }
  t.label = label_encode(scene.boxes, cfg.grid, cfg.head.classes, params);
  t.mask = soft_label_mask(scene.boxes, cfg.grid);
  return t;
}

ModelForward model_forward(const SceneSample& scene, const SceneTargets& targets, const ParamStore& params,
                           const ModelConfig& cfg) {
  ModelForward f;
  f.camera = context_and_depth(scene.camera_input, params, cfg.camera);
  f.frustum = lift_to_frustum(f.camera.context, f.camera.depth);
  f.splat = splat_to_bev(f.frustum, cfg.camera, cfg.grid);

  f.embedding = embed_points(scene.radar, params, cfg.radar);
  f.radar_grid = build_grid(scene.radar, f.embedding.features, cfg.grid, cfg.channels());
  f.radar = encode_radar(f.radar_grid.features, params, cfg.radar);

  f.cam_intensity = camera_intensity(f.splat.bev, params);
  f.fusion = deform_attn_fuse(f.radar.output, f.splat.bev, f.cam_intensity, targets.radar_intensity, cfg.fusion,
                              params);
  f.head = head_forward(f.fusion.output, params, "head");

  const Tensor& f_lidar = targets.teacher.f_lidar;
  f.blend = blend(f_lidar, f.radar.output, targets.lidar_intensity, params.value(kLambdaBlend)[0]);

  f.det = det_loss(f.head.out, scene.boxes, cfg.grid);
  f.depth = depth_loss(f.camera.depth, scene.lidar, cfg.camera);
  f.igfm = igfm_loss(f.radar.output, f_lidar, f.blend.blended, cfg.weights.alpha_igfm);
  f.swfd = swfd_loss(f_lidar, f.fusion.output, targets.lidar_intensity, params);
  f.swrd = swrd_loss(targets.teacher.head, f.head.out, targets.lidar_intensity);
  f.ld = ld_loss(targets.label, f.fusion.output, targets.mask);

  LossBreakdown parts;
  parts.det = f.det.value;
  parts.depth = f.depth.value;
  parts.igfm = f.igfm.value;
  parts.swfd = f.swfd.value;
  parts.swrd = f.swrd.value;
  parts.ld = f.ld.value;
  f.loss = total_loss(parts, cfg.weights, params.value(kLambda3)[0]);
  return f;
}

void model_backward(const ModelForward& f, const SceneSample& scene, const SceneTargets& targets, ParamStore& params,
                    const ModelConfig& cfg) {
  const LossWeights& w = cfg.weights;
  const double lambda3 = params.value(kLambda3)[0];
  params.accumulate(kLambda3, Tensor::scalar(f.igfm.value));

  // Head: detection and response distillation.
  const Tensor g_heat = f.det.grad_heatmap * w.l1 + f.swrd.grad_heatmap * w.l5;
  const Tensor g_bbox = f.det.grad_bbox * w.l1 + f.swrd.grad_bbox * w.l5;
  Tensor g_fused = head_backward(f.head, g_heat, g_bbox, params, "head");

  // Feature and label distillation on the fused map.
  const SwfdLoss swfd = swfd_loss(targets.teacher.f_lidar, f.fusion.output, targets.lidar_intensity, params, &params,
                                  w.l4);
  g_fused += swfd.grad_fused * w.l4;
  g_fused += f.ld.grad_fused * w.l6;

  const FusionGrads gf = deform_attn_fuse_backward(f.fusion, f.radar.output, f.splat.bev, f.cam_intensity,
                                                   targets.radar_intensity, cfg.fusion, g_fused, params);

  // Radar branch: fusion queries plus intensity-guided enhancement.
  Tensor g_radar = gf.radar + f.igfm.grad_radar * lambda3;
  const BlendGrads gb = blend_backward(f.blend, targets.teacher.f_lidar, f.radar.output, targets.lidar_intensity,
                                       f.igfm.grad_blended * lambda3);
  g_radar += gb.radar;
  params.accumulate(kLambdaBlend, Tensor::scalar(gb.lambda_blend));

  const Tensor g_grid = encode_radar_backward(f.radar, g_radar, params);
  const auto g_points = build_grid_backward(f.radar_grid, g_grid, scene.radar.size());
  embed_points_backward(f.embedding, g_points, params);

  // Camera branch.
  Tensor g_cam = gf.camera;
  g_cam += camera_intensity_backward(f.splat.bev, f.cam_intensity, gf.cam_intensity, params);
  const Tensor g_frustum = splat_to_bev_backward(g_cam, f.frustum.values.dims(), cfg.camera, cfg.grid);
  const LiftGrads gl = lift_to_frustum_backward(f.camera.context, f.camera.depth, g_frustum);
  const Tensor g_depth = gl.depth + f.depth.grad_depth * w.l2;
  context_and_depth_backward(f.camera, gl.context, g_depth, params);
}

}  // namespace fusionkd
