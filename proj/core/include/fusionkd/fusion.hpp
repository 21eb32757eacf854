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
#include <string>
#include <vector>

#include "fusionkd/param_store.hpp"
#include "fusionkd/tensor.hpp"

namespace fusionkd {

struct FusionConfig {
  std::size_t points = 4;     // sampling points per query, single head
  double offset_scale = 2.0;  // cells per unit of predicted offset
  bool residual = true;       // add the radar query back onto the attention output

  void validate() const;
};

inline constexpr const char* kGateOffset = "fusion.gate_offset";
inline constexpr const char* kGateAttn = "fusion.gate_attn";

void init_fusion_params(ParamStore& store, std::size_t channels, const FusionConfig& cfg, std::mt19937_64& rng);

/// sigmoid(w * intensity + b) for the scalar gate registered under `prefix`.
double gate(double intensity, const ParamStore& params, const std::string& prefix);

/// Everything the backward pass needs, laid out per query cell q and
/// sampling point j (index q * P + j).
struct FusionResult {
  Tensor output;                  // [C, rows, cols]
  std::vector<double> offsets;    // raw offsets, (q * P + j) * 2 + {row, col}
  std::vector<double> gate_off;   // g(I_radar) per query
  std::vector<double> loc_u;      // sampling row per (q, j)
  std::vector<double> loc_v;      // sampling column per (q, j)
  std::vector<double> keys;       // sampled camera features, ((q * P + j) * C + c)
  std::vector<double> dots;       // q . k
  std::vector<double> sampled_ic; // camera intensity at the sampling point
  std::vector<double> gate_attn;  // g(I_cam) per (q, j)
  std::vector<double> weights;    // softmax over j per query
};

/// Intensity-gated deformable cross-attention. Radar features are the
/// queries, camera features the keys and values. For query cell i:
///   offsets_j   = affine(q_i) * g_off(I_radar(i)) * offset_scale
///   k_j = v_j   = bilinear(F_cam, i + offsets_j)
///   logit_j     = (q_i . k_j) / sqrt(C) * g_attn(bilinear(I_cam, i + offsets_j))
///   out_i       = sum_j softmax(logit)_j v_j  (+ q_i when residual)
FusionResult deform_attn_fuse(const Tensor& radar, const Tensor& camera, const Tensor& cam_intensity,
                              const Tensor& radar_intensity, const FusionConfig& cfg, const ParamStore& params);

struct FusionGrads {
  Tensor radar;
  Tensor camera;
  Tensor cam_intensity;
};
FusionGrads deform_attn_fuse_backward(const FusionResult& fwd, const Tensor& radar, const Tensor& camera,
                                      const Tensor& cam_intensity, const Tensor& radar_intensity,
                                      const FusionConfig& cfg, const Tensor& grad_output, ParamStore& params);

}  // namespace fusionkd
