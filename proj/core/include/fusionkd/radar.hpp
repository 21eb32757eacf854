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
#include <vector>

#include "fusionkd/geometry.hpp"
#include "fusionkd/param_store.hpp"
#include "fusionkd/tensor.hpp"

namespace fusionkd {

struct RadarConfig {
  std::size_t hidden = 16;
  std::size_t channels = 8;
  std::size_t residual_blocks = 2;
  double rcs_min = -20.0;  // dBsm mapped to 0
  double rcs_max = 30.0;   // dBsm mapped to 1
  // Typical magnitudes of (x, y, z, |v|) used only to scale the initial
  // first-layer weights so every input contributes O(1).
  double position_scale = 51.2;
  double height_scale = 3.0;
  double speed_scale = 10.0;
};

/// RCS affinely mapped from [rcs_min, rcs_max] to [0, 1], clamped.
double normalized_rcs(double rcs, const RadarConfig& cfg);
double doppler_speed(const RadarPoint& p);

void init_radar_params(ParamStore& store, const RadarConfig& cfg, std::mt19937_64& rng);

struct RadarEmbedding {
  std::vector<Tensor> features;  // one [C] vector per point
  // per-point [5] inputs and [hidden] pre-activations for the backward pass
  std::vector<Tensor> inputs;
  std::vector<Tensor> hidden_pre;
};

/// phi(x, y, z, |v|, rcs_norm): affine -> ReLU -> affine.
RadarEmbedding embed_points(std::span<const RadarPoint> points, const ParamStore& params, const RadarConfig& cfg);
void embed_points_backward(const RadarEmbedding& fwd, std::span<const Tensor> grad_features, ParamStore& params);

struct RadarGrid {
  Tensor features;   // [C, rows, cols]; unoccupied cells hold zeros
  Tensor occupancy;  // [1, rows, cols] in {0, 1}
  // Index of the point supplying each channel maximum, -1 for empty cells.
  std::vector<long> argmax;
};

/// Channel-wise max pooling of point embeddings per BEV cell. `channels`
/// fixes the grid depth when the point set is empty.
RadarGrid build_grid(std::span<const RadarPoint> points, std::span<const Tensor> embeddings,
                     const BevGridSpec& grid, std::size_t channels);
std::vector<Tensor> build_grid_backward(const RadarGrid& fwd, const Tensor& grad_features, std::size_t n_points);

struct RadarEncoding {
  Tensor output;  // [C, rows, cols]
  std::vector<Tensor> block_inputs;
  std::vector<Tensor> branch_pre;
};

/// Residual conv blocks, x <- x + conv_b(relu(conv_a(x))), spatial size preserved.
RadarEncoding encode_radar(const Tensor& grid_features, const ParamStore& params, const RadarConfig& cfg);
Tensor encode_radar_backward(const RadarEncoding& fwd, const Tensor& grad_output, ParamStore& params);

}  // namespace fusionkd
