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

namespace fusionkd {

struct TeacherBundle {
  Tensor f_lidar;  // [C, rows, cols]
  HeadOutput head;
};

/// Registers the frozen encoder (`teacher.enc0`, `teacher.enc1`) and head
/// (`teacher.head.*`). Nothing here is ever trainable.
void init_teacher_params(ParamStore& store, std::size_t channels, const HeadConfig& head, std::mt19937_64& rng);

/// [occupancy, mean intensity] BEV input -> conv3x3 -> ReLU -> conv3x3.
Tensor teacher_encode(std::span<const LidarPoint> lidar, const VoxelSpec& voxel, const BevGridSpec& grid,
                      const ParamStore& params);

TeacherBundle teacher_forward(std::span<const LidarPoint> lidar, const VoxelSpec& voxel, const BevGridSpec& grid,
                              const ParamStore& params);

/// Teacher head on externally supplied LiDAR features.
TeacherBundle teacher_from_features(Tensor f_lidar, const ParamStore& params);

}  // namespace fusionkd
