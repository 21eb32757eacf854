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


#include "fusionkd/teacher.hpp"

#include "fusionkd/intensity.hpp"
#include "fusionkd/ops.hpp"

namespace fusionkd {

void init_teacher_params(ParamStore& store, std::size_t channels, const HeadConfig& head, std::mt19937_64& rng) {
  add_conv(store, "teacher.enc0", channels, 2, 3, rng, false);
  add_conv(store, "teacher.enc1", channels, channels, 3, rng, false);
  init_head_params(store, "teacher.head", channels, head, rng, false);
}

Tensor teacher_encode(std::span<const LidarPoint> lidar, const VoxelSpec& voxel, const BevGridSpec& grid,
                      const ParamStore& params) {
  const Tensor occ = lidar_occupancy_bev(lidar, voxel, grid);
  const Tensor inten = lidar_intensity_bev(lidar, voxel, grid);
  Tensor input({2, grid.rows, grid.cols});
  const std::size_t plane = grid.cells();
  for (std::size_t k = 0; k < plane; ++k) {
    input[k] = occ[k];
    input[plane + k] = inten[k];
  }
  const Tensor h = relu(conv2d(input, params.value("teacher.enc0.w"), params.value("teacher.enc0.b")));
  return conv2d(h, params.value("teacher.enc1.w"), params.value("teacher.enc1.b"));
}

TeacherBundle teacher_forward(std::span<const LidarPoint> lidar, const VoxelSpec& voxel, const BevGridSpec& grid,
                              const ParamStore& params) {
  return teacher_from_features(teacher_encode(lidar, voxel, grid, params), params);
}

TeacherBundle teacher_from_features(Tensor f_lidar, const ParamStore& params) {
  require(f_lidar.ndim() == 3, "teacher features must be [C, rows, cols], got " + shape_str(f_lidar.dims()));
  require(f_lidar.dim(0) == params.value("teacher.enc1.b").dim(0),
          "teacher features have " + std::to_string(f_lidar.dim(0)) + " channels, expected " +
              std::to_string(params.value("teacher.enc1.b").dim(0)));
  TeacherBundle t;
  t.head = head_forward(f_lidar, params, "teacher.head").out;
  t.f_lidar = std::move(f_lidar);
  return t;
}

}  // namespace fusionkd
