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
#include <string>
#include <vector>

#include "fusionkd/camera.hpp"
#include "fusionkd/geometry.hpp"
#include "fusionkd/tensor.hpp"

namespace fusionkd {

struct SceneConfig {
  std::size_t n_objects = 4;
  double radius_min = 6.0;  // object centers, meters from the ego origin
  double radius_max = 30.0;
  double min_separation = 5.0;
  std::size_t lidar_per_object = 48;
  std::size_t lidar_clutter = 64;
  double clutter_radius = 40.0;
  std::size_t radar_clutter = 4;
  std::size_t classes = 3;
  BevGridSpec grid;
  CameraConfig camera;

  void validate() const;
};

struct SceneSample {
  Tensor camera_input;  // [N, C_in, H, W]
  std::vector<RadarPoint> radar;
  std::vector<LidarPoint> lidar;
  std::vector<Box3D> boxes;
  std::uint64_t seed = 0;
};

/// Deterministic in (seed, cfg). Object LiDAR returns carry raw intensity in
/// [153, 229] / 255, ground clutter [13, 76] / 255.
SceneSample generate_scene(std::uint64_t seed, const SceneConfig& cfg);

/// Writes `path` (JSON) and a camera tensor dump next to it. Returns the dump path.
std::string save_scene(const std::string& path, const SceneSample& scene);
SceneSample load_scene(const std::string& path);

/// Sidecar path for a scene file: "dir/name.json" -> "dir/name.camera.imkd".
std::string camera_sidecar_path(const std::string& scene_path);

}  // namespace fusionkd
