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

#include "fusionkd/model.hpp"
#include "fusionkd/scene.hpp"
#include "fusionkd/tensor.hpp"

namespace fusionkd {

/// Raised for malformed, mistyped or unknown configuration entries.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  ModelConfig model;
  SceneConfig scene;
  double lr = 1e-2;
  std::size_t steps = 200;
  std::uint64_t seed = 0;
  Precision precision = Precision::f32;
  std::string output_dir = "out";
  std::string teacher_dump;  // optional LiDAR feature dump replacing the stub encoder

  /// Copies the shared grid and camera settings into the scene config.
  void sync();
  void validate() const;
};

/// Parses a JSON document. Absent keys keep their defaults; unknown keys and
/// wrong types raise ConfigError.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

/// Every key with its resolved value.
std::string dump_run_config(const RunConfig& cfg);

}  // namespace fusionkd
