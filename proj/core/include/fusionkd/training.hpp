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

#include <functional>
#include <string>
#include <vector>

#include "fusionkd/config.hpp"
#include "fusionkd/model.hpp"

namespace fusionkd {

struct TrainResult {
  SceneSample scene;
  SceneTargets targets;
  ParamStore params;
  std::vector<LossBreakdown> history;  // history[k]: loss after k updates
  ModelForward last;                   // forward pass behind history.back()
};

using StepCallback = std::function<void(std::size_t step, const LossBreakdown& loss)>;

/// Generates the scene for `cfg.seed`, then evaluates and updates `cfg.steps`
/// times with plain gradient descent. Runs under `cfg.precision`.
TrainResult train(const RunConfig& cfg, const StepCallback& on_step = {});

/// One metrics record: {"step", "det", "depth", "igfm", "swfd", "swrd", "ld", "total"}.
std::string metrics_record(std::size_t step, const LossBreakdown& loss);

/// Named tensors of a finished run: camera_bev, radar_bev, fused,
/// cam_intensity, radar_intensity, lidar_intensity, lidar_bev, label_bev,
/// heatmap, depth.
std::vector<std::string> dump_names();
const Tensor& dump_tensor(const TrainResult& run, const std::string& name);

/// Trains and writes metrics.jsonl, config.json and every dump into `out_dir`.
TrainResult run_to_directory(const RunConfig& cfg, const std::string& out_dir);

}  // namespace fusionkd
