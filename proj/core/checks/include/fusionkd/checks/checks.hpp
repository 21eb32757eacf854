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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fusionkd/camera.hpp"
#include "fusionkd/fusion.hpp"
#include "fusionkd/intensity.hpp"
#include "fusionkd/ops.hpp"
#include "fusionkd/radar.hpp"

// Property and oracle suites behind `fusionkd check` and the acceptance run.

namespace fusionkd::checks {

/// Kernels under test. Defaults are the library implementations; tests swap
/// in deliberately broken versions to prove the suites catch them.
struct Kernels {
  std::function<Tensor(const Tensor&, const Tensor&, const Tensor&)> conv2d = fusionkd::conv2d;
  std::function<RadarGrid(std::span<const RadarPoint>, std::span<const Tensor>, const BevGridSpec&, std::size_t)>
      build_grid = fusionkd::build_grid;
  std::function<Tensor(std::span<const LidarPoint>, const VoxelSpec&, const BevGridSpec&)> lidar_intensity_bev =
      fusionkd::lidar_intensity_bev;
  std::function<SplatResult(const FrustumFeatures&, const CameraConfig&, const BevGridSpec&)> splat_to_bev =
      fusionkd::splat_to_bev;
  std::function<FusionResult(const Tensor&, const Tensor&, const Tensor&, const Tensor&, const FusionConfig&,
                             const ParamStore&)>
      deform_attn_fuse = fusionkd::deform_attn_fuse;
};

struct Context {
  std::uint64_t seed = 0;
  Kernels kernels;
};

struct Result {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Check {
  std::string name;
  std::string suite;               // "oracles", "gradients" or "invariants"
  std::vector<int> criteria;       // acceptance criteria this check backs
  std::function<Result(const Context&)> run;
};

/// Every registered check in a fixed order.
const std::vector<Check>& registry();

std::vector<std::string> suite_names();
bool is_suite(const std::string& name);

/// Runs one suite ("all" runs every check). Each check runs at f64; an
/// exception inside a check is reported as its failure.
std::vector<Result> run_suite(const std::string& suite, const Context& ctx);
Result run_check(const Check& check, const Context& ctx);

bool all_passed(const std::vector<Result>& results);

/// Fixed-width table, one row per check, plus a summary line.
std::string format_report(const std::vector<Result>& results);

}  // namespace fusionkd::checks
