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


#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "fusionkd/checks/checks.hpp"
#include "fusionkd/checks/oracles.hpp"

namespace fusionkd::checks {
namespace {

Result run_named(const std::string& name, const Context& ctx) {
  for (const auto& c : registry()) {
    if (c.name == name) return run_check(c, ctx);
  }
  ADD_FAILURE() << "no check named " << name;
  return {};
}

TEST(Checks, RegistryCoversEveryCriterion) {
  std::set<int> seen;
  std::set<std::string> names;
  for (const auto& c : registry()) {
    for (int k : c.criteria) seen.insert(k);
    EXPECT_TRUE(names.insert(c.name).second) << "duplicate check " << c.name;
    EXPECT_TRUE(c.suite == "oracles" || c.suite == "gradients" || c.suite == "invariants");
  }
  EXPECT_EQ(seen, (std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9}));
}

TEST(Checks, UnknownSuiteIsRejected) {
  EXPECT_FALSE(is_suite("oracle"));
  EXPECT_THROW(run_suite("nope", Context{}), std::invalid_argument);
}

TEST(Checks, OracleSuitePassesOnTheLibrary) {
  const auto results = run_suite("oracles", Context{});
  EXPECT_TRUE(all_passed(results)) << format_report(results);
}

// A grid mapping that is off by one cell along x.
RadarGrid shifted_build_grid(std::span<const RadarPoint> points, std::span<const Tensor> embeddings,
                             const BevGridSpec& grid, std::size_t channels) {
  std::vector<RadarPoint> moved(points.begin(), points.end());
  for (auto& p : moved) p.x = std::min(p.x + grid.step_x(), grid.x_max);
  return fusionkd::build_grid(moved, embeddings, grid, channels);
}

TEST(ChecksMutation, OffByOneGridMappingFailsTheOracleSuite) {
  Context ctx;
  ctx.kernels.build_grid = shifted_build_grid;
  EXPECT_FALSE(run_named("build_grid_oracle", ctx).passed);
  EXPECT_FALSE(all_passed(run_suite("oracles", ctx)));
}

TEST(ChecksMutation, PerturbedConvolutionIsCaught) {
  Context ctx;
  ctx.kernels.conv2d = [](const Tensor& x, const Tensor& k, const Tensor& b) {
    Tensor y = fusionkd::conv2d(x, k, b);
    y[0] += 1e-9;
    return y;
  };
  EXPECT_FALSE(run_named("conv2d_oracle", ctx).passed);
}

TEST(ChecksMutation, UngatedFusionFailsTheOracleAndMonotonicity) {
  Context ctx;
  ctx.kernels.deform_attn_fuse = [](const Tensor& radar, const Tensor& camera, const Tensor& ic, const Tensor& ir,
                                    const FusionConfig& cfg, const ParamStore& params) {
    ParamStore flat = params;
    for (const char* g : {kGateOffset, kGateAttn}) {
      flat.mutable_value(std::string(g) + ".w").fill(0.0);
      flat.mutable_value(std::string(g) + ".b").fill(40.0);
    }
    return fusionkd::deform_attn_fuse(radar, camera, ic, ir, cfg, flat);
  };
  EXPECT_FALSE(run_named("deform_attn_oracle", ctx).passed);
  EXPECT_FALSE(run_named("gate_monotone", ctx).passed);
}

TEST(ChecksMutation, DroppedSplatCellsAreCaught) {
  Context ctx;
  ctx.kernels.splat_to_bev = [](const FrustumFeatures& f, const CameraConfig& cfg, const BevGridSpec& grid) {
    SplatResult r = fusionkd::splat_to_bev(f, cfg, grid);
    r.bev[r.bev.size() / 2] = 0.0;
    return r;
  };
  EXPECT_FALSE(run_named("splat_oracle", ctx).passed);
}

TEST(Checks, ReportsAreDeterministic) {
  Context ctx;
  ctx.seed = 7;
  EXPECT_EQ(format_report(run_suite("oracles", ctx)), format_report(run_suite("oracles", ctx)));
}

TEST(Checks, ExceptionsBecomeFailures) {
  const Check bad{"throws", "invariants", {}, [](const Context&) -> Result { throw std::runtime_error("boom"); }};
  const Result r = run_check(bad, Context{});
  EXPECT_FALSE(r.passed);
  EXPECT_NE(r.detail.find("boom"), std::string::npos);
}

TEST(Oracles, CompensatedSumRecoversCancellation) {
  const std::vector<double> v = {1e16, 1.0, -1e16, 1.0};
  EXPECT_EQ(oracle::compensated_sum(v), 2.0);
}

}  // namespace
}  // namespace fusionkd::checks
