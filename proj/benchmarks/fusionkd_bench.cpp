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


#include <benchmark/benchmark.h>

#include <random>

#include "fusionkd/camera.hpp"
#include "fusionkd/fusion.hpp"
#include "fusionkd/model.hpp"
#include "fusionkd/ops.hpp"

namespace {

using fusionkd::Tensor;

Tensor random_tensor(const fusionkd::Shape& dims, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(dims);
  for (auto& v : t.data()) v = u(rng);
  return t;
}

void BM_Conv2d(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const Tensor x = random_tensor({8, n, n}, rng), k = random_tensor({8, 8, 3, 3}, rng), b = random_tensor({8}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(fusionkd::conv2d(x, k, b));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n));
}
BENCHMARK(BM_Conv2d)->Arg(32)->Arg(64)->Arg(128);

void BM_SplatToBev(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const fusionkd::CameraConfig cam;
  const fusionkd::BevGridSpec grid;
  const fusionkd::FrustumFeatures f{
      random_tensor({cam.n_views, cam.channels, cam.depth_bins, cam.img_h, cam.img_w}, rng)};
  for (auto _ : state) benchmark::DoNotOptimize(fusionkd::splat_to_bev(f, cam, grid));
}
BENCHMARK(BM_SplatToBev);

void BM_DeformAttnFuse(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  fusionkd::FusionConfig cfg;
  fusionkd::ParamStore ps;
  fusionkd::init_fusion_params(ps, 8, cfg, rng);
  const Tensor radar = random_tensor({8, n, n}, rng), camera = random_tensor({8, n, n}, rng);
  const Tensor ic = random_tensor({1, n, n}, rng, 0, 1), ir = random_tensor({1, n, n}, rng, 0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fusionkd::deform_attn_fuse(radar, camera, ic, ir, cfg, ps));
}
BENCHMARK(BM_DeformAttnFuse)->Arg(32)->Arg(64);

void BM_ForwardBackward(benchmark::State& state) {
  fusionkd::ModelConfig cfg;
  cfg.grid.rows = cfg.grid.cols = static_cast<std::size_t>(state.range(0));
  fusionkd::SceneConfig sc;
  sc.grid = cfg.grid;
  sc.camera = cfg.camera;
  const auto scene = fusionkd::generate_scene(0, sc);
  auto params = fusionkd::init_model(cfg, 0);
  const auto targets = fusionkd::prepare_targets(scene, params, cfg);
  for (auto _ : state) {
    params.zero_grad();
    const auto fwd = fusionkd::model_forward(scene, targets, params, cfg);
    fusionkd::model_backward(fwd, scene, targets, params, cfg);
    benchmark::DoNotOptimize(params.grad(fusionkd::kLambda3));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
