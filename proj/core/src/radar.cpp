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

#include "fusionkd/radar.hpp"

#include <algorithm>
#include <cmath>

#include "fusionkd/ops.hpp"

namespace fusionkd {

namespace {

constexpr std::size_t kPointInputs = 5;

std::string block_name(std::size_t block, char half) {
  return "radar.enc" + std::to_string(block) + half;
}

}  // namespace

double normalized_rcs(double rcs, const RadarConfig& cfg) {
  return std::clamp((rcs - cfg.rcs_min) / (cfg.rcs_max - cfg.rcs_min), 0.0, 1.0);
}

double doppler_speed(const RadarPoint& p) { return std::sqrt(p.vx * p.vx + p.vy * p.vy); }

void init_radar_params(ParamStore& store, const RadarConfig& cfg, std::mt19937_64& rng) {
  Tensor w0 = random_normal({kPointInputs, cfg.hidden}, 1.0 / std::sqrt(double(kPointInputs)), rng);
  const double scale[kPointInputs] = {cfg.position_scale, cfg.position_scale, cfg.height_scale, cfg.speed_scale,
                                      1.0};
  for (std::size_t k = 0; k < kPointInputs; ++k) {
    for (std::size_t m = 0; m < cfg.hidden; ++m) w0[k * cfg.hidden + m] /= scale[k];
  }
  store.add("radar.phi0.w", std::move(w0));
  store.add("radar.phi0.b", random_uniform({cfg.hidden}, -0.05, 0.05, rng));
  add_affine(store, "radar.phi1", cfg.hidden, cfg.channels, rng);
  for (std::size_t b = 0; b < cfg.residual_blocks; ++b) {
    add_conv(store, block_name(b, 'a'), cfg.channels, cfg.channels, 3, rng, true, 0.5);
    add_conv(store, block_name(b, 'b'), cfg.channels, cfg.channels, 3, rng, true, 0.5);
  }
}

RadarEmbedding embed_points(std::span<const RadarPoint> points, const ParamStore& params, const RadarConfig& cfg) {
  RadarEmbedding out;
  out.features.reserve(points.size());
  for (const auto& p : points) {
    Tensor in({kPointInputs}, {p.x, p.y, p.z, doppler_speed(p), normalized_rcs(p.rcs, cfg)});
    Tensor pre = affine(in, params.value("radar.phi0.w"), params.value("radar.phi0.b"));
    out.features.push_back(affine(relu(pre), params.value("radar.phi1.w"), params.value("radar.phi1.b")));
    out.inputs.push_back(std::move(in));
    out.hidden_pre.push_back(std::move(pre));
  }
  return out;
}

void embed_points_backward(const RadarEmbedding& fwd, std::span<const Tensor> grad_features, ParamStore& params) {
  require(grad_features.size() == fwd.features.size(), "embed_points_backward: gradient count mismatch");
  for (std::size_t i = 0; i < grad_features.size(); ++i) {
    const Tensor act = relu(fwd.hidden_pre[i]);
    auto g1 = affine_backward(act, params.value("radar.phi1.w"), grad_features[i]);
    params.accumulate("radar.phi1.w", g1.w);
    params.accumulate("radar.phi1.b", g1.b);
    auto g0 = affine_backward(fwd.inputs[i], params.value("radar.phi0.w"), relu_backward(fwd.hidden_pre[i], g1.x));
    params.accumulate("radar.phi0.w", g0.w);
    params.accumulate("radar.phi0.b", g0.b);
  }
}

RadarGrid build_grid(std::span<const RadarPoint> points, std::span<const Tensor> embeddings,
                     const BevGridSpec& grid, std::size_t channels) {
  require(points.size() == embeddings.size(), "build_grid: " + std::to_string(points.size()) + " points but " +
                                                  std::to_string(embeddings.size()) + " embeddings");
  const std::size_t plane = grid.cells();
  const std::size_t c = channels;
  RadarGrid out{Tensor({c, grid.rows, grid.cols}), Tensor({1, grid.rows, grid.cols}),
                std::vector<long>(c * plane, -1)};
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(embeddings[i].size() == c, "build_grid: embedding length " + std::to_string(embeddings[i].size()) +
                                           " != " + std::to_string(c));
    const auto cell = grid.cell_of(points[i].x, points[i].y);
    if (!cell) continue;
    const std::size_t k = cell->row * grid.cols + cell->col;
    out.occupancy[k] = 1.0;
    for (std::size_t ch = 0; ch < c; ++ch) {
      const std::size_t idx = ch * plane + k;
      if (out.argmax[idx] < 0 || embeddings[i][ch] > out.features[idx]) {
        out.features[idx] = embeddings[i][ch];
        out.argmax[idx] = static_cast<long>(i);
      }
    }
  }
  return out;
}

std::vector<Tensor> build_grid_backward(const RadarGrid& fwd, const Tensor& grad_features, std::size_t n_points) {
  require(grad_features.same_dims(fwd.features), "build_grid_backward: grad dims mismatch");
  const std::size_t c = fwd.features.dim(0);
  const std::size_t plane = fwd.features.dim(1) * fwd.features.dim(2);
  std::vector<Tensor> g(n_points, Tensor({c}));
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t k = 0; k < plane; ++k) {
      const long src = fwd.argmax[ch * plane + k];
      if (src >= 0) g[static_cast<std::size_t>(src)][ch] += grad_features[ch * plane + k];
    }
  }
  return g;
}

RadarEncoding encode_radar(const Tensor& grid_features, const ParamStore& params, const RadarConfig& cfg) {
  RadarEncoding enc;
  Tensor x = grid_features;
  for (std::size_t b = 0; b < cfg.residual_blocks; ++b) {
    const auto a = block_name(b, 'a'), bb = block_name(b, 'b');
    Tensor pre = conv2d(x, params.value(a + ".w"), params.value(a + ".b"));
    Tensor branch = conv2d(relu(pre), params.value(bb + ".w"), params.value(bb + ".b"));
    enc.block_inputs.push_back(x);
    enc.branch_pre.push_back(std::move(pre));
    x += branch;
    x.finalize();
  }
  enc.output = std::move(x);
  return enc;
}

Tensor encode_radar_backward(const RadarEncoding& fwd, const Tensor& grad_output, ParamStore& params) {
  Tensor g = grad_output;
  for (std::size_t b = fwd.block_inputs.size(); b-- > 0;) {
    const auto a = block_name(b, 'a'), bb = block_name(b, 'b');
    const Tensor act = relu(fwd.branch_pre[b]);
    auto gb = conv2d_backward(act, params.value(bb + ".w"), g);
    params.accumulate(bb + ".w", gb.k);
    params.accumulate(bb + ".b", gb.b);
    auto ga = conv2d_backward(fwd.block_inputs[b], params.value(a + ".w"), relu_backward(fwd.branch_pre[b], gb.x));
    params.accumulate(a + ".w", ga.k);
    params.accumulate(a + ".b", ga.b);
    g += ga.x;
  }
  return g;
}

}  // namespace fusionkd
