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

#include "fusionkd/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "fusionkd/ops.hpp"

namespace fusionkd {

namespace {

void check_inputs(const Tensor& radar, const Tensor& camera, const Tensor& ic, const Tensor& ir) {
  require(radar.ndim() == 3, "deform_attn_fuse: radar features must be [C,H,W], got " + shape_str(radar.dims()));
  require(radar.same_dims(camera), "deform_attn_fuse: radar " + shape_str(radar.dims()) + " vs camera " +
                                       shape_str(camera.dims()));
  const Shape plane{1, radar.dim(1), radar.dim(2)};
  require(ic.dims() == plane, "deform_attn_fuse: camera intensity must be " + shape_str(plane) + ", got " +
                                  shape_str(ic.dims()));
  require(ir.dims() == plane, "deform_attn_fuse: radar intensity must be " + shape_str(plane) + ", got " +
                                  shape_str(ir.dims()));
}

}  // namespace

void FusionConfig::validate() const {
  if (points < 1) throw std::invalid_argument("fusion: need at least one sampling point");
}

void init_fusion_params(ParamStore& store, std::size_t channels, const FusionConfig& cfg, std::mt19937_64& rng) {
  add_affine(store, "fusion.offset", channels, 2 * cfg.points, rng, true, 0.5);
  store.add(std::string(kGateOffset) + ".w", Tensor({1, 1}, 1.0));
  store.add(std::string(kGateOffset) + ".b", Tensor({1}, 0.0));
  store.add(std::string(kGateAttn) + ".w", Tensor({1, 1}, 1.0));
  store.add(std::string(kGateAttn) + ".b", Tensor({1}, 0.0));
}

double gate(double intensity, const ParamStore& params, const std::string& prefix) {
  return sigmoid(params.value(prefix + ".w")[0] * intensity + params.value(prefix + ".b")[0]);
}

FusionResult deform_attn_fuse(const Tensor& radar, const Tensor& camera, const Tensor& cam_intensity,
                              const Tensor& radar_intensity, const FusionConfig& cfg, const ParamStore& params) {
  cfg.validate();
  check_inputs(radar, camera, cam_intensity, radar_intensity);
  const std::size_t c = radar.dim(0), h = radar.dim(1), w = radar.dim(2);
  const std::size_t plane = h * w, np = cfg.points;
  const Tensor& w_off = params.value("fusion.offset.w");
  const Tensor& b_off = params.value("fusion.offset.b");
  require(w_off.dims() == Shape({c, 2 * np}), "deform_attn_fuse: offset head expects " + std::to_string(c) +
                                                  " channels and " + std::to_string(np) + " points");
  const double inv_sqrt_c = 1.0 / std::sqrt(static_cast<double>(c));

  FusionResult r;
  r.output = Tensor(radar.dims());
  r.offsets.resize(plane * np * 2);
  r.gate_off.resize(plane);
  r.loc_u.resize(plane * np);
  r.loc_v.resize(plane * np);
  r.keys.resize(plane * np * c);
  r.dots.resize(plane * np);
  r.sampled_ic.resize(plane * np);
  r.gate_attn.resize(plane * np);
  r.weights.resize(plane * np);

  Tensor q({c});
  std::vector<double> logits(np);
  for (std::size_t row = 0; row < h; ++row) {
    for (std::size_t col = 0; col < w; ++col) {
      const std::size_t qi = row * w + col;
      for (std::size_t ch = 0; ch < c; ++ch) q[ch] = radar[ch * plane + qi];
      const Tensor off = affine(q, w_off, b_off);
      const double g_off = gate(radar_intensity[qi], params, kGateOffset);
      r.gate_off[qi] = g_off;
      for (std::size_t j = 0; j < np; ++j) {
        const std::size_t s = qi * np + j;
        r.offsets[2 * s] = off[2 * j];
        r.offsets[2 * s + 1] = off[2 * j + 1];
        const double u = static_cast<double>(row) + cfg.offset_scale * g_off * off[2 * j];
        const double v = static_cast<double>(col) + cfg.offset_scale * g_off * off[2 * j + 1];
        r.loc_u[s] = u;
        r.loc_v[s] = v;
        const Tensor k = bilinear_sample(camera, u, v);
        double dot = 0.0;
        for (std::size_t ch = 0; ch < c; ++ch) {
          r.keys[s * c + ch] = k[ch];
          dot += q[ch] * k[ch];
        }
        r.dots[s] = dot;
        r.sampled_ic[s] = bilinear_sample(cam_intensity, u, v)[0];
        r.gate_attn[s] = gate(r.sampled_ic[s], params, kGateAttn);
        logits[j] = dot * inv_sqrt_c * r.gate_attn[s];
      }
      const double m = *std::max_element(logits.begin(), logits.end());
      double z = 0.0;
      for (std::size_t j = 0; j < np; ++j) z += std::exp(logits[j] - m);
      for (std::size_t j = 0; j < np; ++j) {
        const std::size_t s = qi * np + j;
        r.weights[s] = std::exp(logits[j] - m) / z;
        for (std::size_t ch = 0; ch < c; ++ch) r.output[ch * plane + qi] += r.weights[s] * r.keys[s * c + ch];
      }
      if (cfg.residual) {
        for (std::size_t ch = 0; ch < c; ++ch) r.output[ch * plane + qi] += q[ch];
      }
    }
  }
  r.output.finalize();
  return r;
}

FusionGrads deform_attn_fuse_backward(const FusionResult& fwd, const Tensor& radar, const Tensor& camera,
                                      const Tensor& cam_intensity, const Tensor& radar_intensity,
                                      const FusionConfig& cfg, const Tensor& grad_output, ParamStore& params) {
  check_inputs(radar, camera, cam_intensity, radar_intensity);
  require(grad_output.same_dims(radar), "deform_attn_fuse_backward: grad dims mismatch");
  const std::size_t c = radar.dim(0), h = radar.dim(1), w = radar.dim(2);
  const std::size_t plane = h * w, np = cfg.points;
  const double inv_sqrt_c = 1.0 / std::sqrt(static_cast<double>(c));
  const Tensor& w_off = params.value("fusion.offset.w");
  const double wga = params.value(std::string(kGateAttn) + ".w")[0];

  FusionGrads g{Tensor(radar.dims()), Tensor(camera.dims()), Tensor(cam_intensity.dims())};
  Tensor g_woff(w_off.dims()), g_boff({2 * np});
  double g_wga = 0, g_bga = 0, g_wgo = 0, g_bgo = 0;

  Tensor q({c}), g_q({c}), g_off({2 * np});
  std::vector<double> g_k(c), g_logit(np), g_weight(np);
  for (std::size_t qi = 0; qi < plane; ++qi) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      q[ch] = radar[ch * plane + qi];
      g_q[ch] = cfg.residual ? grad_output[ch * plane + qi] : 0.0;
    }
    // softmax backward
    double wg_sum = 0.0;
    for (std::size_t j = 0; j < np; ++j) {
      const std::size_t s = qi * np + j;
      double gw = 0.0;
      for (std::size_t ch = 0; ch < c; ++ch) gw += grad_output[ch * plane + qi] * fwd.keys[s * c + ch];
      g_weight[j] = gw;
      wg_sum += fwd.weights[s] * gw;
    }
    double g_gate_off = 0.0;
    for (std::size_t j = 0; j < np; ++j) {
      const std::size_t s = qi * np + j;
      g_logit[j] = fwd.weights[s] * (g_weight[j] - wg_sum);
      const double ga = fwd.gate_attn[s];
      const double g_dot = g_logit[j] * ga * inv_sqrt_c;
      const double g_ga = g_logit[j] * fwd.dots[s] * inv_sqrt_c;
      const double g_ga_pre = g_ga * ga * (1.0 - ga);
      g_wga += g_ga_pre * fwd.sampled_ic[s];
      g_bga += g_ga_pre;
      const double g_ic = g_ga_pre * wga;

      for (std::size_t ch = 0; ch < c; ++ch) {
        g_k[ch] = fwd.weights[s] * grad_output[ch * plane + qi] + g_dot * q[ch];
        g_q[ch] += g_dot * fwd.keys[s * c + ch];
      }
      const double u = fwd.loc_u[s], v = fwd.loc_v[s];
      const CoordGrad ck = bilinear_sample_backward(camera, u, v, g_k, &g.camera);
      const double g_ic_arr[1] = {g_ic};
      const CoordGrad ci = bilinear_sample_backward(cam_intensity, u, v, g_ic_arr, &g.cam_intensity);
      const double gu = ck.u + ci.u, gv = ck.v + ci.v;
      const double go = fwd.gate_off[qi];
      const double off_r = fwd.offsets[2 * s], off_c = fwd.offsets[2 * s + 1];
      g_off[2 * j] = gu * cfg.offset_scale * go;
      g_off[2 * j + 1] = gv * cfg.offset_scale * go;
      g_gate_off += cfg.offset_scale * (gu * off_r + gv * off_c);
    }
    const double go = fwd.gate_off[qi];
    const double g_go_pre = g_gate_off * go * (1.0 - go);
    g_wgo += g_go_pre * radar_intensity[qi];
    g_bgo += g_go_pre;

    auto ga = affine_backward(q, w_off, g_off);
    g_woff += ga.w;
    g_boff += ga.b;
    for (std::size_t ch = 0; ch < c; ++ch) g.radar[ch * plane + qi] = g_q[ch] + ga.x[ch];
  }
  params.accumulate("fusion.offset.w", g_woff);
  params.accumulate("fusion.offset.b", g_boff);
  params.accumulate(std::string(kGateAttn) + ".w", Tensor({1, 1}, g_wga));
  params.accumulate(std::string(kGateAttn) + ".b", Tensor({1}, g_bga));
  params.accumulate(std::string(kGateOffset) + ".w", Tensor({1, 1}, g_wgo));
  params.accumulate(std::string(kGateOffset) + ".b", Tensor({1}, g_bgo));
  return g;
}

}  // namespace fusionkd
