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


#include <cmath>
#include <numbers>

#include "common.hpp"
#include "fusionkd/checks/oracles.hpp"
#include "fusionkd/head.hpp"
#include "fusionkd/intensity.hpp"

namespace fusionkd::checks::detail {

namespace {

constexpr std::size_t kInstances = 100;
constexpr double kOracleTol = 1e-10;

BevGridSpec random_grid(Rng& rng, std::size_t max_cells) {
  BevGridSpec g;
  g.x_min = uniform(rng, -20.0, -5.0);
  g.x_max = g.x_min + uniform(rng, 5.0, 40.0);
  g.y_min = uniform(rng, -20.0, -5.0);
  g.y_max = g.y_min + uniform(rng, 5.0, 40.0);
  g.rows = pick(rng, 1, max_cells);
  g.cols = pick(rng, 1, max_cells);
  return g;
}

Result softmax_examples(const Context& ctx) {
  const Tensor a = softmax(Tensor({3}, 0.0), 0);
  const Tensor b = softmax(Tensor({2}, {std::log(2.0), 0.0}), 0);
  Rng rng = rng_for(ctx, 1);
  const Tensor c = softmax(random_tensor({8}, rng, -5.0, 5.0), 0);
  double e = 0.0;
  for (std::size_t i = 0; i < 3; ++i) e = std::max(e, std::abs(a[i] - 1.0 / 3.0));
  e = std::max({e, std::abs(b[0] - 2.0 / 3.0), std::abs(b[1] - 1.0 / 3.0)});
  const double sum_err = std::abs(oracle::compensated_sum(c.data()) - 1.0);
  bool threw = false;
  try {
    softmax(Tensor({2, 2}), 2);
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  return verdict("", e <= 1e-15 && sum_err <= 1e-12 && threw,
                 "example err " + sci(e) + ", random slice sum err " + sci(sum_err) +
                     (threw ? "" : ", invalid axis accepted"));
}

Result sigmoid_examples(const Context&) {
  const double a = sigmoid(0.0), b = sigmoid(40.0), c = sigmoid(1.0);
  const bool ok = a == 0.5 && std::abs(b - 1.0) <= 1e-12 && std::abs(c - 0.7310585786) <= 1e-9;
  return verdict("", ok, "sigmoid(1) = " + sci(c));
}

Result affine_oracle(const Context& ctx) {
  Rng rng = rng_for(ctx, 2);
  Worst worst;
  for (std::size_t t = 0; t < kInstances; ++t) {
    const std::size_t n = pick(rng, 1, 8), k = pick(rng, 1, 8), m = pick(rng, 1, 8);
    const Tensor x = random_tensor({n, k}, rng), w = random_tensor({k, m}, rng), b = random_tensor({m}, rng);
    worst.see(max_abs_diff(affine(x, w, b), oracle::affine(x, w, b)), "instance " + std::to_string(t));
  }
  const Tensor x = random_tensor({3, 4}, rng);
  Tensor eye({4, 4});
  for (std::size_t i = 0; i < 4; ++i) eye.at(i, i) = 1.0;
  const bool ident = affine(x, eye, Tensor({4})) == x;
  const Tensor cst = affine(x, Tensor({4, 2}), Tensor({2}, 0.25));
  const bool constant = std::all_of(cst.data().begin(), cst.data().end(), [](double v) { return v == 0.25; });
  return verdict("", worst.value <= 1e-12 && ident && constant,
                 "max abs diff " + sci(worst.value) + (ident ? "" : ", identity broken") +
                     (constant ? "" : ", constant broken"));
}

Result conv2d_oracle(const Context& ctx) {
  Rng rng = rng_for(ctx, 3);
  const auto& conv = ctx.kernels.conv2d;
  Worst worst;
  for (std::size_t t = 0; t < kInstances; ++t) {
    const std::size_t ci = pick(rng, 1, 8), co = pick(rng, 1, 8), h = pick(rng, 1, 8), w = pick(rng, 1, 8);
    const std::size_t kh = 2 * pick(rng, 0, 3) + 1, kw = 2 * pick(rng, 0, 3) + 1;
    const Tensor x = random_tensor({ci, h, w}, rng), k = random_tensor({co, ci, kh, kw}, rng);
    const Tensor b = random_tensor({co}, rng);
    worst.see(max_abs_diff(conv(x, k, b), oracle::conv2d(x, k, b)), "instance " + std::to_string(t));
  }
  const Tensor x = random_tensor({1, 5, 5}, rng);
  const bool ident = conv(x, Tensor({1, 1, 1, 1}, 1.0), Tensor({1})) == x;
  const Tensor nine = conv(Tensor({1, 5, 5}, 0.5), Tensor({1, 1, 3, 3}, 1.0), Tensor({1}));
  bool interior = true;
  for (std::size_t r = 1; r < 4; ++r) {
    for (std::size_t c = 1; c < 4; ++c) interior = interior && nine.at(0, r, c) == 4.5;
  }
  bool threw = false;
  try {
    conv(x, Tensor({1, 1, 2, 2}, 1.0), Tensor({1}));
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  return verdict("", worst.value <= kOracleTol && ident && interior && threw,
                 "max abs diff " + sci(worst.value) + " over " + std::to_string(kInstances) + " instances" +
                     (ident ? "" : ", 1x1 identity broken") + (interior ? "" : ", 9c interior broken") +
                     (threw ? "" : ", even kernel accepted"));
}

Result max_pool_oracle(const Context& ctx) {
  Rng rng = rng_for(ctx, 4);
  std::vector<Tensor> vs;
  for (int i = 0; i < 64; ++i) vs.push_back(random_tensor({6}, rng));
  const Tensor pooled = channel_max_pool(vs);
  const double diff = max_abs_diff(pooled, oracle::max_pool(vs, 6));
  const std::vector<Tensor> again = {pooled};
  const bool idem = channel_max_pool(again) == pooled;
  const std::vector<Tensor> single = {vs[0]};
  const std::vector<Tensor> pair = {Tensor({2}, {1.0, 5.0}), Tensor({2}, {3.0, 2.0})};
  const bool examples = channel_max_pool(single) == vs[0] && channel_max_pool(pair) == Tensor({2}, {3.0, 5.0}) &&
                        channel_max_pool(std::span<const Tensor>(), 4) == Tensor({4});
  bool threw = false;
  try {
    const std::vector<Tensor> mixed = {Tensor({2}), Tensor({3})};
    channel_max_pool(mixed);
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  return verdict("", diff == 0.0 && idem && examples && threw,
                 "diff " + sci(diff) + (idem ? "" : ", not idempotent") + (examples ? "" : ", examples broken") +
                     (threw ? "" : ", mixed lengths accepted"));
}

Result bilinear_oracle(const Context& ctx) {
  Rng rng = rng_for(ctx, 5);
  Worst worst;
  bool exact = true;
  for (std::size_t t = 0; t < kInstances; ++t) {
    const std::size_t c = pick(rng, 1, 4), h = pick(rng, 1, 6), w = pick(rng, 1, 6);
    const Tensor map = random_tensor({c, h, w}, rng);
    const double u = uniform(rng, -1.5, static_cast<double>(h) + 0.5);
    const double v = uniform(rng, -1.5, static_cast<double>(w) + 0.5);
    worst.see(max_abs_diff(bilinear_sample(map, u, v), oracle::bilinear(map, u, v)), std::to_string(t));
    const std::size_t r = pick(rng, 0, h - 1), col = pick(rng, 0, w - 1);
    const Tensor s = bilinear_sample(map, static_cast<double>(r), static_cast<double>(col));
    for (std::size_t ch = 0; ch < c; ++ch) exact = exact && s[ch] == map.at(ch, r, col);
  }
  const Tensor two({1, 1, 2}, {1.0, 3.0});
  const bool mid = bilinear_sample(two, 0.0, 0.5)[0] == 2.0;
  return verdict("", worst.value <= 1e-12 && exact && mid,
                 "max abs diff " + sci(worst.value) + (exact ? "" : ", integer read inexact") +
                     (mid ? "" : ", midpoint broken"));
}

Result outer_scale_oracle(const Context& ctx) {
  Rng rng = rng_for(ctx, 6);
  Worst worst;
  for (std::size_t t = 0; t < kInstances; ++t) {
    const Tensor c = random_tensor({pick(rng, 1, 8)}, rng), p = random_tensor({pick(rng, 1, 8)}, rng);
    worst.see(max_abs_diff(outer_scale(c, p), oracle::outer(c, p)), std::to_string(t));
  }
  const Tensor c = random_tensor({3}, rng);
  Tensor onehot({4});
  onehot[2] = 1.0;
  const Tensor o = outer_scale(c, onehot);
  bool column = true;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t d = 0; d < 4; ++d) column = column && o.at(i, d) == (d == 2 ? c[i] : 0.0);
  }
  return verdict("", worst.value <= 1e-12 && column, "max abs diff " + sci(worst.value));
}

Result grid_cell_oracle(const Context& ctx) {
  Rng rng = rng_for(ctx, 7);
  std::size_t mismatches = 0;
  for (std::size_t t = 0; t < kInstances; ++t) {
    const BevGridSpec g = random_grid(rng, 16);
    for (int i = 0; i < 50; ++i) {
      const double x = uniform(rng, g.x_min - 2.0, g.x_max + 2.0), y = uniform(rng, g.y_min - 2.0, g.y_max + 2.0);
      if (g.cell_of(x, y) != oracle::cell(x, y, g)) ++mismatches;
    }
    if (g.cell_of(g.x_max, g.y_max) != oracle::cell(g.x_max, g.y_max, g)) ++mismatches;
    if (g.cell_of(g.x_min, g.y_min) != oracle::cell(g.x_min, g.y_min, g)) ++mismatches;
  }
  BevGridSpec d;
  const bool edges = d.cell_of(51.2, 51.2) == Cell{31, 31} && d.cell_of(-51.2, -51.2) == Cell{0, 0} &&
                     d.cell_of(0.0, 0.0) == Cell{16, 16} && !d.cell_of(51.3, 0.0) && !d.cell_of(0.0, -51.3);
  return verdict("", mismatches == 0 && edges,
                 std::to_string(mismatches) + " mismatches" + (edges ? "" : ", default grid edges broken"));
}

Result build_grid_oracle(const Context& ctx) {
  Rng rng = rng_for(ctx, 8);
  Worst worst;
  std::size_t occ_mismatch = 0;
  for (std::size_t t = 0; t < kInstances; ++t) {
    const BevGridSpec g = random_grid(rng, 8);
    const std::size_t c = pick(rng, 1, 8), n = pick(rng, 0, 40);
    std::vector<RadarPoint> pts(n);
    std::vector<Tensor> emb;
    for (auto& p : pts) {
      p.x = uniform(rng, g.x_min - 1.0, g.x_max + 1.0);
      p.y = uniform(rng, g.y_min - 1.0, g.y_max + 1.0);
      emb.push_back(random_tensor({c}, rng));
    }
    const RadarGrid got = ctx.kernels.build_grid(pts, emb, g, c);
    const auto want = oracle::build_grid(pts, emb, g, c);
    worst.see(max_abs_diff(got.features, want.features), "instance " + std::to_string(t));
    if (!(got.occupancy == want.occupancy)) ++occ_mismatch;
  }
  return verdict("", worst.value <= kOracleTol && occ_mismatch == 0,
                 "max abs diff " + sci(worst.value) + ", occupancy mismatches " + std::to_string(occ_mismatch));
}

Result lidar_intensity_oracle(const Context& ctx) {
  Rng rng = rng_for(ctx, 9);
  Worst worst;
  for (std::size_t t = 0; t < kInstances; ++t) {
    const BevGridSpec g = random_grid(rng, 8);
    VoxelSpec vx;
    vx.size_x = uniform(rng, 0.3, 3.0);
    vx.size_y = uniform(rng, 0.3, 3.0);
    vx.size_z = uniform(rng, 0.2, 1.0);
    vx.z_min = -2.0;
    vx.z_max = 2.0;
    std::vector<LidarPoint> pts;
    const std::size_t clusters = pick(rng, 0, 12);
    for (std::size_t k = 0; k < clusters; ++k) {
      const double cx = uniform(rng, g.x_min - 1.0, g.x_max + 1.0), cy = uniform(rng, g.y_min - 1.0, g.y_max + 1.0);
      for (std::size_t i = pick(rng, 1, 8); i > 0; --i) {
        LidarPoint p;
        p.x = cx + uniform(rng, -0.5, 0.5);
        p.y = cy + uniform(rng, -0.5, 0.5);
        p.z = uniform(rng, -2.5, 2.5);
        p.intensity = uniform(rng, 0.0, 1.0);
        pts.push_back(p);
      }
    }
    worst.see(max_abs_diff(ctx.kernels.lidar_intensity_bev(pts, vx, g), oracle::lidar_intensity(pts, vx, g)),
              "instance " + std::to_string(t));
  }
  return verdict("", worst.value <= kOracleTol, "max abs diff " + sci(worst.value));
}

Result splat_oracle(const Context& ctx) {
  Rng rng = rng_for(ctx, 10);
  Worst worst;
  for (std::size_t t = 0; t < kInstances; ++t) {
    CameraConfig cam;
    cam.n_views = pick(rng, 1, 4);
    cam.channels = pick(rng, 1, 4);
    cam.depth_bins = pick(rng, 2, 6);
    cam.img_h = pick(rng, 1, 3);
    cam.img_w = pick(rng, 2, 6);
    cam.d_min = uniform(rng, 0.5, 3.0);
    cam.d_max = cam.d_min + uniform(rng, 5.0, 30.0);
    cam.focal = uniform(rng, 2.0, 8.0);
    for (std::size_t v = 0; v < cam.n_views; ++v) {
      cam.poses.push_back({uniform(rng, -std::numbers::pi, std::numbers::pi), uniform(rng, -2.0, 2.0),
                           uniform(rng, -2.0, 2.0)});
    }
    const BevGridSpec g = random_grid(rng, 8);
    FrustumFeatures f{random_tensor({cam.n_views, cam.channels, cam.depth_bins, cam.img_h, cam.img_w}, rng)};
    const SplatResult got = ctx.kernels.splat_to_bev(f, cam, g);
    worst.see(max_abs_diff(got.bev, oracle::splat(f.values, cam, g)), "instance " + std::to_string(t));
  }
  return verdict("", worst.value <= kOracleTol, "max abs diff " + sci(worst.value));
}

Result deform_attn_oracle(const Context& ctx) {
  Rng rng = rng_for(ctx, 11);
  Worst worst;
  for (std::size_t t = 0; t < kInstances; ++t) {
    const std::size_t c = pick(rng, 1, 4), np = pick(rng, 1, 2);
    FusionConfig cfg;
    cfg.points = np;
    cfg.offset_scale = uniform(rng, 0.5, 3.0);
    cfg.residual = pick(rng, 0, 1) == 1;
    ParamStore ps;
    oracle::AttentionParams op;
    op.offset_w = random_tensor({c, 2 * np}, rng);
    op.offset_b = random_tensor({2 * np}, rng);
    op.gate_off_w = uniform(rng, -2.0, 2.0);
    op.gate_off_b = uniform(rng, -1.0, 1.0);
    op.gate_attn_w = uniform(rng, -2.0, 2.0);
    op.gate_attn_b = uniform(rng, -1.0, 1.0);
    op.offset_scale = cfg.offset_scale;
    op.residual = cfg.residual;
    ps.add("fusion.offset.w", op.offset_w);
    ps.add("fusion.offset.b", op.offset_b);
    ps.add(std::string(kGateOffset) + ".w", Tensor({1, 1}, op.gate_off_w));
    ps.add(std::string(kGateOffset) + ".b", Tensor({1}, op.gate_off_b));
    ps.add(std::string(kGateAttn) + ".w", Tensor({1, 1}, op.gate_attn_w));
    ps.add(std::string(kGateAttn) + ".b", Tensor({1}, op.gate_attn_b));
    const Tensor radar = random_tensor({c, 4, 4}, rng), camera = random_tensor({c, 4, 4}, rng);
    const Tensor ic = random_tensor({1, 4, 4}, rng, 0.0, 1.0), ir = random_tensor({1, 4, 4}, rng, 0.0, 1.0);
    const FusionResult got = ctx.kernels.deform_attn_fuse(radar, camera, ic, ir, cfg, ps);
    const auto want = oracle::deform_attn(radar, camera, ic, ir, op);
    double wdiff = got.weights.size() == want.weights.size() ? 0.0 : 1.0;
    for (std::size_t i = 0; i < std::min(got.weights.size(), want.weights.size()); ++i) {
      wdiff = std::max(wdiff, std::abs(got.weights[i] - want.weights[i]));
    }
    worst.see(std::max(max_abs_diff(got.output, want.output), wdiff), "instance " + std::to_string(t));
  }
  return verdict("", worst.value <= kOracleTol, "max abs diff " + sci(worst.value) + " (P<=2, 4x4)");
}

Result det_loss_oracle(const Context& ctx) {
  Rng rng = rng_for(ctx, 12);
  BevGridSpec g;
  g.rows = g.cols = 8;
  Worst worst;
  for (int t = 0; t < 10; ++t) {
    std::vector<Box3D> boxes(2);
    for (auto& b : boxes) {
      b.x = uniform(rng, -45.0, 45.0);
      b.y = uniform(rng, -45.0, 45.0);
      b.z = uniform(rng, 0.5, 1.0);
      b.l = uniform(rng, 1.0, 20.0);
      b.w = uniform(rng, 1.0, 20.0);
      b.h = uniform(rng, 1.0, 2.0);
      b.yaw = uniform(rng, -3.0, 3.0);
      b.cls = static_cast<int>(pick(rng, 0, 2));
    }
    HeadOutput pred{random_tensor({3, 8, 8}, rng, 0.01, 0.99), random_tensor({kRegChannels, 8, 8}, rng)};
    const double got = det_loss(pred, boxes, g).value;
    worst.see(std::abs(got - oracle::det_loss(pred, boxes, g)), std::to_string(t));
  }
  return verdict("", worst.value <= kOracleTol, "max abs diff " + sci(worst.value) + " (2 boxes, 8x8)");
}

Result radar_intensity_oracle(const Context& ctx) {
  Rng rng = rng_for(ctx, 13);
  const IntensityCoeffs coeffs;
  const RadarConfig rc;
  BevGridSpec g;
  g.rows = g.cols = 8;
  std::vector<RadarPoint> pts(40);
  double worst = 0.0;
  for (auto& p : pts) {
    p.x = uniform(rng, -60.0, 60.0);
    p.y = uniform(rng, -60.0, 60.0);
    p.vx = uniform(rng, -10.0, 10.0);
    p.vy = uniform(rng, -10.0, 10.0);
    p.rcs = uniform(rng, -30.0, 40.0);
    const double rn = std::clamp((p.rcs - rc.rcs_min) / (rc.rcs_max - rc.rcs_min), 0.0, 1.0);
    const double want = oracle::sigmoid(coeffs.alpha_rcs * rn + coeffs.beta_vel * std::hypot(p.vx, p.vy));
    worst = std::max(worst, std::abs(radar_intensity(p, coeffs, rc) - want));
  }
  const Tensor map = radar_intensity_bev(pts, coeffs, rc, g);
  Tensor want({1, 8, 8});
  for (const auto& p : pts) {
    if (const auto k = oracle::cell(p.x, p.y, g)) {
      want.at(0, k->row, k->col) = std::max(want.at(0, k->row, k->col), radar_intensity(p, coeffs, rc));
    }
  }
  const double map_diff = max_abs_diff(map, want);
  return verdict("", worst <= 1e-12 && map_diff == 0.0, "point err " + sci(worst) + ", map diff " + sci(map_diff));
}

}  // namespace

std::vector<Check> oracle_checks() {
  const std::string s = "oracles";
  return {
      {"softmax_examples", s, {}, softmax_examples},
      {"sigmoid_examples", s, {}, sigmoid_examples},
      {"affine_oracle", s, {}, affine_oracle},
      {"conv2d_oracle", s, {1}, conv2d_oracle},
      {"max_pool_oracle", s, {}, max_pool_oracle},
      {"bilinear_oracle", s, {}, bilinear_oracle},
      {"outer_scale_oracle", s, {}, outer_scale_oracle},
      {"grid_cell_oracle", s, {}, grid_cell_oracle},
      {"build_grid_oracle", s, {1}, build_grid_oracle},
      {"lidar_intensity_oracle", s, {1}, lidar_intensity_oracle},
      {"splat_oracle", s, {1}, splat_oracle},
      {"deform_attn_oracle", s, {1}, deform_attn_oracle},
      {"det_loss_oracle", s, {}, det_loss_oracle},
      {"radar_intensity_oracle", s, {}, radar_intensity_oracle},
  };
}

}  // namespace fusionkd::checks::detail
