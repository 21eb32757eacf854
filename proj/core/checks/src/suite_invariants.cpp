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


#include <algorithm>
#include <cmath>
#include <sstream>

#include "common.hpp"
#include "fusionkd/checks/oracles.hpp"
#include "fusionkd/config.hpp"
#include "fusionkd/training.hpp"

namespace fusionkd::checks::detail {

namespace {

constexpr double kNormTol = 1e-6;
constexpr double kExactTol = 1e-12;
constexpr double kGateTol = 1e-10;

bool in_unit(const Tensor& t) {
  return std::all_of(t.data().begin(), t.data().end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

// Deviation from 1 of the sums over axis 1 of an [N, D, H, W] tensor.
double depth_sum_error(const Tensor& depth) {
  const std::size_t n = depth.dim(0), d = depth.dim(1), plane = depth.dim(2) * depth.dim(3);
  double worst = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t k = 0; k < plane; ++k) {
      double s = 0.0;
      for (std::size_t b = 0; b < d; ++b) s += depth[(v * d + b) * plane + k];
      worst = std::max(worst, std::abs(s - 1.0));
    }
  }
  return worst;
}

double weight_sum_error(const std::vector<double>& weights, std::size_t points) {
  double worst = 0.0;
  for (std::size_t q = 0; q * points < weights.size(); ++q) {
    double s = 0.0;
    for (std::size_t j = 0; j < points; ++j) s += weights[q * points + j];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

Result normalization(const Context& ctx) {
  Rng rng = rng_for(ctx, 201);
  double softmax_err = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t len = pick(rng, 1, 12);
    const Tensor y = softmax(random_tensor({len}, rng, -50.0, 50.0), 0);
    double s = 0.0;
    for (double v : y.data()) s += v;
    softmax_err = std::max(softmax_err, std::abs(s - 1.0));
  }
  const ModelConfig cfg;
  double depth_err = 0.0, attn_err = 0.0;
  bool unit = true;
  for (std::uint64_t k = 0; k < 3; ++k) {
    const std::uint64_t seed = ctx.seed + k;
    const SceneSample scene = generate_scene(seed, scene_for(cfg));
    const ParamStore ps = init_model(cfg, seed);
    const SceneTargets targets = prepare_targets(scene, ps, cfg);
    const ModelForward f = model_forward(scene, targets, ps, cfg);
    depth_err = std::max(depth_err, depth_sum_error(f.camera.depth));
    attn_err = std::max(attn_err, weight_sum_error(f.fusion.weights, cfg.fusion.points));
    unit = unit && in_unit(f.cam_intensity) && in_unit(targets.lidar_intensity) &&
           in_unit(targets.radar_intensity) && in_unit(targets.mask.mask) && in_unit(f.blend.weights.w_lidar);
  }
  // Intensity maps on inputs far outside the generator's range.
  std::vector<RadarPoint> radar(50);
  for (auto& p : radar) {
    p = {uniform(rng, -60, 60), uniform(rng, -60, 60), 0.0, uniform(rng, -80, 80), uniform(rng, -80, 80),
         uniform(rng, -100, 100)};
  }
  std::vector<LidarPoint> lidar(200);
  for (auto& p : lidar) p = {uniform(rng, -60, 60), uniform(rng, -60, 60), uniform(rng, -4, 2), uniform(rng, 0, 1), 0};
  const BevGridSpec grid;
  unit = unit && in_unit(radar_intensity_bev(radar, {}, {}, grid)) &&
         in_unit(lidar_intensity_bev(lidar, VoxelSpec{}, grid));
  return verdict("", softmax_err <= kNormTol && depth_err <= kNormTol && attn_err <= kNormTol && unit,
                 "softmax " + sci(softmax_err) + ", depth " + sci(depth_err) + ", attention " + sci(attn_err) +
                     ", intensity in [0,1]: " + (unit ? "yes" : "no"));
}

Result loss_identities(const Context& ctx) {
  Rng rng = rng_for(ctx, 202);
  const Shape dims = {4, 5, 5};
  const Tensor fr = random_tensor(dims, rng), fl = random_tensor(dims, rng);
  const Tensor il = random_tensor({1, 5, 5}, rng, 0.0, 1.0);
  const double align = igfm_loss(fr, fr, fl, 0.5).align;
  const double consist = igfm_loss(fr, fl, fr, 0.5).consist;

  ParamStore beta;
  init_adapter_params(beta, 4, rng);
  Tensor& w = beta.mutable_value("distill.beta.w");
  w.fill(0.0);
  for (std::size_t c = 0; c < 4; ++c) w.at(c, c, 0, 0) = 1.0;
  beta.mutable_value("distill.beta.b").fill(0.0);
  const double swfd = swfd_loss(fl, fl, il, beta).value;

  SoftLabelMask mask{random_tensor({1, 5, 5}, rng, 0.0, 1.0), 1e-6};
  const double ld = ld_loss(fl, fl, mask).value;

  HeadOutput teacher{random_tensor({3, 5, 5}, rng, 0.0, 1.0), random_tensor({kRegChannels, 5, 5}, rng)};
  HeadOutput student{random_tensor({3, 5, 5}, rng, 0.05, 0.95), teacher.bbox};
  const double bbox = swrd_loss(teacher, student, il).bbox;

  const bool ok = align == 0.0 && consist == 0.0 && swfd == 0.0 && ld == 0.0 && bbox == 0.0;
  return verdict("", ok,
                 "align " + sci(align) + ", consist " + sci(consist) + ", swfd " + sci(swfd) + ", ld " + sci(ld) +
                     ", swrd bbox " + sci(bbox));
}

Result igfm_fixture(const Context&) {
  // F~ = w Fl + (1 - w) Fr with w = [0.2, 0.5, 1, 0] gives [0.8, 2, 1, 4];
  // align = (1 + 0 + 4 + 1) / 4 = 1.5, consist = (0.04 + 0 + 4 + 0) / 4 = 1.01.
  const Tensor fr({1, 2, 2}, {1, 2, 3, 4});
  const Tensor fl({1, 2, 2}, {0, 2, 1, 5});
  const Tensor il({1, 2, 2}, {0.2, 0.5, 1.0, 0.0});
  const double expected = 0.5 * 1.5 + 0.5 * 1.01;
  const double got = igfm_loss(fr, fl, blend(fl, fr, il, 1.0).blended, 0.5).value;
  return verdict("", std::abs(got - expected) <= kExactTol, "got " + sci(got) + ", expected 1.255");
}

Result blend_limits(const Context& ctx) {
  Rng rng = rng_for(ctx, 203);
  bool radar_exact = true, lidar_exact = true;
  for (int t = 0; t < 50; ++t) {
    const Shape dims = {pick(rng, 1, 4), pick(rng, 1, 6), pick(rng, 1, 6)};
    const Tensor fr = random_tensor(dims, rng), fl = random_tensor(dims, rng);
    const Tensor il = random_tensor({1, dims[1], dims[2]}, rng, 0.01, 1.0);
    radar_exact = radar_exact && blend(fl, fr, il, 0.0).blended == fr;
    lidar_exact = lidar_exact && blend(fl, fr, il, 100.0).blended == fl;
    lidar_exact = lidar_exact && blend(fl, fr, Tensor({1, dims[1], dims[2]}, 1.0), 1.0).blended == fl;
  }
  return verdict("", radar_exact && lidar_exact,
                 std::string("lambda=0 -> radar: ") + (radar_exact ? "bit-exact" : "differs") +
                     ", clamp=1 -> lidar: " + (lidar_exact ? "bit-exact" : "differs"));
}

Result total_linearity(const Context& ctx) {
  Rng rng = rng_for(ctx, 204);
  const LossWeights w;
  const bool defaults = w.l1 == 0.3 && w.l2 == 0.3 && w.l4 == 0.3 && w.l5 == 0.3 && w.l6 == 0.3 &&
                        w.lambda3_init == 100.0 && w.alpha_igfm == 0.5;
  double worst = 0.0;
  auto independent = [&](const LossBreakdown& c, double l3) {
    const std::vector<double> terms = {w.l1 * c.det, w.l2 * c.depth, l3 * c.igfm,
                                       w.l4 * c.swfd, w.l5 * c.swrd, w.l6 * c.ld};
    return oracle::compensated_sum(terms);
  };
  for (int t = 0; t < 200; ++t) {
    LossBreakdown c{uniform(rng, 0, 5), uniform(rng, 0, 5), uniform(rng, 0, 5),
                    uniform(rng, 0, 5), uniform(rng, 0, 5), uniform(rng, 0, 5), 0.0};
    worst = std::max(worst, std::abs(total_loss(c, w, w.lambda3_init).total - independent(c, w.lambda3_init)));
  }
  // On a real forward pass, with lambda3 read from its initialized parameter.
  const ModelConfig cfg = small_model();
  const SceneSample scene = generate_scene(ctx.seed, scene_for(cfg));
  const ParamStore ps = init_model(cfg, ctx.seed);
  const double l3 = ps.value(kLambda3)[0];
  const ModelForward f = model_forward(scene, prepare_targets(scene, ps, cfg), ps, cfg);
  worst = std::max(worst, std::abs(f.loss.total - independent(f.loss, l3)));

  // Scaling one weight by c moves the total by exactly (c - 1) times that term.
  const LossBreakdown c{1.7, 0.4, 0.03, 2.2, 0.9, 0.6, 0.0};
  const double base = total_loss(c, w, w.lambda3_init).total;
  double scale_err = 0.0;
  const double k = 3.0;
  auto scaled = [&](double LossWeights::*field, double comp) {
    LossWeights s = w;
    s.*field *= k;
    const double moved = total_loss(c, s, w.lambda3_init).total - base;
    scale_err = std::max(scale_err, std::abs(moved - (k - 1.0) * (w.*field) * comp));
  };
  scaled(&LossWeights::l1, c.det);
  scaled(&LossWeights::l2, c.depth);
  scaled(&LossWeights::l4, c.swfd);
  scaled(&LossWeights::l5, c.swrd);
  scaled(&LossWeights::l6, c.ld);
  scale_err = std::max(scale_err, std::abs(total_loss(c, w, k * w.lambda3_init).total - base -
                                           (k - 1.0) * w.lambda3_init * c.igfm));
  worst = std::max(worst, scale_err);

  bool throws = false;
  try {
    total_loss(LossBreakdown{-1.0, 0, 0, 0, 0, 0, 0}, w, 100.0);
  } catch (const InvariantError&) {
    throws = true;
  }
  return verdict("", defaults && l3 == 100.0 && worst <= kExactTol && throws,
                 "max |total - sum| " + sci(worst) + ", lambda3 init " + sci(l3) +
                     (throws ? "" : ", negative component accepted"));
}

std::string metrics_text(const TrainResult& run) {
  std::string s;
  for (std::size_t k = 0; k < run.history.size(); ++k) s += metrics_record(k, run.history[k]) + "\n";
  return s;
}

std::string dumps_text(const TrainResult& run) {
  std::ostringstream os;
  for (const auto& name : dump_names()) write_dump(os, dump_tensor(run, name));
  return os.str();
}

Result training_descent(const Context& ctx) {
  RunConfig cfg;
  cfg.seed = ctx.seed;
  cfg.sync();
  const TrainResult a = train(cfg);
  const TrainResult b = train(cfg);
  const double first = a.history.front().total, last = a.history.back().total;
  const double ratio = last / first;
  const bool same = metrics_text(a) == metrics_text(b) && dumps_text(a) == dumps_text(b);
  return verdict("", ratio <= 0.5 && same,
                 "total " + sci(first) + " -> " + sci(last) + " after " + std::to_string(cfg.steps) +
                     " steps (ratio " + sci(ratio) + "), rerun " + (same ? "byte-identical" : "differs"));
}

bool frozen_name(const std::string& name) { return name.rfind("teacher.", 0) == 0 || name.rfind("label.", 0) == 0; }

Result frozen_teacher(const Context& ctx) {
  RunConfig cfg;
  cfg.seed = ctx.seed;
  cfg.steps = 25;
  cfg.sync();
  const ParamStore init = [&] {
    PrecisionScope scope(cfg.precision);
    return init_model(cfg.model, cfg.seed);
  }();
  std::size_t frozen = 0, changed = 0, flagged = 0;
  const TrainResult run = train(cfg);
  for (const auto& [name, entry] : run.params.entries()) {
    if (!frozen_name(name)) continue;
    ++frozen;
    if (!(entry.value == init.value(name))) ++changed;
    if (entry.trainable) ++flagged;
  }
  bool student_moved = false;
  for (const auto& name : init.trainable_names()) student_moved = student_moved || !(run.params.value(name) == init.value(name));
  return verdict("", frozen > 0 && changed == 0 && flagged == 0 && student_moved,
                 std::to_string(frozen) + " frozen tensors, " + std::to_string(changed) + " changed after " +
                     std::to_string(cfg.steps) + " steps" + (student_moved ? "" : ", student did not move"));
}

// Fusion parameters with gates read through sigmoid(w I + b).
ParamStore fusion_params(const oracle::AttentionParams& p) {
  ParamStore ps;
  ps.add("fusion.offset.w", p.offset_w);
  ps.add("fusion.offset.b", p.offset_b);
  ps.add(std::string(kGateOffset) + ".w", Tensor({1, 1}, p.gate_off_w));
  ps.add(std::string(kGateOffset) + ".b", Tensor({1}, p.gate_off_b));
  ps.add(std::string(kGateAttn) + ".w", Tensor({1, 1}, p.gate_attn_w));
  ps.add(std::string(kGateAttn) + ".b", Tensor({1}, p.gate_attn_b));
  return ps;
}

Result gate_equal(const Context& ctx) {
  Rng rng = rng_for(ctx, 205);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t c = pick(rng, 1, 4), np = pick(rng, 1, 2);
    FusionConfig cfg;
    cfg.points = np;
    cfg.offset_scale = uniform(rng, 0.5, 3.0);
    cfg.residual = pick(rng, 0, 1) == 1;
    oracle::AttentionParams op;
    op.offset_w = random_tensor({c, 2 * np}, rng);
    op.offset_b = random_tensor({2 * np}, rng);
    // sigmoid(40) rounds to exactly 1 in double: every gate output equals 1.
    op.gate_off_w = op.gate_attn_w = 0.0;
    op.gate_off_b = op.gate_attn_b = 40.0;
    op.offset_scale = cfg.offset_scale;
    op.residual = cfg.residual;
    op.gated = false;
    const ParamStore ps = fusion_params(op);
    const Tensor radar = random_tensor({c, 4, 4}, rng), camera = random_tensor({c, 4, 4}, rng);
    const Tensor ic = random_tensor({1, 4, 4}, rng, 0.0, 1.0), ir = random_tensor({1, 4, 4}, rng, 0.0, 1.0);
    const FusionResult got = ctx.kernels.deform_attn_fuse(radar, camera, ic, ir, cfg, ps);
    worst = std::max(worst, max_abs_diff(got.output, oracle::deform_attn(radar, camera, ic, ir, op).output));
  }
  return verdict("", worst <= kGateTol, "max abs diff to ungated attention " + sci(worst));
}

Result gate_monotone(const Context& ctx) {
  Rng rng = rng_for(ctx, 206);
  // Point 0 samples the query cell, point 1 the cell one row below it. The
  // attention gate reads sigmoid(I_cam) there, so raising I_cam at that cell
  // raises its gate.
  std::size_t increased = 0, trials = 0;
  double smallest = 1.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t c = pick(rng, 1, 4);
    FusionConfig cfg;
    cfg.points = 2;
    cfg.offset_scale = 1.0;
    oracle::AttentionParams op;
    op.offset_w = Tensor({c, 4});
    op.offset_b = Tensor({4}, {0.0, 0.0, 1.0, 0.0});
    op.gate_off_w = 0.0;
    op.gate_off_b = 40.0;
    op.gate_attn_w = 1.0;
    op.gate_attn_b = 0.0;
    const ParamStore ps = fusion_params(op);
    const Tensor radar = random_tensor({c, 4, 4}, rng), ir = random_tensor({1, 4, 4}, rng, 0.0, 1.0);
    Tensor camera = random_tensor({c, 4, 4}, rng);
    Tensor ic = random_tensor({1, 4, 4}, rng, 0.0, 0.5);
    const std::size_t r = pick(rng, 0, 2), col = pick(rng, 0, 3);
    const std::size_t q = r * 4 + col, key = (r + 1) * 4 + col;
    const double s = uniform(rng, 0.2, 2.0);
    for (std::size_t ch = 0; ch < c; ++ch) camera[ch * 16 + key] = s * radar[ch * 16 + q];
    const double before = ctx.kernels.deform_attn_fuse(radar, camera, ic, ir, cfg, ps).weights[q * 2 + 1];
    ic[key] += uniform(rng, 0.05, 0.5);
    const double after = ctx.kernels.deform_attn_fuse(radar, camera, ic, ir, cfg, ps).weights[q * 2 + 1];
    ++trials;
    if (after > before) ++increased;
    smallest = std::min(smallest, after - before);
  }
  return verdict("", increased == trials,
                 std::to_string(increased) + "/" + std::to_string(trials) + " weights rose, smallest rise " +
                     sci(smallest));
}

Result determinism(const Context& ctx) {
  const ModelConfig cfg = small_model();
  auto once = [&] {
    const SceneSample scene = generate_scene(ctx.seed, scene_for(cfg));
    ParamStore ps = init_model(cfg, ctx.seed);
    const SceneTargets targets = prepare_targets(scene, ps, cfg);
    const ModelForward f = model_forward(scene, targets, ps, cfg);
    model_backward(f, scene, targets, ps, cfg);
    std::ostringstream os;
    write_dump(os, f.fusion.output);
    for (const auto& name : ps.names()) write_dump(os, ps.grad(name));
    os << metrics_record(0, f.loss);
    return os.str();
  };
  const bool same = once() == once();
  return verdict("", same, same ? "forward and backward byte-identical across reruns" : "reruns differ");
}

Result igfm_convexity(const Context& ctx) {
  Rng rng = rng_for(ctx, 207);
  // Midpoint convexity in F_radar with F_lidar and F~ fixed.
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Shape dims = {2, 3, 3};
    const Tensor a = random_tensor(dims, rng), b = random_tensor(dims, rng);
    const Tensor fl = random_tensor(dims, rng), bl = random_tensor(dims, rng);
    const double alpha = uniform(rng, 0.0, 1.0);
    const double mid = igfm_loss((a + b) * 0.5, fl, bl, alpha).value;
    const double ends = 0.5 * (igfm_loss(a, fl, bl, alpha).value + igfm_loss(b, fl, bl, alpha).value);
    worst = std::max(worst, mid - ends);
  }
  bool throws = false;
  try {
    igfm_loss(Tensor({1}), Tensor({1}), Tensor({1}), 1.5);
  } catch (const std::invalid_argument&) {
    throws = true;
  }
  return verdict("", worst <= kExactTol && throws,
                 "max midpoint excess " + sci(worst) + (throws ? "" : ", alpha outside [0,1] accepted"));
}

Result swfd_scaling(const Context& ctx) {
  Rng rng = rng_for(ctx, 208);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    ParamStore beta;
    init_adapter_params(beta, 3, rng);
    const Tensor fl = random_tensor({3, 4, 4}, rng), ff = random_tensor({3, 4, 4}, rng);
    const Tensor il = random_tensor({1, 4, 4}, rng, 0.0, 0.5);
    const double one = swfd_loss(fl, ff, il, beta).value;
    const double two = swfd_loss(fl, ff, il * 2.0, beta).value;
    worst = std::max(worst, std::abs(two - 2.0 * one) / std::max(1.0, one));
  }
  return verdict("", worst <= kExactTol, "max |L(2I) - 2 L(I)| " + sci(worst));
}

Result depth_loss_examples(const Context& ctx) {
  const CameraConfig cam;
  const SceneSample scene = generate_scene(ctx.seed, SceneConfig{});
  const Tensor uniform_depth({cam.n_views, cam.depth_bins, cam.img_h, cam.img_w},
                             1.0 / static_cast<double>(cam.depth_bins));
  const DepthLoss u = depth_loss(uniform_depth, scene.lidar, cam);
  const double ln_d = std::log(static_cast<double>(cam.depth_bins));
  // Points behind every camera or beyond d_max add nothing.
  std::vector<LidarPoint> extended = scene.lidar;
  extended.push_back({0.0, 0.0, 0.0, 0.5, 0.0});
  extended.push_back({500.0, 500.0, 1.0, 0.5, 0.0});
  const DepthLoss e = depth_loss(uniform_depth, extended, cam);
  const DepthLoss none = depth_loss(uniform_depth, {}, cam);
  const bool ok = u.supervised > 0 && std::abs(u.value - ln_d) <= kExactTol && e.value == u.value &&
                  e.supervised == u.supervised && none.value == 0.0;
  return verdict("", ok,
                 "uniform depth loss " + sci(u.value) + " vs ln D " + sci(ln_d) + ", " +
                     std::to_string(u.supervised) + " supervised pixels");
}

Result mask_and_label_examples(const Context&) {
  BevGridSpec grid;
  grid.rows = grid.cols = 16;
  const std::vector<Box3D> boxes = {{10.3, -7.9, 0.8, 4.5, 1.9, 1.6, 0.7, 1}, {-30.0, 20.0, 0.8, 0.8, 0.8, 1.7, 0.0, 2}};
  const SoftLabelMask m = soft_label_mask(boxes, grid);
  bool centers = true;
  for (const auto& b : boxes) {
    const auto cell = grid.cell_of(b.x, b.y);
    centers = centers && cell && m.mask[cell->row * grid.cols + cell->col] == 1.0;
  }
  const bool empty_mask = soft_label_mask({}, grid).mask.max_abs() == 0.0;
  const Tensor splat = label_splat(boxes, grid, 3);
  const auto c0 = grid.cell_of(boxes[1].x, boxes[1].y);
  const std::size_t plane = grid.cells(), k0 = c0->row * grid.cols + c0->col;
  // Class one-hot and the cos(yaw) channel read the Gaussian weight itself.
  const double g = splat[2 * plane + k0];
  const bool attrs = g > 0.0 && splat[0 * plane + k0] == 0.0 && std::abs(splat[7 * plane + k0] - g) <= kExactTol &&
                     std::abs(splat[3 * plane + k0] - 0.8 * g) <= kExactTol;
  const bool empty_splat = label_splat({}, grid, 3).max_abs() == 0.0;
  return verdict("", centers && empty_mask && in_unit(m.mask) && attrs && empty_splat,
                 std::string("center cells at 1: ") + (centers ? "yes" : "no") + ", splat attributes " +
                     (attrs ? "match" : "differ"));
}

Result head_and_step_examples(const Context& ctx) {
  Rng rng = rng_for(ctx, 209);
  ParamStore ps;
  HeadConfig hc;
  init_head_params(ps, "head", 4, hc, rng);
  for (auto& [name, e] : ps.entries()) e.value.fill(0.0);
  const HeadOutput out = head_forward(random_tensor({4, 5, 5}, rng), ps, "head").out;
  const bool half = std::all_of(out.heatmap.data().begin(), out.heatmap.data().end(), [](double v) { return v == 0.5; });

  ParamStore p;
  p.add("a", Tensor({2}, {1.0, -2.0}));
  p.add("frozen", Tensor({1}, 3.0), false);
  p.accumulate("a", Tensor({2}, {0.5, 0.25}));
  p.accumulate("frozen", Tensor({1}, 1.0));
  train_step(p, 0.1);
  const bool step = std::abs(p.value("a")[0] - 0.95) <= kExactTol && std::abs(p.value("a")[1] + 2.025) <= kExactTol &&
                    p.value("frozen")[0] == 3.0;
  bool negative = false;
  try {
    train_step(p, -1.0);
  } catch (const std::invalid_argument&) {
    negative = true;
  }
  return verdict("", half && step && negative,
                 std::string("zero head -> 0.5: ") + (half ? "yes" : "no") + ", descent step " +
                     (step ? "exact" : "wrong") + ", negative lr " + (negative ? "rejected" : "accepted"));
}

Result scene_invariants(const Context& ctx) {
  const SceneConfig cfg;
  const SceneSample a = generate_scene(ctx.seed, cfg), b = generate_scene(ctx.seed, cfg);
  const BevGridSpec& g = cfg.grid;
  auto inside = [&](double x, double y) { return x >= g.x_min && x <= g.x_max && y >= g.y_min && y <= g.y_max; };
  bool range = true;
  for (const auto& p : a.lidar) range = range && inside(p.x, p.y) && p.intensity >= 13.0 / 255 && p.intensity <= 229.0 / 255;
  for (const auto& p : a.radar) range = range && inside(p.x, p.y);
  bool separated = true;
  for (std::size_t i = 0; i < a.boxes.size(); ++i) {
    const double r = std::hypot(a.boxes[i].x, a.boxes[i].y);
    separated = separated && r >= cfg.radius_min - 1e-9 && r <= cfg.radius_max + 1e-9;
    for (std::size_t j = 0; j < i; ++j) {
      separated = separated &&
                  std::hypot(a.boxes[i].x - a.boxes[j].x, a.boxes[i].y - a.boxes[j].y) >= cfg.min_separation;
    }
  }
  const bool count = a.boxes.size() == cfg.n_objects && !a.radar.empty();
  const bool same = a.camera_input == b.camera_input && a.lidar.size() == b.lidar.size() &&
                    std::equal(a.lidar.begin(), a.lidar.end(), b.lidar.begin(), [](const LidarPoint& p, const LidarPoint& q) {
                      return p.x == q.x && p.y == q.y && p.z == q.z && p.intensity == q.intensity;
                    });
  // Returns inside a box footprint are brighter on average than the rest.
  double in_sum = 0.0, out_sum = 0.0;
  std::size_t in_n = 0, out_n = 0;
  for (const auto& p : a.lidar) {
    bool in_box = false;
    for (const auto& bx : a.boxes) {
      const double dx = p.x - bx.x, dy = p.y - bx.y;
      const double along = std::cos(bx.yaw) * dx + std::sin(bx.yaw) * dy;
      const double across = -std::sin(bx.yaw) * dx + std::cos(bx.yaw) * dy;
      in_box = in_box || (std::abs(along) <= 0.5 * bx.l + 1e-9 && std::abs(across) <= 0.5 * bx.w + 1e-9);
    }
    (in_box ? in_sum : out_sum) += p.intensity;
    ++(in_box ? in_n : out_n);
  }
  const bool brighter = in_n > 0 && out_n > 0 && in_sum / in_n > out_sum / out_n;
  SceneConfig empty = cfg;
  empty.n_objects = 0;
  const bool none = generate_scene(ctx.seed, empty).boxes.empty();
  return verdict("", range && separated && count && same && none && brighter,
                 std::to_string(a.boxes.size()) + " boxes, " + std::to_string(a.lidar.size()) + " lidar, " +
                     std::to_string(a.radar.size()) + " radar points; in range: " + (range ? "yes" : "no") +
                     ", deterministic: " + (same ? "yes" : "no") +
                     ", object returns brighter: " + (brighter ? "yes" : "no"));
}

Result teacher_examples(const Context& ctx) {
  const ModelConfig cfg = small_model();
  const ParamStore ps = init_model(cfg, ctx.seed);
  // Empty cloud: zero input, bias-only response.
  const Tensor zeros({2, cfg.grid.rows, cfg.grid.cols});
  const Tensor hidden = oracle::conv2d(zeros, ps.value("teacher.enc0.w"), ps.value("teacher.enc0.b"));
  Tensor act = hidden;
  for (auto& v : act.data()) v = std::max(v, 0.0);
  const Tensor want = oracle::conv2d(act, ps.value("teacher.enc1.w"), ps.value("teacher.enc1.b"));
  const double diff = max_abs_diff(teacher_encode({}, cfg.voxel, cfg.grid, ps), want);
  const SceneSample scene = generate_scene(ctx.seed, scene_for(cfg));
  const TeacherBundle a = teacher_forward(scene.lidar, cfg.voxel, cfg.grid, ps);
  const TeacherBundle b = teacher_forward(scene.lidar, cfg.voxel, cfg.grid, ps);
  const bool same = a.f_lidar == b.f_lidar && a.head.heatmap == b.head.heatmap && a.head.bbox == b.head.bbox;
  return verdict("", diff <= 1e-10 && same,
                 "empty cloud vs bias response " + sci(diff) + ", rerun " + (same ? "bit-identical" : "differs"));
}

Result dump_round_trip(const Context& ctx) {
  Rng rng = rng_for(ctx, 210);
  const Tensor t = random_tensor({2, 3, 4}, rng);
  std::stringstream s64, s32;
  write_dump(s64, t, Precision::f64);
  write_dump(s32, t, Precision::f32);
  const Tensor r64 = read_dump(s64), r32 = read_dump(s32);
  bool f32_ok = r32.dims() == t.dims();
  for (std::size_t i = 0; f32_ok && i < t.size(); ++i) f32_ok = r32[i] == static_cast<double>(static_cast<float>(t[i]));
  bool rejects = false;
  try {
    std::stringstream bad("NOPE");
    read_dump(bad);
  } catch (const std::exception&) {
    rejects = true;
  }
  return verdict("", r64 == t && f32_ok && rejects,
                 std::string("f64 exact: ") + (r64 == t ? "yes" : "no") + ", f32 rounded: " + (f32_ok ? "yes" : "no") +
                     ", bad magic rejected: " + (rejects ? "yes" : "no"));
}

}  // namespace

std::vector<Check> invariant_checks() {
  const std::string s = "invariants";
  return {
      {"normalization", s, {2}, normalization},
      {"loss_identities", s, {3}, loss_identities},
      {"igfm_fixture", s, {3}, igfm_fixture},
      {"blend_limits", s, {4}, blend_limits},
      {"total_linearity", s, {6}, total_linearity},
      {"training_descent", s, {7}, training_descent},
      {"frozen_teacher", s, {8}, frozen_teacher},
      {"gate_equal", s, {9}, gate_equal},
      {"gate_monotone", s, {9}, gate_monotone},
      {"determinism", s, {}, determinism},
      {"igfm_convexity", s, {}, igfm_convexity},
      {"swfd_scaling", s, {}, swfd_scaling},
      {"depth_loss_examples", s, {}, depth_loss_examples},
      {"mask_and_label_examples", s, {}, mask_and_label_examples},
      {"head_and_step_examples", s, {}, head_and_step_examples},
      {"teacher_examples", s, {}, teacher_examples},
      {"scene_invariants", s, {}, scene_invariants},
      {"dump_round_trip", s, {}, dump_round_trip},
  };
}

}  // namespace fusionkd::checks::detail
