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

#include "common.hpp"
#include "fusionkd/distill.hpp"
#include "fusionkd/head.hpp"
#include "fusionkd/model.hpp"
#include "fusionkd/objective.hpp"

namespace fusionkd::checks::detail {

namespace {

constexpr double kStep = 1e-5;
constexpr double kLossTol = 1e-5;
constexpr double kTotalTol = 1e-4;

constexpr double kFineStep = 1e-7;
constexpr double kKinkRatio = 1e-2;

using Scalar = std::function<double(const Tensor&)>;

// Central differences at kStep. A coordinate whose one-sided slopes disagree
// by more than kKinkRatio straddles a non-smooth point (ReLU or max-pool
// switch); there the central difference at kFineStep is used instead.
Tensor numeric_grad(const Scalar& f, const Tensor& x, const Tensor& analytic, std::size_t& kinks) {
  Tensor num = finite_diff_grad(f, x, kStep);
  double f0 = 0.0;
  bool have_f0 = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(num[i] - analytic[i]) <= kLossTol * std::max(1.0, std::abs(analytic[i]))) continue;
    if (!have_f0) {
      f0 = f(x);
      have_f0 = true;
    }
    Tensor probe = x;
    probe[i] = x[i] + kStep;
    const double right = (f(probe) - f0) / kStep;
    probe[i] = x[i] - kStep;
    const double left = (f0 - f(probe)) / kStep;
    if (std::abs(right - left) <= kKinkRatio * std::max({1.0, std::abs(right), std::abs(left)})) continue;
    ++kinks;
    probe[i] = x[i] + kFineStep;
    const double up = f(probe);
    probe[i] = x[i] - kFineStep;
    num[i] = (up - f(probe)) / (2.0 * kFineStep);
  }
  return num;
}

// Compares `analytic` with central differences of `f` at `x`.
void compare(const Scalar& f, const Tensor& x, const Tensor& analytic, const std::string& label, Worst& worst) {
  worst.see(relative_error(analytic, numeric_grad(f, x, analytic, worst.kinks)), label);
}

// d/dparam for every entry of `names`, using `backward` to fill the gradients.
void compare_params(const ParamStore& store, const std::vector<std::string>& names,
                    const std::function<double(const ParamStore&)>& f,
                    const std::function<void(ParamStore&)>& backward, Worst& worst) {
  ParamStore g = store;
  g.zero_grad();
  backward(g);
  for (const auto& name : names) {
    ParamStore probe = store;
    auto fn = [&](const Tensor& v) {
      probe.mutable_value(name) = v;
      return f(probe);
    };
    compare(fn, store.value(name), g.grad(name), name, worst);
  }
}

double dot(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Result report(const Worst& w, double tol) {
  std::string detail = "worst rel err " + sci(w.value) + (w.where.empty() ? "" : " at " + w.where);
  if (w.kinks > 0) detail += ", " + std::to_string(w.kinks) + " coordinate(s) at a kink re-differenced at h=1e-7";
  return verdict("", w.value <= tol, detail);
}

Result fd_examples(const Context& ctx) {
  const Tensor g = finite_diff_grad([](const Tensor& x) { return x[0] * x[0]; }, Tensor({1}, 3.0), kStep);
  const bool quad = std::abs(g[0] - 6.0) <= 1e-8;

  Rng rng = rng_for(ctx, 101);
  const Tensor x = random_tensor({5}, rng);
  auto f = [](const Tensor& t) {
    double s = 0.0;
    for (double v : t.data()) s += std::sin(v) * std::exp(v / 2.0);
    return s;
  };
  Tensor exact({5});
  for (std::size_t i = 0; i < 5; ++i) exact[i] = std::exp(x[i] / 2.0) * (std::cos(x[i]) + 0.5 * std::sin(x[i]));
  const double e1 = max_abs_diff(finite_diff_grad(f, x, 1e-2), exact);
  const double e2 = max_abs_diff(finite_diff_grad(f, x, 5e-3), exact);
  const double ratio = e1 / e2;
  const bool second_order = ratio > 3.5 && ratio < 4.5;

  // igfm through the blend path on a 2x2 map: with w = clamp(lambda * I),
  // Fr - F~ = w (Fr - Fl), so d/dFr = 2 (alpha + (1 - alpha) w^2) (Fr - Fl) / n.
  const Tensor fr = random_tensor({1, 2, 2}, rng), fl = random_tensor({1, 2, 2}, rng);
  const Tensor il = random_tensor({1, 2, 2}, rng, 0.1, 0.9);
  const double alpha = 0.5, lambda = 0.8;
  auto composite = [&](const Tensor& r) { return igfm_loss(r, fl, blend(fl, r, il, lambda).blended, alpha).value; };
  Tensor symbolic({1, 2, 2});
  for (std::size_t i = 0; i < 4; ++i) {
    const double w = lambda * il[i];
    symbolic[i] = 2.0 * (alpha + (1.0 - alpha) * w * w) * (fr[i] - fl[i]) / 4.0;
  }
  const double sym_err = relative_error(symbolic, finite_diff_grad(composite, fr, kStep));
  return verdict("", quad && second_order && sym_err <= kLossTol,
                 "d(x^2)/dx at 3 = " + sci(g[0]) + ", h-halving ratio " + sci(ratio) + ", 2x2 expansion err " +
                     sci(sym_err));
}

Result grad_primitives(const Context& ctx) {
  Rng rng = rng_for(ctx, 102);
  Worst w;
  {
    const Tensor x = random_tensor({3, 5, 4}, rng), k = random_tensor({2, 3, 3, 3}, rng), b = random_tensor({2}, rng);
    const Tensor r = random_tensor({2, 5, 4}, rng);
    const ConvGrads g = conv2d_backward(x, k, r);
    compare([&](const Tensor& v) { return dot(conv2d(v, k, b), r); }, x, g.x, "conv2d.x", w);
    compare([&](const Tensor& v) { return dot(conv2d(x, v, b), r); }, k, g.k, "conv2d.k", w);
    compare([&](const Tensor& v) { return dot(conv2d(x, k, v), r); }, b, g.b, "conv2d.b", w);
  }
  {
    const Tensor x = random_tensor({4, 3}, rng), m = random_tensor({3, 5}, rng), b = random_tensor({5}, rng);
    const Tensor r = random_tensor({4, 5}, rng);
    const AffineGrads g = affine_backward(x, m, r);
    compare([&](const Tensor& v) { return dot(affine(v, m, b), r); }, x, g.x, "affine.x", w);
    compare([&](const Tensor& v) { return dot(affine(x, v, b), r); }, m, g.w, "affine.w", w);
    compare([&](const Tensor& v) { return dot(affine(x, m, v), r); }, b, g.b, "affine.b", w);
  }
  {
    const Tensor x = random_tensor({3, 6, 2}, rng, -3.0, 3.0), r = random_tensor({3, 6, 2}, rng);
    compare([&](const Tensor& v) { return dot(softmax(v, 1), r); }, x, softmax_backward(softmax(x, 1), r, 1),
            "softmax", w);
    compare([&](const Tensor& v) { return dot(sigmoid(v), r); }, x, sigmoid_backward(sigmoid(x), r), "sigmoid", w);
  }
  {
    const Tensor map = random_tensor({3, 4, 5}, rng), r = random_tensor({3}, rng);
    const double u = uniform(rng, 0.1, 2.9), v = uniform(rng, 0.1, 3.9);
    Tensor gmap(map.dims());
    const CoordGrad cg = bilinear_sample_backward(map, u, v, r.data(), &gmap);
    compare([&](const Tensor& m) { return dot(bilinear_sample(m, u, v), r); }, map, gmap, "bilinear.map", w);
    compare([&](const Tensor& t) { return dot(bilinear_sample(map, t[0], t[1]), r); }, Tensor({2}, {u, v}),
            Tensor({2}, {cg.u, cg.v}), "bilinear.uv", w);
  }
  return report(w, kLossTol);
}

CameraConfig tiny_camera() {
  CameraConfig cam;
  cam.n_views = 2;
  cam.in_channels = 3;
  cam.backbone_channels = 4;
  cam.channels = 3;
  cam.img_h = 4;
  cam.img_w = 6;
  cam.depth_bins = 4;
  cam.d_min = 1.0;
  cam.d_max = 9.0;
  cam.focal = 3.0;
  return cam;
}

BevGridSpec tiny_grid() {
  BevGridSpec g;
  g.x_min = g.y_min = -10.0;
  g.x_max = g.y_max = 10.0;
  g.rows = g.cols = 4;
  return g;
}

Result grad_camera_branch(const Context& ctx) {
  Rng rng = rng_for(ctx, 103);
  const CameraConfig cam = tiny_camera();
  const BevGridSpec grid = tiny_grid();
  ParamStore ps;
  init_camera_params(ps, cam, rng);
  init_camera_intensity_params(ps, cam.channels, rng);
  const Tensor input = random_tensor({cam.n_views, cam.in_channels, cam.img_h, cam.img_w}, rng);
  const Tensor r_bev = random_tensor({cam.channels, 4, 4}, rng), r_int = random_tensor({1, 4, 4}, rng);
  auto f = [&](const ParamStore& p) {
    const auto cd = context_and_depth(input, p, cam);
    const Tensor bev = splat_to_bev(lift_to_frustum(cd.context, cd.depth), cam, grid).bev;
    return dot(bev, r_bev) + dot(camera_intensity(bev, p), r_int);
  };
  auto backward = [&](ParamStore& p) {
    const auto cd = context_and_depth(input, p, cam);
    const auto fr = lift_to_frustum(cd.context, cd.depth);
    const Tensor bev = splat_to_bev(fr, cam, grid).bev;
    const Tensor ic = camera_intensity(bev, p);
    Tensor g_bev = r_bev + camera_intensity_backward(bev, ic, r_int, p);
    const Tensor g_fr = splat_to_bev_backward(g_bev, fr.values.dims(), cam, grid);
    const LiftGrads gl = lift_to_frustum_backward(cd.context, cd.depth, g_fr);
    context_and_depth_backward(cd, gl.context, gl.depth, p);
  };
  Worst w;
  compare_params(ps, ps.names(), f, backward, w);
  return report(w, kLossTol);
}

Result grad_radar_branch(const Context& ctx) {
  Rng rng = rng_for(ctx, 104);
  RadarConfig rc;
  rc.hidden = 6;
  rc.channels = 3;
  const BevGridSpec grid = tiny_grid();
  ParamStore ps;
  init_radar_params(ps, rc, rng);
  std::vector<RadarPoint> pts(12);
  for (auto& p : pts) {
    p = {uniform(rng, -10, 10), uniform(rng, -10, 10), uniform(rng, 0, 2), uniform(rng, -5, 5), uniform(rng, -5, 5),
         uniform(rng, -20, 30)};
  }
  const Tensor r = random_tensor({rc.channels, 4, 4}, rng);
  auto f = [&](const ParamStore& p) {
    const auto e = embed_points(pts, p, rc);
    return dot(encode_radar(build_grid(pts, e.features, grid, rc.channels).features, p, rc).output, r);
  };
  auto backward = [&](ParamStore& p) {
    const auto e = embed_points(pts, p, rc);
    const auto g = build_grid(pts, e.features, grid, rc.channels);
    const auto enc = encode_radar(g.features, p, rc);
    const Tensor gg = encode_radar_backward(enc, r, p);
    embed_points_backward(e, build_grid_backward(g, gg, pts.size()), p);
  };
  Worst w;
  compare_params(ps, ps.names(), f, backward, w);
  return report(w, kLossTol);
}

Result grad_fusion(const Context& ctx) {
  Rng rng = rng_for(ctx, 105);
  const std::size_t c = 3;
  FusionConfig cfg;
  cfg.points = 2;
  ParamStore ps;
  init_fusion_params(ps, c, cfg, rng);
  ps.mutable_value(std::string(kGateOffset) + ".b")[0] = 0.3;
  ps.mutable_value(std::string(kGateAttn) + ".b")[0] = -0.2;
  const Tensor radar = random_tensor({c, 4, 4}, rng), camera = random_tensor({c, 4, 4}, rng);
  const Tensor ic = random_tensor({1, 4, 4}, rng, 0.0, 1.0), ir = random_tensor({1, 4, 4}, rng, 0.0, 1.0);
  const Tensor r = random_tensor({c, 4, 4}, rng);
  auto run = [&](const Tensor& ra, const Tensor& ca, const Tensor& ia, const ParamStore& p) {
    return dot(deform_attn_fuse(ra, ca, ia, ir, cfg, p).output, r);
  };
  ParamStore g = ps;
  g.zero_grad();
  const FusionGrads fg = deform_attn_fuse_backward(deform_attn_fuse(radar, camera, ic, ir, cfg, ps), radar, camera,
                                                   ic, ir, cfg, r, g);
  Worst w;
  compare([&](const Tensor& v) { return run(v, camera, ic, ps); }, radar, fg.radar, "radar", w);
  compare([&](const Tensor& v) { return run(radar, v, ic, ps); }, camera, fg.camera, "camera", w);
  compare([&](const Tensor& v) { return run(radar, camera, v, ps); }, ic, fg.cam_intensity, "cam_intensity", w);
  compare_params(
      ps, ps.names(), [&](const ParamStore& p) { return run(radar, camera, ic, p); },
      [&](ParamStore& p) {
        deform_attn_fuse_backward(deform_attn_fuse(radar, camera, ic, ir, cfg, p), radar, camera, ic, ir, cfg, r, p);
      },
      w);
  return report(w, kLossTol);
}

Result grad_head(const Context& ctx) {
  Rng rng = rng_for(ctx, 106);
  ParamStore ps;
  HeadConfig hc;
  init_head_params(ps, "head", 3, hc, rng);
  const Tensor x = random_tensor({3, 4, 4}, rng);
  const Tensor rh = random_tensor({hc.classes, 4, 4}, rng), rb = random_tensor({kRegChannels, 4, 4}, rng);
  auto run = [&](const Tensor& in, const ParamStore& p) {
    const auto out = head_forward(in, p, "head").out;
    return dot(out.heatmap, rh) + dot(out.bbox, rb);
  };
  ParamStore g = ps;
  g.zero_grad();
  const Tensor gx = head_backward(head_forward(x, ps, "head"), rh, rb, g, "head");
  Worst w;
  compare([&](const Tensor& v) { return run(v, ps); }, x, gx, "features", w);
  compare_params(
      ps, ps.names(), [&](const ParamStore& p) { return run(x, p); },
      [&](ParamStore& p) { head_backward(head_forward(x, p, "head"), rh, rb, p, "head"); }, w);
  return report(w, kLossTol);
}

Result grad_det_loss(const Context& ctx) {
  Rng rng = rng_for(ctx, 107);
  BevGridSpec g;
  g.rows = g.cols = 8;
  std::vector<Box3D> boxes = {{-20.0, 13.0, 0.8, 4.5, 1.9, 1.6, 0.4, 0}, {30.0, -7.0, 0.9, 0.8, 0.8, 1.7, -1.2, 1}};
  HeadOutput pred{random_tensor({3, 8, 8}, rng, 0.02, 0.98), random_tensor({kRegChannels, 8, 8}, rng)};
  const HeadLoss l = det_loss(pred, boxes, g);
  Worst w;
  compare([&](const Tensor& v) { return det_loss({v, pred.bbox}, boxes, g).value; }, pred.heatmap, l.grad_heatmap,
          "heatmap", w);
  compare([&](const Tensor& v) { return det_loss({pred.heatmap, v}, boxes, g).value; }, pred.bbox, l.grad_bbox,
          "bbox", w);
  return report(w, kLossTol);
}

Result grad_depth_loss(const Context& ctx) {
  Rng rng = rng_for(ctx, 108);
  const CameraConfig cam = tiny_camera();
  std::vector<LidarPoint> lidar(60);
  for (auto& p : lidar) p = {uniform(rng, -9, 9), uniform(rng, -9, 9), uniform(rng, 0, 2), 0.5, 0.0};
  const Tensor depth =
      softmax(random_tensor({cam.n_views, cam.depth_bins, cam.img_h, cam.img_w}, rng, -2.0, 2.0), 1);
  const DepthLoss l = depth_loss(depth, lidar, cam);
  Worst w;
  compare([&](const Tensor& v) { return depth_loss(v, lidar, cam).value; }, depth, l.grad_depth, "depth", w);
  return verdict("", w.value <= kLossTol && l.supervised > 0,
                 "worst rel err " + sci(w.value) + ", " + std::to_string(l.supervised) + " supervised pixels");
}

struct DistillFixture {
  Tensor fr, fl, fused, il, label;
  HeadOutput teacher, student;
  SoftLabelMask mask;
  ParamStore beta;
};

DistillFixture distill_fixture(Rng& rng) {
  DistillFixture d;
  const Shape dims = {3, 4, 4};
  d.fr = random_tensor(dims, rng);
  d.fl = random_tensor(dims, rng);
  d.fused = random_tensor(dims, rng);
  d.label = random_tensor(dims, rng);
  d.il = random_tensor({1, 4, 4}, rng, 0.05, 0.95);
  d.teacher = {random_tensor({3, 4, 4}, rng, 0.0, 1.0), random_tensor({kRegChannels, 4, 4}, rng)};
  d.student = {random_tensor({3, 4, 4}, rng, 0.05, 0.95), random_tensor({kRegChannels, 4, 4}, rng)};
  d.teacher.heatmap[5] = 1.0;
  d.mask = SoftLabelMask{random_tensor({1, 4, 4}, rng, 0.0, 1.0), 1e-6};
  init_adapter_params(d.beta, 3, rng);
  return d;
}

Result grad_igfm(const Context& ctx) {
  Rng rng = rng_for(ctx, 109);
  const DistillFixture d = distill_fixture(rng);
  const double alpha = 0.5, lambda = 1.3;
  const BlendResult b = blend(d.fl, d.fr, d.il, lambda);
  const IgfmLoss l = igfm_loss(d.fr, d.fl, b.blended, alpha);
  Worst w;
  compare([&](const Tensor& v) { return igfm_loss(v, d.fl, b.blended, alpha).value; }, d.fr, l.grad_radar, "radar",
          w);
  compare([&](const Tensor& v) { return igfm_loss(d.fr, d.fl, v, alpha).value; }, b.blended, l.grad_blended,
          "blended", w);
  // Full path: radar enters both directly and through the blend, plus lambda.
  const BlendGrads gb = blend_backward(b, d.fl, d.fr, d.il, l.grad_blended);
  auto through = [&](const Tensor& r, double lam) { return igfm_loss(r, d.fl, blend(d.fl, r, d.il, lam).blended, alpha).value; };
  compare([&](const Tensor& v) { return through(v, lambda); }, d.fr, l.grad_radar + gb.radar, "radar+blend", w);
  compare([&](const Tensor& v) { return through(d.fr, v[0]); }, Tensor::scalar(lambda), Tensor::scalar(gb.lambda_blend),
          "lambda_blend", w);
  return report(w, kLossTol);
}

Result grad_swfd(const Context& ctx) {
  Rng rng = rng_for(ctx, 110);
  const DistillFixture d = distill_fixture(rng);
  const SwfdLoss l = swfd_loss(d.fl, d.fused, d.il, d.beta);
  Worst w;
  compare([&](const Tensor& v) { return swfd_loss(d.fl, v, d.il, d.beta).value; }, d.fused, l.grad_fused, "fused", w);
  compare_params(
      d.beta, d.beta.names(), [&](const ParamStore& p) { return swfd_loss(d.fl, d.fused, d.il, p).value; },
      [&](ParamStore& p) { swfd_loss(d.fl, d.fused, d.il, p, &p); }, w);
  return report(w, kLossTol);
}

Result grad_swrd(const Context& ctx) {
  Rng rng = rng_for(ctx, 111);
  const DistillFixture d = distill_fixture(rng);
  const SwrdLoss l = swrd_loss(d.teacher, d.student, d.il);
  Worst w;
  compare([&](const Tensor& v) { return swrd_loss(d.teacher, {v, d.student.bbox}, d.il).value; }, d.student.heatmap,
          l.grad_heatmap, "heatmap", w);
  compare([&](const Tensor& v) { return swrd_loss(d.teacher, {d.student.heatmap, v}, d.il).value; }, d.student.bbox,
          l.grad_bbox, "bbox", w);
  return report(w, kLossTol);
}

Result grad_ld(const Context& ctx) {
  Rng rng = rng_for(ctx, 112);
  const DistillFixture d = distill_fixture(rng);
  const LdLoss l = ld_loss(d.label, d.fused, d.mask);
  Worst w;
  compare([&](const Tensor& v) { return ld_loss(d.label, v, d.mask).value; }, d.fused, l.grad_fused, "fused", w);
  return report(w, kLossTol);
}

Result grad_end_to_end(const Context& ctx) {
  const ModelConfig cfg = small_model();
  const SceneSample scene = generate_scene(ctx.seed, scene_for(cfg));
  const ParamStore ps = init_model(cfg, ctx.seed);
  const SceneTargets targets = prepare_targets(scene, ps, cfg);
  Worst w;
  compare_params(
      ps, ps.trainable_names(),
      [&](const ParamStore& p) { return model_forward(scene, targets, p, cfg).loss.total; },
      [&](ParamStore& p) { model_backward(model_forward(scene, targets, p, cfg), scene, targets, p, cfg); }, w);
  Result r = report(w, kTotalTol);
  r.detail += " over " + std::to_string(ps.trainable_names().size()) + " trainable tensors";
  return r;
}

}  // namespace

std::vector<Check> gradient_checks() {
  const std::string s = "gradients";
  return {
      {"fd_examples", s, {}, fd_examples},
      {"grad_primitives", s, {}, grad_primitives},
      {"grad_camera_branch", s, {}, grad_camera_branch},
      {"grad_radar_branch", s, {}, grad_radar_branch},
      {"grad_fusion", s, {}, grad_fusion},
      {"grad_head", s, {}, grad_head},
      {"grad_det_loss", s, {5}, grad_det_loss},
      {"grad_depth_loss", s, {5}, grad_depth_loss},
      {"grad_igfm_loss", s, {5}, grad_igfm},
      {"grad_swfd_loss", s, {5}, grad_swfd},
      {"grad_swrd_loss", s, {5}, grad_swrd},
      {"grad_ld_loss", s, {5}, grad_ld},
      {"grad_end_to_end", s, {5}, grad_end_to_end},
  };
}

}  // namespace fusionkd::checks::detail
