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

#include "fusionkd/head.hpp"

#include <algorithm>
#include <cmath>

#include "fusionkd/ops.hpp"

namespace fusionkd {

namespace {

constexpr double kLogEps = 1e-12;

double safe_log(double v) { return std::log(std::max(v, kLogEps)); }

// Loss and d/dp for one element.
std::pair<double, double> focal_element(double p, double y) {
  if (y == 1.0) {
    const double q = 1.0 - p;
    return {-q * q * safe_log(p), 2.0 * q * safe_log(p) - (p > kLogEps ? q * q / p : 0.0)};
  }
  const double wn = std::pow(1.0 - y, 4);
  const double q = 1.0 - p;
  return {-wn * p * p * safe_log(q), -wn * (2.0 * p * safe_log(q) - (q > kLogEps ? p * p / q : 0.0))};
}

}  // namespace

void init_head_params(ParamStore& store, const std::string& prefix, std::size_t channels, const HeadConfig& cfg,
                      std::mt19937_64& rng, bool trainable) {
  add_conv(store, prefix + ".cls0", cfg.hidden, channels, 3, rng, trainable);
  add_conv(store, prefix + ".cls1", cfg.classes, cfg.hidden, 1, rng, trainable, 0.5);
  Tensor& prior = store.mutable_value(prefix + ".cls1.b");
  for (auto& b : prior.data()) b += cfg.heatmap_prior;
  prior.finalize();
  add_conv(store, prefix + ".reg0", cfg.hidden, channels, 3, rng, trainable);
  add_conv(store, prefix + ".reg1", kRegChannels, cfg.hidden, 1, rng, trainable, 0.5);
}

HeadForward head_forward(const Tensor& features, const ParamStore& params, const std::string& prefix) {
  HeadForward f;
  f.input = features;
  f.cls_pre = conv2d(features, params.value(prefix + ".cls0.w"), params.value(prefix + ".cls0.b"));
  f.out.heatmap = sigmoid(conv2d(relu(f.cls_pre), params.value(prefix + ".cls1.w"), params.value(prefix + ".cls1.b")));
  f.reg_pre = conv2d(features, params.value(prefix + ".reg0.w"), params.value(prefix + ".reg0.b"));
  f.out.bbox = conv2d(relu(f.reg_pre), params.value(prefix + ".reg1.w"), params.value(prefix + ".reg1.b"));
  return f;
}

Tensor head_backward(const HeadForward& fwd, const Tensor& grad_heatmap, const Tensor& grad_bbox,
                     ParamStore& params, const std::string& prefix) {
  const Tensor g_cls_logit = sigmoid_backward(fwd.out.heatmap, grad_heatmap);
  auto g1 = conv2d_backward(relu(fwd.cls_pre), params.value(prefix + ".cls1.w"), g_cls_logit);
  params.accumulate(prefix + ".cls1.w", g1.k);
  params.accumulate(prefix + ".cls1.b", g1.b);
  auto g0 = conv2d_backward(fwd.input, params.value(prefix + ".cls0.w"), relu_backward(fwd.cls_pre, g1.x));
  params.accumulate(prefix + ".cls0.w", g0.k);
  params.accumulate(prefix + ".cls0.b", g0.b);

  auto r1 = conv2d_backward(relu(fwd.reg_pre), params.value(prefix + ".reg1.w"), grad_bbox);
  params.accumulate(prefix + ".reg1.w", r1.k);
  params.accumulate(prefix + ".reg1.b", r1.b);
  auto r0 = conv2d_backward(fwd.input, params.value(prefix + ".reg0.w"), relu_backward(fwd.reg_pre, r1.x));
  params.accumulate(prefix + ".reg0.w", r0.k);
  params.accumulate(prefix + ".reg0.b", r0.b);
  return g0.x + r0.x;
}

FocalTerms gaussian_focal(const Tensor& pred, const Tensor& target) {
  require(pred.same_dims(target), "gaussian_focal: pred " + shape_str(pred.dims()) + " vs target " +
                                      shape_str(target.dims()));
  FocalTerms t{0.0, 0, Tensor(pred.dims())};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto [l, g] = focal_element(pred[i], target[i]);
    t.loss += l;
    t.grad[i] = g;
    if (target[i] == 1.0) ++t.positives;
  }
  return t;
}

Tensor gaussian_focal_map(const Tensor& pred, const Tensor& target) {
  require(pred.same_dims(target), "gaussian_focal_map: dims mismatch");
  Tensor m(pred.dims());
  for (std::size_t i = 0; i < pred.size(); ++i) m[i] = focal_element(pred[i], target[i]).first;
  return m;
}

Tensor heatmap_targets(std::span<const Box3D> boxes, const BevGridSpec& grid, std::size_t classes) {
  Tensor t({classes, grid.rows, grid.cols});
  for (const auto& b : boxes) {
    const auto center = grid.cell_of(b.x, b.y);
    if (!center || b.cls < 0 || static_cast<std::size_t>(b.cls) >= classes) continue;
    const double cx = grid.center_x(center->row), cy = grid.center_y(center->col);
    for (std::size_t r = 0; r < grid.rows; ++r) {
      for (std::size_t c = 0; c < grid.cols; ++c) {
        const double g = (r == center->row && c == center->col)
                             ? 1.0
                             : box_gaussian(b, cx, cy, grid.center_x(r), grid.center_y(c), grid);
        double& v = t[(static_cast<std::size_t>(b.cls) * grid.rows + r) * grid.cols + c];
        v = std::max(v, g);
      }
    }
  }
  return t;
}

std::vector<double> regression_target(const Box3D& box, const BevGridSpec& grid, const Cell& center) {
  const double lo_x = grid.x_min + static_cast<double>(center.row) * grid.step_x();
  const double lo_y = grid.y_min + static_cast<double>(center.col) * grid.step_y();
  return {(box.x - lo_x) / grid.step_x(),
          (box.y - lo_y) / grid.step_y(),
          box.z,
          std::log(box.l),
          std::log(box.w),
          std::log(box.h),
          std::sin(box.yaw),
          std::cos(box.yaw)};
}

HeadLoss det_loss(const HeadOutput& pred, std::span<const Box3D> boxes, const BevGridSpec& grid) {
  const std::size_t k = pred.heatmap.dim(0);
  require(pred.heatmap.dims() == Shape({k, grid.rows, grid.cols}), "det_loss: heatmap dims do not match grid");
  require(pred.bbox.dims() == Shape({kRegChannels, grid.rows, grid.cols}), "det_loss: bbox dims do not match grid");
  HeadLoss out;
  const Tensor target = heatmap_targets(boxes, grid, k);
  auto focal = gaussian_focal(pred.heatmap, target);
  const double pos_norm = std::max<double>(1.0, static_cast<double>(focal.positives));
  out.focal = focal.loss / pos_norm;
  out.grad_heatmap = focal.grad * (1.0 / pos_norm);

  out.grad_bbox = Tensor(pred.bbox.dims());
  std::size_t n_boxes = 0;
  const std::size_t plane = grid.cells();
  double l1 = 0.0;
  std::vector<std::pair<std::size_t, double>> signs;
  for (const auto& b : boxes) {
    const auto center = grid.cell_of(b.x, b.y);
    if (!center) continue;
    ++n_boxes;
    const auto t = regression_target(b, grid, *center);
    const std::size_t cell = center->row * grid.cols + center->col;
    for (std::size_t r = 0; r < kRegChannels; ++r) {
      const double d = pred.bbox[r * plane + cell] - t[r];
      l1 += std::abs(d);
      signs.emplace_back(r * plane + cell, d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0));
    }
  }
  const double box_norm = std::max<double>(1.0, static_cast<double>(n_boxes));
  out.l1 = l1 / box_norm;
  for (const auto& [idx, s] : signs) out.grad_bbox[idx] += s / box_norm;
  out.value = finalize_scalar(out.focal + out.l1);
  return out;
}

DepthLoss depth_loss(const Tensor& depth, std::span<const LidarPoint> lidar, const CameraConfig& cfg) {
  require(depth.ndim() == 4, "depth_loss: depth must be [N,D,H,W], got " + shape_str(depth.dims()));
  const std::size_t n = depth.dim(0), d = depth.dim(1), h = depth.dim(2), w = depth.dim(3);
  require(n == cfg.n_views && d == cfg.depth_bins && h == cfg.img_h && w == cfg.img_w,
          "depth_loss: depth " + shape_str(depth.dims()) + " does not match camera config");
  DepthLoss out{0.0, 0, Tensor(depth.dims())};
  std::vector<std::size_t> hits;
  for (const auto& p : lidar) {
    for (std::size_t v = 0; v < n; ++v) {
      const auto hit = project_to_view(cfg, v, p.x, p.y, p.z);
      if (!hit) continue;
      const auto bin = cfg.bin_of(hit->depth);
      if (!bin) continue;
      hits.push_back(((v * d + *bin) * h + hit->row) * w + hit->col);
    }
  }
  if (hits.empty()) return out;
  const double inv = 1.0 / static_cast<double>(hits.size());
  double ce = 0.0;
  for (const auto idx : hits) {
    const double p = std::max(depth[idx], kLogEps);
    ce -= std::log(p);
    out.grad_depth[idx] -= inv / p;
  }
  out.supervised = hits.size();
  out.value = finalize_scalar(ce * inv);
  return out;
}

}  // namespace fusionkd
