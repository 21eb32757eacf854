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

#include "fusionkd/camera.hpp"

#include <cmath>
#include <numbers>

#include "fusionkd/ops.hpp"

namespace fusionkd {

namespace {

constexpr long kNoCell = -1;

// Flat BEV cell index for every (view, depth bin, column), or kNoCell.
std::vector<long> splat_table(const CameraConfig& cfg, const BevGridSpec& grid, std::size_t n, std::size_t d,
                              std::size_t w) {
  std::vector<long> table(n * d * w, kNoCell);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t b = 0; b < d; ++b) {
      for (std::size_t c = 0; c < w; ++c) {
        const auto [x, y] = unproject_column(cfg, v, c, cfg.bin_center(b));
        if (auto cell = grid.cell_of(x, y)) {
          table[(v * d + b) * w + c] = static_cast<long>(cell->row * grid.cols + cell->col);
        }
      }
    }
  }
  return table;
}

}  // namespace

void CameraConfig::validate() const {
  if (n_views < 1) throw std::invalid_argument("camera: need at least one view");
  if (depth_bins < 2) throw std::invalid_argument("camera: need at least two depth bins");
  if (!(d_min > 0.0) || !(d_max > d_min)) throw std::invalid_argument("camera: need d_max > d_min > 0");
  if (in_channels == 0 || channels == 0 || backbone_channels == 0 || img_h == 0 || img_w == 0) {
    throw std::invalid_argument("camera: channel and image extents must be positive");
  }
  if (!(focal > 0.0)) throw std::invalid_argument("camera: focal length must be positive");
  if (!poses.empty() && poses.size() != n_views) {
    throw std::invalid_argument("camera: " + std::to_string(poses.size()) + " poses for " +
                                std::to_string(n_views) + " views");
  }
}

ViewPose CameraConfig::pose(std::size_t view) const {
  if (!poses.empty()) return poses.at(view);
  return ViewPose{2.0 * std::numbers::pi * static_cast<double>(view) / static_cast<double>(n_views), 0.0, 0.0};
}

std::optional<std::size_t> CameraConfig::bin_of(double depth) const {
  if (!(depth >= d_min && depth < d_max)) return std::nullopt;
  auto b = static_cast<std::size_t>(std::floor((depth - d_min) / bin_width()));
  return b < depth_bins ? std::optional<std::size_t>(b) : std::nullopt;
}

std::optional<PixelHit> project_to_view(const CameraConfig& cfg, std::size_t view, double x, double y, double z) {
  const ViewPose p = cfg.pose(view);
  const double rx = x - p.tx, ry = y - p.ty;
  const double fwd = rx * std::cos(p.yaw) + ry * std::sin(p.yaw);
  const double left = -rx * std::sin(p.yaw) + ry * std::cos(p.yaw);
  if (!(fwd > 0.0)) return std::nullopt;
  const double col = std::floor(static_cast<double>(cfg.img_w) / 2.0 - cfg.focal * left / fwd);
  const double row = std::floor(static_cast<double>(cfg.img_h) / 2.0 - cfg.focal * (z - cfg.mount_height) / fwd);
  if (col < 0 || col >= static_cast<double>(cfg.img_w) || row < 0 || row >= static_cast<double>(cfg.img_h)) {
    return std::nullopt;
  }
  return PixelHit{static_cast<std::size_t>(row), static_cast<std::size_t>(col), fwd};
}

std::pair<double, double> unproject_column(const CameraConfig& cfg, std::size_t view, std::size_t col,
                                           double depth) {
  const ViewPose p = cfg.pose(view);
  const double left = (static_cast<double>(cfg.img_w) / 2.0 - (static_cast<double>(col) + 0.5)) * depth / cfg.focal;
  const double c = std::cos(p.yaw), s = std::sin(p.yaw);
  return {p.tx + depth * c - left * s, p.ty + depth * s + left * c};
}

void init_camera_params(ParamStore& store, const CameraConfig& cfg, std::mt19937_64& rng) {
  add_conv(store, "cam.backbone0", cfg.backbone_channels, cfg.in_channels, 3, rng);
  add_conv(store, "cam.backbone1", cfg.backbone_channels, cfg.backbone_channels, 3, rng);
  add_conv(store, "cam.context", cfg.channels, cfg.backbone_channels, 3, rng);
  add_conv(store, "cam.depth", cfg.depth_bins, cfg.backbone_channels, 3, rng);
}

ContextDepth context_and_depth(const Tensor& feat, const ParamStore& params, const CameraConfig& cfg) {
  require(feat.ndim() == 4, "context_and_depth: input must be [N,C_in,H,W], got " + shape_str(feat.dims()));
  require(feat.dim(1) == cfg.in_channels, "context_and_depth: input has " + std::to_string(feat.dim(1)) +
                                              " channels, config expects " + std::to_string(cfg.in_channels));
  ContextDepth out;
  out.input = feat;
  out.pre0 = conv2d_batched(feat, params.value("cam.backbone0.w"), params.value("cam.backbone0.b"));
  out.act0 = relu(out.pre0);
  out.pre1 = conv2d_batched(out.act0, params.value("cam.backbone1.w"), params.value("cam.backbone1.b"));
  out.act1 = relu(out.pre1);
  out.context = conv2d_batched(out.act1, params.value("cam.context.w"), params.value("cam.context.b"));
  out.depth = softmax(conv2d_batched(out.act1, params.value("cam.depth.w"), params.value("cam.depth.b")), 1);
  return out;
}

void context_and_depth_backward(const ContextDepth& fwd, const Tensor& grad_context, const Tensor& grad_depth,
                                ParamStore& params) {
  const Tensor g_depth_logits = softmax_backward(fwd.depth, grad_depth, 1);
  auto gd = conv2d_batched_backward(fwd.act1, params.value("cam.depth.w"), g_depth_logits);
  params.accumulate("cam.depth.w", gd.k);
  params.accumulate("cam.depth.b", gd.b);
  auto gc = conv2d_batched_backward(fwd.act1, params.value("cam.context.w"), grad_context);
  params.accumulate("cam.context.w", gc.k);
  params.accumulate("cam.context.b", gc.b);
  Tensor g_act1 = gd.x + gc.x;
  auto g1 = conv2d_batched_backward(fwd.act0, params.value("cam.backbone1.w"), relu_backward(fwd.pre1, g_act1));
  params.accumulate("cam.backbone1.w", g1.k);
  params.accumulate("cam.backbone1.b", g1.b);
  auto g0 = conv2d_batched_backward(fwd.input, params.value("cam.backbone0.w"), relu_backward(fwd.pre0, g1.x));
  params.accumulate("cam.backbone0.w", g0.k);
  params.accumulate("cam.backbone0.b", g0.b);
}

FrustumFeatures lift_to_frustum(const Tensor& context, const Tensor& depth) {
  require(context.ndim() == 4 && depth.ndim() == 4, "lift_to_frustum: expects [N,C,H,W] and [N,D,H,W]");
  const std::size_t n = context.dim(0), c = context.dim(1), h = context.dim(2), w = context.dim(3);
  require(depth.dim(0) == n && depth.dim(2) == h && depth.dim(3) == w,
          "lift_to_frustum: context " + shape_str(context.dims()) + " vs depth " + shape_str(depth.dims()));
  const std::size_t d = depth.dim(1);
  const std::size_t hw = h * w;
  Tensor out({n, c, d, h, w});
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double* cx = &context.data()[(v * c + ch) * hw];
      for (std::size_t b = 0; b < d; ++b) {
        const double* dp = &depth.data()[(v * d + b) * hw];
        double* o = &out.data()[((v * c + ch) * d + b) * hw];
        for (std::size_t p = 0; p < hw; ++p) o[p] = cx[p] * dp[p];
      }
    }
  }
  return {std::move(out.finalize())};
}

LiftGrads lift_to_frustum_backward(const Tensor& context, const Tensor& depth, const Tensor& grad_frustum) {
  const std::size_t n = context.dim(0), c = context.dim(1), h = context.dim(2), w = context.dim(3);
  const std::size_t d = depth.dim(1);
  const std::size_t hw = h * w;
  require(grad_frustum.dims() == Shape({n, c, d, h, w}), "lift_to_frustum_backward: grad dims mismatch");
  LiftGrads g{Tensor(context.dims()), Tensor(depth.dims())};
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double* cx = &context.data()[(v * c + ch) * hw];
      double* gcx = &g.context.data()[(v * c + ch) * hw];
      for (std::size_t b = 0; b < d; ++b) {
        const double* dp = &depth.data()[(v * d + b) * hw];
        double* gdp = &g.depth.data()[(v * d + b) * hw];
        const double* go = &grad_frustum.data()[((v * c + ch) * d + b) * hw];
        for (std::size_t p = 0; p < hw; ++p) {
          gcx[p] += go[p] * dp[p];
          gdp[p] += go[p] * cx[p];
        }
      }
    }
  }
  return g;
}

SplatResult splat_to_bev(const FrustumFeatures& frustum, const CameraConfig& cfg, const BevGridSpec& grid) {
  const Tensor& f = frustum.values;
  require(f.ndim() == 5, "splat_to_bev: frustum must be [N,C,D,H,W], got " + shape_str(f.dims()));
  const std::size_t n = f.dim(0), c = f.dim(1), d = f.dim(2), h = f.dim(3), w = f.dim(4);
  const auto table = splat_table(cfg, grid, n, d, w);
  SplatResult out{Tensor({c, grid.rows, grid.cols}), 0, 0.0};
  const std::size_t plane = grid.cells();
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      for (std::size_t b = 0; b < d; ++b) {
        for (std::size_t r = 0; r < h; ++r) {
          for (std::size_t col = 0; col < w; ++col) {
            const double val = f.data()[(((v * c + ch) * d + b) * h + r) * w + col];
            const long cell = table[(v * d + b) * w + col];
            if (cell == kNoCell) {
              ++out.dropped_cells;
              out.dropped_mass += val;
            } else {
              out.bev[ch * plane + static_cast<std::size_t>(cell)] += val;
            }
          }
        }
      }
    }
  }
  out.bev.finalize();
  return out;
}

Tensor splat_to_bev_backward(const Tensor& grad_bev, const Shape& frustum_dims, const CameraConfig& cfg,
                             const BevGridSpec& grid) {
  const std::size_t n = frustum_dims[0], c = frustum_dims[1], d = frustum_dims[2], h = frustum_dims[3],
                    w = frustum_dims[4];
  const auto table = splat_table(cfg, grid, n, d, w);
  Tensor g(frustum_dims);
  const std::size_t plane = grid.cells();
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      for (std::size_t b = 0; b < d; ++b) {
        for (std::size_t r = 0; r < h; ++r) {
          for (std::size_t col = 0; col < w; ++col) {
            const long cell = table[(v * d + b) * w + col];
            if (cell != kNoCell) {
              g[(((v * c + ch) * d + b) * h + r) * w + col] = grad_bev[ch * plane + static_cast<std::size_t>(cell)];
            }
          }
        }
      }
    }
  }
  return g;
}

}  // namespace fusionkd
