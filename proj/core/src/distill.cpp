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

#include "fusionkd/distill.hpp"

#include <algorithm>
#include <cmath>

#include "fusionkd/ops.hpp"

namespace fusionkd {

namespace {

void require_same(const Tensor& a, const Tensor& b, const char* what) {
  require(a.same_dims(b), std::string(what) + ": dims " + shape_str(a.dims()) + " vs " + shape_str(b.dims()));
}

void require_plane(const Tensor& features, const Tensor& map, const char* what) {
  require(features.ndim() == 3 && map.dims() == Shape({1, features.dim(1), features.dim(2)}),
          std::string(what) + ": weight map " + shape_str(map.dims()) + " does not cover features " +
              shape_str(features.dims()));
}

}  // namespace

BlendResult blend(const Tensor& lidar, const Tensor& radar, const Tensor& lidar_intensity, double lambda_blend) {
  require_same(lidar, radar, "blend");
  require_plane(radar, lidar_intensity, "blend");
  const std::size_t c = radar.dim(0), plane = radar.dim(1) * radar.dim(2);
  BlendResult r;
  r.weights.lambda_blend = lambda_blend;
  r.weights.w_lidar = Tensor(lidar_intensity.dims());
  r.weights.w_radar = Tensor(lidar_intensity.dims());
  for (std::size_t k = 0; k < plane; ++k) {
    const double wl = std::clamp(lambda_blend * lidar_intensity[k], 0.0, 1.0);
    r.weights.w_lidar[k] = wl;
    r.weights.w_radar[k] = 1.0 - wl;
  }
  r.blended = Tensor(radar.dims());
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t k = 0; k < plane; ++k) {
      const std::size_t i = ch * plane + k;
      const double wl = r.weights.w_lidar[k];
      if (wl == 0.0) {
        r.blended[i] = radar[i];
      } else if (wl == 1.0) {
        r.blended[i] = lidar[i];
      } else {
        r.blended[i] = wl * lidar[i] + (1.0 - wl) * radar[i];
      }
    }
  }
  r.blended.finalize();
  return r;
}

BlendGrads blend_backward(const BlendResult& fwd, const Tensor& lidar, const Tensor& radar,
                          const Tensor& lidar_intensity, const Tensor& grad_blended) {
  require_same(grad_blended, radar, "blend_backward");
  const std::size_t c = radar.dim(0), plane = radar.dim(1) * radar.dim(2);
  BlendGrads g{Tensor(radar.dims()), 0.0};
  const double lambda = fwd.weights.lambda_blend;
  for (std::size_t k = 0; k < plane; ++k) {
    const double wl = fwd.weights.w_lidar[k];
    const double pre = lambda * lidar_intensity[k];
    const bool active = pre > 0.0 && pre < 1.0;
    for (std::size_t ch = 0; ch < c; ++ch) {
      const std::size_t i = ch * plane + k;
      g.radar[i] = grad_blended[i] * (1.0 - wl);
      if (active) g.lambda_blend += grad_blended[i] * (lidar[i] - radar[i]) * lidar_intensity[k];
    }
  }
  return g;
}

IgfmLoss igfm_loss(const Tensor& radar, const Tensor& lidar, const Tensor& blended, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("igfm_loss: alpha must lie in [0, 1]");
  require_same(radar, lidar, "igfm_loss");
  require_same(radar, blended, "igfm_loss");
  const double n = static_cast<double>(radar.size());
  IgfmLoss l{0.0, 0.0, 0.0, Tensor(radar.dims()), Tensor(radar.dims())};
  for (std::size_t i = 0; i < radar.size(); ++i) {
    const double da = radar[i] - lidar[i];
    const double dc = radar[i] - blended[i];
    l.align += da * da;
    l.consist += dc * dc;
    l.grad_radar[i] = 2.0 * (alpha * da + (1.0 - alpha) * dc) / n;
    l.grad_blended[i] = -2.0 * (1.0 - alpha) * dc / n;
  }
  l.align /= n;
  l.consist /= n;
  l.value = finalize_scalar(alpha * l.align + (1.0 - alpha) * l.consist);
  return l;
}

void init_adapter_params(ParamStore& store, std::size_t channels, std::mt19937_64& rng) {
  add_conv(store, "distill.beta", channels, channels, 1, rng);
}

SwfdLoss swfd_loss(const Tensor& lidar, const Tensor& fused, const Tensor& lidar_intensity, const ParamStore& params,
                   ParamStore* grads, double grad_scale) {
  require_plane(fused, lidar_intensity, "swfd_loss");
  SwfdLoss l;
  l.adapted = conv2d(fused, params.value("distill.beta.w"), params.value("distill.beta.b"));
  require_same(l.adapted, lidar, "swfd_loss");
  const std::size_t c = lidar.dim(0), plane = lidar.dim(1) * lidar.dim(2);
  const double inv_cells = 1.0 / static_cast<double>(plane);
  Tensor g_adapted(lidar.dims());
  double acc = 0.0;
  for (std::size_t k = 0; k < plane; ++k) {
    const double wgt = lidar_intensity[k];
    for (std::size_t ch = 0; ch < c; ++ch) {
      const std::size_t i = ch * plane + k;
      const double d = l.adapted[i] - lidar[i];
      acc += wgt * d * d;
      g_adapted[i] = 2.0 * wgt * d * inv_cells;
    }
  }
  l.value = finalize_scalar(acc * inv_cells);
  auto g = conv2d_backward(fused, params.value("distill.beta.w"), g_adapted);
  if (grads) {
    grads->accumulate("distill.beta.w", g.k * grad_scale);
    grads->accumulate("distill.beta.b", g.b * grad_scale);
  }
  l.grad_fused = std::move(g.x);
  return l;
}

SwrdLoss swrd_loss(const HeadOutput& teacher, const HeadOutput& student, const Tensor& lidar_intensity) {
  require_same(teacher.heatmap, student.heatmap, "swrd_loss");
  require_same(teacher.bbox, student.bbox, "swrd_loss");
  require_plane(student.heatmap, lidar_intensity, "swrd_loss");
  const std::size_t k = student.heatmap.dim(0), r = student.bbox.dim(0);
  const std::size_t plane = student.heatmap.dim(1) * student.heatmap.dim(2);
  const double inv_cells = 1.0 / static_cast<double>(plane);
  auto focal = gaussian_focal(student.heatmap, teacher.heatmap);
  const Tensor cls_map = gaussian_focal_map(student.heatmap, teacher.heatmap);
  SwrdLoss l{0.0, 0.0, 0.0, Tensor(student.heatmap.dims()), Tensor(student.bbox.dims())};
  double acc_cls = 0.0, acc_bbox = 0.0;
  for (std::size_t cell = 0; cell < plane; ++cell) {
    const double wgt = lidar_intensity[cell];
    for (std::size_t ch = 0; ch < k; ++ch) {
      const std::size_t i = ch * plane + cell;
      acc_cls += wgt * cls_map[i];
      l.grad_heatmap[i] = wgt * focal.grad[i] * inv_cells;
    }
    for (std::size_t ch = 0; ch < r; ++ch) {
      const std::size_t i = ch * plane + cell;
      const double d = student.bbox[i] - teacher.bbox[i];
      acc_bbox += wgt * std::abs(d);
      l.grad_bbox[i] = wgt * (d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0)) * inv_cells;
    }
  }
  l.cls = finalize_scalar(acc_cls * inv_cells);
  l.bbox = finalize_scalar(acc_bbox * inv_cells);
  l.value = finalize_scalar((acc_cls + acc_bbox) * inv_cells);
  return l;
}

SoftLabelMask soft_label_mask(std::span<const Box3D> boxes, const BevGridSpec& grid, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("soft_label_mask: eps must be positive");
  SoftLabelMask m{Tensor({1, grid.rows, grid.cols}), eps};
  for (const auto& b : boxes) {
    double cx = b.x, cy = b.y;
    if (const auto center = grid.cell_of(b.x, b.y)) {
      cx = grid.center_x(center->row);
      cy = grid.center_y(center->col);
    }
    for (std::size_t r = 0; r < grid.rows; ++r) {
      for (std::size_t c = 0; c < grid.cols; ++c) {
        double& v = m.mask[r * grid.cols + c];
        v = std::max(v, box_gaussian(b, cx, cy, grid.center_x(r), grid.center_y(c), grid));
      }
    }
  }
  m.mask.finalize();
  return m;
}

LdLoss ld_loss(const Tensor& label, const Tensor& fused, const SoftLabelMask& mask) {
  require_same(label, fused, "ld_loss");
  require_plane(fused, mask.mask, "ld_loss");
  const std::size_t c = fused.dim(0), plane = fused.dim(1) * fused.dim(2);
  const double denom = mask.mask.sum() + mask.eps;
  LdLoss l{0.0, Tensor(fused.dims())};
  double acc = 0.0;
  for (std::size_t k = 0; k < plane; ++k) {
    const double m = mask.mask[k];
    for (std::size_t ch = 0; ch < c; ++ch) {
      const std::size_t i = ch * plane + k;
      const double d = fused[i] - label[i];
      acc += d * d * m;
      l.grad_fused[i] = 2.0 * d * m / denom;
    }
  }
  l.value = finalize_scalar(acc / denom);
  return l;
}

void init_label_encoder_params(ParamStore& store, std::size_t classes, std::size_t channels, std::mt19937_64& rng) {
  add_conv(store, "label.conv", channels, label_attributes(classes), 3, rng, false);
}

Tensor label_splat(std::span<const Box3D> boxes, const BevGridSpec& grid, std::size_t classes) {
  const std::size_t na = label_attributes(classes);
  const std::size_t plane = grid.cells();
  Tensor s({na, grid.rows, grid.cols});
  std::vector<double> attr(na);
  for (const auto& b : boxes) {
    std::fill(attr.begin(), attr.end(), 0.0);
    if (b.cls >= 0 && static_cast<std::size_t>(b.cls) < classes) attr[static_cast<std::size_t>(b.cls)] = 1.0;
    attr[classes] = b.l;
    attr[classes + 1] = b.w;
    attr[classes + 2] = b.h;
    attr[classes + 3] = std::sin(b.yaw);
    attr[classes + 4] = std::cos(b.yaw);
    const BoxSigma sg = box_sigma(b, grid);
    const double cs = std::cos(b.yaw), sn = std::sin(b.yaw);
    for (std::size_t r = 0; r < grid.rows; ++r) {
      for (std::size_t c = 0; c < grid.cols; ++c) {
        const double dx = grid.center_x(r) - b.x, dy = grid.center_y(c) - b.y;
        const double along = (cs * dx + sn * dy) / sg.along;
        const double across = (-sn * dx + cs * dy) / sg.across;
        if (std::abs(along) > 3.0 || std::abs(across) > 3.0) continue;
        const double g = std::exp(-0.5 * (along * along + across * across));
        for (std::size_t a = 0; a < na; ++a) s[a * plane + r * grid.cols + c] += attr[a] * g;
      }
    }
  }
  return s.finalize();
}

Tensor label_encode(std::span<const Box3D> boxes, const BevGridSpec& grid, std::size_t classes,
                    const ParamStore& params) {
  return conv2d(label_splat(boxes, grid, classes), params.value("label.conv.w"), params.value("label.conv.b"));
}

}  // namespace fusionkd
