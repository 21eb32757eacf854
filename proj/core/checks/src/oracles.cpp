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


#include "fusionkd/checks/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace fusionkd::oracle {

double compensated_sum(std::span<const double> values) {
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b) {
  const std::size_t k = w.dim(0), m = w.dim(1), rows = x.size() / k;
  Shape dims = x.dims();
  dims.back() = m;
  Tensor y(dims);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < m; ++j) {
      double acc = b[j];
      for (std::size_t i = 0; i < k; ++i) acc += x[r * k + i] * w[i * m + j];
      y[r * m + j] = acc;
    }
  }
  return y;
}

Tensor conv2d(const Tensor& x, const Tensor& k, const Tensor& b) {
  const long ci = static_cast<long>(x.dim(0)), h = static_cast<long>(x.dim(1)), w = static_cast<long>(x.dim(2));
  const long co = static_cast<long>(k.dim(0)), kh = static_cast<long>(k.dim(2)), kw = static_cast<long>(k.dim(3));
  Tensor y({static_cast<std::size_t>(co), x.dim(1), x.dim(2)});
  for (long o = 0; o < co; ++o) {
    for (long r = 0; r < h; ++r) {
      for (long c = 0; c < w; ++c) {
        double acc = b[static_cast<std::size_t>(o)];
        for (long i = 0; i < ci; ++i) {
          for (long dr = 0; dr < kh; ++dr) {
            for (long dc = 0; dc < kw; ++dc) {
              const long rr = r + dr - kh / 2, cc = c + dc - kw / 2;
              if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
              acc += x.at(i, rr, cc) * k.at(o, i, dr, dc);
            }
          }
        }
        y.at(o, r, c) = acc;
      }
    }
  }
  return y;
}

Tensor max_pool(const std::vector<Tensor>& vectors, std::size_t length) {
  Tensor out({length});
  for (std::size_t i = 0; i < length; ++i) {
    if (vectors.empty()) continue;
    double m = vectors[0][i];
    for (const auto& v : vectors) m = std::max(m, v[i]);
    out[i] = m;
  }
  return out;
}

Tensor bilinear(const Tensor& map, double u, double v) {
  const std::size_t c = map.dim(0);
  const long h = static_cast<long>(map.dim(1)), w = static_cast<long>(map.dim(2));
  const double r0 = std::floor(u), c0 = std::floor(v);
  const double fr = u - r0, fc = v - c0;
  auto read = [&](std::size_t ch, double r, double col) {
    const long ri = static_cast<long>(r), ci = static_cast<long>(col);
    if (ri < 0 || ri >= h || ci < 0 || ci >= w) return 0.0;
    return map.at(ch, ri, ci);
  };
  Tensor out({c});
  for (std::size_t ch = 0; ch < c; ++ch) {
    out[ch] = (1 - fr) * (1 - fc) * read(ch, r0, c0) + (1 - fr) * fc * read(ch, r0, c0 + 1) +
              fr * (1 - fc) * read(ch, r0 + 1, c0) + fr * fc * read(ch, r0 + 1, c0 + 1);
  }
  return out;
}

Tensor outer(const Tensor& c, const Tensor& p) {
  Tensor out({c.size(), p.size()});
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t d = 0; d < p.size(); ++d) out.at(i, d) = c[i] * p[d];
  }
  return out;
}

namespace {

std::optional<std::size_t> scan(double v, double lo, double hi, std::size_t n) {
  const double step = (hi - lo) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = lo + static_cast<double>(i) * step;
    const double b = (i + 1 == n) ? hi : lo + static_cast<double>(i + 1) * step;
    if (v >= a && (v < b || (i + 1 == n && v == hi))) return i;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Cell> cell(double x, double y, const BevGridSpec& grid) {
  const auto r = scan(x, grid.x_min, grid.x_max, grid.rows);
  const auto c = scan(y, grid.y_min, grid.y_max, grid.cols);
  if (!r || !c) return std::nullopt;
  return Cell{*r, *c};
}

GridMaps build_grid(std::span<const RadarPoint> points, const std::vector<Tensor>& embeddings,
                    const BevGridSpec& grid, std::size_t channels) {
  GridMaps g{Tensor({channels, grid.rows, grid.cols}), Tensor({1, grid.rows, grid.cols})};
  for (std::size_t r = 0; r < grid.rows; ++r) {
    for (std::size_t c = 0; c < grid.cols; ++c) {
      std::vector<Tensor> members;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const auto k = cell(points[i].x, points[i].y, grid);
        if (k && k->row == r && k->col == c) members.push_back(embeddings[i]);
      }
      if (members.empty()) continue;
      g.occupancy.at(0, r, c) = 1.0;
      const Tensor m = max_pool(members, channels);
      for (std::size_t ch = 0; ch < channels; ++ch) g.features.at(ch, r, c) = m[ch];
    }
  }
  return g;
}

Tensor lidar_intensity(std::span<const LidarPoint> points, const VoxelSpec& voxel, const BevGridSpec& grid) {
  struct Voxel {
    long ix, iy, iz;
    std::vector<double> values;
  };
  std::vector<Voxel> voxels;
  for (const auto& p : points) {
    if (p.z < voxel.z_min || p.z >= voxel.z_max) continue;
    const long ix = static_cast<long>(std::floor((p.x - grid.x_min) / voxel.size_x));
    const long iy = static_cast<long>(std::floor((p.y - grid.y_min) / voxel.size_y));
    const long iz = static_cast<long>(std::floor((p.z - voxel.z_min) / voxel.size_z));
    auto it = std::find_if(voxels.begin(), voxels.end(),
                           [&](const Voxel& v) { return v.ix == ix && v.iy == iy && v.iz == iz; });
    if (it == voxels.end()) {
      voxels.push_back({ix, iy, iz, {}});
      it = std::prev(voxels.end());
    }
    it->values.push_back(p.intensity);
  }
  Tensor out({1, grid.rows, grid.cols});
  for (std::size_t r = 0; r < grid.rows; ++r) {
    for (std::size_t c = 0; c < grid.cols; ++c) {
      std::vector<double> means;
      for (const auto& v : voxels) {
        const double cx = grid.x_min + (static_cast<double>(v.ix) + 0.5) * voxel.size_x;
        const double cy = grid.y_min + (static_cast<double>(v.iy) + 0.5) * voxel.size_y;
        const auto k = cell(cx, cy, grid);
        if (!k || k->row != r || k->col != c) continue;
        means.push_back(compensated_sum(v.values) / static_cast<double>(v.values.size()));
      }
      if (!means.empty()) out.at(0, r, c) = compensated_sum(means) / static_cast<double>(means.size());
    }
  }
  return out;
}

Tensor splat(const Tensor& frustum, const CameraConfig& cfg, const BevGridSpec& grid) {
  const std::size_t n = frustum.dim(0), ch = frustum.dim(1), d = frustum.dim(2), h = frustum.dim(3),
                    w = frustum.dim(4);
  Tensor out({ch, grid.rows, grid.cols});
  for (std::size_t v = 0; v < n; ++v) {
    const ViewPose pose = cfg.pose(v);
    for (std::size_t b = 0; b < d; ++b) {
      const double depth = cfg.d_min + (static_cast<double>(b) + 0.5) * (cfg.d_max - cfg.d_min) / static_cast<double>(d);
      for (std::size_t col = 0; col < w; ++col) {
        const double theta = std::atan((static_cast<double>(w) / 2.0 - static_cast<double>(col) - 0.5) / cfg.focal);
        const double range = depth / std::cos(theta);
        const double x = pose.tx + range * std::cos(pose.yaw + theta);
        const double y = pose.ty + range * std::sin(pose.yaw + theta);
        const auto k = cell(x, y, grid);
        if (!k) continue;
        for (std::size_t c = 0; c < ch; ++c) {
          for (std::size_t r = 0; r < h; ++r) out.at(c, k->row, k->col) += frustum.at(v, c, b, r, col);
        }
      }
    }
  }
  return out;
}

Attention deform_attn(const Tensor& radar, const Tensor& camera, const Tensor& cam_intensity,
                      const Tensor& radar_intensity, const AttentionParams& p) {
  const std::size_t c = radar.dim(0), h = radar.dim(1), w = radar.dim(2), np = p.offset_b.size() / 2;
  Attention a{Tensor(radar.dims()), std::vector<double>(h * w * np)};
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t col = 0; col < w; ++col) {
      std::vector<double> q(c);
      for (std::size_t ch = 0; ch < c; ++ch) q[ch] = radar.at(ch, r, col);
      const double g_off = p.gated ? sigmoid(p.gate_off_w * radar_intensity.at(0, r, col) + p.gate_off_b) : 1.0;
      std::vector<double> logits(np);
      std::vector<Tensor> values;
      for (std::size_t j = 0; j < np; ++j) {
        double du = p.offset_b[2 * j], dv = p.offset_b[2 * j + 1];
        for (std::size_t ch = 0; ch < c; ++ch) {
          du += q[ch] * p.offset_w.at(ch, 2 * j);
          dv += q[ch] * p.offset_w.at(ch, 2 * j + 1);
        }
        const double u = static_cast<double>(r) + p.offset_scale * g_off * du;
        const double v = static_cast<double>(col) + p.offset_scale * g_off * dv;
        values.push_back(bilinear(camera, u, v));
        const double g_attn = p.gated ? sigmoid(p.gate_attn_w * bilinear(cam_intensity, u, v)[0] + p.gate_attn_b) : 1.0;
        double dot = 0.0;
        for (std::size_t ch = 0; ch < c; ++ch) dot += q[ch] * values.back()[ch];
        logits[j] = dot / std::sqrt(static_cast<double>(c)) * g_attn;
      }
      double z = 0.0;
      for (double l : logits) z += std::exp(l);
      for (std::size_t j = 0; j < np; ++j) {
        const double wj = std::exp(logits[j]) / z;
        a.weights[(r * w + col) * np + j] = wj;
        for (std::size_t ch = 0; ch < c; ++ch) a.output.at(ch, r, col) += wj * values[j][ch];
      }
      if (p.residual) {
        for (std::size_t ch = 0; ch < c; ++ch) a.output.at(ch, r, col) += q[ch];
      }
    }
  }
  return a;
}

double det_loss(const HeadOutput& pred, std::span<const Box3D> boxes, const BevGridSpec& grid) {
  const std::size_t k = pred.heatmap.dim(0);
  const double sx = (grid.x_max - grid.x_min) / static_cast<double>(grid.rows);
  const double sy = (grid.y_max - grid.y_min) / static_cast<double>(grid.cols);
  double focal = 0.0;
  std::size_t positives = 0;
  for (std::size_t cls = 0; cls < k; ++cls) {
    for (std::size_t r = 0; r < grid.rows; ++r) {
      for (std::size_t c = 0; c < grid.cols; ++c) {
        double y = 0.0;
        for (const auto& b : boxes) {
          const auto center = cell(b.x, b.y, grid);
          if (!center || b.cls != static_cast<int>(cls)) continue;
          double g = 1.0;
          if (center->row != r || center->col != c) {
            const double dx = (static_cast<double>(r) - static_cast<double>(center->row)) * sx;
            const double dy = (static_cast<double>(c) - static_cast<double>(center->col)) * sy;
            const double sa = std::max(b.l / 3.0, std::max(sx, sy));
            const double sc = std::max(b.w / 3.0, std::max(sx, sy));
            const double along = (std::cos(b.yaw) * dx + std::sin(b.yaw) * dy) / sa;
            const double across = (-std::sin(b.yaw) * dx + std::cos(b.yaw) * dy) / sc;
            g = std::exp(-0.5 * (along * along + across * across));
          }
          y = std::max(y, g);
        }
        const double p = pred.heatmap.at(cls, r, c);
        if (y == 1.0) {
          ++positives;
          focal += -(1 - p) * (1 - p) * std::log(p);
        } else {
          focal += -std::pow(1 - y, 4) * p * p * std::log(1 - p);
        }
      }
    }
  }
  double l1 = 0.0;
  std::size_t n = 0;
  for (const auto& b : boxes) {
    const auto center = cell(b.x, b.y, grid);
    if (!center) continue;
    ++n;
    const double lo_x = grid.x_min + static_cast<double>(center->row) * sx;
    const double lo_y = grid.y_min + static_cast<double>(center->col) * sy;
    const double t[8] = {(b.x - lo_x) / sx, (b.y - lo_y) / sy, b.z,           std::log(b.l),
                         std::log(b.w),     std::log(b.h),     std::sin(b.yaw), std::cos(b.yaw)};
    for (std::size_t i = 0; i < 8; ++i) l1 += std::abs(pred.bbox.at(i, center->row, center->col) - t[i]);
  }
  return focal / std::max<double>(1.0, static_cast<double>(positives)) + l1 / std::max<double>(1.0, static_cast<double>(n));
}

}  // namespace fusionkd::oracle
