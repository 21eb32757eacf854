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

#include "fusionkd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fusionkd {

namespace {

std::optional<std::size_t> bin_of(double v, double lo, double hi, std::size_t n) {
  if (!(v >= lo && v <= hi)) return std::nullopt;
  if (v == hi) return n - 1;
  auto i = static_cast<std::size_t>(std::floor((v - lo) / (hi - lo) * static_cast<double>(n)));
  return i < n ? i : n - 1;
}

}  // namespace

std::optional<Cell> BevGridSpec::cell_of(double x, double y) const {
  const auto r = bin_of(x, x_min, x_max, rows);
  const auto c = bin_of(y, y_min, y_max, cols);
  if (!r || !c) return std::nullopt;
  return Cell{*r, *c};
}

void BevGridSpec::validate() const {
  if (!(x_max > x_min) || !(y_max > y_min)) throw std::invalid_argument("BEV grid range is empty");
  if (rows == 0 || cols == 0) throw std::invalid_argument("BEV grid needs at least one cell");
}

void VoxelSpec::validate() const {
  if (!(size_x > 0 && size_y > 0 && size_z > 0)) throw std::invalid_argument("voxel extents must be positive");
  if (!(z_max > z_min)) throw std::invalid_argument("voxel z range is empty");
}

BoxSigma box_sigma(const Box3D& box, const BevGridSpec& grid) {
  const double floor = std::max(grid.step_x(), grid.step_y());
  return {std::max(box.l / 3.0, floor), std::max(box.w / 3.0, floor)};
}

double box_gaussian(const Box3D& box, double cx, double cy, double x, double y, const BevGridSpec& grid) {
  const BoxSigma s = box_sigma(box, grid);
  const double dx = x - cx, dy = y - cy;
  const double c = std::cos(box.yaw), sn = std::sin(box.yaw);
  const double along = (c * dx + sn * dy) / s.along;
  const double across = (-sn * dx + c * dy) / s.across;
  return std::exp(-0.5 * (along * along + across * across));
}

}  // namespace fusionkd
