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

#pragma once

#include <cstddef>
#include <optional>

namespace fusionkd {

struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Metric-to-cell mapping for the BEV plane. Rows index x, columns index y.
/// Cells are half-open [edge, edge + step) except the last one, which also
/// takes the closing edge.
struct BevGridSpec {
  double x_min = -51.2;
  double x_max = 51.2;
  double y_min = -51.2;
  double y_max = 51.2;
  std::size_t rows = 32;
  std::size_t cols = 32;

  double step_x() const { return (x_max - x_min) / static_cast<double>(rows); }
  double step_y() const { return (y_max - y_min) / static_cast<double>(cols); }
  std::size_t cells() const { return rows * cols; }

  std::optional<Cell> cell_of(double x, double y) const;
  double center_x(std::size_t row) const { return x_min + (static_cast<double>(row) + 0.5) * step_x(); }
  double center_y(std::size_t col) const { return y_min + (static_cast<double>(col) + 0.5) * step_y(); }

  /// Throws std::invalid_argument when extents or counts are degenerate.
  void validate() const;
};

struct VoxelSpec {
  double size_x = 0.1;
  double size_y = 0.1;
  double size_z = 0.2;
  double z_min = -5.0;
  double z_max = 3.0;

  void validate() const;
};

struct RadarPoint {
  double x = 0, y = 0, z = 0;
  double vx = 0, vy = 0;  // ego-compensated Doppler components, m/s
  double rcs = 0;         // dBsm
};

struct LidarPoint {
  double x = 0, y = 0, z = 0;
  double intensity = 0;  // normalized to [0, 1] on ingest
  double t = 0;
};

/// Raw 8-bit LiDAR reflectance to [0, 1].
inline double ingest_lidar_intensity(double raw) { return raw / 255.0; }

struct Box3D {
  double x = 0, y = 0, z = 0;
  double l = 1, w = 1, h = 1;
  double yaw = 0;
  int cls = 0;
};

struct BoxSigma {
  double along = 1.0;   // along the heading
  double across = 1.0;  // perpendicular to the heading
};

/// Gaussian spread of a box footprint: extent / 3 per axis, floored at one cell.
BoxSigma box_sigma(const Box3D& box, const BevGridSpec& grid);

/// exp(-((d_along / s_along)^2 + (d_across / s_across)^2) / 2) of (x, y)
/// relative to (cx, cy) in the frame of the box heading.
double box_gaussian(const Box3D& box, double cx, double cy, double x, double y, const BevGridSpec& grid);

}  // namespace fusionkd
