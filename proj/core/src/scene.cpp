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


#include "fusionkd/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace fusionkd {

namespace {

using nlohmann::json;

struct ClassProfile {
  double l, w, h;
  double speed_max;
  double rcs_lo, rcs_hi;
};

// car, pedestrian, cyclist
constexpr std::array<ClassProfile, 3> kProfiles = {{
    {4.5, 1.9, 1.6, 12.0, 5.0, 15.0},
    {0.8, 0.8, 1.7, 1.5, -10.0, -5.0},
    {1.8, 0.7, 1.5, 6.0, -5.0, 2.0},
}};

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
};

// A point on one of the four vertical faces or the roof of `b`.
LidarPoint surface_point(const Box3D& b, Sampler& s) {
  const std::size_t face = s.index(5);
  double u = 0, v = 0, z = 0;
  if (face < 4) {
    const double t = s.uniform(-0.5, 0.5);
    const double sign = (face % 2 == 0) ? 0.5 : -0.5;
    if (face < 2) {
      u = sign * b.l;
      v = t * b.w;
    } else {
      u = t * b.l;
      v = sign * b.w;
    }
    z = s.uniform(0.0, b.h);
  } else {
    u = s.uniform(-0.5, 0.5) * b.l;
    v = s.uniform(-0.5, 0.5) * b.w;
    z = b.h;
  }
  const double c = std::cos(b.yaw), sn = std::sin(b.yaw);
  LidarPoint p;
  p.x = b.x + c * u - sn * v;
  p.y = b.y + sn * u + c * v;
  p.z = z;
  p.intensity = ingest_lidar_intensity(s.integer(153, 229));
  p.t = s.uniform(0.0, 0.05);
  return p;
}

void clamp_xy(double& x, double& y, const BevGridSpec& g) {
  x = std::clamp(x, g.x_min, g.x_max);
  y = std::clamp(y, g.y_min, g.y_max);
}

// Soft occupancy, normalized depth, intensity and height per pixel.
Tensor render_camera(const std::vector<LidarPoint>& lidar, const CameraConfig& cam) {
  const std::size_t n = cam.n_views, ci = cam.in_channels, h = cam.img_h, w = cam.img_w;
  Tensor img({n, ci, h, w});
  std::vector<double> mass(n * h * w, 0.0);
  std::vector<std::array<double, 3>> attr(n * h * w, {0.0, 0.0, 0.0});
  for (const auto& p : lidar) {
    for (std::size_t v = 0; v < n; ++v) {
      const auto hit = project_to_view(cam, v, p.x, p.y, p.z);
      if (!hit) continue;
      const double depth = std::clamp((hit->depth - cam.d_min) / (cam.d_max - cam.d_min), 0.0, 1.0);
      const double height = std::clamp(p.z / 2.0, 0.0, 1.0);
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const long r = static_cast<long>(hit->row) + dr, c = static_cast<long>(hit->col) + dc;
          if (r < 0 || c < 0 || r >= static_cast<long>(h) || c >= static_cast<long>(w)) continue;
          const double k = std::exp(-0.5 * (dr * dr + dc * dc));
          const std::size_t idx = (v * h + static_cast<std::size_t>(r)) * w + static_cast<std::size_t>(c);
          mass[idx] += k;
          attr[idx][0] += k * depth;
          attr[idx][1] += k * p.intensity;
          attr[idx][2] += k * height;
        }
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t px = 0; px < h * w; ++px) {
      const std::size_t idx = v * h * w + px;
      const double m = mass[idx];
      const std::array<double, 4> ch = {1.0 - std::exp(-m), m > 0 ? attr[idx][0] / m : 0.0,
                                        m > 0 ? attr[idx][1] / m : 0.0, m > 0 ? attr[idx][2] / m : 0.0};
      for (std::size_t c = 0; c < ci; ++c) img[(v * ci + c) * h * w + px] = ch[c % 4];
    }
  }
  return img.finalize();
}

}  // namespace

void SceneConfig::validate() const {
  grid.validate();
  camera.validate();
  if (!(radius_min >= 0.0 && radius_max > radius_min)) throw std::invalid_argument("scene: need radius_max > radius_min >= 0");
  if (!(clutter_radius > 0.0)) throw std::invalid_argument("scene: clutter_radius must be positive");
  if (!(min_separation >= 0.0)) throw std::invalid_argument("scene: min_separation must be >= 0");
  if (classes == 0 || classes > kProfiles.size()) {
    throw std::invalid_argument("scene: classes must lie in [1, " + std::to_string(kProfiles.size()) + "]");
  }
  const double reach = std::min({-grid.x_min, grid.x_max, -grid.y_min, grid.y_max});
  if (!(reach > 0.0)) throw std::invalid_argument("scene: BEV range must contain the ego origin");
}

SceneSample generate_scene(std::uint64_t seed, const SceneConfig& cfg) {
  cfg.validate();
  Sampler s(seed);
  SceneSample out;
  out.seed = seed;

  for (std::size_t i = 0; i < cfg.n_objects; ++i) {
    Box3D b;
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double r = s.uniform(cfg.radius_min, cfg.radius_max);
      const double a = s.uniform(-std::numbers::pi, std::numbers::pi);
      b.x = r * std::cos(a);
      b.y = r * std::sin(a);
      const bool clear = std::none_of(out.boxes.begin(), out.boxes.end(), [&](const Box3D& o) {
        return std::hypot(o.x - b.x, o.y - b.y) < cfg.min_separation;
      });
      if (clear) break;
    }
    clamp_xy(b.x, b.y, cfg.grid);
    b.cls = static_cast<int>(s.index(cfg.classes));
    const ClassProfile& prof = kProfiles[static_cast<std::size_t>(b.cls)];
    b.l = prof.l * s.uniform(0.9, 1.1);
    b.w = prof.w * s.uniform(0.9, 1.1);
    b.h = prof.h * s.uniform(0.9, 1.1);
    b.z = b.h / 2.0;
    b.yaw = -s.uniform(-std::numbers::pi, std::numbers::pi);
    out.boxes.push_back(b);
  }

  for (const auto& b : out.boxes) {
    for (std::size_t k = 0; k < cfg.lidar_per_object; ++k) out.lidar.push_back(surface_point(b, s));
  }
  for (std::size_t k = 0; k < cfg.lidar_clutter; ++k) {
    const double r = cfg.clutter_radius * std::sqrt(s.uniform(0.0, 1.0));
    const double a = s.uniform(-std::numbers::pi, std::numbers::pi);
    LidarPoint p;
    p.x = r * std::cos(a);
    p.y = r * std::sin(a);
    p.z = s.uniform(-0.1, 0.1);
    p.intensity = ingest_lidar_intensity(s.integer(13, 76));
    p.t = s.uniform(0.0, 0.05);
    out.lidar.push_back(p);
  }
  for (auto& p : out.lidar) clamp_xy(p.x, p.y, cfg.grid);

  for (const auto& b : out.boxes) {
    const ClassProfile& prof = kProfiles[static_cast<std::size_t>(b.cls)];
    const double speed = s.uniform(0.0, prof.speed_max);
    const int hits = s.integer(1, 3);
    for (int k = 0; k < hits; ++k) {
      RadarPoint p;
      p.x = b.x + s.uniform(-0.5, 0.5);
      p.y = b.y + s.uniform(-0.5, 0.5);
      p.z = b.z + s.uniform(-0.2, 0.2);
      p.vx = speed * std::cos(b.yaw) + s.uniform(-0.2, 0.2);
      p.vy = speed * std::sin(b.yaw) + s.uniform(-0.2, 0.2);
      p.rcs = s.uniform(prof.rcs_lo, prof.rcs_hi);
      out.radar.push_back(p);
    }
  }
  for (std::size_t k = 0; k < cfg.radar_clutter; ++k) {
    const double r = cfg.clutter_radius * std::sqrt(s.uniform(0.0, 1.0));
    const double a = s.uniform(-std::numbers::pi, std::numbers::pi);
    RadarPoint p;
    p.x = r * std::cos(a);
    p.y = r * std::sin(a);
    p.z = s.uniform(0.0, 0.5);
    p.vx = s.uniform(-0.3, 0.3);
    p.vy = s.uniform(-0.3, 0.3);
    p.rcs = s.uniform(-20.0, -5.0);
    out.radar.push_back(p);
  }
  for (auto& p : out.radar) clamp_xy(p.x, p.y, cfg.grid);

  out.camera_input = render_camera(out.lidar, cfg.camera);
  return out;
}

std::string camera_sidecar_path(const std::string& scene_path) {
  std::filesystem::path p(scene_path);
  p.replace_extension(".camera.imkd");
  return p.string();
}

std::string save_scene(const std::string& path, const SceneSample& scene) {
  json j;
  j["seed"] = scene.seed;
  j["radar"] = json::array();
  for (const auto& p : scene.radar) j["radar"].push_back({p.x, p.y, p.z, p.vx, p.vy, p.rcs});
  j["lidar"] = json::array();
  for (const auto& p : scene.lidar) j["lidar"].push_back({p.x, p.y, p.z, p.intensity, p.t});
  j["boxes"] = json::array();
  for (const auto& b : scene.boxes) j["boxes"].push_back({b.x, b.y, b.z, b.l, b.w, b.h, b.yaw, b.cls});
  const std::string sidecar = camera_sidecar_path(path);
  j["camera_input"] = std::filesystem::path(sidecar).filename().string();

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << j.dump(1) << '\n';
  if (!os) throw std::runtime_error("failed writing " + path);
  save_dump(sidecar, scene.camera_input);
  return sidecar;
}

SceneSample load_scene(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  const json j = json::parse(is);
  SceneSample s;
  s.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& r : j.at("radar")) {
    require(r.size() == 6, "scene radar entries need 6 values");
    s.radar.push_back({r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>(),
                       r[4].get<double>(), r[5].get<double>()});
  }
  for (const auto& r : j.at("lidar")) {
    require(r.size() == 5, "scene lidar entries need 5 values");
    s.lidar.push_back({r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>(),
                       r[4].get<double>()});
  }
  for (const auto& r : j.at("boxes")) {
    require(r.size() == 8, "scene box entries need 8 values");
    s.boxes.push_back({r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>(),
                       r[4].get<double>(), r[5].get<double>(), r[6].get<double>(), r[7].get<int>()});
  }
  const auto sidecar = std::filesystem::path(path).parent_path() / j.at("camera_input").get<std::string>();
  s.camera_input = load_dump(sidecar.string());
  return s;
}

}  // namespace fusionkd
