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


#include "fusionkd/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include "json.hpp"

namespace fusionkd {

namespace {

using nlohmann::json;

// Walks one JSON object, binding keys to fields and rejecting leftovers.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  template <typename T>
  void bind(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw ConfigError("expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) throw ConfigError("expected an integer");
        if (std::is_unsigned_v<T> && !it->is_number_unsigned()) throw ConfigError("expected a non-negative integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) throw ConfigError("expected a number");
      } else {
        if (!it->is_string()) throw ConfigError("expected a string");
      }
      out = it->template get<T>();
    } catch (const ConfigError& e) {
      throw ConfigError(where() + "." + key + ": " + e.what());
    }
  }

  Section child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    static const json kEmpty = json::object();
    return Section(it == j_.end() ? kEmpty : *it, path_.empty() ? key : path_ + "." + key);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError("unknown key " + (path_.empty() ? k : path_ + "." + k));
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Visitor>
void visit(RunConfig& c, Visitor&& v) {
  ModelConfig& m = c.model;
  {
    auto s = v.child("grid");
    s.bind("x_min", m.grid.x_min);
    s.bind("x_max", m.grid.x_max);
    s.bind("y_min", m.grid.y_min);
    s.bind("y_max", m.grid.y_max);
    s.bind("rows", m.grid.rows);
    s.bind("cols", m.grid.cols);
    s.finish();
  }
  {
    auto s = v.child("voxel");
    s.bind("size_x", m.voxel.size_x);
    s.bind("size_y", m.voxel.size_y);
    s.bind("size_z", m.voxel.size_z);
    s.bind("z_min", m.voxel.z_min);
    s.bind("z_max", m.voxel.z_max);
    s.finish();
  }
  std::size_t channels = m.channels();
  v.bind("channels", channels);
  m.set_channels(channels);
  {
    auto s = v.child("camera");
    s.bind("n_views", m.camera.n_views);
    s.bind("in_channels", m.camera.in_channels);
    s.bind("backbone_channels", m.camera.backbone_channels);
    s.bind("img_h", m.camera.img_h);
    s.bind("img_w", m.camera.img_w);
    s.bind("depth_bins", m.camera.depth_bins);
    s.bind("d_min", m.camera.d_min);
    s.bind("d_max", m.camera.d_max);
    s.bind("focal", m.camera.focal);
    s.bind("mount_height", m.camera.mount_height);
    s.finish();
  }
  {
    auto s = v.child("radar");
    s.bind("hidden", m.radar.hidden);
    s.bind("residual_blocks", m.radar.residual_blocks);
    s.bind("rcs_min", m.radar.rcs_min);
    s.bind("rcs_max", m.radar.rcs_max);
    s.finish();
  }
  {
    auto s = v.child("fusion");
    s.bind("points", m.fusion.points);
    s.bind("offset_scale", m.fusion.offset_scale);
    s.bind("residual", m.fusion.residual);
    s.finish();
  }
  {
    auto s = v.child("intensity");
    s.bind("alpha_rcs", m.intensity.alpha_rcs);
    s.bind("beta_vel", m.intensity.beta_vel);
    s.finish();
  }
  {
    auto s = v.child("head");
    s.bind("classes", m.head.classes);
    s.bind("hidden", m.head.hidden);
    s.bind("heatmap_prior", m.head.heatmap_prior);
    s.finish();
  }
  {
    auto s = v.child("loss_weights");
    s.bind("l1", m.weights.l1);
    s.bind("l2", m.weights.l2);
    s.bind("l4", m.weights.l4);
    s.bind("l5", m.weights.l5);
    s.bind("l6", m.weights.l6);
    s.bind("alpha_igfm", m.weights.alpha_igfm);
    s.bind("lambda3_init", m.weights.lambda3_init);
    s.bind("lambda_blend_init", m.weights.lambda_blend_init);
    s.finish();
  }
  {
    auto s = v.child("scene");
    s.bind("n_objects", c.scene.n_objects);
    s.bind("radius_min", c.scene.radius_min);
    s.bind("radius_max", c.scene.radius_max);
    s.bind("min_separation", c.scene.min_separation);
    s.bind("lidar_per_object", c.scene.lidar_per_object);
    s.bind("lidar_clutter", c.scene.lidar_clutter);
    s.bind("clutter_radius", c.scene.clutter_radius);
    s.bind("radar_clutter", c.scene.radar_clutter);
    s.finish();
  }
  v.bind("lr", c.lr);
  v.bind("steps", c.steps);
  v.bind("seed", c.seed);
  std::string precision = c.precision == Precision::f32 ? "f32" : "f64";
  v.bind("precision", precision);
  if (precision == "f32") {
    c.precision = Precision::f32;
  } else if (precision == "f64") {
    c.precision = Precision::f64;
  } else {
    throw ConfigError("precision must be \"f32\" or \"f64\", got \"" + precision + "\"");
  }
  v.bind("output_dir", c.output_dir);
  v.bind("teacher_dump", c.teacher_dump);
  v.finish();
}

// Mirror of Section that writes every field out.
class Writer {
 public:
  explicit Writer(json& j) : j_(j) {}
  template <typename T>
  void bind(const char* key, T& v) {
    j_[key] = v;
  }
  Writer child(const char* key) {
    j_[key] = json::object();
    return Writer(j_[key]);
  }
  void finish() const {}

 private:
  json& j_;
};

}  // namespace

void RunConfig::sync() {
  scene.grid = model.grid;
  scene.camera = model.camera;
  scene.classes = model.head.classes;
}

void RunConfig::validate() const {
  model.validate();
  scene.validate();
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be finite and >= 0");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  Section root(j, "");
  visit(c, root);
  c.sync();
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str());
}

std::string dump_run_config(const RunConfig& cfg) {
  RunConfig c = cfg;
  json j = json::object();
  Writer w(j);
  visit(c, w);
  return j.dump(2);
}

}  // namespace fusionkd
