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


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fusionkd/config.hpp"
#include "fusionkd/scene.hpp"
#include "fusionkd/teacher.hpp"
#include "fusionkd/training.hpp"
#include "test_util.hpp"

namespace fusionkd {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fusionkd_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(Scene, DeterministicAndInRange) {
  const SceneConfig cfg;
  const SceneSample a = generate_scene(5, cfg), b = generate_scene(5, cfg);
  EXPECT_EQ(a.camera_input, b.camera_input);
  ASSERT_EQ(a.radar.size(), b.radar.size());
  EXPECT_EQ(a.boxes.size(), cfg.n_objects);
  for (const auto& p : a.lidar) {
    EXPECT_LE(std::abs(p.x), 51.2);
    EXPECT_LE(std::abs(p.y), 51.2);
  }
  EXPECT_NE(generate_scene(6, cfg).camera_input, a.camera_input);
}

TEST(Scene, NoObjectsMeansOnlyClutter) {
  SceneConfig cfg;
  cfg.n_objects = 0;
  const SceneSample s = generate_scene(1, cfg);
  EXPECT_TRUE(s.boxes.empty());
  EXPECT_EQ(s.lidar.size(), cfg.lidar_clutter);
}

TEST(Scene, InvalidRangeIsRejected) {
  SceneConfig cfg;
  cfg.radius_max = cfg.radius_min;
  EXPECT_THROW(generate_scene(0, cfg), std::invalid_argument);
}

TEST(Scene, FileRoundTripIsLossless) {
  const fs::path dir = scratch_dir("scene_rt");
  const std::string path = (dir / "s.json").string();
  const SceneSample s = generate_scene(0, SceneConfig{});
  EXPECT_EQ(save_scene(path, s), camera_sidecar_path(path));
  EXPECT_EQ(camera_sidecar_path("a/b.json"), "a/b.camera.imkd");
  const SceneSample r = load_scene(path);
  EXPECT_EQ(r.seed, s.seed);
  EXPECT_EQ(r.camera_input, s.camera_input);
  ASSERT_EQ(r.lidar.size(), s.lidar.size());
  for (std::size_t i = 0; i < s.lidar.size(); ++i) {
    EXPECT_EQ(r.lidar[i].x, s.lidar[i].x);
    EXPECT_EQ(r.lidar[i].intensity, s.lidar[i].intensity);
  }
  ASSERT_EQ(r.boxes.size(), s.boxes.size());
  for (std::size_t i = 0; i < s.boxes.size(); ++i) {
    EXPECT_EQ(r.boxes[i].yaw, s.boxes[i].yaw);
    EXPECT_EQ(r.boxes[i].cls, s.boxes[i].cls);
  }
  ASSERT_EQ(r.radar.size(), s.radar.size());
  for (std::size_t i = 0; i < s.radar.size(); ++i) EXPECT_EQ(r.radar[i].rcs, s.radar[i].rcs);
  fs::remove_all(dir);
}

TEST(Teacher, ParametersAreFrozenAndOutputsStable) {
  std::mt19937_64 rng(31);
  ParamStore ps;
  init_teacher_params(ps, 4, HeadConfig{}, rng);
  EXPECT_TRUE(ps.trainable_names().empty());
  BevGridSpec g;
  g.rows = g.cols = 8;
  const SceneSample s = generate_scene(2, SceneConfig{});
  const TeacherBundle a = teacher_forward(s.lidar, VoxelSpec{}, g, ps);
  EXPECT_EQ(a.f_lidar.dims(), (Shape{4, 8, 8}));
  EXPECT_EQ(teacher_forward(s.lidar, VoxelSpec{}, g, ps).f_lidar, a.f_lidar);
  EXPECT_THROW(teacher_from_features(Tensor({3, 8, 8}), ps), std::invalid_argument);
}

TEST(Config, DefaultsMatchTheToyScale) {
  const RunConfig c = parse_run_config("{}");
  EXPECT_EQ(c.model.grid.rows, 32u);
  EXPECT_DOUBLE_EQ(c.model.grid.x_max, 51.2);
  EXPECT_DOUBLE_EQ(c.model.voxel.size_x, 0.1);
  EXPECT_DOUBLE_EQ(c.model.voxel.size_z, 0.2);
  EXPECT_DOUBLE_EQ(c.model.weights.l1, 0.3);
  EXPECT_DOUBLE_EQ(c.model.weights.lambda3_init, 100.0);
  EXPECT_EQ(c.steps, 200u);
  EXPECT_EQ(c.precision, Precision::f32);
}

TEST(Config, UnknownKeysAndWrongTypesAreErrors) {
  EXPECT_THROW(parse_run_config(R"({"loss_weights": {"lamda1": 0.3}})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"steps": "ten"})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"steps": -1})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"precision": "f16"})"), ConfigError);
  EXPECT_THROW(parse_run_config("{not json"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"grid": {"rows": 0}})"), ConfigError);
  EXPECT_THROW(load_run_config("/nonexistent/fusionkd.json"), ConfigError);
}

TEST(Config, DumpParsesBackToTheSameConfig) {
  RunConfig c = parse_run_config(R"({"grid": {"rows": 16, "cols": 12}, "lr": 0.002, "seed": 9,
                                     "precision": "f64", "scene": {"n_objects": 2}})");
  const std::string text = dump_run_config(c);
  const RunConfig r = parse_run_config(text);
  EXPECT_EQ(dump_run_config(r), text);
  EXPECT_EQ(r.model.grid.cols, 12u);
  EXPECT_EQ(r.scene.grid.cols, 12u);
  EXPECT_EQ(r.scene.n_objects, 2u);
  EXPECT_EQ(r.precision, Precision::f64);
}

TEST(Training, ZeroStepsRecordsOnlyTheInitialLoss) {
  RunConfig c;
  c.model.grid.rows = c.model.grid.cols = 8;
  c.steps = 0;
  c.sync();
  const TrainResult r = train(c);
  ASSERT_EQ(r.history.size(), 1u);
  EXPECT_EQ(r.history[0].total, r.last.loss.total);
}

TEST(Training, MetricsRecordKeyOrder) {
  const std::string rec = metrics_record(3, LossBreakdown{1, 2, 3, 4, 5, 6, 21});
  const std::vector<std::string> keys = {"\"step\"", "\"det\"", "\"depth\"", "\"igfm\"",
                                         "\"swfd\"", "\"swrd\"", "\"ld\"",    "\"total\""};
  std::size_t at = 0;
  for (const auto& k : keys) {
    const std::size_t pos = rec.find(k);
    ASSERT_NE(pos, std::string::npos) << k;
    EXPECT_GE(pos, at);
    at = pos;
  }
  EXPECT_EQ(rec.find('\n'), std::string::npos);
}

TEST(Training, RunWritesMetricsConfigAndDumps) {
  const fs::path dir = scratch_dir("run_dir");
  RunConfig c;
  c.model.grid.rows = c.model.grid.cols = 8;
  c.steps = 2;
  c.lr = 1e-3;
  c.sync();
  run_to_directory(c, dir.string());
  std::ifstream m(dir / "metrics.jsonl");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(m, line)) ++lines;
  EXPECT_EQ(lines, 3u);
  EXPECT_TRUE(fs::exists(dir / "config.json"));
  for (const auto& name : dump_names()) EXPECT_TRUE(fs::exists(dir / (name + ".imkd"))) << name;
  EXPECT_EQ(load_dump((dir / "fused.imkd").string()).dims(), (Shape{8, 8, 8}));
  fs::remove_all(dir);
}

TEST(Training, TeacherDumpReplacesTheStubEncoder) {
  const fs::path dir = scratch_dir("teacher_dump");
  RunConfig c;
  c.model.grid.rows = c.model.grid.cols = 8;
  c.steps = 0;
  c.sync();
  const Tensor feats({8, 8, 8}, 0.25);
  save_dump((dir / "t.imkd").string(), feats);
  c.teacher_dump = (dir / "t.imkd").string();
  EXPECT_EQ(dump_tensor(train(c), "lidar_bev"), feats);
  save_dump((dir / "bad.imkd").string(), Tensor({3, 8, 8}));
  c.teacher_dump = (dir / "bad.imkd").string();
  EXPECT_THROW(train(c), std::invalid_argument);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace fusionkd
