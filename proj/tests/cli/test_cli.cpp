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
#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "fusionkd/tensor.hpp"

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome cli(const std::string& args) {
  const fs::path log = fs::temp_directory_path() /
                       ("fusionkd_cli_" +
                        std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + ".log");
  const std::string cmd = std::string(FUSIONKD_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream is(log);
  std::stringstream ss;
  ss << is.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fusionkd_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

constexpr const char* kSmall = R"({"grid": {"rows": 8, "cols": 8}, "lr": 0.001, "steps": 3, "seed": 4})";

std::string scene_sidecar_name(const fs::path& scene) {
  return nlohmann::json::parse(slurp(scene))["camera_input"].get<std::string>();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

TEST_F(Cli, ZeroStepsWritesExactlyTheInitialRecord) {
  const auto cfg = write_config("c.json", R"({"grid": {"rows": 8, "cols": 8}, "steps": 0})");
  const auto r = cli("run --config " + cfg.string() + " --out " + (dir_ / "out").string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto lines = lines_of(slurp(dir_ / "out" / "metrics.jsonl"));
  ASSERT_EQ(lines.size(), 1u);
  const auto rec = nlohmann::json::parse(lines[0]);
  EXPECT_EQ(rec["step"], 0);
  for (const char* k : {"det", "depth", "igfm", "swfd", "swrd", "ld", "total"}) EXPECT_TRUE(rec.contains(k)) << k;
}

TEST_F(Cli, RunsAreByteReproducible) {
  const auto cfg = write_config("c.json", kSmall);
  ASSERT_EQ(cli("run --config " + cfg.string() + " --out " + (dir_ / "a").string()).code, 0);
  ASSERT_EQ(cli("run --config " + cfg.string() + " --out " + (dir_ / "b").string()).code, 0);
  EXPECT_EQ(lines_of(slurp(dir_ / "a" / "metrics.jsonl")).size(), 4u);
  auto settings = [&](const char* run) {
    auto j = nlohmann::json::parse(slurp(dir_ / run / "config.json"));
    j.erase("output_dir");
    return j.dump();
  };
  EXPECT_EQ(settings("a"), settings("b"));
  for (const std::string f : {"metrics.jsonl", "fused.imkd", "camera_bev.imkd", "radar_bev.imkd",
                              "cam_intensity.imkd", "radar_intensity.imkd", "lidar_intensity.imkd"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
}

TEST_F(Cli, DefaultRunHalvesTheLoss) {
  const auto cfg = write_config("c.json", "{}");
  const auto r = cli("run --config " + cfg.string() + " --out " + (dir_ / "out").string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto lines = lines_of(slurp(dir_ / "out" / "metrics.jsonl"));
  ASSERT_EQ(lines.size(), 201u);
  const double first = nlohmann::json::parse(lines.front())["total"];
  const double last = nlohmann::json::parse(lines.back())["total"];
  EXPECT_LE(last, 0.5 * first);
}

TEST_F(Cli, BadConfigExitsWithTwo) {
  const auto typo = write_config("typo.json", R"({"loss_weights": {"lambda_1": 0.3}})");
  const auto r = cli("run --config " + typo.string() + " --out " + (dir_ / "out").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("lambda_1"), std::string::npos) << r.out;
  EXPECT_EQ(cli("run --config " + (dir_ / "missing.json").string()).code, 2);
  const auto broken = write_config("broken.json", "{\"steps\": ");
  EXPECT_EQ(cli("run --config " + broken.string()).code, 2);
  EXPECT_EQ(cli("run").code, 2);
}

TEST_F(Cli, NonFiniteLossExitsWithThree) {
  const auto cfg = write_config("c.json", R"({"grid": {"rows": 8, "cols": 8}, "lr": 1e12, "steps": 5})");
  const auto r = cli("run --config " + cfg.string() + " --out " + (dir_ / "out").string());
  EXPECT_EQ(r.code, 3) << r.out;
}

TEST_F(Cli, CheckSuites) {
  const auto ok = cli("check oracles");
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_NE(ok.out.find("build_grid_oracle"), std::string::npos);
  EXPECT_EQ(cli("check everything").code, 2);
}

TEST_F(Cli, GradientReportsRepeat) {
  const auto a = cli("check gradients --seed 7");
  const auto b = cli("check gradients --seed 7");
  EXPECT_EQ(a.code, 0) << a.out;
  EXPECT_EQ(a.out, b.out);
}

TEST_F(Cli, GenSceneIsIdempotentAndParsesBack) {
  fs::create_directories(dir_ / "a");
  fs::create_directories(dir_ / "b");
  const auto p1 = dir_ / "a" / "s.json", p2 = dir_ / "b" / "s.json";
  ASSERT_EQ(cli("gen-scene --seed 0 --out " + p1.string()).code, 0);
  ASSERT_EQ(cli("gen-scene --seed 0 --out " + p2.string()).code, 0);
  EXPECT_EQ(slurp(p1), slurp(p2));
  EXPECT_EQ(slurp(dir_ / "a" / "s.camera.imkd"), slurp(dir_ / "b" / "s.camera.imkd"));
  EXPECT_EQ(scene_sidecar_name(p1), "s.camera.imkd");
  const auto j = nlohmann::json::parse(slurp(p1));
  EXPECT_EQ(j["seed"], 0);
  EXPECT_EQ(j["boxes"].size(), 4u);
  EXPECT_EQ(j["radar"][0].size(), 6u);
  EXPECT_EQ(j["lidar"][0].size(), 5u);
  EXPECT_EQ(j["boxes"][0].size(), 8u);
}

TEST_F(Cli, GenSceneHonorsObjectCount) {
  const auto cfg = write_config("c.json", R"({"scene": {"n_objects": 2}})");
  ASSERT_EQ(cli("gen-scene --seed 3 --config " + cfg.string() + " --out " + (dir_ / "s.json").string()).code, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir_ / "s.json"))["boxes"].size(), 2u);
}

TEST_F(Cli, GenSceneUnwritablePathExitsWithTwo) {
  EXPECT_EQ(cli("gen-scene --seed 0 --out /nonexistent/dir/s.json").code, 2);
}

TEST_F(Cli, DumpWritesNamedTensor) {
  const auto cfg = write_config("c.json", R"({"grid": {"rows": 8, "cols": 8}})");
  const auto out = dir_ / "f.imkd";
  ASSERT_EQ(cli("dump --what fused --config " + cfg.string() + " --out " + out.string()).code, 0);
  EXPECT_EQ(fusionkd::load_dump(out.string()).dims(), (fusionkd::Shape{8, 8, 8}));
  const auto lidar = dir_ / "l.imkd";
  ASSERT_EQ(cli("dump --what lidar_intensity --config " + cfg.string() + " --out " + lidar.string()).code, 0);
  EXPECT_EQ(fusionkd::load_dump(lidar.string()).dims(), (fusionkd::Shape{1, 8, 8}));
  EXPECT_EQ(cli("dump --what nothing --out " + out.string()).code, 2);
}

TEST_F(Cli, TeacherDumpFlag) {
  const auto cfg = write_config("c.json", R"({"grid": {"rows": 8, "cols": 8}, "steps": 0})");
  const auto feats = dir_ / "t.imkd";
  fusionkd::save_dump(feats.string(), fusionkd::Tensor({8, 8, 8}, 0.5));
  const auto out = dir_ / "lidar.imkd";
  ASSERT_EQ(cli("dump --what lidar_bev --config " + cfg.string() + " --teacher-dump " + feats.string() + " --out " +
                out.string())
                .code,
            0);
  EXPECT_EQ(fusionkd::load_dump(out.string()), fusionkd::Tensor({8, 8, 8}, 0.5));
  EXPECT_EQ(cli("run --config " + cfg.string() + " --teacher-dump " + (dir_ / "nope.imkd").string() + " --out " +
                (dir_ / "o").string())
                .code,
            2);
}

}  // namespace
