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


#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "fusionkd/checks/checks.hpp"
#include "fusionkd/config.hpp"
#include "fusionkd/scene.hpp"
#include "fusionkd/training.hpp"

namespace {

constexpr int kUsage = 2;
constexpr int kNumeric = 3;

fusionkd::RunConfig config_or_default(const std::string& path) {
  fusionkd::RunConfig cfg = path.empty() ? fusionkd::RunConfig{} : fusionkd::load_run_config(path);
  cfg.sync();
  return cfg;
}

int cmd_run(const std::string& config, const std::string& out, const std::string& teacher_dump) {
  fusionkd::RunConfig cfg = config_or_default(config);
  if (!teacher_dump.empty()) cfg.teacher_dump = teacher_dump;
  if (!out.empty()) cfg.output_dir = out;
  const auto run = fusionkd::run_to_directory(cfg, cfg.output_dir);
  const auto& first = run.history.front();
  const auto& last = run.history.back();
  std::cout << "steps " << run.history.size() - 1 << ", total " << first.total << " -> " << last.total << ", wrote "
            << cfg.output_dir << "\n";
  return 0;
}

int cmd_check(const std::string& suite, std::uint64_t seed) {
  if (!fusionkd::checks::is_suite(suite)) {
    std::cerr << "unknown suite '" << suite << "' (oracles, gradients, invariants, all)\n";
    return kUsage;
  }
  fusionkd::checks::Context ctx;
  ctx.seed = seed;
  const auto results = fusionkd::checks::run_suite(suite, ctx);
  std::cout << fusionkd::checks::format_report(results);
  return fusionkd::checks::all_passed(results) ? 0 : 1;
}

int cmd_gen_scene(std::uint64_t seed, const std::string& out, const std::string& config) {
  const fusionkd::RunConfig cfg = config_or_default(config);
  const auto scene = fusionkd::generate_scene(seed, cfg.scene);
  const std::string sidecar = fusionkd::save_scene(out, scene);
  std::cout << "wrote " << out << " and " << sidecar << "\n";
  return 0;
}

int cmd_dump(const std::string& what, const std::string& out, const std::string& config,
             std::optional<std::uint64_t> seed, const std::string& teacher_dump) {
  fusionkd::RunConfig cfg = config_or_default(config);
  if (!teacher_dump.empty()) cfg.teacher_dump = teacher_dump;
  if (seed) cfg.seed = *seed;
  cfg.steps = 0;
  const auto run = fusionkd::train(cfg);
  fusionkd::PrecisionScope scope(cfg.precision);
  fusionkd::save_dump(out, fusionkd::dump_tensor(run, what));
  std::cout << "wrote " << what << " to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fusionkd: intensity-guided camera-radar BEV fusion with distillation"};
  app.require_subcommand(1);

  std::string config, out, teacher_dump, suite, what;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> dump_seed;

  auto* run = app.add_subcommand("run", "Train on a synthetic scene and write metrics and tensor dumps");
  run->add_option("--config", config, "JSON run configuration")->required();
  run->add_option("--out", out, "Output directory (overrides output_dir)");
  run->add_option("--teacher-dump", teacher_dump, "LiDAR feature dump replacing the stub teacher encoder");

  auto* check = app.add_subcommand("check", "Run a property suite and print a pass/fail table");
  check->add_option("suite", suite, "oracles, gradients, invariants or all")->required();
  check->add_option("--seed", seed, "Seed for randomized instances");

  auto* gen = app.add_subcommand("gen-scene", "Write a synthetic scene and its camera tensor dump");
  gen->add_option("--seed", seed, "Scene seed")->required();
  gen->add_option("--out", out, "Scene JSON path")->required();
  gen->add_option("--config", config, "JSON run configuration for scene settings");

  auto* dump = app.add_subcommand("dump", "Write one named tensor of the step-0 forward pass");
  dump->add_option("--what", what, "Tensor name")->required()->check(CLI::IsMember(fusionkd::dump_names()));
  dump->add_option("--out", out, "Dump path")->required();
  dump->add_option("--config", config, "JSON run configuration");
  dump->add_option("--seed", dump_seed, "Override the configured seed");
  dump->add_option("--teacher-dump", teacher_dump, "LiDAR feature dump replacing the stub teacher encoder");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*run) return cmd_run(config, out, teacher_dump);
    if (*check) return cmd_check(suite, seed);
    if (*gen) return cmd_gen_scene(seed, out, config);
    if (*dump) return cmd_dump(what, out, config, dump_seed, teacher_dump);
  } catch (const fusionkd::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
