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


#include "fusionkd/training.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace fusionkd {

TrainResult train(const RunConfig& cfg, const StepCallback& on_step) {
  cfg.validate();
  PrecisionScope scope(cfg.precision);
  TrainResult r;
  r.scene = generate_scene(cfg.seed, cfg.scene);
  r.params = init_model(cfg.model, cfg.seed);
  std::optional<Tensor> teacher;
  if (!cfg.teacher_dump.empty()) teacher = load_dump(cfg.teacher_dump);
  r.targets = prepare_targets(r.scene, r.params, cfg.model, teacher);

  for (std::size_t step = 0;; ++step) {
    r.last = model_forward(r.scene, r.targets, r.params, cfg.model);
    r.history.push_back(r.last.loss);
    if (on_step) on_step(step, r.last.loss);
    if (step == cfg.steps) break;
    r.params.zero_grad();
    model_backward(r.last, r.scene, r.targets, r.params, cfg.model);
    train_step(r.params, cfg.lr);
  }
  return r;
}

std::string metrics_record(std::size_t step, const LossBreakdown& l) {
  nlohmann::ordered_json j;
  j["step"] = step;
  j["det"] = l.det;
  j["depth"] = l.depth;
  j["igfm"] = l.igfm;
  j["swfd"] = l.swfd;
  j["swrd"] = l.swrd;
  j["ld"] = l.ld;
  j["total"] = l.total;
  return j.dump();
}

std::vector<std::string> dump_names() {
  return {"camera_bev", "radar_bev",  "fused",     "cam_intensity", "radar_intensity",
          "lidar_intensity", "lidar_bev", "label_bev", "heatmap",       "depth"};
}

const Tensor& dump_tensor(const TrainResult& run, const std::string& name) {
  if (name == "camera_bev") return run.last.splat.bev;
  if (name == "radar_bev") return run.last.radar.output;
  if (name == "fused") return run.last.fusion.output;
  if (name == "cam_intensity") return run.last.cam_intensity;
  if (name == "radar_intensity") return run.targets.radar_intensity;
  if (name == "lidar_intensity") return run.targets.lidar_intensity;
  if (name == "lidar_bev") return run.targets.teacher.f_lidar;
  if (name == "label_bev") return run.targets.label;
  if (name == "heatmap") return run.last.head.out.heatmap;
  if (name == "depth") return run.last.camera.depth;
  throw std::invalid_argument("unknown dump name: " + name);
}

TrainResult run_to_directory(const RunConfig& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  std::ofstream metrics(dir / "metrics.jsonl", std::ios::binary);
  if (!metrics) throw std::runtime_error("cannot write " + (dir / "metrics.jsonl").string());
  TrainResult r = train(cfg, [&](std::size_t step, const LossBreakdown& l) {
    metrics << metrics_record(step, l) << '\n';
    metrics.flush();
  });
  if (!metrics) throw std::runtime_error("failed writing " + (dir / "metrics.jsonl").string());
  {
    std::ofstream os(dir / "config.json", std::ios::binary);
    os << dump_run_config(cfg) << '\n';
  }
  PrecisionScope scope(cfg.precision);
  for (const auto& name : dump_names()) save_dump((dir / (name + ".imkd")).string(), dump_tensor(r, name));
  return r;
}

}  // namespace fusionkd
