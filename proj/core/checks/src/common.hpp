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

#include <cstdio>
#include <random>
#include <string>

#include "fusionkd/checks/checks.hpp"
#include "fusionkd/model.hpp"
#include "fusionkd/tensor.hpp"

namespace fusionkd::checks::detail {

using Rng = std::mt19937_64;

inline Rng rng_for(const Context& ctx, std::uint64_t salt) { return Rng(ctx.seed * 0x9E3779B97F4A7C15ULL + salt); }

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Tensor random_tensor(const Shape& dims, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(dims);
  for (auto& v : t.data()) v = uniform(rng, lo, hi);
  return t;
}

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline Result verdict(const std::string& name, bool ok, std::string detail) {
  return Result{name, ok, std::move(detail)};
}

/// Largest-error bookkeeping for "max abs diff <= tol" style checks.
struct Worst {
  double value = 0.0;
  std::string where;
  std::size_t kinks = 0;  // finite-difference coordinates that straddled a kink
  void see(double v, const std::string& at) {
    if (!(v <= value)) {
      value = v;
      where = at;
    }
  }
};

/// 8x8 BEV toy model used by the end-to-end checks.
inline ModelConfig small_model() {
  ModelConfig cfg;
  cfg.grid.rows = 8;
  cfg.grid.cols = 8;
  return cfg;
}

inline SceneConfig scene_for(const ModelConfig& m) {
  SceneConfig s;
  s.grid = m.grid;
  s.camera = m.camera;
  s.classes = m.head.classes;
  return s;
}

std::vector<Check> oracle_checks();
std::vector<Check> gradient_checks();
std::vector<Check> invariant_checks();

}  // namespace fusionkd::checks::detail
