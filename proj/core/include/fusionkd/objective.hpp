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

#include <functional>
#include <string>

#include "fusionkd/param_store.hpp"
#include "fusionkd/tensor.hpp"

namespace fusionkd {

inline constexpr const char* kLambda3 = "objective.lambda3";
inline constexpr const char* kLambdaBlend = "distill.lambda_blend";

/// Fixed weights of the total objective. lambda3 and lambda_blend are only
/// initial values: both live in the ParamStore and are trained.
struct LossWeights {
  double l1 = 0.3;  // det
  double l2 = 0.3;  // depth
  double l4 = 0.3;  // swfd
  double l5 = 0.3;  // swrd
  double l6 = 0.3;  // ld
  double alpha_igfm = 0.5;
  double lambda3_init = 100.0;
  double lambda_blend_init = 1.0;

  void validate() const;
};

struct LossBreakdown {
  double det = 0.0;
  double depth = 0.0;
  double igfm = 0.0;
  double swfd = 0.0;
  double swrd = 0.0;
  double ld = 0.0;
  double total = 0.0;
};

void init_objective_params(ParamStore& store, const LossWeights& w);

/// Weighted sum of the six components with `lambda3` on the IG-FM term.
/// Throws InvariantError on a negative or non-finite component.
LossBreakdown total_loss(const LossBreakdown& components, const LossWeights& w, double lambda3);

/// value -= lr * grad on every trainable entry. Frozen entries are untouched.
void train_step(ParamStore& params, double lr);

/// Central differences of `f` around `x`, evaluated at f64. Throws
/// NumericError when `f` returns a non-finite value.
Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x, double h);

/// ||a - b|| / max(||a||, ||b||, floor).
double relative_error(const Tensor& analytic, const Tensor& numeric, double floor = 1e-8);

}  // namespace fusionkd
