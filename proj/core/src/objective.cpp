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


#include "fusionkd/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fusionkd {

void LossWeights::validate() const {
  for (double v : {l1, l2, l4, l5, l6}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("loss weights must be finite and >= 0");
  }
  if (!(alpha_igfm >= 0.0 && alpha_igfm <= 1.0)) throw std::invalid_argument("alpha_igfm must lie in [0, 1]");
  if (!std::isfinite(lambda3_init)) throw std::invalid_argument("lambda3_init must be finite");
  if (!(lambda_blend_init >= 0.0) || !std::isfinite(lambda_blend_init)) {
    throw std::invalid_argument("lambda_blend_init must be finite and >= 0");
  }
}

void init_objective_params(ParamStore& store, const LossWeights& w) {
  store.add(kLambda3, Tensor::scalar(w.lambda3_init));
  store.add(kLambdaBlend, Tensor::scalar(w.lambda_blend_init));
}

LossBreakdown total_loss(const LossBreakdown& c, const LossWeights& w, double lambda3) {
  const std::pair<const char*, double> parts[] = {{"det", c.det},   {"depth", c.depth}, {"igfm", c.igfm},
                                                  {"swfd", c.swfd}, {"swrd", c.swrd},   {"ld", c.ld}};
  for (const auto& [name, v] : parts) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvariantError(std::string("loss component ") + name + " must be finite and >= 0, got " +
                           std::to_string(v));
    }
  }
  LossBreakdown out = c;
  out.total = finalize_scalar(w.l1 * c.det + w.l2 * c.depth + lambda3 * c.igfm + w.l4 * c.swfd + w.l5 * c.swrd +
                              w.l6 * c.ld);
  return out;
}

void train_step(ParamStore& params, double lr) {
  if (!(lr >= 0.0)) throw std::invalid_argument("learning rate must be >= 0");
  for (auto& [name, e] : params.entries()) {
    if (!e.trainable) continue;
    for (std::size_t i = 0; i < e.value.size(); ++i) e.value[i] -= lr * e.grad[i];
    e.value.finalize();
  }
}

Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite difference step must be > 0");
  PrecisionScope scope(Precision::f64);
  Tensor probe = x;
  Tensor g(x.dims());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("finite difference probe produced a non-finite value at element " + std::to_string(i));
    }
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double relative_error(const Tensor& analytic, const Tensor& numeric, double floor) {
  require(analytic.same_dims(numeric), "relative_error: dims " + shape_str(analytic.dims()) + " vs " +
                                           shape_str(numeric.dims()));
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double d = analytic[i] - numeric[i];
    diff += d * d;
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nn), floor});
}

}  // namespace fusionkd
