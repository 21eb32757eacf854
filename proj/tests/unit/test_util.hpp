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

#include <ostream>
#include <random>

#include "fusionkd/tensor.hpp"

namespace fusionkd {

inline void PrintTo(const Tensor& t, std::ostream* os) {
  *os << "Tensor" << shape_str(t.dims()) << " {";
  for (std::size_t i = 0; i < t.size() && i < 16; ++i) *os << (i ? ", " : "") << t[i];
  *os << (t.size() > 16 ? ", ...}" : "}");
}

}  // namespace fusionkd

namespace fusionkd::testing {

inline Tensor random_tensor(const Shape& dims, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(dims);
  for (auto& v : t.data()) v = u(rng);
  return t;
}

}  // namespace fusionkd::testing
