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

#include "fusionkd/tensor.hpp"

// Unit tests run at check precision; f32 behavior is tested under explicit scopes.
int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  fusionkd::set_precision(fusionkd::Precision::f64);
  return RUN_ALL_TESTS();
}
