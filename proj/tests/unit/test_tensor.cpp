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

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "fusionkd/tensor.hpp"
#include "test_util.hpp"

namespace fusionkd {
namespace {

TEST(Tensor, RejectsEmptyAndZeroExtents) {
  EXPECT_THROW(Tensor(Shape{}), std::invalid_argument);
  EXPECT_THROW(Tensor(Shape{2, 0}), std::invalid_argument);
  EXPECT_THROW(Tensor({2}, std::vector<double>{1, 2, 3}), std::invalid_argument);
}

TEST(Tensor, RowMajorIndexing) {
  Tensor t({2, 3}, {0, 1, 2, 3, 4, 5});
  EXPECT_EQ(t.at(1, 2), 5.0);
  EXPECT_EQ(t.offset({1, 0}), 3u);
  EXPECT_THROW(t.at(2, 0), std::out_of_range);
}

TEST(Tensor, FinalizeRoundsThroughFloatUnderF32) {
  const double third = 1.0 / 3.0;
  {
    PrecisionScope scope(Precision::f32);
    Tensor t({1}, third);
    t.finalize();
    EXPECT_EQ(t[0], static_cast<double>(static_cast<float>(third)));
  }
  {
    PrecisionScope scope(Precision::f64);
    Tensor t({1}, third);
    t.finalize();
    EXPECT_EQ(t[0], third);
  }
}

TEST(Tensor, PrecisionScopeRestores) {
  PrecisionScope outer(Precision::f32);
  {
    PrecisionScope scope(Precision::f64);
    EXPECT_EQ(precision(), Precision::f64);
  }
  EXPECT_EQ(precision(), Precision::f32);
}

TEST(Tensor, NonFiniteRaisesNumericError) {
  Tensor t({2}, {1.0, std::numeric_limits<double>::quiet_NaN()});
  EXPECT_THROW(t.finalize(), NumericError);
  EXPECT_THROW(finalize_scalar(std::numeric_limits<double>::infinity()), NumericError);
}

TEST(Tensor, Arithmetic) {
  Tensor a({3}, {1, 2, 3}), b({3}, {0.5, 0.5, 0.5});
  EXPECT_EQ((a + b), Tensor({3}, {1.5, 2.5, 3.5}));
  EXPECT_EQ((a - b), Tensor({3}, {0.5, 1.5, 2.5}));
  EXPECT_EQ((a * 2.0), Tensor({3}, {2, 4, 6}));
  EXPECT_DOUBLE_EQ(a.sum(), 6.0);
  EXPECT_DOUBLE_EQ(max_abs_diff(a, b), 2.5);
  EXPECT_THROW(a += Tensor({2}), std::invalid_argument);
}

TEST(TensorDump, StreamRoundTripKeepsDims) {
  Tensor t({2, 1, 3}, {1, -2, 3.25, 4, 5, 6});
  std::stringstream ss;
  write_dump(ss, t, Precision::f64);
  EXPECT_EQ(ss.str().substr(0, 4), "IMKD");
  EXPECT_EQ(read_dump(ss), t);
}

TEST(TensorDump, FileRoundTripAndTruncation) {
  const auto path = (std::filesystem::temp_directory_path() / "fusionkd_tensor_test.imkd").string();
  Tensor t({4}, {0.5, 0.25, 0.125, 2.0});
  save_dump(path, t);
  EXPECT_EQ(load_dump(path), t);
  std::stringstream full;
  write_dump(full, t);
  std::stringstream cut(full.str().substr(0, full.str().size() - 3));
  EXPECT_THROW(read_dump(cut), std::runtime_error);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace fusionkd
