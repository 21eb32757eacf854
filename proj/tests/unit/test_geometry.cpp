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

#include "fusionkd/geometry.hpp"
#include "fusionkd/param_store.hpp"
#include "test_util.hpp"

namespace fusionkd {
namespace {

BevGridSpec four_by_four() {
  BevGridSpec g;
  g.x_min = g.y_min = -4.0;
  g.x_max = g.y_max = 4.0;
  g.rows = g.cols = 4;
  return g;
}

TEST(Grid, HalfOpenCellsWithClosingEdge) {
  const BevGridSpec g = four_by_four();
  EXPECT_EQ(g.cell_of(-4.0, -4.0), (Cell{0, 0}));
  EXPECT_EQ(g.cell_of(-2.0, 0.0), (Cell{1, 2}));
  EXPECT_EQ(g.cell_of(4.0, 4.0), (Cell{3, 3}));
  EXPECT_FALSE(g.cell_of(4.0001, 0.0).has_value());
  EXPECT_FALSE(g.cell_of(0.0, -4.0001).has_value());
}

TEST(Grid, RowsIndexX) {
  const BevGridSpec g = four_by_four();
  EXPECT_EQ(g.cell_of(3.0, -3.0), (Cell{3, 0}));
  EXPECT_DOUBLE_EQ(g.center_x(3), 3.0);
  EXPECT_DOUBLE_EQ(g.center_y(0), -3.0);
}

TEST(Grid, BoxSigmaFlooredAtOneCell) {
  const BevGridSpec g = four_by_four();
  const BoxSigma s = box_sigma(Box3D{0, 0, 0, 0.3, 0.3, 1, 0, 0}, g);
  EXPECT_DOUBLE_EQ(s.along, 2.0);
  EXPECT_DOUBLE_EQ(s.across, 2.0);
  EXPECT_DOUBLE_EQ(box_gaussian(Box3D{}, 1.0, 1.0, 1.0, 1.0, g), 1.0);
}

TEST(ParamStore, SortedNamesAndFrozenEntries) {
  ParamStore s;
  s.add("b", Tensor({1}, 1.0));
  s.add("a", Tensor({1}, 2.0), false);
  EXPECT_EQ(s.names(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(s.trainable_names(), (std::vector<std::string>{"b"}));
  EXPECT_THROW(s.add("a", Tensor({1})), std::invalid_argument);
  EXPECT_THROW(s.value("missing"), std::invalid_argument);
  s.accumulate("b", Tensor({1}, 0.5));
  s.accumulate("b", Tensor({1}, 0.25));
  EXPECT_EQ(s.grad("b")[0], 0.75);
  s.zero_grad();
  EXPECT_EQ(s.grad("b")[0], 0.0);
}

}  // namespace
}  // namespace fusionkd
