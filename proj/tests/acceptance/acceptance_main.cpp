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


#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "fusionkd/checks/checks.hpp"

namespace {

struct Criterion {
  int id;
  const char* title;
  const char* tolerance;
};

const std::vector<Criterion> kCriteria = {
    {1, "oracle equivalence", "max abs diff <= 1e-10 on >= 100 seeded instances"},
    {2, "normalization", "depth and attention sums within 1e-6, intensities in [0, 1]"},
    {3, "loss identities", "identity cases exactly 0, 2x2 blend fixture within 1e-12"},
    {4, "blend limits", "bit-exact at lambda = 0 and clamp = 1"},
    {5, "gradient checks", "rel err <= 1e-5 per loss, <= 1e-4 end-to-end, h = 1e-5"},
    {6, "objective linearity", "total vs independent weighted sum within 1e-12"},
    {7, "training descent", "final total <= 0.5 x step 0 after 200 steps, byte-reproducible"},
    {8, "frozen teacher", "teacher and label encoder bit-identical after training"},
    {9, "gate behavior", "equal gates match ungated attention within 1e-10, strict increase"},
};

}  // namespace

int main(int argc, char** argv) {
  fusionkd::checks::Context ctx;
  if (argc > 1) ctx.seed = std::strtoull(argv[1], nullptr, 10);

  const auto start = std::chrono::steady_clock::now();
  std::map<std::string, fusionkd::checks::Result> results;
  bool all = true;
  for (const auto& crit : kCriteria) {
    std::vector<const fusionkd::checks::Result*> rows;
    bool pass = true;
    for (const auto& check : fusionkd::checks::registry()) {
      bool tagged = false;
      for (int k : check.criteria) tagged = tagged || k == crit.id;
      if (!tagged) continue;
      auto it = results.find(check.name);
      if (it == results.end()) it = results.emplace(check.name, fusionkd::checks::run_check(check, ctx)).first;
      rows.push_back(&it->second);
      pass = pass && it->second.passed;
    }
    pass = pass && !rows.empty();
    all = all && pass;
    std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", crit.id, crit.title, crit.tolerance);
    for (const auto* r : rows) {
      std::printf("    %-4s %-22s %s\n", r->passed ? "ok" : "FAIL", r->name.c_str(), r->detail.c_str());
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s: acceptance criteria 1-9 in %.1f s\n", all ? "PASS" : "FAIL", secs);
  return all ? 0 : 1;
}
