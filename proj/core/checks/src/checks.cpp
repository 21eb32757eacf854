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


#include <algorithm>
#include <cstdio>
#include <sstream>

#include "common.hpp"

namespace fusionkd::checks {

const std::vector<Check>& registry() {
  static const std::vector<Check> all = [] {
    std::vector<Check> v;
    for (auto group : {detail::oracle_checks(), detail::gradient_checks(), detail::invariant_checks()}) {
      v.insert(v.end(), group.begin(), group.end());
    }
    return v;
  }();
  return all;
}

std::vector<std::string> suite_names() { return {"oracles", "gradients", "invariants", "all"}; }

bool is_suite(const std::string& name) {
  const auto names = suite_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Result run_check(const Check& check, const Context& ctx) {
  PrecisionScope scope(Precision::f64);
  try {
    Result r = check.run(ctx);
    r.name = check.name;
    return r;
  } catch (const std::exception& e) {
    return Result{check.name, false, std::string("exception: ") + e.what()};
  }
}

std::vector<Result> run_suite(const std::string& suite, const Context& ctx) {
  if (!is_suite(suite)) throw std::invalid_argument("unknown suite: " + suite);
  std::vector<Result> out;
  for (const auto& c : registry()) {
    if (suite == "all" || c.suite == suite) out.push_back(run_check(c, ctx));
  }
  return out;
}

bool all_passed(const std::vector<Result>& results) {
  return std::all_of(results.begin(), results.end(), [](const Result& r) { return r.passed; });
}

std::string format_report(const std::vector<Result>& results) {
  std::size_t width = 5;
  for (const auto& r : results) width = std::max(width, r.name.size());
  std::ostringstream os;
  char line[512];
  std::snprintf(line, sizeof line, "%-*s  %-6s %s\n", static_cast<int>(width), "check", "status", "detail");
  os << line;
  std::size_t passed = 0;
  for (const auto& r : results) {
    passed += r.passed ? 1 : 0;
    std::snprintf(line, sizeof line, "%-*s  %-6s %s\n", static_cast<int>(width), r.name.c_str(),
                  r.passed ? "PASS" : "FAIL", r.detail.c_str());
    os << line;
  }
  os << passed << "/" << results.size() << " checks passed\n";
  return os.str();
}

}  // namespace fusionkd::checks
