// Copyright 2026 The roblip Authors
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

#include "doctest.h"
#include "roblip/error.hpp"
#include "roblip/report.hpp"
#include "roblip/verify.hpp"

using namespace roblip;

TEST_CASE("one trial with a fixed seed is deterministic") {
  VerifyOptions o;
  o.trials = 1;
  o.seed = 17;
  const auto a = run_verification(o), b = run_verification(o);
  CHECK(a.passed());
  auto ja = report::to_json(a), jb = report::to_json(b);
  ja.erase("seconds");
  jb.erase("seconds");
  CHECK(ja.dump() == jb.dump());
  CHECK(a.suites.size() == 6);
}

TEST_CASE("suites report both sides of each inequality") {
  VerifyOptions o;
  o.trials = 25;
  const auto rep = run_verification(o);
  CHECK(rep.passed());
  const auto j = report::to_json(rep);
  const auto& first = j["suites"][0]["records"][0]["checks"][0];
  CHECK(first.contains("lhs"));
  CHECK(first.contains("rhs"));
  CHECK(first["relation"] == "==");
  CHECK(j["violations"] == 0);
}

TEST_CASE("understated contraction constants are detected") {
  VerifyOptions o;
  o.trials = 40;
  o.understate_lipschitz = true;
  const auto rep = run_verification(o);
  CHECK_FALSE(rep.passed());
  for (const auto& [name, v] : rep.violations_by_check()) {
    if (name == "contraction") CHECK(v > 0);
    else CHECK(v == 0);
  }
}

TEST_CASE("option validation") {
  VerifyOptions o;
  o.trials = 0;
  CHECK_THROWS_AS(run_verification(o), InvalidArgument);
  o.trials = 1;
  o.max_dim = 25;
  CHECK_THROWS_AS(run_verification(o), CutoffExceeded);
}
