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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "roblip/check.hpp"

namespace roblip {

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::size_t trials = 500;
  std::size_t max_dim = 8;        // n for vector sets and samples
  std::size_t max_set_size = 8;   // |A|, |B|
  std::size_t grid_points = 100000;
  double endpoint_tolerance = 1e-6;
  double envelope_tolerance = 1e-10;
  double gap_tolerance = 1e-10;
  /// Negative control: coordinate maps declare half their true constant.
  bool understate_lipschitz = false;

  void validate() const;
};

struct TrialRecord {
  std::size_t trial = 0;
  std::vector<InequalityCheck> checks;
};

struct SuiteReport {
  std::string name;
  std::size_t trials = 0;
  std::size_t violations = 0;  // failing checks over all trials
  std::vector<TrialRecord> records;
};

struct VerifyReport {
  VerifyOptions options;
  std::vector<SuiteReport> suites;
  double seconds = 0.0;

  std::size_t violations() const;
  bool passed() const { return violations() == 0; }
  /// Violations per check name across suites.
  std::vector<std::pair<std::string, std::size_t>> violations_by_check() const;
};

// Each suite draws trial t from its own stream, so suites and trials can be
// reproduced in isolation.
SuiteReport verify_set_algebra(const VerifyOptions& opts);
SuiteReport verify_endpoint(const VerifyOptions& opts);
SuiteReport verify_envelope_lipschitz(const VerifyOptions& opts);
SuiteReport verify_gap_bound(const VerifyOptions& opts);
SuiteReport verify_gap_tightness(const VerifyOptions& opts);
SuiteReport verify_loss_chain(const VerifyOptions& opts);

VerifyReport run_verification(const VerifyOptions& opts);

}  // namespace roblip
