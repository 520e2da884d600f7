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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "roblip/dataset.hpp"
#include "roblip/lipestimate.hpp"
#include "roblip/robust_loss.hpp"
#include "roblip/scaling_record.hpp"
#include "roblip/trainer.hpp"

namespace roblip {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr const char* kResultsHeader =
    "n,width,p,seed,L_emp,stopped_epoch,best_test_loss,final_train_loss,status";

struct DataConfig {
  DataSource kind = DataSource::synthetic;
  // idx_file
  std::string train_images, train_labels, test_images, test_labels;
  // synthetic
  std::size_t d = 10, classes = 2, n_train = 200, n_test = 100;
  double spread = 0.1;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  DataConfig data;
  std::vector<std::size_t> n_grid;
  std::vector<std::size_t> width_grid;
  std::vector<std::uint64_t> seeds{0};
  std::vector<std::size_t> fixed_hidden;  // layers before the swept width
  TrainConfig train;
  RobustnessConfig robustness;             // recorded in the run manifest
  double duplicate_threshold = 1e-9;
  bool squashed = true;
  std::string out_dir = "results";
  unsigned jobs = 1;
  bool save_checkpoints = false;

  void validate() const;
  /// Unknown keys and a missing or different schema_version are errors.
  /// Relative data paths are resolved against base_dir.
  static ExperimentConfig from_json(const nlohmann::json& j, const std::string& base_dir = "");
  nlohmann::json to_json() const;
};

ExperimentConfig load_experiment_config(const std::string& path);

struct GridRunResult {
  std::vector<ScalingRecord> records;  // sorted by (n, width, seed)
  std::size_t computed = 0;
  std::size_t skipped = 0;             // already present in the CSV
  std::size_t failed = 0;              // rows with status != ok
  std::string csv_path;
};

using GridLog = std::function<void(const std::string&)>;

/// Trains and measures every missing (n, width, seed) cell, appending rows to
/// out_dir/results.csv, then rewrites the file sorted by key.
GridRunResult run_grid(const ExperimentConfig& cfg, const GridLog& log = {});

/// One cell on already loaded data.
ScalingRecord run_cell(const ExperimentConfig& cfg, const ImageDataset& train, const ImageDataset& test,
                       std::size_t n, std::size_t width, std::uint64_t seed, unsigned lip_threads,
                       const std::string& checkpoint_path = "");

std::string format_record(const ScalingRecord& r);
ScalingRecord parse_record(const std::string& line);
std::vector<ScalingRecord> read_results_csv(const std::string& path);
void write_results_csv(const std::string& path, std::vector<ScalingRecord> records);

}  // namespace roblip
