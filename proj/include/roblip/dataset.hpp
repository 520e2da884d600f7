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
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace roblip {

/// Raw IDX container: big-endian magic and dimension sizes followed by
/// row-major unsigned bytes. Only the unsigned-byte image (3-D, magic
/// 0x00000803) and label (1-D, magic 0x00000801) files are accepted.
struct IdxTensor {
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> payload;

  std::uint32_t magic() const { return 0x0800U | static_cast<std::uint32_t>(dims.size()); }
};

/// Throws IdxFormatError (bad_magic, truncated or trailing_bytes).
IdxTensor parse_idx(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_idx(const IdxTensor& t);

/// Whole file contents; gzip-compressed files are inflated transparently.
std::vector<std::uint8_t> read_file_bytes(const std::string& path);

enum class DataSource { idx_file, synthetic };

/// n x d features in [0, 1] (row-major) with class labels in [0, classes).
struct ImageDataset {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t classes = 0;
  std::vector<double> features;
  std::vector<int> labels;
  DataSource source = DataSource::synthetic;
  std::optional<std::uint64_t> seed_used;

  std::span<const double> row(std::size_t i) const { return {features.data() + i * d, d}; }
  void validate() const;
};

/// Effective data dimension used only when comparing against the
/// theoretical scaling laws; features keep their ambient dimension.
struct EffectiveDim {
  std::size_t d = 10;
};

/// Pixels are scaled by 1/255; no further normalization.
ImageDataset dataset_from_idx(const IdxTensor& images, const IdxTensor& labels);
ImageDataset load_idx_dataset(const std::string& images_path, const std::string& labels_path);

/// n rows chosen without replacement by partial Fisher-Yates on a
/// xoshiro256** stream seeded with `seed`, kept in draw order.
ImageDataset sample_subset(const ImageDataset& ds, std::size_t n, std::uint64_t seed);

/// Rows [begin, end) of ds.
ImageDataset slice_rows(const ImageDataset& ds, std::size_t begin, std::size_t end);

/// `classes` Gaussian clusters with means on the first coordinate axes
/// (unit vectors e_c), isotropic standard deviation `spread`, labels
/// assigned round-robin, then all features affinely rescaled to [0, 1].
ImageDataset synthetic_blobs(std::size_t d, std::size_t classes, std::size_t n, double spread, std::uint64_t seed);

}  // namespace roblip
