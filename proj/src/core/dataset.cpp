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

#include "roblip/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "roblip/error.hpp"
#include "roblip/rng.hpp"

namespace roblip {

namespace {

constexpr std::uint32_t kLabelMagic = 0x00000801;
constexpr std::uint32_t kImageMagic = 0x00000803;

std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
         std::uint32_t{b[at + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace

IdxTensor parse_idx(std::span<const std::uint8_t> bytes) {
  using Kind = IdxFormatError::Kind;
  if (bytes.size() < 4) throw IdxFormatError(Kind::truncated, "idx: stream shorter than the magic number");
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kLabelMagic && magic != kImageMagic)
    throw IdxFormatError(Kind::bad_magic, "idx: unsupported magic number " + std::to_string(magic));

  const std::size_t ndims = magic & 0xFFU;
  const std::size_t header = 4 + 4 * ndims;
  if (bytes.size() < header) throw IdxFormatError(Kind::truncated, "idx: truncated dimension header");

  IdxTensor t;
  std::uint64_t count = 1;
  for (std::size_t k = 0; k < ndims; ++k) {
    t.dims.push_back(read_be32(bytes, 4 + 4 * k));
    count *= t.dims.back();
    if (count > std::numeric_limits<std::uint32_t>::max() * std::uint64_t{16})
      throw IdxFormatError(Kind::truncated, "idx: declared payload is implausibly large");
  }
  const std::uint64_t have = bytes.size() - header;
  if (have < count)
    throw IdxFormatError(Kind::truncated, "idx: payload has " + std::to_string(have) + " bytes, expected " +
                                              std::to_string(count));
  if (have > count)
    throw IdxFormatError(Kind::trailing_bytes, "idx: " + std::to_string(have - count) + " trailing bytes");
  t.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  return t;
}

std::vector<std::uint8_t> serialize_idx(const IdxTensor& t) {
  std::vector<std::uint8_t> out;
  out.reserve(4 + 4 * t.dims.size() + t.payload.size());
  write_be32(out, t.magic());
  for (auto d : t.dims) write_be32(out, d);
  out.insert(out.end(), t.payload.begin(), t.payload.end());
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  // gzread passes uncompressed files through unchanged.
  std::unique_ptr<gzFile_s, decltype(&gzclose)> f(gzopen(path.c_str(), "rb"), &gzclose);
  if (!f) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> out;
  std::uint8_t buf[1 << 16];
  for (;;) {
    const int got = gzread(f.get(), buf, sizeof buf);
    if (got < 0) {
      int errnum = 0;
      throw IoError("read error in " + path + ": " + gzerror(f.get(), &errnum));
    }
    if (got == 0) break;
    out.insert(out.end(), buf, buf + got);
  }
  return out;
}

void ImageDataset::validate() const {
  if (features.size() != n * d) throw DimensionError("ImageDataset: feature storage does not match n x d");
  if (labels.size() != n) throw DimensionError("ImageDataset: label count does not match n");
  for (double v : features)
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("ImageDataset: feature outside [0, 1]");
  for (int l : labels)
    if (l < 0 || static_cast<std::size_t>(l) >= classes) throw InvalidArgument("ImageDataset: label out of range");
}

ImageDataset dataset_from_idx(const IdxTensor& images, const IdxTensor& labels) {
  if (images.dims.size() != 3) throw DimensionError("idx: image file must be three-dimensional");
  if (labels.dims.size() != 1) throw DimensionError("idx: label file must be one-dimensional");
  if (images.dims[0] != labels.dims[0]) throw DimensionError("idx: image and label counts differ");
  ImageDataset ds;
  ds.source = DataSource::idx_file;
  ds.n = images.dims[0];
  ds.d = std::size_t{images.dims[1]} * images.dims[2];
  ds.features.resize(images.payload.size());
  std::transform(images.payload.begin(), images.payload.end(), ds.features.begin(),
                 [](std::uint8_t b) { return static_cast<double>(b) / 255.0; });
  ds.labels.assign(labels.payload.begin(), labels.payload.end());
  int max_label = 0;
  for (int l : ds.labels) max_label = std::max(max_label, l);
  ds.classes = static_cast<std::size_t>(max_label) + 1;
  return ds;
}

ImageDataset load_idx_dataset(const std::string& images_path, const std::string& labels_path) {
  const auto images = read_file_bytes(images_path);
  const auto labels = read_file_bytes(labels_path);
  return dataset_from_idx(parse_idx(images), parse_idx(labels));
}

ImageDataset sample_subset(const ImageDataset& ds, std::size_t n, std::uint64_t seed) {
  if (n > ds.n)
    throw InvalidArgument("sample_subset: requested " + std::to_string(n) + " rows from a dataset of " +
                          std::to_string(ds.n));
  Rng rng(seed);
  const auto idx = sample_without_replacement(ds.n, n, rng);
  ImageDataset out;
  out.n = n;
  out.d = ds.d;
  out.classes = ds.classes;
  out.source = ds.source;
  out.seed_used = seed;
  out.features.reserve(n * ds.d);
  out.labels.reserve(n);
  for (std::size_t i : idx) {
    const auto r = ds.row(i);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(ds.labels[i]);
  }
  return out;
}

ImageDataset slice_rows(const ImageDataset& ds, std::size_t begin, std::size_t end) {
  if (begin > end || end > ds.n) throw InvalidArgument("slice_rows: range out of bounds");
  ImageDataset out = ds;
  out.n = end - begin;
  out.features.assign(ds.features.begin() + static_cast<std::ptrdiff_t>(begin * ds.d),
                      ds.features.begin() + static_cast<std::ptrdiff_t>(end * ds.d));
  out.labels.assign(ds.labels.begin() + static_cast<std::ptrdiff_t>(begin),
                    ds.labels.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

ImageDataset synthetic_blobs(std::size_t d, std::size_t classes, std::size_t n, double spread, std::uint64_t seed) {
  if (d == 0 || classes == 0 || n == 0) throw InvalidArgument("synthetic_blobs: d, classes and n must be positive");
  if (!(spread > 0.0)) throw InvalidArgument("synthetic_blobs: spread must be positive");
  if (classes > d) throw InvalidArgument("synthetic_blobs: more classes than axes; cluster means would collide");

  Rng rng(seed);
  ImageDataset ds;
  ds.n = n;
  ds.d = d;
  ds.classes = classes;
  ds.source = DataSource::synthetic;
  ds.seed_used = seed;
  ds.features.resize(n * d);
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % classes;
    ds.labels[i] = static_cast<int>(c);
    for (std::size_t k = 0; k < d; ++k) ds.features[i * d + k] = (k == c ? 1.0 : 0.0) + spread * rng.normal();
  }
  const auto [lo_it, hi_it] = std::minmax_element(ds.features.begin(), ds.features.end());
  const double lo = *lo_it, span = *hi_it - *lo_it;
  for (auto& v : ds.features) v = span > 0.0 ? std::clamp((v - lo) / span, 0.0, 1.0) : 0.5;
  return ds;
}

}  // namespace roblip
