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
#include <span>
#include <variant>
#include <vector>

#include "roblip/check.hpp"

namespace roblip {

/// Finite set of real vectors sharing one dimension, stored row-major.
/// Duplicates are allowed; Rademacher complexity does not care.
class VectorSet {
 public:
  VectorSet(std::size_t dim, std::vector<double> flat);

  static VectorSet from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return data_.size() / dim_; }
  std::span<const double> operator[](std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  const std::vector<double>& data() const noexcept { return data_; }

  /// Concatenation of the member lists (set union up to duplicates).
  VectorSet merged(const VectorSet& other) const;

 private:
  std::size_t dim_;
  std::vector<double> data_;
};

enum class RadMode { exact, monte_carlo };

struct RadEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 in exact mode
  RadMode mode = RadMode::exact;
  std::uint64_t draws = 0;  // 0 in exact mode
};

inline constexpr std::size_t kExactRadCutoff = 20;

struct ExactRadOptions {
  std::size_t cutoff = kExactRadCutoff;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Empirical Rademacher complexity with the 1/n normalization,
/// E_sigma sup_{a in A} (1/n) sum_i sigma_i a_i, by enumerating all 2^n sign
/// vectors. Sign vectors are split into fixed blocks that are summed with
/// compensated summation and merged in block order, so the result does not
/// depend on the thread count. Throws CutoffExceeded when dim > cutoff.
RadEstimate rad_exact(const VectorSet& a, const ExactRadOptions& opts = {});

/// Monte-Carlo estimate of the same quantity from `draws` sign vectors.
/// std_error is the sample standard deviation over draws / sqrt(draws).
RadEstimate rad_mc(const VectorSet& a, std::uint64_t draws, std::uint64_t seed);

enum class CombineKind { minkowski_sum, minkowski_diff, coord_max };

/// {a op b : a in A, b in B}, |A|*|B| members in (a-major) order.
VectorSet combine(const VectorSet& a, const VectorSet& b, CombineKind kind);

/// Scalar maps applied one per coordinate, each with a declared Lipschitz
/// constant and phi_i(0) = 0.
struct CoordMapFamily {
  std::vector<std::function<double(double)>> maps;
  std::vector<double> lipschitz;

  std::size_t size() const noexcept { return maps.size(); }
  double max_lipschitz() const;

  static CoordMapFamily identity(std::size_t n);
  static CoordMapFamily absolute_value(std::size_t n);

  /// Checks phi_i(0) == 0 and the declared constants on `probes` random pairs
  /// drawn from [-range, range]. Returns false on the first violation.
  bool validate(std::size_t probes, double range, std::uint64_t seed) const;
};

struct Translate {
  std::vector<double> offset;
};
struct Absolute {};
struct Scale {
  double factor;
};
struct CoordMaps {
  CoordMapFamily family;
};
using Transform = std::variant<Translate, Absolute, Scale, CoordMaps>;

VectorSet transform(const VectorSet& a, const Transform& t);

struct LemmaSuiteOptions {
  RadMode mode = RadMode::exact;
  std::uint64_t seed = 0;
  std::uint64_t draws = 100000;       // monte_carlo only
  double exact_slack = 1e-12;
  double mc_sigmas = 3.0;
  std::optional<std::vector<double>> translation;  // defaults to B's first member
};

/// Evaluates, with both sides reported:
///   translation  R(A+c) = R(A)
///   sum          R(A+B) <= R(A) + R(B)
///   difference   R(A-B) <= R(A) + R(B)
///   contraction  R(phi(A)) <= max_i L_i * R(A)
///   abs          R(|A|) <= R(A)
///   max          R(A v B) <= R(A) + R(B)
std::vector<InequalityCheck> verify_lemma_suite(const VectorSet& a, const VectorSet& b,
                                                const CoordMapFamily& phi,
                                                const LemmaSuiteOptions& opts = {});

}  // namespace roblip
