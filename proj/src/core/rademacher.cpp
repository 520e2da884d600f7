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

#include "roblip/rademacher.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "compensated_sum.hpp"
#include "roblip/error.hpp"
#include "roblip/rng.hpp"

namespace roblip {

namespace {

constexpr std::size_t kSignBlockBits = 12;

void require_same_dim(const VectorSet& a, const VectorSet& b, const char* what) {
  if (a.dim() != b.dim())
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()) + ")");
}

// max_{a in A} sum_i sigma_i a_i where sigma_i = -1 iff bit i of `mask` is set.
double sup_for_mask(const VectorSet& a, std::uint64_t mask) {
  const std::size_t n = a.dim();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < a.size(); ++m) {
    const auto v = a[m];
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += ((mask >> i) & 1U) ? -v[i] : v[i];
    best = std::max(best, dot);
  }
  return best;
}

double sup_for_signs(const VectorSet& a, const std::vector<int>& signs) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < a.size(); ++m) {
    const auto v = a[m];
    double dot = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) dot += signs[i] * v[i];
    best = std::max(best, dot);
  }
  return best;
}

}  // namespace

VectorSet::VectorSet(std::size_t dim, std::vector<double> flat) : dim_(dim), data_(std::move(flat)) {
  if (dim_ == 0) throw InvalidArgument("VectorSet: dimension must be at least 1");
  if (data_.empty()) throw InvalidArgument("VectorSet: needs at least one member");
  if (data_.size() % dim_ != 0)
    throw DimensionError("VectorSet: flat storage is not a multiple of the dimension");
}

VectorSet VectorSet::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InvalidArgument("VectorSet: needs at least one member");
  const std::size_t dim = rows.front().size();
  std::vector<double> flat;
  flat.reserve(dim * rows.size());
  for (const auto& r : rows) {
    if (r.size() != dim) throw DimensionError("VectorSet: member vectors differ in length");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return VectorSet(dim, std::move(flat));
}

VectorSet VectorSet::merged(const VectorSet& other) const {
  require_same_dim(*this, other, "VectorSet::merged");
  std::vector<double> flat = data_;
  flat.insert(flat.end(), other.data_.begin(), other.data_.end());
  return VectorSet(dim_, std::move(flat));
}

RadEstimate rad_exact(const VectorSet& a, const ExactRadOptions& opts) {
  const std::size_t n = a.dim();
  if (n > opts.cutoff || n >= 63)
    throw CutoffExceeded("rad_exact: dimension " + std::to_string(n) + " exceeds exact cutoff " +
                         std::to_string(opts.cutoff) + "; use rad_mc");

  const std::uint64_t total = std::uint64_t{1} << n;
  const std::uint64_t block = std::min<std::uint64_t>(total, std::uint64_t{1} << kSignBlockBits);
  const std::size_t blocks = static_cast<std::size_t>(total / block);
  std::vector<double> block_sums(blocks, 0.0);

  auto run_block = [&](std::size_t b) {
    detail::CompensatedSum acc;
    const std::uint64_t begin = b * block;
    for (std::uint64_t mask = begin; mask < begin + block; ++mask) acc.add(sup_for_mask(a, mask));
    block_sums[b] = acc.value();
  };

  unsigned threads = opts.threads ? opts.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, blocks));
  if (threads <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < blocks; b = next++) run_block(b);
      });
  }

  detail::CompensatedSum total_sum;
  for (double s : block_sums) total_sum.add(s);
  RadEstimate est;
  est.value = total_sum.value() / static_cast<double>(total) / static_cast<double>(n);
  est.mode = RadMode::exact;
  return est;
}

RadEstimate rad_mc(const VectorSet& a, std::uint64_t draws, std::uint64_t seed) {
  if (draws < 2) throw InvalidArgument("rad_mc: needs at least 2 draws");
  Rng rng(seed);
  const double n = static_cast<double>(a.dim());
  std::vector<int> signs(a.dim());
  // Welford running mean / variance.
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t k = 1; k <= draws; ++k) {
    for (auto& s : signs) s = rng.sign();
    const double x = sup_for_signs(a, signs) / n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (x - mean);
  }
  RadEstimate est;
  est.value = mean;
  est.std_error = std::sqrt(m2 / static_cast<double>(draws - 1)) / std::sqrt(static_cast<double>(draws));
  est.mode = RadMode::monte_carlo;
  est.draws = draws;
  return est;
}

VectorSet combine(const VectorSet& a, const VectorSet& b, CombineKind kind) {
  require_same_dim(a, b, "combine");
  const std::size_t n = a.dim();
  std::vector<double> flat;
  flat.reserve(a.size() * b.size() * n);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto u = a[i];
    for (std::size_t j = 0; j < b.size(); ++j) {
      const auto v = b[j];
      for (std::size_t k = 0; k < n; ++k) {
        switch (kind) {
          case CombineKind::minkowski_sum: flat.push_back(u[k] + v[k]); break;
          case CombineKind::minkowski_diff: flat.push_back(u[k] - v[k]); break;
          case CombineKind::coord_max: flat.push_back(std::max(u[k], v[k])); break;
        }
      }
    }
  }
  return VectorSet(n, std::move(flat));
}

double CoordMapFamily::max_lipschitz() const {
  double m = 0.0;
  for (double l : lipschitz) m = std::max(m, l);
  return m;
}

CoordMapFamily CoordMapFamily::identity(std::size_t n) {
  CoordMapFamily f;
  f.maps.assign(n, [](double t) { return t; });
  f.lipschitz.assign(n, 1.0);
  return f;
}

CoordMapFamily CoordMapFamily::absolute_value(std::size_t n) {
  CoordMapFamily f;
  f.maps.assign(n, [](double t) { return std::fabs(t); });
  f.lipschitz.assign(n, 1.0);
  return f;
}

bool CoordMapFamily::validate(std::size_t probes, double range, std::uint64_t seed) const {
  if (maps.size() != lipschitz.size()) return false;
  Rng rng(seed);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (lipschitz[i] < 0.0 || maps[i](0.0) != 0.0) return false;
    for (std::size_t k = 0; k < probes; ++k) {
      const double u = rng.uniform(-range, range), v = rng.uniform(-range, range);
      const double lhs = std::fabs(maps[i](u) - maps[i](v));
      if (lhs > lipschitz[i] * std::fabs(u - v) * (1.0 + 1e-12) + 1e-15) return false;
    }
  }
  return true;
}

VectorSet transform(const VectorSet& a, const Transform& t) {
  const std::size_t n = a.dim();
  std::vector<double> flat = a.data();
  std::visit(
      [&](const auto& op) {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, Translate>) {
          if (op.offset.size() != n) throw DimensionError("transform: translation length mismatch");
          for (std::size_t k = 0; k < flat.size(); ++k) flat[k] += op.offset[k % n];
        } else if constexpr (std::is_same_v<T, Absolute>) {
          for (auto& x : flat) x = std::fabs(x);
        } else if constexpr (std::is_same_v<T, Scale>) {
          for (auto& x : flat) x *= op.factor;
        } else {
          if (op.family.size() != n) throw DimensionError("transform: map family size mismatch");
          for (std::size_t k = 0; k < flat.size(); ++k) flat[k] = op.family.maps[k % n](flat[k]);
        }
      },
      t);
  return VectorSet(n, std::move(flat));
}

std::vector<InequalityCheck> verify_lemma_suite(const VectorSet& a, const VectorSet& b,
                                                const CoordMapFamily& phi,
                                                const LemmaSuiteOptions& opts) {
  require_same_dim(a, b, "verify_lemma_suite");
  if (phi.size() != a.dim()) throw DimensionError("verify_lemma_suite: map family size mismatch");

  std::vector<double> c = opts.translation.value_or(std::vector<double>(b[0].begin(), b[0].end()));

  const bool exact = opts.mode == RadMode::exact;
  auto rad = [&](const VectorSet& s) {
    // Common random numbers: every MC estimate in the suite uses the same seed.
    return exact ? rad_exact(s) : rad_mc(s, opts.draws, opts.seed);
  };
  // Slack for a comparison whose terms carry the given weighted std errors.
  auto slack = [&](std::initializer_list<std::pair<double, const RadEstimate*>> terms) {
    if (exact) return opts.exact_slack;
    double var = 0.0;
    for (const auto& [w, e] : terms) var += w * w * e->std_error * e->std_error;
    return opts.mc_sigmas * std::sqrt(var);
  };

  const RadEstimate ra = rad(a);
  const RadEstimate rb = rad(b);
  const RadEstimate r_shift = rad(transform(a, Translate{c}));
  const RadEstimate r_sum = rad(combine(a, b, CombineKind::minkowski_sum));
  const RadEstimate r_diff = rad(combine(a, b, CombineKind::minkowski_diff));
  const RadEstimate r_phi = rad(transform(a, CoordMaps{phi}));
  const RadEstimate r_abs = rad(transform(a, Absolute{}));
  const RadEstimate r_max = rad(combine(a, b, CombineKind::coord_max));
  const double lmax = phi.max_lipschitz();

  std::vector<InequalityCheck> out;
  out.push_back(InequalityCheck::equal("translation", r_shift.value, ra.value,
                                       slack({{1.0, &r_shift}, {1.0, &ra}})));
  out.push_back(InequalityCheck::at_most("sum", r_sum.value, ra.value + rb.value,
                                         slack({{1.0, &r_sum}, {1.0, &ra}, {1.0, &rb}})));
  out.push_back(InequalityCheck::at_most("difference", r_diff.value, ra.value + rb.value,
                                         slack({{1.0, &r_diff}, {1.0, &ra}, {1.0, &rb}})));
  out.push_back(InequalityCheck::at_most("contraction", r_phi.value, lmax * ra.value,
                                         slack({{1.0, &r_phi}, {lmax, &ra}})));
  out.push_back(InequalityCheck::at_most("abs_contraction", r_abs.value, ra.value,
                                         slack({{1.0, &r_abs}, {1.0, &ra}})));
  out.push_back(InequalityCheck::at_most("coord_max", r_max.value, ra.value + rb.value,
                                         slack({{1.0, &r_max}, {1.0, &ra}, {1.0, &rb}})));
  return out;
}

}  // namespace roblip
