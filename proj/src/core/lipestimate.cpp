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

#include "roblip/lipestimate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "roblip/error.hpp"
#include "roblip/kernels.hpp"

namespace roblip {

namespace {

struct Best {
  double value = -1.0;
  std::size_t i = 0, j = 0;

  // Total order: larger slope wins, then the smaller pair.
  void offer(double v, std::size_t a, std::size_t b) {
    if (v > value || (v == value && (a < i || (a == i && b < j)))) {
      value = v;
      i = a;
      j = b;
    }
  }
};

struct Partial {
  std::vector<Best> best;
  std::uint64_t skipped = 0;
  std::uint64_t scanned = 0;
};

void visit_pair(std::span<const double> outputs, std::size_t classes, std::span<const double> x, std::size_t d,
                double dup2, std::size_t i, std::size_t j, Partial& part) {
  const double dist2 = detail::squared_distance(x.data() + i * d, x.data() + j * d, d);
  if (!(dist2 >= dup2)) {
    ++part.skipped;
    return;
  }
  ++part.scanned;
  const double inv = 1.0 / std::sqrt(dist2);
  const double* oi = outputs.data() + i * classes;
  const double* oj = outputs.data() + j * classes;
  for (std::size_t c = 0; c < classes; ++c) part.best[c].offer(std::fabs(oi[c] - oj[c]) * inv, i, j);
}

void check_shapes(std::span<const double> outputs, std::size_t classes, std::span<const double> x, std::size_t d) {
  if (classes == 0 || d == 0) throw InvalidArgument("pairwise_lip: classes and d must be positive");
  if (outputs.size() % classes != 0 || x.size() % d != 0)
    throw DimensionError("pairwise_lip: matrix storage is not a multiple of its width");
  if (outputs.size() / classes != x.size() / d) throw DimensionError("pairwise_lip: output and input row counts differ");
  if (x.size() / d < 2) throw InvalidArgument("pairwise_lip: needs at least two samples");
}

LipEstimate finish(const Partial& part, std::size_t n) {
  if (part.scanned == 0) throw InsufficientData("pairwise_lip: every pair was skipped as a near-duplicate");
  LipEstimate est;
  est.n = n;
  est.pairs_skipped = part.skipped;
  for (const Best& b : part.best) {
    est.per_class.push_back(b.value);
    est.witness.emplace_back(b.i, b.j);
    est.L_emp = std::max(est.L_emp, b.value);
  }
  return est;
}

}  // namespace

LipEstimate pairwise_lip(std::span<const double> outputs, std::size_t classes, std::span<const double> x,
                         std::size_t d, const LipOptions& opts) {
  check_shapes(outputs, classes, x, d);
  const std::size_t n = x.size() / d;
  const double dup2 = opts.duplicate_threshold * opts.duplicate_threshold;
  const std::size_t bs = std::max<std::size_t>(opts.block, 1);
  const std::size_t nb = (n + bs - 1) / bs;

  // Upper-triangular tiles (bi <= bj), numbered row by row.
  std::vector<std::pair<std::size_t, std::size_t>> tiles;
  tiles.reserve(nb * (nb + 1) / 2);
  for (std::size_t bi = 0; bi < nb; ++bi)
    for (std::size_t bj = bi; bj < nb; ++bj) tiles.emplace_back(bi, bj);

  auto scan_tile = [&](std::size_t t, Partial& part) {
    const auto [bi, bj] = tiles[t];
    const std::size_t i0 = bi * bs, i1 = std::min(n, i0 + bs);
    const std::size_t j0 = bj * bs, j1 = std::min(n, j0 + bs);
    for (std::size_t i = i0; i < i1; ++i)
      for (std::size_t j = std::max(j0, i + 1); j < j1; ++j) visit_pair(outputs, classes, x, d, dup2, i, j, part);
  };

  unsigned threads = opts.threads ? opts.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, tiles.size()));
  std::vector<Partial> parts(std::max(threads, 1U));
  for (auto& p : parts) p.best.resize(classes);

  if (threads <= 1) {
    for (std::size_t t = 0; t < tiles.size(); ++t) scan_tile(t, parts[0]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t t = next++; t < tiles.size(); t = next++) scan_tile(t, parts[w]);
      });
  }

  Partial total;
  total.best.resize(classes);
  for (const auto& p : parts) {
    total.skipped += p.skipped;
    total.scanned += p.scanned;
    for (std::size_t c = 0; c < classes; ++c)
      if (p.scanned > 0) total.best[c].offer(p.best[c].value, p.best[c].i, p.best[c].j);
  }
  return finish(total, n);
}

LipEstimate pairwise_lip_naive(std::span<const double> outputs, std::size_t classes, std::span<const double> x,
                               std::size_t d, double duplicate_threshold) {
  check_shapes(outputs, classes, x, d);
  const std::size_t n = x.size() / d;
  Partial part;
  part.best.resize(classes);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      visit_pair(outputs, classes, x, d, duplicate_threshold * duplicate_threshold, i, j, part);
  return finish(part, n);
}

LipLowerBoundReport lip_lower_bound_check(const Predictor& f, std::span<const double> x, std::size_t d,
                                          double slack, double equality_tolerance) {
  const auto l = f.lipschitz_bound();
  if (!l) throw InvalidArgument("lip_lower_bound_check: predictor has no exact Lipschitz constant");
  if (d != f.input_dim()) throw DimensionError("lip_lower_bound_check: input dimension mismatch");
  const std::size_t n = x.size() / d, c = f.output_count();
  std::vector<double> out(n * c);
  for (std::size_t i = 0; i < n; ++i) f.evaluate(x.subspan(i * d, d), std::span<double>(out).subspan(i * c, c));

  LipLowerBoundReport rep;
  rep.estimate = pairwise_lip(out, c, x, d);
  rep.lipschitz = *l;
  rep.lower_bound = InequalityCheck::at_most("empirical_below_true", rep.estimate.L_emp, *l, slack);

  if (const auto* lin = dynamic_cast<const LinearPredictor*>(&f); lin != nullptr && *l > 0.0) {
    std::vector<double> w(d);
    lin->gradient(x.subspan(0, d), 0, w);
    bool aligned = false;
    for (std::size_t i = 0; i < n && !aligned; ++i)
      for (std::size_t j = i + 1; j < n && !aligned; ++j) {
        double dot = 0.0, nn = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double diff = x[j * d + k] - x[i * d + k];
          dot += diff * w[k];
          nn += diff * diff;
        }
        aligned = nn > 0.0 && std::fabs(std::fabs(dot) - std::sqrt(nn) * *l) <= 1e-12 * std::sqrt(nn) * *l;
      }
    if (aligned)
      rep.equality = InequalityCheck::equal("aligned_pair_attains_norm", rep.estimate.L_emp, *l, equality_tolerance);
  }
  return rep;
}

FilterResult filter_zero_estimates(const std::vector<ScalingRecord>& records, double threshold) {
  FilterResult out;
  for (const auto& r : records) {
    std::string reason;
    if (r.status != "ok")
      reason = "status " + r.status;
    else if (!std::isfinite(r.L_emp) || r.L_emp < threshold)
      reason = "zero Lipschitz estimate";
    if (reason.empty()) {
      out.kept.push_back(r);
    } else {
      out.dropped.push_back(r);
      out.log.push_back("dropped n=" + std::to_string(r.n) + " width=" + std::to_string(r.width) +
                        " seed=" + std::to_string(r.seed) + ": " + reason);
    }
  }
  out.all_dropped = out.kept.empty() && !records.empty();
  return out;
}

}  // namespace roblip
