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

#include "roblip/verify.hpp"

#include <algorithm>
#include <chrono>
#include <map>

#include "roblip/bounds.hpp"
#include "roblip/error.hpp"
#include "roblip/generators.hpp"
#include "roblip/oracles.hpp"
#include "roblip/rademacher.hpp"
#include "roblip/robust_loss.hpp"
#include "roblip/rng.hpp"

namespace roblip {

namespace {

enum SuiteId : std::uint64_t { kSetAlgebra = 1, kEndpoint, kEnvelope, kGap, kTightness, kChain };

Rng trial_rng(const VerifyOptions& o, SuiteId suite, std::size_t t) {
  return Rng(stream_seed({o.seed, static_cast<std::uint64_t>(suite), static_cast<std::uint64_t>(t)}));
}

std::size_t between(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

template <class Fn>
SuiteReport run_suite(const std::string& name, const VerifyOptions& o, SuiteId id, Fn&& trial) {
  SuiteReport rep;
  rep.name = name;
  rep.trials = o.trials;
  for (std::size_t t = 0; t < o.trials; ++t) {
    Rng rng = trial_rng(o, id, t);
    TrialRecord rec{t, trial(rng)};
    for (const auto& c : rec.checks)
      if (!c.passed) ++rep.violations;
    rep.records.push_back(std::move(rec));
  }
  return rep;
}

}  // namespace

void VerifyOptions::validate() const {
  if (trials < 1) throw InvalidArgument("verify: trials must be >= 1");
  if (max_dim < 1 || max_set_size < 1) throw InvalidArgument("verify: sizes must be >= 1");
  if (max_dim > kExactRadCutoff) throw CutoffExceeded("verify: max_dim exceeds the exact enumeration cutoff");
  if (grid_points < 3) throw InvalidArgument("verify: grid_points must be >= 3");
}

std::size_t VerifyReport::violations() const {
  std::size_t v = 0;
  for (const auto& s : suites) v += s.violations;
  return v;
}

std::vector<std::pair<std::string, std::size_t>> VerifyReport::violations_by_check() const {
  std::map<std::string, std::size_t> m;
  for (const auto& s : suites)
    for (const auto& r : s.records)
      for (const auto& c : r.checks) m[c.name] += c.passed ? 0 : 1;
  return {m.begin(), m.end()};
}

SuiteReport verify_set_algebra(const VerifyOptions& o) {
  return run_suite("set_algebra", o, kSetAlgebra, [&](Rng& rng) {
    const std::size_t n = between(rng, 1, o.max_dim);
    const VectorSet a = gen::random_vector_set(rng, n, between(rng, 1, o.max_set_size));
    const VectorSet b = gen::random_vector_set(rng, n, between(rng, 1, o.max_set_size));
    CoordMapFamily phi;
    if (o.understate_lipschitz) {
      // phi_i(t) = L t declared as L / 2.
      const double l = rng.uniform(0.5, 3.0);
      for (std::size_t i = 0; i < n; ++i) {
        phi.maps.emplace_back([l](double t) { return l * t; });
        phi.lipschitz.push_back(l / 2.0);
      }
    } else {
      phi = gen::random_coord_maps(rng, n, 0.1, 3.0);
    }
    LemmaSuiteOptions lo;
    lo.mode = RadMode::exact;
    return verify_lemma_suite(a, b, phi, lo);
  });
}

SuiteReport verify_endpoint(const VerifyOptions& o) {
  return run_suite("endpoint", o, kEndpoint, [&](Rng& rng) {
    const PiecewiseLinear1D f = gen::random_pwl(rng);
    const double x = rng.uniform(-2.0, 2.0);
    const double y = rng.uniform(-1.0, 1.0);
    RobustnessConfig cfg;
    cfg.rho = rng.uniform(0.01, 0.5);
    const double exact = robust_sq_loss(f, {{x}, y}, cfg);
    const double grid = oracle::grid_sup_sq_loss(f, x, y, cfg.rho, o.grid_points);
    return std::vector{InequalityCheck::equal("endpoint", exact, grid, o.endpoint_tolerance)};
  });
}

SuiteReport verify_envelope_lipschitz(const VerifyOptions& o) {
  return run_suite("envelope_lipschitz", o, kEnvelope, [&](Rng& rng) {
    const PiecewiseLinear1D f = gen::random_pwl(rng);
    const double rho = rng.uniform(0.0, 0.5);
    std::vector<std::pair<double, double>> probes(100);
    for (auto& [u, v] : probes) {
      u = rng.uniform(-3.0, 3.0);
      // Half the probes are close pairs, where local slopes show up.
      v = rng.uniform() < 0.5 ? rng.uniform(-3.0, 3.0) : u + rng.uniform(-0.05, 0.05);
    }
    const auto rep = envelope_lipschitz_check(f, rho, probes, o.envelope_tolerance);
    return std::vector{
        InequalityCheck::at_most("envelope_upper", rep.worst_upper_change, rep.worst_upper_allowance,
                                 o.envelope_tolerance),
        InequalityCheck::at_most("envelope_lower", rep.worst_lower_change, rep.worst_lower_allowance,
                                 o.envelope_tolerance)};
  });
}

SuiteReport verify_gap_bound(const VerifyOptions& o) {
  return run_suite("gap_bound", o, kGap, [&](Rng& rng) {
    const PiecewiseLinear1D f = gen::random_pwl(rng);
    const SampleSet s = gen::random_regression_sample(rng, between(rng, 1, o.max_dim));
    RobustnessConfig cfg;
    cfg.rho = rng.uniform(0.0, 0.5);
    auto gc = check_gap_bound(f, s, cfg, std::nullopt, o.gap_tolerance);
    gc.check.name = "gap_bound";
    return std::vector{gc.check};
  });
}

SuiteReport verify_gap_tightness(const VerifyOptions& o) {
  VerifyOptions once = o;
  once.trials = 1;
  return run_suite("gap_tightness", once, kTightness, [&](Rng& rng) {
    // f(x) = x at the single sample (0, 0): robust - clean = L^2 rho^2 exactly.
    const auto f = PiecewiseLinear1D::linear(1.0, 0.0);
    const double rho = rng.uniform(0.1, 1.0);
    SampleSet s;
    s.samples.push_back({{0.0}, 0.0});
    RobustnessConfig cfg;
    cfg.rho = rho;
    const auto rep = loss_report(f, s, cfg);
    const double gap = rep.robust_train - rep.clean_train;
    const double bound = gap_bound(1.0, rho, rep.clean_train);
    return std::vector{InequalityCheck::equal("gap_tightness", gap, bound, 1e-12 * std::max(1.0, bound))};
  });
}

SuiteReport verify_loss_chain(const VerifyOptions& o) {
  static constexpr double kRhos[] = {0.05, 0.1, 0.3};
  return run_suite("loss_chain", o, kChain, [&](Rng& rng) {
    const std::size_t k = between(rng, 1, 6);
    std::vector<PiecewiseLinear1D> fs;
    for (std::size_t i = 0; i < k; ++i) fs.push_back(gen::random_pwl(rng).clamped(-1.0, 1.0));
    const SampleSet s = gen::random_regression_sample(rng, between(rng, 1, o.max_dim));
    const double rho = kRhos[rng.below(3)];
    return verify_loss_complexity_chain(fs, s, rho);
  });
}

VerifyReport run_verification(const VerifyOptions& opts) {
  opts.validate();
  const auto start = std::chrono::steady_clock::now();
  VerifyReport rep;
  rep.options = opts;
  rep.suites.push_back(verify_set_algebra(opts));
  rep.suites.push_back(verify_endpoint(opts));
  rep.suites.push_back(verify_envelope_lipschitz(opts));
  rep.suites.push_back(verify_gap_bound(opts));
  rep.suites.push_back(verify_gap_tightness(opts));
  rep.suites.push_back(verify_loss_chain(opts));
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace roblip
