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

#include <cmath>

#include "doctest.h"
#include "roblip/error.hpp"
#include "roblip/generators.hpp"
#include "roblip/oracles.hpp"
#include "roblip/rademacher.hpp"
#include "roblip/robust_loss.hpp"
#include "roblip/rng.hpp"

using namespace roblip;

namespace {

RobustnessConfig exact(double rho) {
  RobustnessConfig c;
  c.rho = rho;
  return c;
}

// Plain dense-grid envelope over [x - rho, x + rho].
std::pair<double, double> grid_envelope(const PiecewiseLinear1D& f, double x, double rho, int m) {
  double lo = INFINITY, hi = -INFINITY;
  for (int k = 0; k < m; ++k) {
    const double v = f(x - rho + 2 * rho * k / (m - 1));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("pwl evaluation, slopes and clamping") {
  const PiecewiseLinear1D f({-1, 0, 1}, {0, 1, 0}, 1, -1);
  CHECK(f(-2) == -1);
  CHECK(f(-0.5) == 0.5);
  CHECK(f(0.25) == 0.75);
  CHECK(f(3) == -2);
  CHECK(f.lipschitz() == 1);
  const auto g = PiecewiseLinear1D({0, 1}, {0, 4}, 0, 0).clamped(-1, 1);
  CHECK(g(0.5) == 1);
  CHECK(g(0.125) == 0.5);
  CHECK(g.lipschitz() == 4);
  const auto [lo, hi] = g.range();
  CHECK(lo == 0);
  CHECK(hi == 1);
  CHECK_THROWS_AS(PiecewiseLinear1D({0, 0}, {1, 2}), InvalidArgument);
}

TEST_CASE("envelope examples") {
  const ConstantPredictor c(1, 0.3);
  RobustnessConfig grid = exact(1.0);
  grid.method = SupMethod::grid;
  const double x0 = 0.7;
  const auto ec = envelope(c, std::span<const double>(&x0, 1), grid);
  CHECK(ec.lower == 0.3);
  CHECK(ec.upper == 0.3);

  const auto id = PiecewiseLinear1D::linear(1.0);
  const double z = 0.0;
  const auto el = envelope(id, std::span<const double>(&z, 1), exact(0.5));
  CHECK(el.lower == -0.5);
  CHECK(el.upper == 0.5);
  CHECK(el.certified_exact);

  const PiecewiseLinear1D hat({-1, 0, 1}, {0, 1, 0}, 1, -1);
  const double x = 0.9;
  const auto eh = envelope(hat, std::span<const double>(&x, 1), exact(0.2));
  CHECK(eh.upper == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(eh.lower == doctest::Approx(-0.1).epsilon(1e-14));
  const auto [glo, ghi] = grid_envelope(hat, x, 0.2, 100000);
  CHECK(std::fabs(eh.upper - ghi) < 1e-4);
  CHECK(std::fabs(eh.lower - glo) < 1e-4);
}

TEST_CASE("exact_pwl requires a one-dimensional piecewise-linear predictor") {
  const LinearPredictor lin({1.0, 2.0});
  const double x[2] = {0, 0};
  CHECK_THROWS_AS(envelope(lin, x, exact(0.1)), Unsupported);
}

TEST_CASE("robust loss examples") {
  const auto id = PiecewiseLinear1D::linear(1.0);
  CHECK(robust_sq_loss(id, {{0.0}, 0.0}, exact(0.5)) == 0.25);
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto f = gen::random_pwl(rng);
    const LabeledSample s{{rng.uniform(-2, 2)}, rng.uniform(-1, 1)};
    CHECK(robust_sq_loss(f, s, exact(0.0)) == clean_sq_loss(f, s));
  }
  const ConstantPredictor c(1, -0.4);
  auto grid = exact(2.0);
  grid.method = SupMethod::grid;
  CHECK(robust_sq_loss(c, {{3.0}, -0.4}, grid) == 0.0);
  CHECK_THROWS_AS(robust_sq_loss(c, {{3.0}, -0.4}, exact(2.0)), Unsupported);
}

TEST_CASE("robust loss equals the grid oracle") {
  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    const auto f = gen::random_pwl(rng);
    const double x = rng.uniform(-2, 2), y = rng.uniform(-1, 1), rho = rng.uniform(0.01, 0.5);
    CHECK(std::fabs(robust_sq_loss(f, {{x}, y}, exact(rho)) - oracle::grid_sup_sq_loss(f, x, y, rho)) <= 1e-6);
  }
}

TEST_CASE("envelope ordering, monotonicity in rho and the a_rho bound") {
  Rng rng(12);
  for (int t = 0; t < 200; ++t) {
    const auto f = gen::random_pwl(rng);
    const double x = rng.uniform(-3, 3);
    const double r1 = rng.uniform(0, 0.5), r2 = r1 + rng.uniform(0, 0.5);
    const auto e1 = envelope(f, std::span<const double>(&x, 1), exact(r1));
    const auto e2 = envelope(f, std::span<const double>(&x, 1), exact(r2));
    CHECK(e1.lower <= f(x));
    CHECK(f(x) <= e1.upper);
    CHECK(e2.upper >= e1.upper);
    CHECK(e2.lower <= e1.lower);
    CHECK(e1.upper <= f(x) + f.lipschitz() * r1 + 1e-12);
  }
  for (int t = 0; t < 200; ++t) {
    const auto f = gen::random_pwl(rng).clamped(-1, 1);
    const double rho = rng.uniform(0, 0.5);
    const double bound = (2 + f.lipschitz() * rho) * (2 + f.lipschitz() * rho);
    CHECK(robust_sq_loss(f, {{rng.uniform(-3, 3)}, rng.uniform(-1, 1)}, exact(rho)) <= bound);
  }
}

TEST_CASE("approximate methods are inner approximations") {
  Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    const auto f = gen::random_pwl(rng);
    const LabeledSample s{{rng.uniform(-2, 2)}, rng.uniform(-1, 1)};
    const double rho = rng.uniform(0.01, 0.5);
    const double truth = robust_sq_loss(f, s, exact(rho));
    RobustnessConfig pa = exact(rho);
    pa.method = SupMethod::projected_ascent;
    pa.seed = t;
    RobustnessConfig gr = exact(rho);
    gr.method = SupMethod::grid;
    CHECK(robust_sq_loss(f, s, pa) <= truth + 1e-12);
    CHECK(robust_sq_loss(f, s, gr) <= truth + 1e-12);
    CHECK(robust_sq_loss(f, s, pa) >= clean_sq_loss(f, s) - 1e-12);
  }
}

TEST_CASE("projected ascent on a multi-dimensional linear predictor") {
  const LinearPredictor lin({3.0, 4.0}, 0.5);
  RobustnessConfig c = exact(0.2);
  c.method = SupMethod::projected_ascent;
  const double x[2] = {0.1, -0.3};
  const auto e = envelope(lin, x, c);
  const double fx = 3 * 0.1 - 4 * 0.3 + 0.5;
  // Normalized ascent reaches the ball boundary along w.
  CHECK(e.upper == doctest::Approx(fx + 5 * 0.2).epsilon(1e-9));
  CHECK(e.lower == doctest::Approx(fx - 5 * 0.2).epsilon(1e-9));
  CHECK_FALSE(e.certified_exact);
}

TEST_CASE("config validation") {
  RobustnessConfig c;
  c.rho = -1;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.rho = 0.1;
  c.method = SupMethod::projected_ascent;
  c.ascent_steps = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("loss vector shapes and values") {
  const ConstantPredictor zero(1, 0.0);
  SampleSet s;
  s.samples = {{{0.0}, 1.0}, {{1.0}, -1.0}};
  const auto v = loss_vectors({&zero}, s, exact(0.0), LossKind::clean);
  CHECK(v.size() == 1);
  CHECK(v[0][0] == 1.0);
  CHECK(v[0][1] == 1.0);

  Rng rng(4);
  const auto f = gen::random_pwl(rng), g = gen::random_pwl(rng);
  const auto s4 = gen::random_regression_sample(rng, 4);
  const auto ev = loss_vectors({&f, &g}, s4, exact(0.3), LossKind::eval);
  CHECK(ev.size() == 2);
  CHECK(ev.dim() == 4);
  CHECK(loss_vectors({&f, &g}, s4, exact(0.0), LossKind::robust).data() ==
        loss_vectors({&f, &g}, s4, exact(0.0), LossKind::clean).data());
}

TEST_CASE("loss complexity chain") {
  SampleSet s;
  s.samples = {{{0.0}, 0.5}, {{1.0}, -0.2}, {{-1.0}, 0.9}};
  const auto constant = verify_loss_complexity_chain({PiecewiseLinear1D::constant(0.2)}, s, 0.1);
  REQUIRE(constant.size() == 3);
  for (const auto& c : constant) {
    CHECK(c.passed);
    CHECK(c.lhs == doctest::Approx(0.0).epsilon(1e-15));
  }
  Rng rng(99);
  for (int t = 0; t < 200; ++t) {
    std::vector<PiecewiseLinear1D> fs;
    const std::size_t k = 1 + rng.below(6);
    for (std::size_t i = 0; i < k; ++i) fs.push_back(gen::random_pwl(rng).clamped(-1, 1));
    const auto ss = gen::random_regression_sample(rng, 1 + rng.below(8));
    const double rho = t % 2 ? 0.0 : 0.3;
    CHECK(all_passed(verify_loss_complexity_chain(fs, ss, rho)));
  }
  CHECK_THROWS_AS(verify_loss_complexity_chain({PiecewiseLinear1D::linear(1.0)}, s, 0.1), InvalidArgument);
}

TEST_CASE("envelope lipschitz check") {
  std::vector<std::pair<double, double>> probes;
  Rng rng(6);
  for (int i = 0; i < 100; ++i) probes.emplace_back(rng.uniform(-3, 3), rng.uniform(-3, 3));
  const auto lin = envelope_lipschitz_check(PiecewiseLinear1D::linear(2.0, 1.0), 0.3, probes);
  CHECK(lin.passed);
  CHECK(lin.max_upper_slope == doctest::Approx(2.0).epsilon(1e-12));
  const auto cst = envelope_lipschitz_check(PiecewiseLinear1D::constant(0.5), 0.3, probes);
  CHECK(cst.passed);
  CHECK(cst.max_upper_slope == 0.0);
  for (int t = 0; t < 200; ++t) CHECK(envelope_lipschitz_check(gen::random_pwl(rng), rng.uniform(0, 0.5), probes).passed);
}

TEST_CASE("grid oracle on a known maximum") {
  // (f(z) - y)^2 with f(z) = z, y = 0 on [-0.5, 0.5]: the sup 0.25 sits on the boundary.
  CHECK(oracle::grid_sup_sq_loss(PiecewiseLinear1D::linear(1.0), 0.0, 0.0, 0.5, 1001) == doctest::Approx(0.25));
}
