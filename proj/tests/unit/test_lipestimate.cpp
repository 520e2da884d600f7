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
#include "roblip/lipestimate.hpp"
#include "roblip/rng.hpp"

using namespace roblip;

namespace {

struct Instance {
  std::size_t n, d, c;
  std::vector<double> x, out;
};

Instance random_instance(Rng& rng, std::size_t n, std::size_t d, std::size_t c) {
  Instance in{n, d, c, std::vector<double>(n * d), std::vector<double>(n * c)};
  for (auto& v : in.x) v = rng.uniform();
  for (auto& v : in.out) v = rng.uniform(-1, 1);
  return in;
}

// Plain double loop with its own distance computation.
double plain_max_slope(const Instance& in) {
  double best = 0;
  for (std::size_t i = 0; i < in.n; ++i)
    for (std::size_t j = i + 1; j < in.n; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < in.d; ++k) s += (in.x[i * in.d + k] - in.x[j * in.d + k]) * (in.x[i * in.d + k] - in.x[j * in.d + k]);
      const double dist = std::sqrt(s);
      if (dist < 1e-9) continue;
      for (std::size_t c = 0; c < in.c; ++c)
        best = std::max(best, std::fabs(in.out[i * in.c + c] - in.out[j * in.c + c]) / dist);
    }
  return best;
}

}  // namespace

TEST_CASE("hand examples") {
  const std::vector<double> x{0, 0, 3, 4};
  const std::vector<double> out{0, 3};
  CHECK(pairwise_lip(out, 1, x, 2).L_emp == doctest::Approx(0.6).epsilon(1e-15));
  const std::vector<double> x2{0, 0, 1, 0};
  const std::vector<double> out2{0, 1};
  CHECK(pairwise_lip(out2, 1, x2, 2).L_emp == 1.0);
  const std::vector<double> flat(4 * 2, 0.25);
  Rng rng(1);
  std::vector<double> xs(4 * 3);
  for (auto& v : xs) v = rng.uniform();
  CHECK(pairwise_lip(flat, 2, xs, 3).L_emp == 0.0);
}

TEST_CASE("blocked estimator equals the naive oracle exactly") {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto in = random_instance(rng, 2 + rng.below(120), 1 + rng.below(20), 1 + rng.below(5));
    LipOptions o;
    o.block = 1 + rng.below(40);
    o.threads = 1 + static_cast<unsigned>(rng.below(4));
    const auto fast = pairwise_lip(in.out, in.c, in.x, in.d, o);
    const auto slow = pairwise_lip_naive(in.out, in.c, in.x, in.d);
    CHECK(fast.L_emp == slow.L_emp);
    CHECK(fast.per_class == slow.per_class);
    CHECK(fast.witness == slow.witness);
    CHECK(fast.L_emp == doctest::Approx(plain_max_slope(in)).epsilon(1e-12));
  }
}

TEST_CASE("thread count does not change results") {
  Rng rng(3);
  const auto in = random_instance(rng, 400, 30, 4);
  LipOptions one, many;
  one.threads = 1;
  many.threads = 8;
  many.block = 17;
  const auto a = pairwise_lip(in.out, in.c, in.x, in.d, one);
  const auto b = pairwise_lip(in.out, in.c, in.x, in.d, many);
  CHECK(a.per_class == b.per_class);
  CHECK(a.witness == b.witness);
}

TEST_CASE("duplicates are skipped and witnesses are valid") {
  std::vector<double> x{0, 0, 0, 0, 1, 1};
  std::vector<double> out{0, 0.5, 0.2};
  const auto e = pairwise_lip(out, 1, x, 2);
  CHECK(e.pairs_skipped == 1);
  const auto [i, j] = e.witness[0];
  CHECK(i < j);
  CHECK(std::hypot(x[2 * i] - x[2 * j], x[2 * i + 1] - x[2 * j + 1]) >= 1e-9);
  CHECK_THROWS_AS(pairwise_lip(std::vector<double>{0, 1}, 1, std::vector<double>{0, 0}, 1), InsufficientData);
  CHECK_THROWS_AS(pairwise_lip(std::vector<double>{0}, 1, std::vector<double>{0}, 1), InvalidArgument);
}

TEST_CASE("superset monotonicity and scale covariance") {
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto in = random_instance(rng, 60, 5, 3);
    const std::size_t m = 2 + rng.below(58);
    const auto sub = pairwise_lip(std::span(in.out).first(m * 3), 3, std::span(in.x).first(m * 5), 5);
    const auto full = pairwise_lip(in.out, 3, in.x, 5);
    CHECK(full.L_emp >= sub.L_emp);
    auto scaled = in.x;
    for (auto& v : scaled) v *= 4.0;  // power of two keeps the scaling exact
    CHECK(pairwise_lip(in.out, 3, scaled, 5).L_emp == full.L_emp / 4.0);
    const double tt = rng.uniform(0.1, 10);
    for (std::size_t k = 0; k < scaled.size(); ++k) scaled[k] = in.x[k] * tt;
    CHECK(pairwise_lip(in.out, 3, scaled, 5).L_emp == doctest::Approx(full.L_emp / tt).epsilon(1e-12));
  }
}

TEST_CASE("lower bound property for piecewise-linear predictors") {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto f = gen::random_pwl(rng);
    std::vector<double> x(2 + rng.below(30));
    for (auto& v : x) v = rng.uniform(-3, 3);
    const auto rep = lip_lower_bound_check(f, x, 1);
    CHECK(rep.lower_bound.passed);
    CHECK(rep.lipschitz == f.lipschitz());
  }
}

TEST_CASE("linear predictor recovers its norm") {
  const LinearPredictor lin({1.0, -2.0, 2.0}, 0.3);
  std::vector<double> x{0.5, 0.1, -0.2, 0.5 + 1.0, 0.1 - 2.0, -0.2 + 2.0, 3, 3, 3};
  const auto rep = lip_lower_bound_check(lin, x, 3);
  REQUIRE(rep.equality.has_value());
  CHECK(rep.equality->passed);
  CHECK(std::fabs(rep.estimate.L_emp - 3.0) <= 1e-9);
}

TEST_CASE("zero estimate filter") {
  std::vector<ScalingRecord> rs(4);
  for (std::size_t i = 0; i < 4; ++i) {
    rs[i].n = 1000 * (i + 1);
    rs[i].width = 2;
    rs[i].L_emp = 0.5;
  }
  const auto same = filter_zero_estimates(rs);
  CHECK(same.kept.size() == 4);
  CHECK(same.dropped.empty());
  rs[0].L_emp = 0.0;
  rs[1].L_emp = 5e-13;
  rs[2].status = "diverged";
  const auto some = filter_zero_estimates(rs);
  CHECK(some.kept.size() == 1);
  CHECK(some.dropped.size() == 3);
  CHECK(some.log.size() == 3);
  CHECK(some.log[0].find("n=1000") != std::string::npos);
  CHECK_FALSE(some.all_dropped);
  for (auto& r : rs) r.L_emp = 0.0;
  const auto none = filter_zero_estimates(rs);
  CHECK(none.kept.empty());
  CHECK(none.all_dropped);
}
