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
#include "naive_oracles.hpp"
#include "roblip/error.hpp"
#include "roblip/generators.hpp"
#include "roblip/rademacher.hpp"
#include "roblip/rng.hpp"

using namespace roblip;

namespace {

std::vector<std::vector<double>> rows_of(const VectorSet& s) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < s.size(); ++i) out.emplace_back(s[i].begin(), s[i].end());
  return out;
}

}  // namespace

TEST_CASE("rad_exact examples") {
  CHECK(rad_exact(VectorSet::from_rows({{0, 0, 0}})).value == 0.0);
  CHECK(rad_exact(VectorSet::from_rows({{0.3, -2.0, 5.0}})).value == doctest::Approx(0.0).epsilon(1e-15));
  const auto e = rad_exact(VectorSet::from_rows({{1, 1}, {-1, -1}}));
  CHECK(e.value == 0.5);
  CHECK(e.std_error == 0.0);
  CHECK(e.mode == RadMode::exact);
  CHECK(e.draws == 0);
}

TEST_CASE("rad_exact matches naive enumeration") {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto a = gen::random_vector_set(rng, 1 + rng.below(10), 1 + rng.below(6));
    CHECK(rad_exact(a).value == doctest::Approx(oracle_naive::rademacher(rows_of(a))).epsilon(1e-13));
  }
}

TEST_CASE("rad_exact is bit-stable across thread counts") {
  Rng rng(9);
  const auto a = gen::random_vector_set(rng, 16, 5);
  ExactRadOptions one, four;
  one.threads = 1;
  four.threads = 4;
  CHECK(rad_exact(a, one).value == rad_exact(a, four).value);
}

TEST_CASE("rad_exact rejects dimension above the cutoff") {
  std::vector<double> flat(21, 1.0);
  CHECK_THROWS_AS(rad_exact(VectorSet(21, flat)), CutoffExceeded);
}

TEST_CASE("rad_mc examples") {
  const auto zero = rad_mc(VectorSet::from_rows({{0, 0, 0, 0}}), 1000, 1);
  CHECK(zero.value == 0.0);
  CHECK(zero.std_error == 0.0);
  const auto pm = rad_mc(VectorSet::from_rows({{1, 1}, {-1, -1}}), 100000, 17);
  CHECK(std::fabs(pm.value - 0.5) <= 3 * pm.std_error);
  CHECK(pm.mode == RadMode::monte_carlo);
  CHECK(pm.draws == 100000);
  const auto single = rad_mc(VectorSet::from_rows({{0.4, -1.0, 2.0}}), 10000, 3);
  CHECK(std::fabs(single.value) <= 3 * single.std_error);
  CHECK_THROWS_AS(rad_mc(VectorSet::from_rows({{1.0}}), 1, 0), InvalidArgument);
}

TEST_CASE("rad_mc is deterministic given the seed") {
  const auto a = VectorSet::from_rows({{1, -2, 3}, {0.5, 0.5, -1}});
  CHECK(rad_mc(a, 5000, 8).value == rad_mc(a, 5000, 8).value);
}

TEST_CASE("combine examples") {
  const auto sum = combine(VectorSet::from_rows({{1, 2}}), VectorSet::from_rows({{3, 4}}), CombineKind::minkowski_sum);
  CHECK(sum.size() == 1);
  CHECK(sum[0][0] == 4);
  CHECK(sum[0][1] == 6);
  const auto a = VectorSet::from_rows({{1, 0}, {0, 1}});
  CHECK(combine(a, VectorSet::from_rows({{0, 0}}), CombineKind::minkowski_diff).data() == a.data());
  const auto mx = combine(VectorSet::from_rows({{1, -1}}), VectorSet::from_rows({{-1, 1}}), CombineKind::coord_max);
  CHECK(mx[0][0] == 1);
  CHECK(mx[0][1] == 1);
  CHECK_THROWS_AS(combine(a, VectorSet::from_rows({{1, 2, 3}}), CombineKind::minkowski_sum), DimensionError);
}

TEST_CASE("transform examples") {
  const auto t = transform(VectorSet::from_rows({{1, 2}}), Translate{{-1, -2}});
  CHECK(t[0][0] == 0);
  CHECK(t[0][1] == 0);
  const auto ab = transform(VectorSet::from_rows({{-3, 4}}), Absolute{});
  CHECK(ab[0][0] == 3);
  CHECK(ab[0][1] == 4);
  CoordMapFamily twice;
  for (int i = 0; i < 2; ++i) {
    twice.maps.emplace_back([](double x) { return 2 * x; });
    twice.lipschitz.push_back(2.0);
  }
  const auto m = transform(VectorSet::from_rows({{1, -1}}), CoordMaps{twice});
  CHECK(m[0][0] == 2);
  CHECK(m[0][1] == -2);
  CHECK_THROWS_AS(transform(VectorSet::from_rows({{1, 2, 3}}), CoordMaps{twice}), DimensionError);
}

TEST_CASE("lemma suite on the worked example") {
  const auto a = VectorSet::from_rows({{1, 1}, {-1, -1}});
  const auto b = VectorSet::from_rows({{0, 0}});
  const auto checks = verify_lemma_suite(a, b, CoordMapFamily::identity(2));
  REQUIRE(checks.size() == 6);
  CHECK(all_passed(checks));
  CHECK(checks[1].name == "sum");
  CHECK(checks[1].lhs == checks[1].rhs);          // equality in the sum bound
  CHECK(checks[3].lhs == checks[3].rhs);          // identity maps: contraction is tight
}

TEST_CASE("lemma suite holds on random instances in exact mode") {
  Rng rng(2024);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.below(8);
    const auto a = gen::random_vector_set(rng, n, 1 + rng.below(8));
    const auto b = gen::random_vector_set(rng, n, 1 + rng.below(8));
    const auto phi = gen::random_coord_maps(rng, n, 0.1, 3.0);
    CHECK(phi.validate(200, 4.0, t));
    CHECK(all_passed(verify_lemma_suite(a, b, phi)));
  }
}

TEST_CASE("lemma suite in monte carlo mode") {
  Rng rng(77);
  const auto a = gen::random_vector_set(rng, 6, 5);
  const auto b = gen::random_vector_set(rng, 6, 4);
  LemmaSuiteOptions o;
  o.mode = RadMode::monte_carlo;
  o.draws = 20000;
  o.seed = 4;
  CHECK(all_passed(verify_lemma_suite(a, b, gen::random_coord_maps(rng, 6, 0.5, 2.0), o)));
}

TEST_CASE("understated contraction constants are caught") {
  const auto a = VectorSet::from_rows({{1, 2, -1}, {-2, 0.5, 1}, {0, 1, 1}});
  CoordMapFamily phi;
  for (int i = 0; i < 3; ++i) {
    phi.maps.emplace_back([](double x) { return 3 * x; });
    phi.lipschitz.push_back(1.5);
  }
  CHECK_FALSE(phi.validate(100, 2.0, 1));
  const auto checks = verify_lemma_suite(a, a, phi);
  CHECK_FALSE(checks[3].passed);
}

TEST_CASE("homogeneity and subset monotonicity") {
  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + rng.below(10);
    const auto a = gen::random_vector_set(rng, n, 1 + rng.below(6));
    const double lambda = rng.uniform(0.0, 5.0);
    const double ra = rad_exact(a).value;
    CHECK(rad_exact(transform(a, Scale{lambda})).value == doctest::Approx(lambda * ra).epsilon(1e-12));
    const auto bigger = a.merged(gen::random_vector_set(rng, n, 1 + rng.below(4)));
    CHECK(rad_exact(bigger).value >= ra - 1e-12);
  }
}

TEST_CASE("coordinate map family validation") {
  CHECK(CoordMapFamily::identity(3).validate(50, 3.0, 0));
  CHECK(CoordMapFamily::absolute_value(3).validate(50, 3.0, 0));
  CoordMapFamily shifted;
  shifted.maps.emplace_back([](double x) { return x + 1; });
  shifted.lipschitz.push_back(1.0);
  CHECK_FALSE(shifted.validate(50, 3.0, 0));  // phi(0) != 0
}
