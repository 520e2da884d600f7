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
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "roblip/error.hpp"
#include "roblip/rng.hpp"
#include "roblip/trainer.hpp"

using namespace roblip;

namespace {

MlpSpec spec_of(std::size_t in, std::vector<std::size_t> hidden, std::size_t classes) {
  MlpSpec s;
  s.input_dim = in;
  s.hidden = std::move(hidden);
  s.classes = classes;
  return s;
}

std::vector<double> random_batch(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng r(seed);
  std::vector<double> x(n * d);
  for (auto& v : x) v = r.uniform();
  return x;
}

}  // namespace

TEST_CASE("parameter counts") {
  CHECK(spec_of(4, {3}, 2).parameter_count() == 23);
  CHECK(spec_of(784, {64}, 10).parameter_count() == 50890);
  for (std::size_t w : {2, 4, 8, 16, 32, 64, 128, 256, 512, 768}) {
    const auto m = build_mlp(spec_of(784, {w}, 10), 1);
    CHECK(m.p() == 784 * w + w + w * 10 + 10);
    CHECK(m.net.parameters().size() == m.p());
  }
  CHECK_THROWS_AS(spec_of(0, {3}, 2).validate(), InvalidArgument);
  CHECK_THROWS_AS(spec_of(3, {0}, 2).validate(), InvalidArgument);
}

TEST_CASE("initialization is seeded and bounded") {
  const auto s = spec_of(20, {7, 5}, 3);
  const auto a = Mlp::initialized(s, 9), b = Mlp::initialized(s, 9), c = Mlp::initialized(s, 10);
  CHECK(std::equal(a.parameters().begin(), a.parameters().end(), b.parameters().begin()));
  CHECK_FALSE(std::equal(a.parameters().begin(), a.parameters().end(), c.parameters().begin()));
  // First weight block: 7 x 20, limit sqrt(6 / 27); its bias block is zero.
  const double limit = std::sqrt(6.0 / 27.0);
  for (std::size_t i = 0; i < 140; ++i) CHECK(std::fabs(a.parameters()[i]) <= limit);
  for (std::size_t i = 140; i < 147; ++i) CHECK(a.parameters()[i] == 0.0);
}

TEST_CASE("squashed outputs") {
  const auto s = spec_of(2, {}, 1);
  // Flat layout: W (1 x 2) then b.
  const Mlp zero(s, {0.0, 0.0, 0.0});
  const double x[2] = {0.3, -4.0};
  CHECK(zero.predict_squashed(x, 1)[0] == 0.0);
  const Mlp bias(s, {0.0, 0.0, 0.7});
  CHECK(bias.predict_squashed(x, 1)[0] == doctest::Approx(std::tanh(0.7)).epsilon(1e-15));
  const Mlp ten(s, {10.0, 0.0, 0.0});
  const double one[2] = {1.0, 0.0};
  CHECK(ten.logits(one, 1)[0] == 10.0);
  CHECK(ten.predict_squashed(one, 1)[0] == doctest::Approx(0.9999999958).epsilon(1e-10));
  const auto net = Mlp::initialized(spec_of(5, {16}, 4), 3);
  const auto big = random_batch(50, 5, 1);
  for (double v : net.predict_squashed(big, 50)) CHECK(std::fabs(v) < 1.0);
  CHECK_THROWS_AS(net.logits(std::span<const double>(big.data(), 7), 2), DimensionError);
}

TEST_CASE("cross-entropy is invariant to shifting a sample's logits") {
  Rng r(4);
  std::vector<double> z(5 * 3);
  for (auto& v : z) v = r.uniform(-5, 5);
  const std::vector<int> y{0, 2, 1, 1, 0};
  const double base = cross_entropy(z, y, 5, 3);
  for (std::size_t i = 0; i < 5; ++i) {
    const double c = r.uniform(-100, 100);
    for (std::size_t k = 0; k < 3; ++k) z[i * 3 + k] += c;
  }
  CHECK(std::fabs(cross_entropy(z, y, 5, 3) - base) <= 1e-10);
}

TEST_CASE("gradient check against central differences") {
  const auto lin = Mlp::initialized(spec_of(3, {}, 2), 5);
  const auto x1 = random_batch(1, 3, 2);
  const std::vector<int> y1{1};
  const auto r1 = gradient_check(lin, x1, y1, 1, OutputLoss::squared, 100, 1);
  CHECK(r1.checked == lin.parameter_count());
  CHECK(r1.max_relative_error <= 1e-6);

  const auto net = Mlp::initialized(spec_of(6, {8, 5}, 4), 11);
  const auto x = random_batch(8, 6, 3);
  const std::vector<int> y{0, 1, 2, 3, 3, 2, 1, 0};
  const auto r = gradient_check(net, x, y, 8, OutputLoss::cross_entropy, 100, 2);
  CHECK(r.checked == 100);
  CHECK(r.max_relative_error <= 1e-4);
}

TEST_CASE("bias gradient on an all-zero batch") {
  const auto net = Mlp::initialized(spec_of(3, {}, 3), 1);
  std::vector<double> p(net.parameters().begin(), net.parameters().end());
  p[9] = 0.2;
  p[10] = -0.1;
  p[11] = 0.5;
  const Mlp m(net.spec(), p);
  const std::vector<double> x(2 * 3, 0.0);
  const std::vector<int> y{0, 2};
  std::vector<double> g(m.parameter_count());
  m.loss_and_gradient(x, y, 2, g);
  // softmax(b) - mean onehot
  const double e0 = std::exp(0.2), e1 = std::exp(-0.1), e2 = std::exp(0.5), z = e0 + e1 + e2;
  CHECK(g[9] == doctest::Approx(e0 / z - 0.5).epsilon(1e-12));
  CHECK(g[10] == doctest::Approx(e1 / z).epsilon(1e-12));
  CHECK(g[11] == doctest::Approx(e2 / z - 0.5).epsilon(1e-12));
  for (int i = 0; i < 9; ++i) CHECK(g[i] == 0.0);
}

TEST_CASE("input gradient matches finite differences") {
  const auto net = Mlp::initialized(spec_of(4, {6}, 2), 8);
  const auto x = random_batch(1, 4, 9);
  std::vector<double> g(4);
  net.input_gradient(x, 1, true, g);
  for (std::size_t k = 0; k < 4; ++k) {
    auto xp = x, xm = x;
    xp[k] += 1e-6;
    xm[k] -= 1e-6;
    const double fd = (net.predict_squashed(xp, 1)[1] - net.predict_squashed(xm, 1)[1]) / 2e-6;
    CHECK(g[k] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("training: separable blobs fixture") {
  const auto all = synthetic_blobs(2, 2, 300, 0.05, 1);
  const auto train = slice_rows(all, 0, 200), test = slice_rows(all, 200, 300);
  TrainConfig cfg;
  cfg.max_epochs = 200;
  cfg.learning_rate = 1e-2;
  cfg.seed = 3;
  const auto m = train_until_overfit(build_mlp(spec_of(2, {8}, 2), 3), train, test, cfg);
  CHECK(m.history.back().train_accuracy >= 0.99);
  CHECK(m.history.size() == static_cast<std::size_t>(m.stopped_epoch));
}

TEST_CASE("training is deterministic") {
  const auto all = synthetic_blobs(4, 3, 150, 0.3, 2);
  const auto train = slice_rows(all, 0, 100), test = slice_rows(all, 100, 150);
  TrainConfig cfg;
  cfg.max_epochs = 15;
  cfg.batch_size = 16;
  cfg.seed = 5;
  const auto a = train_until_overfit(build_mlp(spec_of(4, {5}, 3), 5), train, test, cfg);
  const auto b = train_until_overfit(build_mlp(spec_of(4, {5}, 3), 5), train, test, cfg);
  CHECK(std::equal(a.net.parameters().begin(), a.net.parameters().end(), b.net.parameters().begin(),
                   b.net.parameters().end()));
  CHECK(a.stopped_epoch == b.stopped_epoch);
}

TEST_CASE("early stopping rule") {
  const auto all = synthetic_blobs(3, 2, 60, 0.2, 4);
  const auto train = slice_rows(all, 0, 40), test = slice_rows(all, 40, 60);
  TrainConfig frozen;
  frozen.learning_rate = 0.0;
  frozen.patience = 10;
  const auto f = train_until_overfit(build_mlp(spec_of(3, {4}, 2), 1), train, test, frozen);
  CHECK(f.stopped_epoch == 11);
  CHECK(f.best_epoch == 1);
  CHECK(f.stopped_by_patience);

  TrainConfig improving;
  improving.max_epochs = 40;
  improving.test_loss_hook = [](int epoch, double) { return 1.0 / epoch; };
  const auto g = train_until_overfit(build_mlp(spec_of(3, {4}, 2), 1), train, test, improving);
  CHECK(g.stopped_epoch == 40);
  CHECK_FALSE(g.stopped_by_patience);

  TrainConfig bumpy;
  bumpy.patience = 3;
  bumpy.max_epochs = 100;
  bumpy.test_loss_hook = [](int epoch, double) { return epoch <= 5 ? 1.0 / epoch : 1.0; };
  const auto h = train_until_overfit(build_mlp(spec_of(3, {4}, 2), 1), train, test, bumpy);
  CHECK(h.best_epoch == 5);
  CHECK(h.stopped_epoch - h.best_epoch >= bumpy.patience);
  CHECK(h.stopped_epoch == 8);
}

TEST_CASE("divergence carries the epoch") {
  const auto all = synthetic_blobs(3, 2, 60, 0.2, 4);
  const auto train = slice_rows(all, 0, 40), test = slice_rows(all, 40, 60);
  TrainConfig wild;
  wild.test_loss_hook = [](int epoch, double measured) { return epoch == 3 ? NAN : measured; };
  try {
    train_until_overfit(build_mlp(spec_of(3, {4}, 2), 1), train, test, wild);
    FAIL("expected divergence");
  } catch (const TrainingDiverged& e) {
    CHECK(e.epoch() == 3);
  }
}

TEST_CASE("checkpoint round trip") {
  const auto net = Mlp::initialized(spec_of(7, {5, 3}, 4), 21);
  const auto path = (std::filesystem::temp_directory_path() / "roblip_test.ckpt").string();
  save_checkpoint(net, path);
  const auto back = load_checkpoint(path);
  std::remove(path.c_str());
  CHECK(back.spec().hidden == net.spec().hidden);
  const auto x = random_batch(10, 7, 4);
  CHECK(back.predict_squashed(x, 10) == net.predict_squashed(x, 10));
  auto bytes = encode_checkpoint(net);
  CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "RBLPCKPT");
  bytes.pop_back();
  CHECK_THROWS_AS(decode_checkpoint(bytes), IoError);
  bytes = encode_checkpoint(net);
  bytes[0] = 'X';
  CHECK_THROWS_AS(decode_checkpoint(bytes), IoError);
}
