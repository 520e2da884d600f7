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
#include <span>
#include <string>
#include <vector>

#include "roblip/dataset.hpp"
#include "roblip/predictor.hpp"

namespace roblip {

/// Fully connected network: input -> hidden widths (ReLU) -> class logits.
struct MlpSpec {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden;
  std::size_t classes = 0;

  void validate() const;
  /// Sum over layers of in * out + out.
  std::size_t parameter_count() const;
};

enum class OutputLoss { cross_entropy, squared };

/// Parameters are stored flat, layer by layer: the out x in weight matrix
/// (row-major) followed by the out biases.
class Mlp {
 public:
  Mlp() = default;
  Mlp(MlpSpec spec, std::vector<double> parameters);

  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static Mlp initialized(const MlpSpec& spec, std::uint64_t seed);

  const MlpSpec& spec() const noexcept { return spec_; }
  std::span<const double> parameters() const noexcept { return params_; }
  std::span<double> parameters() noexcept { return params_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  /// n x classes raw logits for the n x input_dim matrix x.
  std::vector<double> logits(std::span<const double> x, std::size_t n) const;
  /// tanh of the logits; every entry lies strictly inside (-1, 1) for finite logits.
  std::vector<double> predict_squashed(std::span<const double> x, std::size_t n) const;

  /// Mean loss over the batch; writes d loss / d parameters into grad.
  /// squared: 0.5 * sum_c (logit_c - onehot_c)^2 per sample.
  double loss_and_gradient(std::span<const double> x, std::span<const int> labels, std::size_t n,
                           std::span<double> grad, OutputLoss loss = OutputLoss::cross_entropy) const;
  double loss(std::span<const double> x, std::span<const int> labels, std::size_t n,
              OutputLoss loss = OutputLoss::cross_entropy) const;

  /// d output / d input for one sample, on logits or squashed outputs.
  void input_gradient(std::span<const double> x, std::size_t output, bool squashed, std::span<double> grad) const;

 private:
  struct Layer {
    std::size_t in, out, offset;  // offset of the weight block in params_
  };
  // Activations per layer boundary, post-ReLU for hidden layers.
  std::vector<std::vector<double>> forward(std::span<const double> x, std::size_t n) const;

  MlpSpec spec_;
  std::vector<Layer> layers_;
  std::vector<double> params_;
};

/// Numerically stable mean cross-entropy of raw logits (n x classes).
double cross_entropy(std::span<const double> logits, std::span<const int> labels, std::size_t n, std::size_t classes);

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 128;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int patience = 10;
  int max_epochs = 500;
  std::uint64_t seed = 0;
  /// Test hook: replaces the measured test loss of an epoch (1-based).
  std::function<double(int epoch, double measured)> test_loss_hook;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double test_loss = 0.0;
  double test_accuracy = 0.0;
};

struct TrainedModel {
  Mlp net;
  std::vector<EpochStats> history;
  int stopped_epoch = 0;
  int best_epoch = 0;
  double best_test_loss = 0.0;
  double final_train_loss = 0.0;
  bool stopped_by_patience = false;

  std::size_t p() const noexcept { return net.parameter_count(); }
};

TrainedModel build_mlp(const MlpSpec& spec, std::uint64_t seed);

/// Mini-batch Adam on cross-entropy until the test loss has not improved
/// (strictly) for `patience` consecutive epochs, or max_epochs. The final
/// (overfit) parameters are kept. Throws TrainingDiverged on a non-finite loss.
TrainedModel train_until_overfit(TrainedModel model, const ImageDataset& train, const ImageDataset& test,
                                 const TrainConfig& cfg);

struct GradientCheckReport {
  std::size_t checked = 0;
  double max_relative_error = 0.0;
  double max_abs_error = 0.0;
};

/// Central differences with step `step` on `count` randomly chosen
/// parameters (all of them if fewer). Relative error is
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
GradientCheckReport gradient_check(const Mlp& net, std::span<const double> x, std::span<const int> labels,
                                   std::size_t n, OutputLoss loss = OutputLoss::cross_entropy,
                                   std::size_t count = 100, std::uint64_t seed = 0, double step = 1e-5);

/// Predictor view of one network output, raw or tanh-squashed.
class MlpPredictor final : public Predictor {
 public:
  MlpPredictor(const Mlp& net, bool squashed) : net_(&net), squashed_(squashed) {}
  std::size_t input_dim() const override { return net_->spec().input_dim; }
  std::size_t output_count() const override { return net_->spec().classes; }
  void evaluate(std::span<const double> x, std::span<double> out) const override;
  void gradient(std::span<const double> x, std::size_t output, std::span<double> grad) const override;

 private:
  const Mlp* net_;
  bool squashed_;
};

/// "RBLPCKPT", u32 version, u32 input_dim, u32 classes, u32 hidden count,
/// u32 widths..., u64 parameter count, then the parameters as f64; all
/// little-endian.
void save_checkpoint(const Mlp& net, const std::string& path);
Mlp load_checkpoint(const std::string& path);
std::vector<std::uint8_t> encode_checkpoint(const Mlp& net);
Mlp decode_checkpoint(std::span<const std::uint8_t> bytes);

}  // namespace roblip
