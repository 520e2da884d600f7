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

#include "roblip/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>

#include "roblip/error.hpp"
#include "roblip/kernels.hpp"
#include "roblip/rng.hpp"

namespace roblip {

namespace {

constexpr char kCheckpointMagic[8] = {'R', 'B', 'L', 'P', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCheckpointVersion = 1;
constexpr std::size_t kEvalChunk = 1024;

void check_input(const MlpSpec& spec, std::span<const double> x, std::size_t n) {
  if (x.size() != n * spec.input_dim) throw DimensionError("Mlp: input matrix width does not match input_dim");
}

// Softmax of one logit row into `prob`; returns log-sum-exp.
double softmax_row(const double* z, std::size_t c, double* prob) {
  const double mx = *std::max_element(z, z + c);
  double s = 0.0;
  for (std::size_t k = 0; k < c; ++k) s += (prob[k] = std::exp(z[k] - mx));
  for (std::size_t k = 0; k < c; ++k) prob[k] /= s;
  return mx + std::log(s);
}

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

Evaluation evaluate(const Mlp& net, const ImageDataset& ds) {
  const std::size_t c = net.spec().classes;
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t begin = 0; begin < ds.n; begin += kEvalChunk) {
    const std::size_t m = std::min(kEvalChunk, ds.n - begin);
    const std::span<const double> x(ds.features.data() + begin * ds.d, m * ds.d);
    const auto z = net.logits(x, m);
    const std::span<const int> y(ds.labels.data() + begin, m);
    loss += cross_entropy(z, y, m, c) * static_cast<double>(m);
    for (std::size_t b = 0; b < m; ++b) {
      const auto row = z.begin() + static_cast<std::ptrdiff_t>(b * c);
      if (std::max_element(row, row + static_cast<std::ptrdiff_t>(c)) - row == y[b]) ++correct;
    }
  }
  return {loss / static_cast<double>(ds.n), static_cast<double>(correct) / static_cast<double>(ds.n)};
}

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  std::uint64_t bits = 0;
  if constexpr (std::is_same_v<T, double>)
    std::memcpy(&bits, &v, sizeof v);
  else
    bits = static_cast<std::uint64_t>(v);
  for (std::size_t k = 0; k < sizeof(T); ++k) out.push_back(static_cast<std::uint8_t>(bits >> (8 * k)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > b_.size()) throw IoError("checkpoint: truncated file");
    std::uint64_t bits = 0;
    for (std::size_t k = 0; k < sizeof(T); ++k) bits |= std::uint64_t{b_[pos_ + k]} << (8 * k);
    pos_ += sizeof(T);
    if constexpr (std::is_same_v<T, double>) {
      double v;
      std::memcpy(&v, &bits, sizeof v);
      return v;
    } else {
      return static_cast<T>(bits);
    }
  }
  std::size_t remaining() const { return b_.size() - pos_; }
  std::span<const std::uint8_t> take(std::size_t n) {
    if (pos_ + n > b_.size()) throw IoError("checkpoint: truncated file");
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

void MlpSpec::validate() const {
  if (input_dim == 0 || classes == 0) throw InvalidArgument("MlpSpec: input_dim and classes must be positive");
  for (auto w : hidden)
    if (w == 0) throw InvalidArgument("MlpSpec: hidden widths must be positive");
}

std::size_t MlpSpec::parameter_count() const {
  std::size_t p = 0, in = input_dim;
  for (auto w : hidden) {
    p += in * w + w;
    in = w;
  }
  return p + in * classes + classes;
}

Mlp::Mlp(MlpSpec spec, std::vector<double> parameters) : spec_(std::move(spec)), params_(std::move(parameters)) {
  spec_.validate();
  if (params_.size() != spec_.parameter_count())
    throw DimensionError("Mlp: parameter store does not match the spec's parameter count");
  std::size_t in = spec_.input_dim, offset = 0;
  auto add = [&](std::size_t out) {
    layers_.push_back({in, out, offset});
    offset += in * out + out;
    in = out;
  };
  for (auto w : spec_.hidden) add(w);
  add(spec_.classes);
}

Mlp Mlp::initialized(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::vector<double> params(spec.parameter_count(), 0.0);
  Rng rng(seed);
  std::size_t in = spec.input_dim, offset = 0;
  auto fill = [&](std::size_t out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    for (std::size_t k = 0; k < in * out; ++k) params[offset + k] = rng.uniform(-limit, limit);
    offset += in * out + out;
    in = out;
  };
  for (auto w : spec.hidden) fill(w);
  fill(spec.classes);
  return Mlp(spec, std::move(params));
}

std::vector<std::vector<double>> Mlp::forward(std::span<const double> x, std::size_t n) const {
  check_input(spec_, x, n);
  std::vector<std::vector<double>> acts;
  acts.reserve(layers_.size() + 1);
  acts.emplace_back(x.begin(), x.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& L = layers_[l];
    const double* w = params_.data() + L.offset;
    const double* bias = w + L.in * L.out;
    const std::vector<double>& in = acts.back();
    std::vector<double> out(n * L.out);
    const bool hidden = l + 1 < layers_.size();
    for (std::size_t b = 0; b < n; ++b) {
      const double* row = in.data() + b * L.in;
      for (std::size_t o = 0; o < L.out; ++o) {
        const double z = bias[o] + detail::dot(w + o * L.in, row, L.in);
        out[b * L.out + o] = hidden ? std::max(z, 0.0) : z;
      }
    }
    acts.push_back(std::move(out));
  }
  return acts;
}

std::vector<double> Mlp::logits(std::span<const double> x, std::size_t n) const { return forward(x, n).back(); }

std::vector<double> Mlp::predict_squashed(std::span<const double> x, std::size_t n) const {
  auto z = logits(x, n);
  for (auto& v : z) v = std::tanh(v);
  return z;
}

double cross_entropy(std::span<const double> logits, std::span<const int> labels, std::size_t n, std::size_t classes) {
  std::vector<double> prob(classes);
  double total = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    const double* z = logits.data() + b * classes;
    const double lse = softmax_row(z, classes, prob.data());
    total += lse - z[labels[b]];
  }
  return total / static_cast<double>(n);
}

double Mlp::loss(std::span<const double> x, std::span<const int> labels, std::size_t n, OutputLoss kind) const {
  const auto z = logits(x, n);
  const std::size_t c = spec_.classes;
  if (kind == OutputLoss::cross_entropy) return cross_entropy(z, labels, n, c);
  double total = 0.0;
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t k = 0; k < c; ++k) {
      const double r = z[b * c + k] - (static_cast<int>(k) == labels[b] ? 1.0 : 0.0);
      total += 0.5 * r * r;
    }
  return total / static_cast<double>(n);
}

double Mlp::loss_and_gradient(std::span<const double> x, std::span<const int> labels, std::size_t n,
                              std::span<double> grad, OutputLoss kind) const {
  if (grad.size() != params_.size()) throw DimensionError("Mlp: gradient buffer size mismatch");
  if (labels.size() != n) throw DimensionError("Mlp: label count mismatch");
  const auto acts = forward(x, n);
  const std::size_t c = spec_.classes;
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> delta(n * c);
  double loss = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    const double* z = acts.back().data() + b * c;
    double* d = delta.data() + b * c;
    const int y = labels[b];
    if (y < 0 || static_cast<std::size_t>(y) >= c) throw InvalidArgument("Mlp: label out of range");
    if (kind == OutputLoss::cross_entropy) {
      loss += softmax_row(z, c, d) - z[y];
      d[y] -= 1.0;
    } else {
      for (std::size_t k = 0; k < c; ++k) {
        d[k] = z[k] - (static_cast<int>(k) == y ? 1.0 : 0.0);
        loss += 0.5 * d[k] * d[k];
      }
    }
    for (std::size_t k = 0; k < c; ++k) d[k] *= inv_n;
  }

  std::fill(grad.begin(), grad.end(), 0.0);
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Layer& L = layers_[l];
    const double* w = params_.data() + L.offset;
    double* gw = grad.data() + L.offset;
    double* gb = gw + L.in * L.out;
    const std::vector<double>& in = acts[l];
    for (std::size_t o = 0; o < L.out; ++o) {
      double* gw_row = gw + o * L.in;
      for (std::size_t b = 0; b < n; ++b) {
        const double dv = delta[b * L.out + o];
        if (dv == 0.0) continue;
        gb[o] += dv;
        const double* row = in.data() + b * L.in;
        for (std::size_t i = 0; i < L.in; ++i) gw_row[i] += dv * row[i];
      }
    }
    if (l == 0) break;
    std::vector<double> prev(n * L.in, 0.0);
    for (std::size_t b = 0; b < n; ++b) {
      double* p = prev.data() + b * L.in;
      for (std::size_t o = 0; o < L.out; ++o) {
        const double dv = delta[b * L.out + o];
        if (dv == 0.0) continue;
        const double* w_row = w + o * L.in;
        for (std::size_t i = 0; i < L.in; ++i) p[i] += dv * w_row[i];
      }
      const double* a = in.data() + b * L.in;
      for (std::size_t i = 0; i < L.in; ++i)
        if (a[i] <= 0.0) p[i] = 0.0;  // ReLU derivative, 0 at the kink
    }
    delta = std::move(prev);
  }
  return loss * inv_n;
}

void Mlp::input_gradient(std::span<const double> x, std::size_t output, bool squashed, std::span<double> grad) const {
  if (output >= spec_.classes) throw DimensionError("Mlp: output index out of range");
  if (grad.size() != spec_.input_dim) throw DimensionError("Mlp: gradient buffer size mismatch");
  const auto acts = forward(x, 1);
  std::vector<double> delta(spec_.classes, 0.0);
  const double z = acts.back()[output];
  delta[output] = squashed ? 1.0 - std::tanh(z) * std::tanh(z) : 1.0;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Layer& L = layers_[l];
    const double* w = params_.data() + L.offset;
    std::vector<double> prev(L.in, 0.0);
    for (std::size_t o = 0; o < L.out; ++o) {
      if (delta[o] == 0.0) continue;
      for (std::size_t i = 0; i < L.in; ++i) prev[i] += delta[o] * w[o * L.in + i];
    }
    if (l > 0)
      for (std::size_t i = 0; i < L.in; ++i)
        if (acts[l][i] <= 0.0) prev[i] = 0.0;
    delta = std::move(prev);
  }
  std::copy(delta.begin(), delta.end(), grad.begin());
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw InvalidArgument("TrainConfig: learning rate must be >= 0");
  if (batch_size == 0 || patience <= 0 || max_epochs <= 0)
    throw InvalidArgument("TrainConfig: batch size, patience and max_epochs must be positive");
}

TrainedModel build_mlp(const MlpSpec& spec, std::uint64_t seed) {
  TrainedModel m;
  m.net = Mlp::initialized(spec, seed);
  return m;
}

TrainedModel train_until_overfit(TrainedModel model, const ImageDataset& train, const ImageDataset& test,
                                 const TrainConfig& cfg) {
  cfg.validate();
  const MlpSpec& spec = model.net.spec();
  if (train.d != spec.input_dim || test.d != spec.input_dim)
    throw DimensionError("train_until_overfit: dataset width does not match the network input");
  if (train.classes > spec.classes || test.classes > spec.classes)
    throw DimensionError("train_until_overfit: dataset has more classes than the network outputs");
  if (train.n == 0 || test.n == 0) throw InvalidArgument("train_until_overfit: empty dataset");

  const std::size_t p = model.net.parameter_count();
  const std::size_t d = train.d;
  std::vector<double> grad(p), m(p, 0.0), v(p, 0.0);
  std::vector<double> batch_x(cfg.batch_size * d);
  std::vector<int> batch_y(cfg.batch_size);
  std::vector<std::size_t> order(train.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto params = model.net.parameters();
  double beta1_t = 1.0, beta2_t = 1.0;

  model.history.clear();
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    Rng rng(stream_seed({cfg.seed, static_cast<std::uint64_t>(epoch)}));
    for (std::size_t i = train.n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    for (std::size_t begin = 0; begin < train.n; begin += cfg.batch_size) {
      const std::size_t bs = std::min(cfg.batch_size, train.n - begin);
      for (std::size_t b = 0; b < bs; ++b) {
        const auto row = train.row(order[begin + b]);
        std::copy(row.begin(), row.end(), batch_x.begin() + static_cast<std::ptrdiff_t>(b * d));
        batch_y[b] = train.labels[order[begin + b]];
      }
      const double loss = model.net.loss_and_gradient({batch_x.data(), bs * d}, {batch_y.data(), bs}, bs, grad);
      if (!std::isfinite(loss))
        throw TrainingDiverged(epoch, "training diverged: non-finite loss in epoch " + std::to_string(epoch));
      beta1_t *= cfg.beta1;
      beta2_t *= cfg.beta2;
      for (std::size_t k = 0; k < p; ++k) {
        m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * grad[k];
        v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * grad[k] * grad[k];
        const double m_hat = m[k] / (1.0 - beta1_t);
        const double v_hat = v[k] / (1.0 - beta2_t);
        params[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon);
      }
    }

    EpochStats st;
    st.epoch = epoch;
    const Evaluation tr = evaluate(model.net, train);
    const Evaluation te = evaluate(model.net, test);
    st.train_loss = tr.loss;
    st.train_accuracy = tr.accuracy;
    st.test_loss = cfg.test_loss_hook ? cfg.test_loss_hook(epoch, te.loss) : te.loss;
    st.test_accuracy = te.accuracy;
    if (!std::isfinite(st.train_loss) || !std::isfinite(st.test_loss))
      throw TrainingDiverged(epoch, "training diverged: non-finite loss after epoch " + std::to_string(epoch));
    model.history.push_back(st);
    model.stopped_epoch = epoch;
    model.final_train_loss = st.train_loss;

    if (st.test_loss < best) {
      best = st.test_loss;
      model.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      model.stopped_by_patience = true;
      break;
    }
  }
  model.best_test_loss = best;
  return model;
}

GradientCheckReport gradient_check(const Mlp& net, std::span<const double> x, std::span<const int> labels,
                                   std::size_t n, OutputLoss loss, std::size_t count, std::uint64_t seed,
                                   double step) {
  const std::size_t p = net.parameter_count();
  std::vector<double> grad(p);
  net.loss_and_gradient(x, labels, n, grad, loss);

  Rng rng(seed);
  std::vector<std::size_t> picks;
  if (count >= p) {
    picks.resize(p);
    std::iota(picks.begin(), picks.end(), std::size_t{0});
  } else {
    picks = sample_without_replacement(p, count, rng);
  }

  Mlp probe = net;
  auto params = probe.parameters();
  GradientCheckReport rep;
  for (std::size_t k : picks) {
    const double orig = params[k];
    params[k] = orig + step;
    const double up = probe.loss(x, labels, n, loss);
    params[k] = orig - step;
    const double down = probe.loss(x, labels, n, loss);
    params[k] = orig;
    const double numeric = (up - down) / (2.0 * step);
    const double err = std::fabs(grad[k] - numeric);
    const double scale = std::max({std::fabs(grad[k]), std::fabs(numeric), 1e-6});
    rep.max_abs_error = std::max(rep.max_abs_error, err);
    rep.max_relative_error = std::max(rep.max_relative_error, err / scale);
    ++rep.checked;
  }
  return rep;
}

void MlpPredictor::evaluate(std::span<const double> x, std::span<double> out) const {
  const auto z = squashed_ ? net_->predict_squashed(x, 1) : net_->logits(x, 1);
  std::copy(z.begin(), z.end(), out.begin());
}

void MlpPredictor::gradient(std::span<const double> x, std::size_t output, std::span<double> grad) const {
  net_->input_gradient(x, output, squashed_, grad);
}

std::vector<std::uint8_t> encode_checkpoint(const Mlp& net) {
  std::vector<std::uint8_t> out(std::begin(kCheckpointMagic), std::end(kCheckpointMagic));
  const MlpSpec& s = net.spec();
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.input_dim));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.classes));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.hidden.size()));
  for (auto w : s.hidden) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(w));
  put_le<std::uint64_t>(out, net.parameter_count());
  for (double v : net.parameters()) put_le<double>(out, v);
  return out;
}

Mlp decode_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(sizeof kCheckpointMagic);
  if (!std::equal(magic.begin(), magic.end(), std::begin(kCheckpointMagic)))
    throw IoError("checkpoint: bad magic");
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) throw IoError("checkpoint: unsupported version " + std::to_string(version));
  MlpSpec spec;
  spec.input_dim = r.get<std::uint32_t>();
  spec.classes = r.get<std::uint32_t>();
  const auto layers = r.get<std::uint32_t>();
  if (layers > 1024) throw IoError("checkpoint: implausible layer count");
  for (std::uint32_t k = 0; k < layers; ++k) spec.hidden.push_back(r.get<std::uint32_t>());
  spec.validate();
  const auto count = r.get<std::uint64_t>();
  if (count != spec.parameter_count()) throw IoError("checkpoint: parameter count does not match the spec");
  if (r.remaining() != count * 8) throw IoError("checkpoint: parameter block has the wrong length");
  std::vector<double> params(count);
  for (auto& v : params) v = r.get<double>();
  return Mlp(std::move(spec), std::move(params));
}

void save_checkpoint(const Mlp& net, const std::string& path) {
  const auto bytes = encode_checkpoint(net);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write failed for " + path);
}

Mlp load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace roblip
