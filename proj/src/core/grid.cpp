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

#include "roblip/grid.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "roblip/error.hpp"
#include "roblip/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace roblip {

namespace {

using Key = std::tuple<std::size_t, std::size_t, std::uint64_t>;

Key key_of(const ScalingRecord& r) { return {r.n, r.width, r.seed}; }

const char* sup_method_name(SupMethod m) {
  switch (m) {
    case SupMethod::exact_pwl: return "exact_pwl";
    case SupMethod::grid: return "grid";
    case SupMethod::projected_ascent: return "projected_ascent";
  }
  return "?";
}

SupMethod sup_method_from(const std::string& s) {
  if (s == "exact_pwl") return SupMethod::exact_pwl;
  if (s == "grid") return SupMethod::grid;
  if (s == "projected_ascent") return SupMethod::projected_ascent;
  throw InvalidArgument("config: unknown robustness method '" + s + "'");
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument("config: " + where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
      throw InvalidArgument("config: unknown key '" + k + "' in " + where);
  }
}

template <class T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::string resolve(const std::string& p, const std::string& base) {
  if (p.empty() || base.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base) / p).string();
}

std::string trim_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n_grid.empty() || width_grid.empty() || seeds.empty())
    throw InvalidArgument("config: n_grid, width_grid and seeds must be non-empty");
  for (auto n : n_grid)
    if (n < 2) throw InvalidArgument("config: n_grid values must be >= 2");
  for (auto w : width_grid)
    if (w < 1) throw InvalidArgument("config: width_grid values must be >= 1");
  for (auto w : fixed_hidden)
    if (w < 1) throw InvalidArgument("config: fixed_hidden widths must be >= 1");
  if (jobs < 1) throw InvalidArgument("config: jobs must be >= 1");
  if (!(duplicate_threshold >= 0.0)) throw InvalidArgument("config: duplicate_threshold must be >= 0");
  train.validate();
  robustness.validate();
  if (data.kind == DataSource::idx_file) {
    if (data.train_images.empty() || data.train_labels.empty() || data.test_images.empty() ||
        data.test_labels.empty())
      throw InvalidArgument("config: idx data needs train/test image and label paths");
  } else {
    if (data.d < 1 || data.classes < 2 || data.n_train < 2 || data.n_test < 1 || !(data.spread > 0.0))
      throw InvalidArgument("config: invalid synthetic data parameters");
    if (*std::max_element(n_grid.begin(), n_grid.end()) > data.n_train)
      throw InvalidArgument("config: n_grid exceeds the synthetic training set size");
  }
}

ExperimentConfig ExperimentConfig::from_json(const json& j, const std::string& base_dir) {
  reject_unknown(j,
                 {"schema_version", "data", "n_grid", "width_grid", "seeds", "fixed_hidden", "train", "robustness",
                  "lipschitz", "out_dir", "jobs", "save_checkpoints"},
                 "config");
  if (!j.contains("schema_version") || j.at("schema_version").get<int>() != kConfigSchemaVersion)
    throw InvalidArgument("config: schema_version must be " + std::to_string(kConfigSchemaVersion));
  ExperimentConfig c;
  if (j.contains("data")) {
    const json& d = j.at("data");
    reject_unknown(d,
                   {"kind", "train_images", "train_labels", "test_images", "test_labels", "d", "classes",
                    "n_train", "n_test", "spread", "seed"},
                   "data");
    const std::string kind = d.value("kind", "synthetic");
    if (kind == "idx") {
      c.data.kind = DataSource::idx_file;
    } else if (kind != "synthetic") {
      throw InvalidArgument("config: data.kind must be 'idx' or 'synthetic'");
    }
    take(d, "train_images", c.data.train_images);
    take(d, "train_labels", c.data.train_labels);
    take(d, "test_images", c.data.test_images);
    take(d, "test_labels", c.data.test_labels);
    for (auto* p : {&c.data.train_images, &c.data.train_labels, &c.data.test_images, &c.data.test_labels})
      *p = resolve(*p, base_dir);
    take(d, "d", c.data.d);
    take(d, "classes", c.data.classes);
    take(d, "n_train", c.data.n_train);
    take(d, "n_test", c.data.n_test);
    take(d, "spread", c.data.spread);
    take(d, "seed", c.data.seed);
  }
  take(j, "n_grid", c.n_grid);
  take(j, "width_grid", c.width_grid);
  take(j, "seeds", c.seeds);
  take(j, "fixed_hidden", c.fixed_hidden);
  if (j.contains("train")) {
    const json& t = j.at("train");
    reject_unknown(t, {"learning_rate", "batch_size", "patience", "max_epochs", "beta1", "beta2", "adam_epsilon"},
                   "train");
    take(t, "learning_rate", c.train.learning_rate);
    take(t, "batch_size", c.train.batch_size);
    take(t, "patience", c.train.patience);
    take(t, "max_epochs", c.train.max_epochs);
    take(t, "beta1", c.train.beta1);
    take(t, "beta2", c.train.beta2);
    take(t, "adam_epsilon", c.train.adam_epsilon);
  }
  if (j.contains("robustness")) {
    const json& r = j.at("robustness");
    reject_unknown(r, {"rho", "method", "ascent_steps", "restarts", "step_size", "grid_points", "seed"},
                   "robustness");
    take(r, "rho", c.robustness.rho);
    if (r.contains("method")) c.robustness.method = sup_method_from(r.at("method").get<std::string>());
    take(r, "ascent_steps", c.robustness.ascent_steps);
    take(r, "restarts", c.robustness.restarts);
    take(r, "step_size", c.robustness.step_size);
    take(r, "grid_points", c.robustness.grid_points);
    take(r, "seed", c.robustness.seed);
  }
  if (j.contains("lipschitz")) {
    const json& l = j.at("lipschitz");
    reject_unknown(l, {"duplicate_threshold", "squashed"}, "lipschitz");
    take(l, "duplicate_threshold", c.duplicate_threshold);
    take(l, "squashed", c.squashed);
  }
  take(j, "out_dir", c.out_dir);
  take(j, "jobs", c.jobs);
  take(j, "save_checkpoints", c.save_checkpoints);
  return c;
}

json ExperimentConfig::to_json() const {
  json d;
  if (data.kind == DataSource::idx_file) {
    d = {{"kind", "idx"},
         {"train_images", data.train_images},
         {"train_labels", data.train_labels},
         {"test_images", data.test_images},
         {"test_labels", data.test_labels}};
  } else {
    d = {{"kind", "synthetic"}, {"d", data.d},           {"classes", data.classes}, {"n_train", data.n_train},
         {"n_test", data.n_test}, {"spread", data.spread}, {"seed", data.seed}};
  }
  return {{"schema_version", kConfigSchemaVersion},
          {"data", d},
          {"n_grid", n_grid},
          {"width_grid", width_grid},
          {"seeds", seeds},
          {"fixed_hidden", fixed_hidden},
          {"train",
           {{"learning_rate", train.learning_rate},
            {"batch_size", train.batch_size},
            {"patience", train.patience},
            {"max_epochs", train.max_epochs},
            {"beta1", train.beta1},
            {"beta2", train.beta2},
            {"adam_epsilon", train.adam_epsilon}}},
          {"robustness",
           {{"rho", robustness.rho},
            {"method", sup_method_name(robustness.method)},
            {"ascent_steps", robustness.ascent_steps},
            {"restarts", robustness.restarts},
            {"step_size", robustness.step_size},
            {"grid_points", robustness.grid_points},
            {"seed", robustness.seed}}},
          {"lipschitz", {{"duplicate_threshold", duplicate_threshold}, {"squashed", squashed}}},
          {"out_dir", out_dir},
          {"jobs", jobs},
          {"save_checkpoints", save_checkpoints}};
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config " + path + ": " + e.what());
  }
  return ExperimentConfig::from_json(j, fs::path(path).parent_path().string());
}

std::string format_record(const ScalingRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%" PRIu64 ",%.17g,%d,%.17g,%.17g,%s", r.n, r.width, r.p, r.seed,
                r.L_emp, r.stopped_epoch, r.best_test_loss, r.final_train_loss, r.status.c_str());
  return buf;
}

ScalingRecord parse_record(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(trim_cr(line));
  std::string cell;
  while (std::getline(ss, cell, ',')) f.push_back(cell);
  if (f.size() != 9) throw InvalidArgument("results csv: expected 9 fields in '" + line + "'");
  ScalingRecord r;
  try {
    r.n = std::stoull(f[0]);
    r.width = std::stoull(f[1]);
    r.p = std::stoull(f[2]);
    r.seed = std::stoull(f[3]);
    r.L_emp = std::stod(f[4]);
    r.stopped_epoch = std::stoi(f[5]);
    r.best_test_loss = std::stod(f[6]);
    r.final_train_loss = std::stod(f[7]);
  } catch (const std::logic_error&) {
    throw InvalidArgument("results csv: malformed row '" + line + "'");
  }
  r.status = f[8];
  return r;
}

std::vector<ScalingRecord> read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open results csv " + path);
  std::string line;
  if (!std::getline(in, line) || trim_cr(line) != kResultsHeader)
    throw InvalidArgument("results csv " + path + ": missing or unexpected header");
  std::vector<ScalingRecord> out;
  while (std::getline(in, line))
    if (!trim_cr(line).empty()) out.push_back(parse_record(line));
  return out;
}

void write_results_csv(const std::string& path, std::vector<ScalingRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const ScalingRecord& a, const ScalingRecord& b) { return key_of(a) < key_of(b); });
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out << kResultsHeader << '\n';
    for (const auto& r : records) out << format_record(r) << '\n';
    if (!out) throw IoError("write failed for " + tmp);
  }
  fs::rename(tmp, path);
}

ScalingRecord run_cell(const ExperimentConfig& cfg, const ImageDataset& train, const ImageDataset& test,
                       std::size_t n, std::size_t width, std::uint64_t seed, unsigned lip_threads,
                       const std::string& checkpoint_path) {
  ScalingRecord rec;
  rec.n = n;
  rec.width = width;
  rec.seed = seed;
  MlpSpec spec;
  spec.input_dim = train.d;
  spec.hidden = cfg.fixed_hidden;
  spec.hidden.push_back(width);
  spec.classes = std::max(train.classes, test.classes);
  rec.p = spec.parameter_count();

  // The subset depends on (n, seed) only, so every width sees the same data.
  const ImageDataset subset = sample_subset(train, n, stream_seed({n, seed, 0x5375627365747321ULL}));
  const std::uint64_t model_seed = stream_seed({n, width, seed});
  TrainConfig tc = cfg.train;
  tc.seed = model_seed;
  TrainedModel model;
  try {
    model = train_until_overfit(build_mlp(spec, model_seed), subset, test, tc);
  } catch (const TrainingDiverged& e) {
    rec.stopped_epoch = e.epoch();
    rec.best_test_loss = std::nan("");
    rec.final_train_loss = std::nan("");
    rec.L_emp = std::nan("");
    rec.status = "diverged";
    return rec;
  }
  rec.stopped_epoch = model.stopped_epoch;
  rec.best_test_loss = model.best_test_loss;
  rec.final_train_loss = model.final_train_loss;
  if (!checkpoint_path.empty()) save_checkpoint(model.net, checkpoint_path);

  const std::vector<double> out = cfg.squashed ? model.net.predict_squashed(subset.features, subset.n)
                                               : model.net.logits(subset.features, subset.n);
  LipOptions lo;
  lo.duplicate_threshold = cfg.duplicate_threshold;
  lo.threads = lip_threads;
  try {
    rec.L_emp = pairwise_lip(out, spec.classes, subset.features, subset.d, lo).L_emp;
  } catch (const InsufficientData&) {
    rec.L_emp = std::nan("");
    rec.status = "all_pairs_duplicate";
  }
  return rec;
}

namespace {

std::pair<ImageDataset, ImageDataset> load_data(const DataConfig& d) {
  if (d.kind == DataSource::idx_file)
    return {load_idx_dataset(d.train_images, d.train_labels), load_idx_dataset(d.test_images, d.test_labels)};
  const ImageDataset all = synthetic_blobs(d.d, d.classes, d.n_train + d.n_test, d.spread, d.seed);
  return {slice_rows(all, 0, d.n_train), slice_rows(all, d.n_train, d.n_train + d.n_test)};
}

}  // namespace

GridRunResult run_grid(const ExperimentConfig& cfg, const GridLog& log) {
  cfg.validate();
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  fs::create_directories(cfg.out_dir);
  GridRunResult res;
  res.csv_path = (fs::path(cfg.out_dir) / "results.csv").string();
  {
    std::ofstream manifest(fs::path(cfg.out_dir) / "config.json", std::ios::trunc);
    manifest << cfg.to_json().dump(2) << '\n';
  }

  std::map<Key, ScalingRecord> done;
  if (fs::exists(res.csv_path))
    for (auto& r : read_results_csv(res.csv_path)) done[key_of(r)] = r;

  const auto [train, test] = load_data(cfg.data);
  if (train.d != test.d) throw DimensionError("run_grid: train and test inputs differ in dimension");
  if (*std::max_element(cfg.n_grid.begin(), cfg.n_grid.end()) > train.n)
    throw InvalidArgument("run_grid: n_grid exceeds the available training data");

  std::vector<Key> todo;
  for (auto n : cfg.n_grid)
    for (auto w : cfg.width_grid)
      for (auto s : cfg.seeds) {
        if (done.count({n, w, s})) {
          ++res.skipped;
        } else if (std::find(todo.begin(), todo.end(), Key{n, w, s}) == todo.end()) {
          todo.push_back({n, w, s});
        }
      }
  say("grid: " + std::to_string(todo.size()) + " cells to run, " + std::to_string(res.skipped) + " already done");

  // Appends go through one writer so interrupted runs leave whole rows.
  std::mutex write_mu;
  std::ofstream append;
  if (!todo.empty()) {
    const bool fresh = !fs::exists(res.csv_path);
    append.open(res.csv_path, std::ios::binary | std::ios::app);
    if (!append) throw IoError("cannot append to " + res.csv_path);
    if (fresh) append << kResultsHeader << '\n' << std::flush;
  }

  const unsigned jobs = std::min<unsigned>(cfg.jobs, static_cast<unsigned>(std::max<std::size_t>(todo.size(), 1)));
  const unsigned lip_threads = jobs > 1 ? 1 : 0;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto worker = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < todo.size();) {
      const auto [n, w, s] = todo[i];
      std::string ckpt;
      if (cfg.save_checkpoints) {
        ckpt = (fs::path(cfg.out_dir) / ("model_n" + std::to_string(n) + "_w" + std::to_string(w) + "_s" +
                                         std::to_string(s) + ".ckpt"))
                   .string();
      }
      try {
        ScalingRecord r = run_cell(cfg, train, test, n, w, s, lip_threads, ckpt);
        std::lock_guard lock(write_mu);
        append << format_record(r) << '\n' << std::flush;
        say("cell n=" + std::to_string(n) + " width=" + std::to_string(w) + " seed=" + std::to_string(s) +
            " status=" + r.status + " L_emp=" + std::to_string(r.L_emp) + " epochs=" +
            std::to_string(r.stopped_epoch));
        done[key_of(r)] = std::move(r);
        ++res.computed;
      } catch (...) {
        std::lock_guard lock(write_mu);
        if (!failure) failure = std::current_exception();
        next.store(todo.size());
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (append.is_open()) append.close();
  if (failure) std::rethrow_exception(failure);

  for (auto& [k, r] : done) res.records.push_back(r);
  write_results_csv(res.csv_path, res.records);
  std::sort(res.records.begin(), res.records.end(),
            [](const ScalingRecord& a, const ScalingRecord& b) { return key_of(a) < key_of(b); });
  for (const auto& r : res.records)
    if (r.status != "ok") ++res.failed;
  return res;
}

}  // namespace roblip
