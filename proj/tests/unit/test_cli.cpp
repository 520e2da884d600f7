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

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "roblip/roblip.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(ROBLIP_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  for (std::size_t k; (k = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, k);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("roblip_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put_be32(std::ofstream& f, std::uint32_t v) {
  const char b[4] = {char(v >> 24), char(v >> 16), char(v >> 8), char(v)};
  f.write(b, 4);
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("bounds --delta 2").code == 2);
  CHECK(run("bounds --config /nonexistent.json").code == 2);
  CHECK(run("run-grid").code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("bounds subcommand") {
  auto r = run("bounds -L 1 --rho 1 --n 10 --delta 0.5");
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["a_rho"] == 9.0);
  r = run("bounds --rho 0 -L 3 --clean-risk 0.4 --n 20");
  j = json::parse(r.out);
  CHECK(j["gap_bound"] == 0.0);
  CHECK(j["a_rho"] == 4.0);
  r = run("bounds --epsilon 1 -L 1 --rho 0.1 --sigma 0.5 --n 10000 --delta 0.05 --expected-rad 0.01");
  j = json::parse(r.out);
  CHECK(j["rad_lower_bound"]["value"].get<double>() == doctest::Approx(0.3851).epsilon(1e-4));
  CHECK(j["gen_bound_rhs"].get<double>() > 0.02);
  CHECK(j["theoretical_L"]["wu"]["alpha"] == 0.1);

  const auto d = scratch("bounds");
  std::ofstream(d / "b.json") << R"({"lipschitz": 2, "rho": 0.5, "n": 5})";
  j = json::parse(run("bounds --config " + (d / "b.json").string()).out);
  CHECK(j["a_rho"] == 9.0);
  j = json::parse(run("bounds --config " + (d / "b.json").string() + " --rho 0").out);
  CHECK(j["a_rho"] == 4.0);
  fs::remove_all(d);
}

TEST_CASE("verify subcommand") {
  const auto d = scratch("verify");
  CHECK(run("verify --trials 3 --seed 5 --out " + d.string()).code == 0);
  const auto j = json::parse(slurp(d / "verify_report.json"));
  CHECK(j["passed"] == true);
  CHECK(j["trials"] == 3);
  const std::string first = slurp(d / "verify_report.json");
  run("verify --trials 3 --seed 5 --out " + d.string());
  auto strip = [](std::string s) {
    auto j2 = json::parse(s);
    j2.erase("seconds");
    return j2.dump();
  };
  CHECK(strip(slurp(d / "verify_report.json")) == strip(first));
  CHECK(run("verify --trials 30 --summary --understate-lipschitz").code == 1);
  fs::remove_all(d);
}

TEST_CASE("run-grid, fit and lipschitz subcommands") {
  const auto d = scratch("grid");
  std::ofstream(d / "grid.json") << R"({
    "schema_version": 1,
    "data": {"kind": "synthetic", "d": 5, "classes": 3, "n_train": 100, "n_test": 40, "spread": 0.3},
    "n_grid": [30, 60], "width_grid": [3, 6],
    "train": {"max_epochs": 5, "batch_size": 16},
    "out_dir": "out"
  })";
  auto r = run("run-grid --config " + (d / "grid.json").string());
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["rows"] == 4);
  const std::string csv = slurp(d / "out" / "results.csv");
  CHECK(csv.rfind("n,width,p,seed,L_emp,stopped_epoch,best_test_loss,final_train_loss,status\n", 0) == 0);
  r = run("run-grid --config " + (d / "grid.json").string());
  CHECK(json::parse(r.out)["computed"] == 0);
  CHECK(slurp(d / "out" / "results.csv") == csv);
  // --out and --seed override the file.
  r = run("run-grid --config " + (d / "grid.json").string() + " --seed 9 --jobs 2 --out " + (d / "other").string());
  REQUIRE(r.code == 0);
  CHECK(slurp(d / "other" / "results.csv").find(",9,") != std::string::npos);

  // Noiseless power law CSV -> exact exponents end to end.
  {
    std::ofstream f(d / "law.csv");
    f << "n,width,p,seed,L_emp,stopped_epoch,best_test_loss,final_train_loss,status\n";
    for (int n : {500, 1000, 2000, 4000})
      for (int p : {100, 400, 1600})
        f << n << ",1," << p << ",0," << std::setprecision(17) << 3.0 * std::pow(n, 0.2) * std::pow(p, -0.05)
          << ",1,0,0,ok\n";
  }
  r = run("fit " + (d / "law.csv").string() + " --out " + (d / "fit").string());
  REQUIRE(r.code == 0);
  const auto fit = json::parse(slurp(d / "fit" / "fit_report.json"));
  CHECK(std::fabs(fit["joint"]["alpha"]["estimate"].get<double>() - 0.2) <= 1e-10);
  CHECK(std::fabs(fit["slices"]["fit"]["beta"]["estimate"].get<double>() + 0.05) <= 1e-10);
  CHECK(fs::exists(d / "fit" / "fit_report.txt"));
  {
    std::ofstream f(d / "zeros.csv");
    f << "n,width,p,seed,L_emp,stopped_epoch,best_test_loss,final_train_loss,status\n";
    f << "500,2,100,0,0,1,0,0,ok\n1000,2,100,0,0,1,0,0,ok\n";
  }
  CHECK(run("fit " + (d / "zeros.csv").string()).code == 2);

  // Checkpoint + IDX files for the lipschitz subcommand.
  {
    std::ofstream img(d / "img.idx", std::ios::binary), lab(d / "lab.idx", std::ios::binary);
    put_be32(img, 0x803);
    put_be32(img, 20);
    put_be32(img, 2);
    put_be32(img, 2);
    put_be32(lab, 0x801);
    put_be32(lab, 20);
    for (int i = 0; i < 20; ++i) {
      for (int k = 0; k < 4; ++k) img.put(char((i * 37 + k * 91) % 256));
      lab.put(char(i % 3));
    }
  }
  const size_t hidden[] = {4};
  roblip_model* m = nullptr;
  REQUIRE(roblip_model_build(4, hidden, 1, 3, 1, &m) == ROBLIP_OK);
  REQUIRE(roblip_model_save(m, (d / "m.ckpt").string().c_str()) == ROBLIP_OK);
  roblip_model_free(m);
  r = run("lipschitz --checkpoint " + (d / "m.ckpt").string() + " --images " + (d / "img.idx").string() +
          " --labels " + (d / "lab.idx").string());
  REQUIRE(r.code == 0);
  const auto lj = json::parse(r.out);
  CHECK(lj["L_emp"].get<double>() > 0);
  CHECK(lj["n"] == 20);
  CHECK(lj["per_class"].size() == 3);
  r = run("lipschitz --checkpoint " + (d / "m.ckpt").string() + " --images " + (d / "lab.idx").string() +
          " --labels " + (d / "lab.idx").string());
  CHECK(r.code == 2);
  fs::remove_all(d);
}
