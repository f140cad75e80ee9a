/*
 * Copyright 2026 The qrnn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "qrnn/cli.hpp"
#include "qrnn/io.hpp"

using namespace qrnn;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("qrnn_cli_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const std::vector<std::string> kTiny = {"copy-train", "--seq-len", "2",  "--blank-len",
                                        "2",          "--hidden",  "2",  "--batch",
                                        "3",          "--quiet"};

std::vector<std::string> tiny(std::vector<std::string> extra) {
  std::vector<std::string> args = kTiny;
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

TEST_CASE("per-seed paths") {
  CHECK(cli::per_seed_path("metrics.csv", 7) == "metrics.seed7.csv");
  CHECK(cli::per_seed_path("out/run_{seed}.csv", 3) == "out/run_3.csv");
  CHECK(cli::per_seed_path("model", 2) == "model.seed2");
  CHECK(cli::per_seed_path("dir.d/model", 2) == "dir.d/model.seed2");
}

TEST_CASE("usage errors exit with 2") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"no-such-command"}).code == 2);
  CHECK(invoke({"copy-train", "--bogus"}).code == 2);
  CHECK(invoke({"copy-train", "--model", "gru"}).code == 2);
  CHECK(invoke({"copy-train", "--epochs", "0"}).code == 2);
  CHECK(invoke({"copy-train", "--lr", "-1"}).code == 2);
  CHECK(invoke({"params", "--arch", "conv:1x4"}).code == 2);
  CHECK(invoke({"params", "--arch", "qlinear:1x6,in=8"}).code == 2);
  CHECK(invoke({"copy-train", "--resume", "x.ckpt", "--seed", "3"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("grad-check exit codes") {
  const Result ok = invoke({"grad-check", "--model", "qlstm"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("max_rel_error") != std::string::npos);
  const Result strict = invoke({"grad-check", "--model", "qlstm", "--tolerance", "0"});
  CHECK(strict.code == 1);
  CHECK(strict.out.find("FAIL") != std::string::npos);
}

TEST_CASE("params") {
  const Result r = invoke({"params", "--arch", "qlinear:1x4096,in=4096", "--arch",
                           "linear:1x4096,in=4096", "--compare"});
  CHECK(r.code == 0);
  CHECK(r.out.find("4194304") != std::string::npos);
  CHECK(r.out.find("16777216") != std::string::npos);
  CHECK(r.out.find("real/quaternion ratio 4\n") != std::string::npos);
}

TEST_CASE("pack-features") {
  TempDir dir;
  spit(dir / "ramp.csv", "0\n1\n2\n3\n4\n5\n");
  REQUIRE(invoke({"pack-features", "--in", dir / "ramp.csv", "--out", dir / "ramp_q.csv"}).code == 0);
  std::ifstream in(dir / "ramp_q.csv");
  const Tensor packed = io::read_matrix_csv(in);
  REQUIRE(packed.shape() == std::vector<std::size_t>{6, 4});
  CHECK(packed.at(0, 1) == doctest::Approx(0.5));
  CHECK(packed.at(1, 1) == doctest::Approx(0.8));
  CHECK(packed.at(2, 1) == doctest::Approx(1.0));

  SUBCASE("binary output exports back to the same CSV") {
    REQUIRE(invoke({"pack-features", "--in", dir / "ramp.csv", "--out", dir / "ramp.bin",
                    "--format", "bin"})
                .code == 0);
    REQUIRE(invoke({"export-features", "--in", dir / "ramp.bin", "--out", dir / "back.csv"}).code == 0);
    CHECK(slurp(dir / "back.csv") == slurp(dir / "ramp_q.csv"));
  }
  SUBCASE("bad input") {
    spit(dir / "ragged.csv", "1,2\n3\n");
    CHECK(invoke({"pack-features", "--in", dir / "ragged.csv", "--out", dir / "x.csv"}).code == 2);
    CHECK(invoke({"pack-features", "--in", dir / "missing.csv", "--out", dir / "x.csv"}).code == 2);
    spit(dir / "junk.bin", "not a container");
    CHECK(invoke({"export-features", "--in", dir / "junk.bin", "--out", dir / "x.csv"}).code == 2);
  }
}

TEST_CASE("copy-train") {
  TempDir dir;

  SUBCASE("one epoch writes one metrics row") {
    const Result r = invoke(tiny({"--epochs", "1", "--metrics", dir / "m.csv"}));
    REQUIRE(r.code == 0);
    std::ifstream in(dir / "m.csv");
    CHECK(io::read_metrics_csv(in).size() == 1);
    CHECK(r.out.find("best_accuracy_recall=") != std::string::npos);
    CHECK(r.out.find("params=") != std::string::npos);
  }
  SUBCASE("repeated runs are byte-identical") {
    for (const char* model : {"qlstm", "lstm"}) {
      REQUIRE(invoke(tiny({"--model", model, "--epochs", "4", "--metrics", dir / "a.csv",
                           "--checkpoint", dir / "a.ckpt"}))
                  .code == 0);
      REQUIRE(invoke(tiny({"--model", model, "--epochs", "4", "--metrics", dir / "b.csv",
                           "--checkpoint", dir / "b.ckpt"}))
                  .code == 0);
      CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
      CHECK(slurp(dir / "a.ckpt") == slurp(dir / "b.ckpt"));
    }
  }
  SUBCASE("resume continues the same trace") {
    REQUIRE(invoke(tiny({"--epochs", "5", "--metrics", dir / "full.csv", "--checkpoint",
                         dir / "full.ckpt"}))
                .code == 0);
    REQUIRE(invoke(tiny({"--epochs", "2", "--metrics", dir / "part.csv", "--checkpoint",
                         dir / "part.ckpt"}))
                .code == 0);
    REQUIRE(invoke({"copy-train", "--resume", dir / "part.ckpt", "--epochs", "5", "--metrics",
                    dir / "part.csv", "--checkpoint", dir / "part.ckpt", "--quiet"})
                .code == 0);
    CHECK(slurp(dir / "part.csv") == slurp(dir / "full.csv"));
    CHECK(slurp(dir / "part.ckpt") == slurp(dir / "full.ckpt"));
  }
  SUBCASE("several seeds") {
    REQUIRE(invoke(tiny({"--epochs", "2", "--seeds", "1,2", "--metrics", dir / "m.csv"})).code == 0);
    REQUIRE(fs::exists(dir / "m.seed1.csv"));
    REQUIRE(fs::exists(dir / "m.seed2.csv"));
    CHECK(slurp(dir / "m.seed1.csv") != slurp(dir / "m.seed2.csv"));
    REQUIRE(invoke(tiny({"--epochs", "2", "--seed", "2", "--metrics", dir / "single.csv"})).code == 0);
    CHECK(slurp(dir / "m.seed2.csv") == slurp(dir / "single.csv"));
  }
  SUBCASE("divergence exits with 3 and keeps the last good checkpoint") {
    const Result r = invoke(tiny({"--epochs", "50", "--lr", "1e308", "--checkpoint", dir / "d.ckpt"}));
    CHECK(r.code == 3);
    CHECK(fs::exists(dir / "d.ckpt"));
  }
}
