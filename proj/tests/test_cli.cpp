// Copyright 2026 The Blockkit Authors
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef BLOCKKIT_CLI_PATH
#error "BLOCKKIT_CLI_PATH must be defined by the build"
#endif

namespace fs = std::filesystem;

namespace {

const std::string kCli = BLOCKKIT_CLI_PATH;

struct Workdir {
  fs::path dir;
  Workdir() {
    dir = fs::temp_directory_path() / ("bk_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const {
    return (dir / name).string();
  }
};

int run(const std::string& args) {
  std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("full pipeline runs clean") {
  Workdir w;
  CHECK(run("synth --entities 40 --copies 2 --seed 5 --out-dir " + w.dir.string()) == 0);
  CHECK(fs::exists(w / "corpus.jsonl"));
  CHECK(fs::exists(w / "gold.csv"));

  CHECK(run("stats " + (w / "corpus.jsonl") + " --scheme qgram --q 3 --out " +
            (w / "stats.json")) == 0);
  CHECK(fs::exists(w / "stats.json"));

  CHECK(run("train " + (w / "corpus.jsonl") + " --steps 5 --batch-size 8 --seed 5 --out " +
            (w / "model.ckpt") + " --loss-csv " + (w / "loss.csv")) == 0);
  CHECK(fs::exists(w / "model.ckpt"));
  CHECK(slurp(w / "loss.csv").rfind("step,loss\n", 0) == 0);

  CHECK(run("block " + (w / "corpus.jsonl") + " --vectorizer trained:" +
            (w / "model.ckpt") + " --k 5 --out " + (w / "cand_dense.csv")) == 0);
  CHECK(run("block " + (w / "corpus.jsonl") + " --vectorizer bm25 --k 5 --out " +
            (w / "cand_sparse.csv")) == 0);
  CHECK(run("block " + (w / "corpus.jsonl") + " --vectorizer hashed --k 5 --out " +
            (w / "cand_hashed.csv")) == 0);

  CHECK(run("eval " + (w / "cand_dense.csv") + " " + (w / "gold.csv") + " --out " +
            (w / "r_dense.json") + " --csv " + (w / "r_dense.csv")) == 0);
  CHECK(run("eval " + (w / "cand_sparse.csv") + " " + (w / "gold.csv") + " --out " +
            (w / "r_sparse.json")) == 0);

  CHECK(run("ensemble " + (w / "cand_dense.csv") + " " + (w / "cand_sparse.csv") +
            " --out " + (w / "cand_both.csv")) == 0);
  CHECK(run("eval " + (w / "cand_both.csv") + " " + (w / "gold.csv") + " --out " +
            (w / "r_both.json")) == 0);
  CHECK(run("compare " + (w / "r_dense.json") + " " + (w / "r_sparse.json")) == 0);
}

TEST_CASE("trained encoder beats the hashed baseline end to end") {
  Workdir w;
  CHECK(run("synth --entities 500 --copies 2 --seed 0 --out-dir " + w.dir.string()) == 0);
  CHECK(run("train " + (w / "corpus.jsonl") +
            " --steps 500 --batch-size 64 --seed 0 --out " + (w / "model.ckpt")) == 0);
  CHECK(run("block " + (w / "corpus.jsonl") + " --vectorizer trained:" +
            (w / "model.ckpt") + " --k 100 --out " + (w / "cand_t.csv")) == 0);
  CHECK(run("block " + (w / "corpus.jsonl") + " --vectorizer hashed --k 100 --out " +
            (w / "cand_h.csv")) == 0);
  CHECK(run("eval " + (w / "cand_t.csv") + " " + (w / "gold.csv") + " --out " +
            (w / "rt.json")) == 0);
  CHECK(run("eval " + (w / "cand_h.csv") + " " + (w / "gold.csv") + " --out " +
            (w / "rh.json")) == 0);

  auto map_of = [](const std::string& report) {
    std::string text = slurp(report);
    auto at = text.find("\"map\": ");
    REQUIRE(at != std::string::npos);
    return std::strtod(text.c_str() + at + 7, nullptr);
  };
  double trained = map_of(w / "rt.json");
  double hashed = map_of(w / "rh.json");
  CHECK(trained >= hashed);
  CHECK(trained > 0.0);
}

TEST_CASE("candidates equal to gold evaluate to PC = PQ = 1") {
  Workdir w;
  write(w / "gold.csv", "left_id,right_id\na,b\nc,d\n");
  write(w / "cand.csv",
        "#mode=single_collection k=1\nrank,left_id,right_id\n1,a,b\n1,c,d\n");
  CHECK(run("eval " + (w / "cand.csv") + " " + (w / "gold.csv") + " --out " +
            (w / "report.json")) == 0);
  std::string report = slurp(w / "report.json");
  CHECK(report.find("\"map\": 1.0") != std::string::npos);
  CHECK(report.find("\"k_at_threshold\": 1") != std::string::npos);
}

TEST_CASE("ensembling a candidates file with itself is lossless") {
  Workdir w;
  CHECK(run("synth --entities 20 --copies 2 --seed 3 --out-dir " + w.dir.string()) == 0);
  CHECK(run("block " + (w / "corpus.jsonl") + " --vectorizer hashed --k 4 --out " +
            (w / "cand.csv")) == 0);
  CHECK(run("ensemble " + (w / "cand.csv") + " " + (w / "cand.csv") + " --out " +
            (w / "self.csv")) == 0);
  CHECK(slurp(w / "self.csv") == slurp(w / "cand.csv"));
}

TEST_CASE("exit codes distinguish config and data errors") {
  Workdir w;
  write(w / "tiny.jsonl", R"({"id": "a", "attrs": {"x": "1"}})"
                          "\n"
                          R"({"id": "b", "attrs": {"x": "2"}})"
                          "\n");
  // k = 0 violates a precondition -> config error
  CHECK(run("block " + (w / "tiny.jsonl") + " --vectorizer hashed --k 0 --out " +
            (w / "c.csv")) == 2);
  // missing file -> data error
  CHECK(run("block " + (w / "missing.jsonl") + " --vectorizer hashed --k 1 --out " +
            (w / "c.csv")) == 3);
  // unknown vectorizer -> config error
  CHECK(run("block " + (w / "tiny.jsonl") + " --vectorizer magic --k 1 --out " +
            (w / "c.csv")) == 2);
  // bad config file -> config error
  write(w / "bad.json", R"({"unknown_key": 1})");
  CHECK(run("--config " + (w / "bad.json") + " synth --out-dir " + w.dir.string()) == 2);
  // unparsable CLI flags -> config error
  CHECK(run("block --not-a-flag") == 2);
}

TEST_CASE("outputs are byte-deterministic given a seed") {
  Workdir w;
  fs::create_directories(w.dir / "a");
  fs::create_directories(w.dir / "b");
  CHECK(run("synth --entities 15 --copies 2 --seed 9 --out-dir " +
            (w.dir / "a").string()) == 0);
  CHECK(run("synth --entities 15 --copies 2 --seed 9 --out-dir " +
            (w.dir / "b").string()) == 0);
  CHECK(slurp((w.dir / "a" / "corpus.jsonl").string()) ==
        slurp((w.dir / "b" / "corpus.jsonl").string()));
  CHECK(slurp((w.dir / "a" / "gold.csv").string()) ==
        slurp((w.dir / "b" / "gold.csv").string()));

  CHECK(run("train " + (w.dir / "a" / "corpus.jsonl").string() +
            " --steps 3 --batch-size 8 --seed 9 --out " + (w / "m1.ckpt")) == 0);
  CHECK(run("train " + (w.dir / "a" / "corpus.jsonl").string() +
            " --steps 3 --batch-size 8 --seed 9 --out " + (w / "m2.ckpt")) == 0);
  CHECK(slurp(w / "m1.ckpt") == slurp(w / "m2.ckpt"));
}

TEST_CASE("BLOCKKIT_SEED env matches the --seed flag") {
  Workdir w;
  fs::create_directories(w.dir / "flag");
  fs::create_directories(w.dir / "env");
  CHECK(run("synth --entities 10 --copies 2 --seed 33 --out-dir " +
            (w.dir / "flag").string()) == 0);
  std::string cmd = "BLOCKKIT_SEED=33 " + kCli + " synth --entities 10 --copies 2 --out-dir " +
                    (w.dir / "env").string() + " >/dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK(slurp((w.dir / "flag" / "corpus.jsonl").string()) ==
        slurp((w.dir / "env" / "corpus.jsonl").string()));
}

TEST_CASE("condition filters tables and writes collections") {
  Workdir w;
  write(w / "entities.csv",
        "name,maker\napple iphone,apple inc\ngoogle pixel,google llc\napple iphone,apple inc\n");
  write(w / "numbers.csv", "a,b\n1,2\n3,4\n1,2\n");
  CHECK(run("condition " + (w / "entities.csv") + " " + (w / "numbers.csv") +
            " --out-dir " + w.dir.string() + " --log " + (w / "log.json")) == 0);
  CHECK(fs::exists(w / "entities.jsonl"));
  CHECK_FALSE(fs::exists(w / "numbers.jsonl"));
  std::string log = slurp(w / "log.json");
  CHECK(log.find("statistics_table") != std::string::npos);
}

TEST_CASE("external vectors drive blocking") {
  Workdir w;
  write(w / "coll.jsonl", R"({"id": "a", "attrs": {"x": "1"}})"
                          "\n"
                          R"({"id": "b", "attrs": {"x": "2"}})"
                          "\n"
                          R"({"id": "c", "attrs": {"x": "3"}})"
                          "\n");
  write(w / "vecs.txt", "a 2 1 0\nb 2 0.9 0.1\nc 2 0 1\n");
  CHECK(run("block " + (w / "coll.jsonl") + " --vectorizer external:" +
            (w / "vecs.txt") + " --k 1 --out " + (w / "c.csv")) == 0);
  std::string cand = slurp(w / "c.csv");
  CHECK(cand.find("1,a,b") != std::string::npos);
}

}  // TEST_SUITE
