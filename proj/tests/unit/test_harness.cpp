// Copyright 2026 The lklm Authors.
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

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <random>
#include <set>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lklm/error.hpp"
#include "lklm/harness.hpp"
#include "oracles.hpp"

using namespace lklm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("lklm-harness-" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EvalConfig base_config() {
  EvalConfig c;
  c.corpus = testing::data_dir() / "fixtures" / "corpus";
  c.prompts = default_prompts();
  c.embeddings = testing::data_dir() / "fixtures" / "embeddings.txt";
  c.max_new_tokens = 24;
  return c;
}

StrategySpec strategy(Strategy s) {
  StrategySpec spec;
  spec.strategy = s;
  spec.beam_width = 3;
  spec.seed = 7;
  return spec;
}

// Drops load_ms and inference_ms from every CSV line.
std::string without_timing(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() >= 11);
    cells.erase(cells.end() - 3, cells.end() - 1);
    for (const auto& c : cells) out += c + ",";
    out += "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("model specs") {
  CHECK(ModelSpec::parse("nlp").kind == ModelSpec::Kind::Nlp);
  CHECK(ModelSpec::parse("kg").kind == ModelSpec::Kind::Kg);
  auto ng = ModelSpec::parse("ngram:2");
  CHECK(ng.kind == ModelSpec::Kind::Ngram);
  CHECK(ng.order == 2);
  CHECK(ModelSpec::parse("ngram").order == 3);
  auto remote = ModelSpec::parse("remote:http://127.0.0.1:8000");
  CHECK(remote.kind == ModelSpec::Kind::Remote);
  CHECK(remote.url == "http://127.0.0.1:8000");
  CHECK(remote.uses_strategies());
  CHECK(!ModelSpec::parse("kg").uses_strategies());
  for (const char* bad : {"gpt9", "ngram:0", "ngram:x", "remote:"}) {
    CHECK_THROWS_AS(ModelSpec::parse(bad), Error);
  }
  CHECK(score_alias("kg") == "wordnet");
  CHECK(score_alias("gpt2") == "gpt2");
}

TEST_CASE("config parsing") {
  auto c = parse_eval_config(R"({"corpus":"c","embeddings":"e.txt","models":["nlp","ngram:2"],
      "strategies":["greedy",{"name":"beam","beam_width":2}],"output":{"csv":"out.csv"}})",
                             "/base");
  CHECK(c.corpus == fs::path("/base/c"));
  CHECK(c.models.size() == 2);
  REQUIRE(c.strategies.size() == 2);
  CHECK(c.strategies[1].beam_width == 2);
  CHECK(c.prompts.size() == 3);
  CHECK(c.csv_out == fs::path("/base/out.csv"));
  CHECK_THROWS_AS(parse_eval_config(R"({"corpus":"c","embeddings":"e","models":[]})", "/"), Error);
  CHECK_THROWS_AS(parse_eval_config("{", "/"), Error);
}

TEST_CASE("row cardinality") {
  auto c = base_config();
  c.models = {ModelSpec::parse("nlp"), ModelSpec::parse("kg")};
  c.strategies = {strategy(Strategy::Greedy)};
  auto report = run_eval(c);
  CHECK(report.rows.size() == 6);
  CHECK(report.failed.empty());

  c.models.push_back(ModelSpec::parse("ngram:2"));
  c.strategies = {strategy(Strategy::Greedy), strategy(Strategy::Beam), strategy(Strategy::Sample)};
  report = run_eval(c);
  // 3 models x 3 strategies x 3 domains, nlp/kg replicated per strategy
  CHECK(report.rows.size() == 27);
  std::set<std::tuple<std::string, std::string, std::string>> keys;
  for (const auto& r : report.rows) {
    keys.insert({r.model, r.strategy, r.domain});
    CHECK(r.replicated == (r.model == "nlp" || r.model == "kg"));
    CHECK(r.relevance >= -1.0);
    CHECK(r.relevance <= 1.0);
    CHECK(r.coherence_composite >= 0.0);
    CHECK(r.coherence_composite <= 1.0);
    CHECK(r.transition_density >= 0.0);
  }
  CHECK(keys.size() == 27);
}

TEST_CASE("instructional scores join") {
  auto c = base_config();
  c.models = {ModelSpec::parse("nlp"), ModelSpec::parse("kg"), ModelSpec::parse("ngram:2")};
  c.strategies = {strategy(Strategy::Greedy)};
  auto without = run_eval(c);
  for (const auto& r : without.rows) CHECK(!r.instructional.has_value());

  c.scores = testing::data_dir() / "instructional_scores.csv";
  auto with = run_eval(c);
  const auto table = load_scores(*c.scores);
  for (const auto& r : with.rows) {
    if (r.model == "ngram:2") {
      CHECK(!r.instructional.has_value());
      continue;
    }
    auto it = table.find(ScoreKey{score_alias(r.model), "-", r.domain});
    REQUIRE(it != table.end());
    CHECK(r.instructional == it->second);
  }
}

TEST_CASE("dead remote becomes failed rows") {
  auto c = base_config();
  c.models = {ModelSpec::parse("nlp"), ModelSpec::parse("remote:http://127.0.0.1:1")};
  c.strategies = {strategy(Strategy::Greedy), strategy(Strategy::Beam)};
  c.timeout = std::chrono::milliseconds(500);
  auto report = run_eval(c);
  CHECK(report.rows.size() == 6);
  CHECK(report.failed.size() == 6);
  for (const auto& f : report.failed) CHECK(!f.error.empty());
}

TEST_CASE("reports are deterministic apart from timing") {
  TempDir dir;
  auto c = base_config();
  c.models = {ModelSpec::parse("nlp"), ModelSpec::parse("kg"), ModelSpec::parse("ngram:3")};
  c.strategies = {strategy(Strategy::Greedy), strategy(Strategy::Sample)};
  c.scores = testing::data_dir() / "instructional_scores.csv";
  c.csv_out = dir.path / "a.csv";
  c.json_out = dir.path / "a.json";
  auto first = run_eval(c);
  c.csv_out = dir.path / "b.csv";
  run_eval(c);
  auto a = read_file(dir.path / "a.csv");
  auto b = read_file(dir.path / "b.csv");
  CHECK(a.rfind(std::string(kReportHeader), 0) == 0);
  CHECK(without_timing(a) == without_timing(b));
  CHECK(fs::exists(dir.path / "a.json"));

  auto files = write_plot_data(first, dir.path / "plots");
  CHECK(files.size() == 4);
  CHECK(fs::exists(dir.path / "plots" / "textiles.tsv"));
  auto timing = read_file(dir.path / "plots" / "timing.tsv");
  CHECK(timing.rfind("model\tload_ms\tmean_inference_ms\tsize_bytes\n", 0) == 0);
  CHECK(std::count(timing.begin(), timing.end(), '\n') == 4);
}
