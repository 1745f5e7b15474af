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

#pragma once

// Evaluation runs over (model, strategy, domain) triples and the data
// behind the report plots.

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lklm/generation.hpp"
#include "lklm/metrics.hpp"

namespace lklm {

struct ModelSpec {
  enum class Kind { Nlp, Kg, Ngram, Remote };
  Kind kind = Kind::Nlp;
  int order = 3;    // Ngram
  std::string url;  // Remote

  // nlp | kg | ngram[:order] | remote:http://host:port. Throws ConfigError.
  static ModelSpec parse(std::string_view spec);
  std::string to_string() const;
  // nlp and kg ignore decoding strategies.
  bool uses_strategies() const { return kind == Kind::Ngram || kind == Kind::Remote; }
};

struct PromptSpec {
  std::string domain;
  std::string prompt;
};

struct StrategySpec {
  Strategy strategy = Strategy::Greedy;
  int beam_width = 5;
  double temperature = 1.0;
  std::uint64_t seed = 0;
};

struct EvalConfig {
  std::filesystem::path corpus;  // corpus JSON, or a directory of per-domain subdirectories
  std::vector<PromptSpec> prompts;
  std::vector<ModelSpec> models;
  std::vector<StrategySpec> strategies;
  std::filesystem::path embeddings;
  std::optional<std::filesystem::path> scores;
  std::optional<std::filesystem::path> kg;  // built-in graph when absent
  int max_new_tokens = 64;
  std::size_t nlp_sentences = 5;
  std::chrono::milliseconds timeout = std::chrono::milliseconds(0);  // 0: default_timeout()
  std::optional<std::filesystem::path> csv_out;
  std::optional<std::filesystem::path> json_out;
};

// Relative paths resolve against `base_dir`. Missing prompts fall back to
// the built-in prompt set. Throws ConfigError.
EvalConfig parse_eval_config(std::string_view json, const std::filesystem::path& base_dir);
EvalConfig load_eval_config(const std::filesystem::path& path);
std::vector<PromptSpec> default_prompts();
std::vector<PromptSpec> parse_prompts(std::string_view json);

// Key under which a model's instructional scores are filed.
std::string score_alias(std::string_view model);

// One row per applicable triple; backend failures become failed rows.
// Writes csv_out / json_out when set.
MetricReport run_eval(const EvalConfig& config);

// Writes one TSV per domain plus timing.tsv; returns the files written.
std::vector<std::filesystem::path> write_plot_data(const MetricReport& report, const std::filesystem::path& dir);

}  // namespace lklm
