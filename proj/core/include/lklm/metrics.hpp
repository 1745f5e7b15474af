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

// Evaluation metrics: embedding relevance, transition-word coherence,
// human instructional scores, timing, and the report they feed.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lklm/generation.hpp"

namespace lklm {

class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  // Token is lowercased before insertion; throws DimMismatch.
  void add(std::string_view token, std::vector<double> vector);
  const std::vector<double>* find(std::string_view lower_token) const;

 private:
  std::size_t dim_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

// "token v1 ... vd" per line; dim comes from the first line.
EmbeddingTable parse_embeddings(std::string_view text);
EmbeddingTable load_embeddings(const std::filesystem::path& path);

// Mean of the vectors of in-vocabulary tokens (lowercased, stopwords kept).
std::vector<double> pool(std::string_view text, const EmbeddingTable& table);
double cosine(std::span<const double> u, std::span<const double> v);
double relevance(std::string_view generated, std::string_view reference, const EmbeddingTable& table);

struct TransitionCount {
  std::size_t markers = 0;
  std::size_t word_tokens = 0;
};
// Markers: furthermore, however, therefore, moreover and the phrase
// "in addition", matched case-insensitively on whole tokens.
TransitionCount count_transitions(std::string_view text);
// 100 * markers / word tokens; 0 for text without words.
double transition_density(std::string_view text);

struct Coherence {
  double transition_density = 0.0;
  double coherence_cosine = 0.0;
  double composite = 0.0;
};
double composite_coherence(double transition_density, double coherence_cosine);
Coherence coherence(std::string_view generated, std::string_view reference, const EmbeddingTable& table);

struct ScoreKey {
  std::string model;
  std::string strategy;
  std::string domain;
  auto operator<=>(const ScoreKey&) const = default;
};
// An empty score cell loads as nullopt (row present, value unknown).
using ScoreTable = std::map<ScoreKey, std::optional<double>>;

ScoreTable parse_scores(std::string_view csv);
ScoreTable load_scores(const std::filesystem::path& path);

struct TimedGeneration {
  GenerationResult result;
  double wall_ms = 0.0;
};

// Brackets `action` with a monotonic clock. Errors propagate untouched.
template <typename Action>
TimedGeneration time_generation(Action&& action) {
  const auto start = std::chrono::steady_clock::now();
  GenerationResult result = std::forward<Action>(action)();
  const auto stop = std::chrono::steady_clock::now();
  TimedGeneration t{std::move(result), std::chrono::duration<double, std::milli>(stop - start).count()};
  t.result.wall_ms = t.wall_ms;
  return t;
}

struct MetricRow {
  std::string model;
  std::string strategy;
  std::string domain;
  double relevance = 0.0;
  double transition_density = 0.0;
  double coherence_cosine = 0.0;
  double coherence_composite = 0.0;
  std::optional<double> instructional;
  std::uint64_t load_ms = 0;
  double inference_ms = 0.0;
  std::uint64_t size_bytes = 0;
  double wall_ms = 0.0;     // JSON only
  bool replicated = false;  // JSON only
  std::string text;         // JSON only

  ScoreKey key() const { return {model, strategy, domain}; }
};

struct FailedRow {
  std::string model;
  std::string strategy;
  std::string domain;
  std::string error;
};

struct MetricReport {
  std::vector<MetricRow> rows;  // sorted by key
  std::vector<FailedRow> failed;
};

// Throws OutOfRange if a bounded field is outside its declared range.
void check_row(const MetricRow& row);

inline constexpr std::string_view kReportHeader =
    "model,strategy,domain,relevance,transition_density,coherence_cosine,coherence_composite,instructional,"
    "load_ms,inference_ms,size_bytes";

std::string report_to_csv(const MetricReport& report);
std::string report_to_json(const MetricReport& report);
// Reads the CSV form back (JSON-only fields are left default).
MetricReport report_from_csv(std::string_view csv);

}  // namespace lklm
