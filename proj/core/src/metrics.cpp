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

#include "lklm/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>

#include <fmt/format.h>

#include "json.hpp"
#include "lklm/corpus.hpp"
#include "lklm/error.hpp"
#include "text.hpp"

namespace lklm {

namespace {

bool parse_double(std::string_view s, double& out) {
  s = text::trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_uint(std::string_view s, std::uint64_t& out) {
  s = text::trim(s);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && text::is_space(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !text::is_space(line[i])) ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

// Minimal RFC 4180 field splitter: quotes with doubled-quote escapes.
std::vector<std::string> csv_fields(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back().push_back(c);
    }
  }
  return out;
}

std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Embeddings

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw Error(ErrorCode::DimMismatch, "embedding dimension must be > 0");
}

void EmbeddingTable::add(std::string_view token, std::vector<double> vector) {
  if (vector.size() != dim_) {
    throw Error(ErrorCode::DimMismatch, fmt::format("'{}' has {} values, expected {}", token, vector.size(), dim_));
  }
  vectors_[text::to_lower(token)] = std::move(vector);
}

const std::vector<double>* EmbeddingTable::find(std::string_view lower_token) const {
  auto it = vectors_.find(std::string(lower_token));
  return it == vectors_.end() ? nullptr : &it->second;
}

EmbeddingTable parse_embeddings(std::string_view content) {
  std::optional<EmbeddingTable> table;
  std::size_t line_no = 0;
  for (std::string_view line : text::split_lines(content)) {
    ++line_no;
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) throw Error(ErrorCode::DimMismatch, fmt::format("line {}: no vector values", line_no));
    std::vector<double> v(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (!parse_double(fields[i], v[i - 1])) {
        throw Error(ErrorCode::Parse, fmt::format("line {}: bad number '{}'", line_no, fields[i]));
      }
    }
    if (!table) table.emplace(v.size());
    if (v.size() != table->dim()) {
      throw Error(ErrorCode::DimMismatch,
                  fmt::format("line {}: {} values, expected {}", line_no, v.size(), table->dim()));
    }
    table->add(fields[0], std::move(v));
  }
  if (!table) throw Error(ErrorCode::EmptyFile, "embedding file has no entries");
  return std::move(*table);
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) { return parse_embeddings(text::read_file(path)); }

std::vector<double> pool(std::string_view input, const EmbeddingTable& table) {
  std::vector<double> sum(table.dim(), 0.0);
  std::size_t hits = 0;
  for (const auto& tok : tokenize(input)) {
    const auto* v = table.find(text::to_lower(tok));
    if (!v) continue;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
    ++hits;
  }
  if (hits == 0) throw Error(ErrorCode::AllOOV, "no token of the text is in the embedding table");
  if (hits > 1) {
    for (double& x : sum) x /= static_cast<double>(hits);
  }
  return sum;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error(ErrorCode::DimMismatch, "cosine of vectors with different dimensions");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw Error(ErrorCode::ZeroVector, "cosine of a zero vector");
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

double relevance(std::string_view generated, std::string_view reference, const EmbeddingTable& table) {
  return cosine(pool(generated, table), pool(reference, table));
}

// ---------------------------------------------------------------------------
// Transitions

TransitionCount count_transitions(std::string_view input) {
  static const std::set<std::string, std::less<>> single = {"furthermore", "however", "therefore", "moreover"};
  TransitionCount tc;
  auto tokens = tokenize(input);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!is_word(tokens[i])) continue;
    ++tc.word_tokens;
    std::string lower = text::to_lower(tokens[i]);
    if (single.count(lower)) {
      ++tc.markers;
    } else if (lower == "in" && i + 1 < tokens.size() && text::to_lower(tokens[i + 1]) == "addition") {
      ++tc.markers;
    }
  }
  return tc;
}

double transition_density(std::string_view input) {
  TransitionCount tc = count_transitions(input);
  if (tc.word_tokens == 0) return 0.0;
  return 100.0 * static_cast<double>(tc.markers) / static_cast<double>(tc.word_tokens);
}

double composite_coherence(double density, double coherence_cosine) {
  return 0.5 * std::min(density / 5.0, 1.0) + 0.5 * (coherence_cosine + 1.0) / 2.0;
}

Coherence coherence(std::string_view generated, std::string_view reference, const EmbeddingTable& table) {
  Coherence c;
  c.transition_density = transition_density(generated);
  c.coherence_cosine = relevance(generated, reference, table);
  c.composite = composite_coherence(c.transition_density, c.coherence_cosine);
  return c;
}

// ---------------------------------------------------------------------------
// Scores

ScoreTable parse_scores(std::string_view csv) {
  auto lines = text::split_lines(csv);
  std::size_t i = 0;
  while (i < lines.size() && text::trim(lines[i]).empty()) ++i;
  if (i == lines.size() || text::trim(lines[i]) != "model,strategy,domain,score") {
    throw Error(ErrorCode::MalformedRow, "scores header must be model,strategy,domain,score");
  }
  ScoreTable out;
  for (++i; i < lines.size(); ++i) {
    std::string_view line = text::trim(lines[i]);
    if (line.empty()) continue;
    auto f = csv_fields(line);
    if (f.size() != 4) throw Error(ErrorCode::MalformedRow, fmt::format("line {}: expected 4 fields", i + 1));
    ScoreKey key{std::string(text::trim(f[0])), std::string(text::trim(f[1])), std::string(text::trim(f[2]))};
    if (key.model.empty() || key.strategy.empty() || key.domain.empty()) {
      throw Error(ErrorCode::MalformedRow, fmt::format("line {}: empty key field", i + 1));
    }
    std::optional<double> score;
    if (!text::trim(f[3]).empty()) {
      double v = 0.0;
      if (!parse_double(f[3], v)) throw Error(ErrorCode::MalformedRow, fmt::format("line {}: bad score", i + 1));
      if (v < 0.0 || v > 1.0) throw Error(ErrorCode::OutOfRange, fmt::format("line {}: score {} not in [0,1]", i + 1, v));
      score = v;
    }
    if (!out.emplace(key, score).second) {
      throw Error(ErrorCode::DuplicateKey,
                  fmt::format("line {}: duplicate ({}, {}, {})", i + 1, key.model, key.strategy, key.domain));
    }
  }
  return out;
}

ScoreTable load_scores(const std::filesystem::path& path) { return parse_scores(text::read_file(path)); }

// ---------------------------------------------------------------------------
// Report

void check_row(const MetricRow& r) {
  auto in = [](double x, double lo, double hi) { return std::isfinite(x) && x >= lo && x <= hi; };
  if (!in(r.relevance, -1.0, 1.0)) throw Error(ErrorCode::OutOfRange, "relevance outside [-1,1]");
  if (!(std::isfinite(r.transition_density) && r.transition_density >= 0.0)) {
    throw Error(ErrorCode::OutOfRange, "transition_density negative");
  }
  if (!in(r.coherence_cosine, -1.0, 1.0)) throw Error(ErrorCode::OutOfRange, "coherence_cosine outside [-1,1]");
  if (!in(r.coherence_composite, 0.0, 1.0)) throw Error(ErrorCode::OutOfRange, "coherence_composite outside [0,1]");
  if (r.instructional && !in(*r.instructional, 0.0, 1.0)) {
    throw Error(ErrorCode::OutOfRange, "instructional outside [0,1]");
  }
  if (!(std::isfinite(r.inference_ms) && r.inference_ms >= 0.0)) {
    throw Error(ErrorCode::OutOfRange, "inference_ms negative");
  }
}

std::string report_to_csv(const MetricReport& report) {
  std::string out(kReportHeader);
  out.push_back('\n');
  for (const auto& r : report.rows) {
    out += fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{},{},{:.3f},{}\n", csv_escape(r.model),
                       csv_escape(r.strategy), csv_escape(r.domain), r.relevance, r.transition_density,
                       r.coherence_cosine, r.coherence_composite,
                       r.instructional ? text::format_number(*r.instructional) : std::string(), r.load_ms,
                       r.inference_ms, r.size_bytes);
  }
  return out;
}

std::string report_to_json(const MetricReport& report) {
  using nlohmann::ordered_json;
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"model", r.model},
                    {"strategy", r.strategy},
                    {"domain", r.domain},
                    {"relevance", r.relevance},
                    {"transition_density", r.transition_density},
                    {"coherence_cosine", r.coherence_cosine},
                    {"coherence_composite", r.coherence_composite},
                    {"instructional", r.instructional ? ordered_json(*r.instructional) : ordered_json(nullptr)},
                    {"load_ms", r.load_ms},
                    {"inference_ms", r.inference_ms},
                    {"wall_ms", r.wall_ms},
                    {"size_bytes", r.size_bytes},
                    {"replicated", r.replicated},
                    {"text", r.text}});
  }
  ordered_json failed = ordered_json::array();
  for (const auto& f : report.failed) {
    failed.push_back({{"model", f.model}, {"strategy", f.strategy}, {"domain", f.domain}, {"error", f.error}});
  }
  ordered_json root;
  root["rows"] = std::move(rows);
  root["failed"] = std::move(failed);
  return root.dump(2) + "\n";
}

MetricReport report_from_csv(std::string_view csv) {
  auto lines = text::split_lines(csv);
  if (lines.empty() || text::trim(lines[0]) != kReportHeader) {
    throw Error(ErrorCode::MalformedRow, "report header does not match the expected columns");
  }
  MetricReport report;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    auto f = csv_fields(text::trim(lines[i]));
    if (f.size() != 11) throw Error(ErrorCode::MalformedRow, fmt::format("report line {}: expected 11 fields", i + 1));
    MetricRow r;
    r.model = f[0];
    r.strategy = f[1];
    r.domain = f[2];
    bool ok = parse_double(f[3], r.relevance) && parse_double(f[4], r.transition_density) &&
              parse_double(f[5], r.coherence_cosine) && parse_double(f[6], r.coherence_composite) &&
              parse_uint(f[8], r.load_ms) && parse_double(f[9], r.inference_ms) && parse_uint(f[10], r.size_bytes);
    if (!text::trim(f[7]).empty()) {
      double v = 0.0;
      ok = ok && parse_double(f[7], v);
      r.instructional = v;
    }
    if (!ok) throw Error(ErrorCode::MalformedRow, fmt::format("report line {}: bad value", i + 1));
    report.rows.push_back(std::move(r));
  }
  return report;
}

}  // namespace lklm
