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

#include "lklm/decision.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "embedded_data.hpp"
#include "json.hpp"
#include "lklm/error.hpp"
#include "text.hpp"

namespace lklm {

std::string_view to_string(ModelClass c) {
  switch (c) {
    case ModelClass::Nlp: return "NLP";
    case ModelClass::Kg: return "KG";
    case ModelClass::Llm: return "LLM";
    case ModelClass::HybridLklm: return "HYBRID_LKLM";
  }
  return "NLP";
}

std::string_view to_string(Tier t) {
  switch (t) {
    case Tier::Low: return "LOW";
    case Tier::Medium: return "MEDIUM";
    case Tier::High: return "HIGH";
  }
  return "LOW";
}

std::string_view to_string(Transparency t) { return t == Transparency::Low ? "LOW" : "HIGH"; }

std::optional<Tier> parse_tier(std::string_view s) {
  auto l = text::to_lower(s);
  if (l == "low") return Tier::Low;
  if (l == "medium") return Tier::Medium;
  if (l == "high") return Tier::High;
  return std::nullopt;
}

std::optional<Transparency> parse_transparency(std::string_view s) {
  auto l = text::to_lower(s);
  if (l == "low") return Transparency::Low;
  if (l == "high") return Transparency::High;
  return std::nullopt;
}

std::string_view to_string(Attribute a) {
  static constexpr std::array<std::string_view, kAttributeCount> names = {
      "model_size",   "compute",          "manual_effort",           "contextual_reasoning",
      "transparency", "domains_captured", "reasoning_generalisation"};
  return names[static_cast<std::size_t>(a)];
}

// ---------------------------------------------------------------------------
// Matrix

SectorDependencyMatrix::SectorDependencyMatrix(std::vector<std::string> sectors,
                                               std::map<std::pair<std::string, std::string>, int> cells)
    : sectors_(std::move(sectors)), cells_(std::move(cells)) {}

bool SectorDependencyMatrix::has_sector(std::string_view sector) const {
  return std::find(sectors_.begin(), sectors_.end(), sector) != sectors_.end();
}

std::optional<int> SectorDependencyMatrix::cell(std::string_view row, std::string_view col) const {
  auto it = cells_.find({std::string(row), std::string(col)});
  if (it == cells_.end()) return std::nullopt;
  return it->second;
}

int SectorDependencyMatrix::row_sum(std::string_view sector) const {
  if (!has_sector(sector)) throw Error(ErrorCode::UnknownSector, "unknown sector: " + std::string(sector));
  int sum = 0;
  for (const auto& col : sectors_) {
    if (auto v = cell(sector, col)) sum += *v;
  }
  return sum;
}

SectorDependencyMatrix parse_matrix(std::string_view content) {
  auto root = nlohmann::json::parse(content, nullptr, false);
  if (root.is_discarded() || !root.is_object()) throw Error(ErrorCode::Parse, "matrix is not a JSON object");
  if (!root.contains("sectors") || !root["sectors"].is_array()) throw Error(ErrorCode::BadShape, "missing sectors array");
  if (!root.contains("cells") || !root["cells"].is_object()) throw Error(ErrorCode::BadShape, "missing cells object");

  std::vector<std::string> sectors;
  for (const auto& s : root["sectors"]) {
    if (!s.is_string()) throw Error(ErrorCode::BadShape, "sector labels must be strings");
    if (std::find(sectors.begin(), sectors.end(), s.get<std::string>()) != sectors.end()) {
      throw Error(ErrorCode::BadShape, "duplicate sector " + s.get<std::string>());
    }
    sectors.push_back(s.get<std::string>());
  }
  for (auto required : kSectors) {
    if (std::find(sectors.begin(), sectors.end(), required) == sectors.end()) {
      throw Error(ErrorCode::MissingSector, "matrix lacks sector " + std::string(required));
    }
  }
  if (sectors.size() != kSectors.size()) throw Error(ErrorCode::BadShape, "unexpected extra sectors");

  std::map<std::pair<std::string, std::string>, int> cells;
  std::map<std::string, int> per_row;
  for (const auto& [key, value] : root["cells"].items()) {
    auto bar = key.find('|');
    if (bar == std::string::npos) throw Error(ErrorCode::BadShape, "cell key without '|': " + key);
    std::string row = key.substr(0, bar), col = key.substr(bar + 1);
    auto known = [&](const std::string& s) { return std::find(sectors.begin(), sectors.end(), s) != sectors.end(); };
    if (!known(row) || !known(col)) throw Error(ErrorCode::BadShape, "cell names an unknown sector: " + key);
    if (row == col) throw Error(ErrorCode::BadShape, "diagonal cell present: " + key);
    if (!value.is_number_integer() || value.get<long long>() < 1 || value.get<long long>() > 3) {
      throw Error(ErrorCode::BadCellValue, fmt::format("cell {} = {} is not 1, 2 or 3", key, value.dump()));
    }
    cells[{row, col}] = value.get<int>();
    ++per_row[row];
  }
  for (const auto& s : sectors) {
    if (per_row[s] != static_cast<int>(sectors.size()) - 1) {
      throw Error(ErrorCode::BadShape, fmt::format("row {} has {} cells, expected {}", s, per_row[s], sectors.size() - 1));
    }
  }
  return SectorDependencyMatrix(std::move(sectors), std::move(cells));
}

SectorDependencyMatrix load_matrix(const std::filesystem::path& path) { return parse_matrix(text::read_file(path)); }

const SectorDependencyMatrix& default_matrix() {
  static const SectorDependencyMatrix m = parse_matrix(*embedded::find("sector_dependency"));
  return m;
}

Tier dependency_tier(int sum, const DecisionPolicy& policy) {
  if (sum < 12 || sum > 36) throw Error(ErrorCode::OutOfRange, fmt::format("dependency sum {} not in [12,36]", sum));
  if (sum <= policy.low_max) return Tier::Low;
  if (sum <= policy.medium_max) return Tier::Medium;
  return Tier::High;
}

// ---------------------------------------------------------------------------
// Recommendation

int ModelClassScores::at(ModelClass c, Attribute a) const {
  if (c == ModelClass::HybridLklm) throw Error(ErrorCode::InvalidArgument, "the hybrid class has no attribute row");
  return values[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)];
}

int ModelClassScores::total(ModelClass c) const {
  int sum = 0;
  for (std::size_t a = 0; a < kAttributeCount; ++a) sum += at(c, static_cast<Attribute>(a));
  return sum;
}

const ModelClassScores& model_class_scores() {
  // Blue=1, Green=2, Yellow/Orange=3, Red=4.
  static const ModelClassScores s{{{
      {1, 1, 2, 4, 1, 4, 4},  // NLP
      {3, 2, 4, 2, 1, 2, 3},  // KG
      {4, 4, 1, 1, 4, 1, 1},  // LLM
  }}};
  return s;
}

Recommendation recommend(Tier tier, double budget_gb, Transparency transparency, const DecisionPolicy& policy) {
  if (!(budget_gb > 0.0)) throw Error(ErrorCode::InvalidArgument, "compute budget must be > 0 GB");
  Recommendation r;
  r.tier = tier;
  const std::string budget = text::format_number(budget_gb);
  const std::string floor = text::format_number(policy.llm_min_budget_gb);
  switch (tier) {
    case Tier::Low:
      r.chosen = ModelClass::Nlp;
      r.rationale.push_back("LOW dependency: few domains are needed, keyword NLP suffices");
      break;
    case Tier::Medium:
      r.chosen = ModelClass::Kg;
      r.rationale.push_back("MEDIUM dependency: a knowledge graph links the domains involved");
      break;
    case Tier::High:
      if (budget_gb < policy.llm_min_budget_gb) {
        r.chosen = ModelClass::Kg;
        r.rationale.push_back(fmt::format("HIGH dependency but budget {} GB < {} GB: fall back to KG", budget, floor));
        r.warnings.push_back("compute budget below LLM threshold");
      } else if (transparency == Transparency::Low) {
        r.chosen = ModelClass::Llm;
        r.rationale.push_back(
            fmt::format("HIGH dependency, budget {} GB >= {} GB, low transparency need: LLM", budget, floor));
      } else {
        r.chosen = ModelClass::HybridLklm;
        r.rationale.push_back(fmt::format(
            "HIGH dependency, budget {} GB >= {} GB, high transparency need: hybrid knowledge + LLM", budget, floor));
      }
      break;
  }

  const auto& scores = model_class_scores();
  std::vector<ModelClass> base = {ModelClass::Nlp, ModelClass::Kg, ModelClass::Llm};
  std::stable_sort(base.begin(), base.end(),
                   [&](ModelClass a, ModelClass b) { return scores.total(a) < scores.total(b); });
  r.ranked.push_back(r.chosen);
  for (ModelClass c : base) {
    if (c != r.chosen) r.ranked.push_back(c);
  }
  if (r.chosen != ModelClass::HybridLklm) r.ranked.push_back(ModelClass::HybridLklm);
  for (ModelClass c : base) {
    r.rationale.push_back(fmt::format("{} attribute total {} (lower is better)", to_string(c), scores.total(c)));
  }
  return r;
}

Recommendation recommend(const SectorDependencyMatrix& matrix, std::string_view sector, double budget_gb,
                         Transparency transparency, const DecisionPolicy& policy) {
  int sum = matrix.row_sum(sector);
  Tier tier = dependency_tier(sum, policy);
  Recommendation r = recommend(tier, budget_gb, transparency, policy);
  r.rationale.insert(r.rationale.begin(),
                     fmt::format("{} dependency sum {} -> {}", sector, sum, to_string(tier)));
  return r;
}

std::string recommendation_to_json(const Recommendation& r) {
  nlohmann::ordered_json j;
  j["chosen"] = std::string(to_string(r.chosen));
  j["tier"] = std::string(to_string(r.tier));
  std::vector<std::string> ranked;
  for (auto c : r.ranked) ranked.emplace_back(to_string(c));
  j["ranked"] = ranked;
  j["rationale"] = r.rationale;
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

}  // namespace lklm
