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

// Sector dependency scoring and model-class recommendation.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lklm {

enum class ModelClass { Nlp, Kg, Llm, HybridLklm };
enum class Tier { Low, Medium, High };
enum class Transparency { Low, High };

std::string_view to_string(ModelClass c);  // NLP, KG, LLM, HYBRID_LKLM
std::string_view to_string(Tier t);        // LOW, MEDIUM, HIGH
std::string_view to_string(Transparency t);
std::optional<Tier> parse_tier(std::string_view s);
std::optional<Transparency> parse_transparency(std::string_view s);  // case-insensitive

inline constexpr std::array<std::string_view, 13> kSectors = {
    "Machinery",     "Automotive",     "Electronics", "Chemical", "Plastics",
    "Metal Fabrication", "Pharmaceutical", "Aerospace", "Wood",     "Furniture",
    "Ceramics",      "Textile & Apparel", "Food & Beverages"};

class SectorDependencyMatrix {
 public:
  SectorDependencyMatrix(std::vector<std::string> sectors, std::map<std::pair<std::string, std::string>, int> cells);

  const std::vector<std::string>& sectors() const noexcept { return sectors_; }
  std::optional<int> cell(std::string_view row, std::string_view col) const;
  bool has_sector(std::string_view sector) const;
  // Throws UnknownSector.
  int row_sum(std::string_view sector) const;

 private:
  std::vector<std::string> sectors_;
  std::map<std::pair<std::string, std::string>, int> cells_;
};

// JSON {"sectors":[...], "cells":{"row|col": 1|2|3}}. Throws BadCellValue,
// MissingSector (a required sector absent) or BadShape.
SectorDependencyMatrix parse_matrix(std::string_view json);
SectorDependencyMatrix load_matrix(const std::filesystem::path& path);
const SectorDependencyMatrix& default_matrix();

struct DecisionPolicy {
  int low_max = 16;     // LOW iff sum <= low_max
  int medium_max = 22;  // MEDIUM iff low_max < sum <= medium_max
  double llm_min_budget_gb = 8.0;
};

// Throws OutOfRange outside [12, 36].
Tier dependency_tier(int sum, const DecisionPolicy& policy = {});

enum class Attribute {
  ModelSize,
  Compute,
  ManualEffort,
  ContextualReasoning,
  Transparency,
  DomainsCaptured,
  ReasoningGeneralisation,
};
inline constexpr std::size_t kAttributeCount = 7;
std::string_view to_string(Attribute a);

// Ordinal 1 (favourable) .. 4 (unfavourable) per class and attribute.
struct ModelClassScores {
  std::array<std::array<int, kAttributeCount>, 3> values{};  // rows: NLP, KG, LLM

  int at(ModelClass c, Attribute a) const;
  int total(ModelClass c) const;
};
const ModelClassScores& model_class_scores();

struct Recommendation {
  ModelClass chosen = ModelClass::Nlp;
  std::vector<ModelClass> ranked;  // ranked.front() == chosen
  std::vector<std::string> rationale;
  std::vector<std::string> warnings;
  Tier tier = Tier::Low;
};

Recommendation recommend(Tier tier, double budget_gb, Transparency transparency, const DecisionPolicy& policy = {});
Recommendation recommend(const SectorDependencyMatrix& matrix, std::string_view sector, double budget_gb,
                         Transparency transparency, const DecisionPolicy& policy = {});

std::string recommendation_to_json(const Recommendation& r);

}  // namespace lklm
