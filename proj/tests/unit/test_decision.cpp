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

#include <map>
#include <set>

#include "doctest.h"
#include "lklm/decision.hpp"
#include "lklm/error.hpp"
#include "oracles.hpp"

using namespace lklm;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

std::string matrix_json(int fill, std::size_t sectors = 13) {
  std::string s = R"({"sectors":[)";
  for (std::size_t i = 0; i < sectors; ++i) s += (i ? "," : "") + std::string("\"") + std::string(kSectors[i]) + "\"";
  s += R"(],"cells":{)";
  bool first = true;
  for (std::size_t r = 0; r < sectors; ++r) {
    for (std::size_t c = 0; c < sectors; ++c) {
      if (r == c) continue;
      s += (first ? "" : ",") + std::string("\"") + std::string(kSectors[r]) + "|" + std::string(kSectors[c]) +
           "\":" + std::to_string(fill);
      first = false;
    }
  }
  return s + "}}";
}

}  // namespace

TEST_CASE("shipped matrix row sums") {
  const std::map<std::string, int> published = {
      {"Machinery", 24}, {"Automotive", 24},      {"Electronics", 23}, {"Chemical", 26},
      {"Plastics", 26},  {"Metal Fabrication", 19}, {"Pharmaceutical", 17}, {"Aerospace", 21},
      {"Wood", 15},      {"Furniture", 16},       {"Ceramics", 13},    {"Textile & Apparel", 14},
      {"Food & Beverages", 16}};
  auto m = load_matrix(testing::data_dir() / "sector_dependency.json");
  CHECK(m.sectors().size() == 13);
  for (const auto& [sector, sum] : published) CHECK_MESSAGE(m.row_sum(sector) == sum, sector);
  CHECK(code_of([&] { m.row_sum("Mining"); }) == ErrorCode::UnknownSector);
}

TEST_CASE("matrix validation") {
  auto ones = parse_matrix(matrix_json(1));
  CHECK(ones.row_sum("Wood") == 12);
  CHECK(code_of([] { parse_matrix(matrix_json(4)); }) == ErrorCode::BadCellValue);
  CHECK(code_of([] { parse_matrix(matrix_json(1, 12)); }) == ErrorCode::MissingSector);
  std::string missing_cell = matrix_json(1);
  auto pos = missing_cell.find(",\"Machinery|Electronics\":1");
  missing_cell.erase(pos, std::string(",\"Machinery|Electronics\":1").size());
  CHECK(code_of([&] { parse_matrix(missing_cell); }) == ErrorCode::BadShape);
}

TEST_CASE("dependency tiers") {
  CHECK(dependency_tier(14) == Tier::Low);
  CHECK(dependency_tier(16) == Tier::Low);
  CHECK(dependency_tier(17) == Tier::Medium);
  CHECK(dependency_tier(21) == Tier::Medium);
  CHECK(dependency_tier(23) == Tier::High);
  CHECK(dependency_tier(24) == Tier::High);
  CHECK(code_of([] { dependency_tier(11); }) == ErrorCode::OutOfRange);
  CHECK(code_of([] { dependency_tier(37); }) == ErrorCode::OutOfRange);
  DecisionPolicy strict{14, 20, 8.0};
  CHECK(dependency_tier(16, strict) == Tier::Medium);
}

TEST_CASE("model class table") {
  const auto& s = model_class_scores();
  const int expected[3][7] = {{1, 1, 2, 4, 1, 4, 4}, {3, 2, 4, 2, 1, 2, 3}, {4, 4, 1, 1, 4, 1, 1}};
  const ModelClass rows[3] = {ModelClass::Nlp, ModelClass::Kg, ModelClass::Llm};
  for (int r = 0; r < 3; ++r) {
    for (int a = 0; a < 7; ++a) CHECK(s.at(rows[r], static_cast<Attribute>(a)) == expected[r][a]);
  }
  CHECK(s.at(ModelClass::Nlp, Attribute::Compute) == 1);
  CHECK(s.at(ModelClass::Llm, Attribute::Transparency) == 4);
  CHECK(s.at(ModelClass::Kg, Attribute::ManualEffort) == 4);
}

TEST_CASE("recommendations") {
  const auto& m = default_matrix();
  CHECK(recommend(m, "Automotive", 16, Transparency::Low).chosen == ModelClass::Llm);
  CHECK(recommend(m, "Automotive", 16, Transparency::High).chosen == ModelClass::HybridLklm);
  CHECK(recommend(m, "Textile & Apparel", 16, Transparency::High).chosen == ModelClass::Nlp);
  CHECK(recommend(m, "Ceramics", 16, Transparency::Low).chosen == ModelClass::Nlp);
  CHECK(recommend(m, "Aerospace", 16, Transparency::Low).chosen == ModelClass::Kg);
  auto poor = recommend(m, "Automotive", 4, Transparency::Low);
  CHECK(poor.chosen == ModelClass::Kg);
  REQUIRE(poor.warnings.size() == 1);
  CHECK(poor.warnings[0] == "compute budget below LLM threshold");
  CHECK(code_of([&] { recommend(m, "Mining", 16, Transparency::Low); }) == ErrorCode::UnknownSector);
  CHECK(code_of([&] { recommend(Tier::Low, 0, Transparency::Low); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("ranked is a permutation led by the choice") {
  for (Tier t : {Tier::Low, Tier::Medium, Tier::High}) {
    for (Transparency tr : {Transparency::Low, Transparency::High}) {
      for (double gb : {4.0, 16.0, 64.0}) {
        auto r = recommend(t, gb, tr);
        REQUIRE(r.ranked.size() == 4);
        CHECK(r.ranked.front() == r.chosen);
        std::set<ModelClass> uniq(r.ranked.begin(), r.ranked.end());
        CHECK(uniq.size() == 4);
        CHECK(!r.rationale.empty());
      }
    }
  }
  // lower attribute total ranks first: LLM 16, then NLP 17 and KG 17 by enum order
  auto r = recommend(Tier::Low, 16, Transparency::Low);
  CHECK(r.ranked == std::vector<ModelClass>{ModelClass::Nlp, ModelClass::Llm, ModelClass::Kg,
                                            ModelClass::HybridLklm});
}

TEST_CASE("tier monotonicity") {
  auto rank = [](ModelClass c) { return c == ModelClass::Nlp ? 0 : c == ModelClass::Kg ? 1 : 2; };
  for (Transparency tr : {Transparency::Low, Transparency::High}) {
    for (double gb : {4.0, 16.0, 64.0}) {
      int prev = -1;
      for (Tier t : {Tier::Low, Tier::Medium, Tier::High}) {
        int cur = rank(recommend(t, gb, tr).chosen);
        CHECK(cur >= prev);
        prev = cur;
      }
    }
  }
}
