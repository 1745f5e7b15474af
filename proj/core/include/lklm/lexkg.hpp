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

// Triplet knowledge graph with a gloss lexicon: acquisition from tagged text,
// is_a completion, fusion of graphs, gloss-overlap sense disambiguation and
// definition-substitution prompt expansion.

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "lklm/corpus.hpp"

namespace lklm {

struct Entity {
  std::string id;
  std::string label;
  std::map<std::string, std::string> attributes;

  bool operator==(const Entity&) const = default;
};

// head and tail are entity ids.
struct Triplet {
  std::string head;
  std::string relation;
  std::string tail;

  auto operator<=>(const Triplet&) const = default;
};

struct Sense {
  std::string lemma;
  Pos pos = Pos::Noun;
  std::size_t sense_index = 0;
  std::string gloss;
  std::vector<std::pair<std::string, std::string>> related;  // (relation, lemma)

  bool operator==(const Sense&) const = default;
};

class KnowledgeGraph {
 public:
  using SenseKey = std::tuple<std::string, Pos, std::size_t>;

  // Resolves `label` case-insensitively, creating the entity when absent.
  const Entity& add_entity(std::string_view label);
  void set_attribute(std::string_view entity_id, std::string key, std::string value);
  // Entities are resolved by label; a duplicate triplet is a no-op.
  void add_triplet(std::string_view head, std::string_view relation, std::string_view tail);
  // Replaces any sense with the same (lemma, pos, sense_index).
  void add_sense(Sense sense);

  const Entity* entity(std::string_view id) const;
  const Entity* find_by_label(std::string_view label) const;
  bool contains(const Triplet& t) const { return triplets_.count(t) > 0; }
  bool has_senses(std::string_view lemma) const;
  // Senses of `lemma` ordered by (pos, sense_index).
  std::vector<const Sense*> senses_of(std::string_view lemma) const;

  const std::map<std::string, Entity>& entities() const noexcept { return entities_; }
  const std::set<Triplet>& triplets() const noexcept { return triplets_; }
  const std::map<SenseKey, Sense>& senses() const noexcept { return senses_; }
  bool empty() const noexcept { return entities_.empty() && senses_.empty(); }

  bool operator==(const KnowledgeGraph& other) const {
    return entities_ == other.entities_ && triplets_ == other.triplets_ && senses_ == other.senses_;
  }

 private:
  friend KnowledgeGraph fuse(const KnowledgeGraph& g1, const KnowledgeGraph& g2);
  friend KnowledgeGraph graph_from_json(std::string_view json);
  Entity& insert_entity(std::string id_hint, std::string label);

  std::map<std::string, Entity> entities_;
  std::map<std::string, std::string> label_index_;  // folded label -> id
  std::set<Triplet> triplets_;
  std::map<SenseKey, Sense> senses_;
};

// Value-returning form of KnowledgeGraph::add_triplet.
KnowledgeGraph add_triplet(KnowledgeGraph g, std::string_view head, std::string_view relation,
                           std::string_view tail);

// Unbound slots are wildcards. Bound head/tail match an entity id or label
// (case-insensitive); relation matches case-insensitively.
struct TriplePattern {
  std::optional<std::string> head;
  std::optional<std::string> relation;
  std::optional<std::string> tail;
};

std::vector<Triplet> query(const KnowledgeGraph& g, const TriplePattern& pattern);

// Subject-verb-object candidates: each VERB joined to the nearest NOUN on
// either side. Head and tail hold noun lemmas.
std::vector<Triplet> extract_triplets(const Sentence& sentence);

// Inserts every extracted triplet of every sentence.
void acquire(KnowledgeGraph& g, std::span<const Sentence> sentences);

// (a, r, b) and (b, is_a, c) propose (a, r, c). Proposals are returned for
// review, never inserted.
std::vector<Triplet> complete(const KnowledgeGraph& g);

// Label-based entity resolution; g1 wins attribute and sense conflicts.
KnowledgeGraph fuse(const KnowledgeGraph& g1, const KnowledgeGraph& g2);

// Simplified Lesk: the sense whose gloss shares the most content lemmas with
// `context`, lowest sense_index on ties. When `pos` is given and the word has
// senses of that class, only those compete.
const Sense& disambiguate(std::string_view word, std::span<const std::string> context, const KnowledgeGraph& g,
                          std::optional<Pos> pos = std::nullopt);

struct ExpandOptions {
  std::size_t iterations = 2;
  std::size_t token_budget = 512;
};

// Replaces each content word that has a sense by its disambiguated gloss,
// `iterations` times, keeping the text within `token_budget` tokens.
std::string expand_prompt(std::string_view prompt, const KnowledgeGraph& g, const ExpandOptions& options = {});

std::string graph_to_json(const KnowledgeGraph& g);
KnowledgeGraph graph_from_json(std::string_view json);
void save_graph(const KnowledgeGraph& g, const std::filesystem::path& path);
KnowledgeGraph load_graph(const std::filesystem::path& path);
// Shipped sense lexicon and seed triplets (data/kg/default_kg.json).
const KnowledgeGraph& default_graph();

}  // namespace lklm
