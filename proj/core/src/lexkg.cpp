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

#include "lklm/lexkg.hpp"

#include <algorithm>
#include <unordered_map>

#include "embedded_data.hpp"
#include "json.hpp"
#include "lklm/error.hpp"
#include "text.hpp"

namespace lklm {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string fold(std::string_view label) { return text::to_lower(text::trim(label)); }

bool slot_matches(const std::optional<std::string>& slot, const Entity& e) {
  if (!slot) return true;
  return *slot == e.id || fold(*slot) == fold(e.label);
}

}  // namespace

// ---------------------------------------------------------------------------
// KnowledgeGraph

Entity& KnowledgeGraph::insert_entity(std::string id_hint, std::string label) {
  std::string id = id_hint;
  for (int n = 2; entities_.count(id) > 0; ++n) id = id_hint + "#" + std::to_string(n);
  label_index_.emplace(fold(label), id);
  auto [it, inserted] = entities_.emplace(id, Entity{id, std::move(label), {}});
  return it->second;
}

const Entity& KnowledgeGraph::add_entity(std::string_view label) {
  std::string trimmed(text::trim(label));
  if (trimmed.empty()) throw Error(ErrorCode::InvalidArgument, "entity label must be non-empty");
  if (const Entity* e = find_by_label(trimmed)) return *e;
  return insert_entity(fold(trimmed), trimmed);
}

void KnowledgeGraph::set_attribute(std::string_view entity_id, std::string key, std::string value) {
  auto it = entities_.find(std::string(entity_id));
  if (it == entities_.end()) throw Error(ErrorCode::InvalidArgument, "no entity '" + std::string(entity_id) + "'");
  it->second.attributes[std::move(key)] = std::move(value);
}

void KnowledgeGraph::add_triplet(std::string_view head, std::string_view relation, std::string_view tail) {
  std::string rel = fold(relation);
  if (rel.empty()) throw Error(ErrorCode::InvalidArgument, "relation label must be non-empty");
  std::string h = add_entity(head).id;
  std::string t = add_entity(tail).id;
  triplets_.insert(Triplet{std::move(h), std::move(rel), std::move(t)});
}

void KnowledgeGraph::add_sense(Sense sense) {
  sense.lemma = fold(sense.lemma);
  if (sense.lemma.empty()) throw Error(ErrorCode::InvalidArgument, "sense lemma must be non-empty");
  if (text::trim(sense.gloss).empty()) {
    throw Error(ErrorCode::InvalidArgument, "sense '" + sense.lemma + "' has an empty gloss");
  }
  SenseKey key{sense.lemma, sense.pos, sense.sense_index};
  senses_[key] = std::move(sense);
}

const Entity* KnowledgeGraph::entity(std::string_view id) const {
  auto it = entities_.find(std::string(id));
  return it == entities_.end() ? nullptr : &it->second;
}

const Entity* KnowledgeGraph::find_by_label(std::string_view label) const {
  auto it = label_index_.find(fold(label));
  return it == label_index_.end() ? nullptr : entity(it->second);
}

bool KnowledgeGraph::has_senses(std::string_view lemma) const {
  auto it = senses_.lower_bound(SenseKey{std::string(lemma), Pos::Noun, 0});
  return it != senses_.end() && std::get<0>(it->first) == lemma;
}

std::vector<const Sense*> KnowledgeGraph::senses_of(std::string_view lemma) const {
  std::vector<const Sense*> out;
  for (auto it = senses_.lower_bound(SenseKey{std::string(lemma), Pos::Noun, 0});
       it != senses_.end() && std::get<0>(it->first) == lemma; ++it) {
    out.push_back(&it->second);
  }
  return out;
}

KnowledgeGraph add_triplet(KnowledgeGraph g, std::string_view head, std::string_view relation,
                           std::string_view tail) {
  g.add_triplet(head, relation, tail);
  return g;
}

// ---------------------------------------------------------------------------
// Operations

std::vector<Triplet> query(const KnowledgeGraph& g, const TriplePattern& pattern) {
  std::optional<std::string> rel;
  if (pattern.relation) rel = fold(*pattern.relation);
  std::vector<Triplet> out;
  for (const Triplet& t : g.triplets()) {
    if (rel && t.relation != *rel) continue;
    if (!slot_matches(pattern.head, *g.entity(t.head))) continue;
    if (!slot_matches(pattern.tail, *g.entity(t.tail))) continue;
    out.push_back(t);
  }
  return out;
}

std::vector<Triplet> extract_triplets(const Sentence& sentence) {
  const auto& tokens = sentence.tokens;
  std::vector<Triplet> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].pos != Pos::Verb) continue;
    const Token* head = nullptr;
    for (std::size_t j = i; j-- > 0;) {
      if (tokens[j].pos == Pos::Noun) {
        head = &tokens[j];
        break;
      }
    }
    const Token* tail = nullptr;
    for (std::size_t k = i + 1; k < tokens.size(); ++k) {
      if (tokens[k].pos == Pos::Noun) {
        tail = &tokens[k];
        break;
      }
    }
    if (!head || !tail) continue;
    Triplet t{head->lemma, tokens[i].lemma, tail->lemma};
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
  }
  return out;
}

void acquire(KnowledgeGraph& g, std::span<const Sentence> sentences) {
  for (const Sentence& s : sentences) {
    for (const Triplet& t : extract_triplets(s)) g.add_triplet(t.head, t.relation, t.tail);
  }
}

std::vector<Triplet> complete(const KnowledgeGraph& g) {
  std::unordered_map<std::string, std::vector<std::string>> is_a;  // b -> [c]
  for (const Triplet& t : g.triplets()) {
    if (t.relation == "is_a") is_a[t.head].push_back(t.tail);
  }
  std::set<Triplet> proposals;
  for (const Triplet& t : g.triplets()) {
    auto it = is_a.find(t.tail);
    if (it == is_a.end()) continue;
    for (const std::string& c : it->second) {
      Triplet candidate{t.head, t.relation, c};
      if (candidate.head == c || g.contains(candidate)) continue;
      proposals.insert(std::move(candidate));
    }
  }
  return {proposals.begin(), proposals.end()};
}

KnowledgeGraph fuse(const KnowledgeGraph& g1, const KnowledgeGraph& g2) {
  KnowledgeGraph out = g1;
  std::map<std::string, std::string> remap;  // g2 id -> out id
  for (const auto& [id, e] : g2.entities()) {
    if (const Entity* existing = out.find_by_label(e.label)) {
      remap[id] = existing->id;
      Entity& target = out.entities_.at(existing->id);
      for (const auto& [key, value] : e.attributes) target.attributes.emplace(key, value);
    } else {
      Entity& created = out.insert_entity(id, e.label);
      created.attributes = e.attributes;
      remap[id] = created.id;
    }
  }
  for (const Triplet& t : g2.triplets()) {
    out.triplets_.insert(Triplet{remap.at(t.head), t.relation, remap.at(t.tail)});
  }
  for (const auto& [key, sense] : g2.senses()) out.senses_.emplace(key, sense);
  return out;
}

namespace {

std::set<std::string> content_lemmas(std::string_view text) {
  std::set<std::string> out;
  for (const Token& t : tag_text(text)) {
    if (t.pos == Pos::Stop || !is_word(t.text)) continue;
    out.insert(t.lemma);
  }
  return out;
}

}  // namespace

const Sense& disambiguate(std::string_view word, std::span<const std::string> context, const KnowledgeGraph& g,
                          std::optional<Pos> pos) {
  std::string lemma = fold(word);
  auto candidates = g.senses_of(lemma);
  if (candidates.empty()) throw Error(ErrorCode::NoSense, "no sense for '" + lemma + "'");
  if (pos) {
    std::vector<const Sense*> same_pos;
    std::copy_if(candidates.begin(), candidates.end(), std::back_inserter(same_pos),
                 [&](const Sense* s) { return s->pos == *pos; });
    if (!same_pos.empty()) candidates = std::move(same_pos);
  }
  std::set<std::string> ctx(context.begin(), context.end());
  const Sense* best = nullptr;
  std::size_t best_overlap = 0;
  for (const Sense* s : candidates) {
    std::size_t overlap = 0;
    for (const std::string& l : content_lemmas(s->gloss)) overlap += ctx.count(l);
    bool better = !best || overlap > best_overlap ||
                  (overlap == best_overlap && s->sense_index < best->sense_index);
    if (better) {
      best = s;
      best_overlap = overlap;
    }
  }
  return *best;
}

namespace {

std::string cap_tokens(const std::string& text, std::size_t budget) {
  auto spans = tokenize_spans(text);
  if (spans.size() <= budget) return text;
  std::string kept;
  std::size_t used = 0;
  for (const Sentence& s : split_sentences(text)) {
    std::size_t n = tokenize_spans(s.raw).size();
    if (used + n > budget) break;
    if (!kept.empty()) kept.push_back(' ');
    kept += s.raw;
    used += n;
  }
  if (!kept.empty()) return kept;
  // a single sentence longer than the budget: cut at a token boundary
  if (budget == 0) return {};
  return text.substr(0, spans[budget - 1].end);
}

}  // namespace

std::string expand_prompt(std::string_view prompt, const KnowledgeGraph& g, const ExpandOptions& options) {
  std::string current(prompt);
  for (std::size_t iteration = 0; iteration < options.iterations; ++iteration) {
    auto spans = tokenize_spans(current);
    std::vector<Token> tokens;
    tokens.reserve(spans.size());
    std::vector<std::string> context;
    for (const auto& span : spans) {
      tokens.push_back(tag_word(std::string_view(current).substr(span.begin, span.end - span.begin)));
      const Token& t = tokens.back();
      if (t.pos != Pos::Stop && is_word(t.text)) context.push_back(t.lemma);
    }
    std::string next;
    std::size_t last = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const Token& t = tokens[i];
      if (!is_content(t.pos) || !g.has_senses(t.lemma)) continue;
      next.append(current, last, spans[i].begin - last);
      next += disambiguate(t.lemma, context, g, t.pos).gloss;
      last = spans[i].end;
    }
    next.append(current, last, std::string::npos);
    current = cap_tokens(next, options.token_budget);
  }
  return current;
}

// ---------------------------------------------------------------------------
// JSON

std::string graph_to_json(const KnowledgeGraph& g) {
  ordered_json entities = ordered_json::array();
  for (const auto& [id, e] : g.entities()) {
    ordered_json attrs = ordered_json::object();
    for (const auto& [k, v] : e.attributes) attrs[k] = v;
    entities.push_back({{"id", e.id}, {"label", e.label}, {"attributes", std::move(attrs)}});
  }
  ordered_json triplets = ordered_json::array();
  for (const Triplet& t : g.triplets()) triplets.push_back({t.head, t.relation, t.tail});
  ordered_json senses = ordered_json::array();
  for (const auto& [key, s] : g.senses()) {
    ordered_json related = ordered_json::array();
    for (const auto& [rel, lemma] : s.related) related.push_back({rel, lemma});
    senses.push_back({{"lemma", s.lemma},
                      {"pos", to_string(s.pos)},
                      {"sense_index", s.sense_index},
                      {"gloss", s.gloss},
                      {"related", std::move(related)}});
  }
  ordered_json root;
  root["entities"] = std::move(entities);
  root["triplets"] = std::move(triplets);
  root["senses"] = std::move(senses);
  return root.dump(2) + "\n";
}

KnowledgeGraph graph_from_json(std::string_view json) {
  KnowledgeGraph g;
  try {
    auto root = ordered_json::parse(json);
    for (const auto& e : root.value("entities", ordered_json::array())) {
      std::string id = e.at("id").get<std::string>();
      std::string label = e.at("label").get<std::string>();
      if (id.empty() || label.empty()) throw Error(ErrorCode::Parse, "entity with empty id or label");
      if (g.entity(id)) throw Error(ErrorCode::Parse, "duplicate entity id '" + id + "'");
      if (g.find_by_label(label)) throw Error(ErrorCode::Parse, "two entities share label '" + label + "'");
      Entity& entity = g.insert_entity(id, label);
      const ordered_json attributes = e.value("attributes", ordered_json::object());
      for (const auto& [key, value] : attributes.items()) {
        entity.attributes[key] = value.get<std::string>();
      }
    }
    for (const auto& t : root.value("triplets", ordered_json::array())) {
      if (!t.is_array() || t.size() != 3) throw Error(ErrorCode::Parse, "triplet must be [head, relation, tail]");
      Triplet triplet{t[0].get<std::string>(), fold(t[1].get<std::string>()), t[2].get<std::string>()};
      if (!g.entity(triplet.head) || !g.entity(triplet.tail)) {
        throw Error(ErrorCode::Parse, "triplet references unknown entity: " + triplet.head + " / " + triplet.tail);
      }
      g.triplets_.insert(std::move(triplet));
    }
    for (const auto& s : root.value("senses", ordered_json::array())) {
      Sense sense;
      sense.lemma = s.at("lemma").get<std::string>();
      auto pos = parse_pos(s.at("pos").get<std::string>());
      if (!pos) throw Error(ErrorCode::Parse, "unknown sense pos for '" + sense.lemma + "'");
      sense.pos = *pos;
      sense.sense_index = s.at("sense_index").get<std::size_t>();
      sense.gloss = s.at("gloss").get<std::string>();
      for (const auto& r : s.value("related", ordered_json::array())) {
        if (!r.is_array() || r.size() != 2) throw Error(ErrorCode::Parse, "related entry must be [relation, lemma]");
        sense.related.emplace_back(r[0].get<std::string>(), r[1].get<std::string>());
      }
      KnowledgeGraph::SenseKey key{text::to_lower(sense.lemma), sense.pos, sense.sense_index};
      if (g.senses_.count(key)) throw Error(ErrorCode::Parse, "duplicate sense for '" + sense.lemma + "'");
      g.add_sense(std::move(sense));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("graph JSON: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Parse) throw;
    throw Error(ErrorCode::Parse, e.what());
  }
  return g;
}

void save_graph(const KnowledgeGraph& g, const std::filesystem::path& path) {
  text::write_file(path, graph_to_json(g));
}

KnowledgeGraph load_graph(const std::filesystem::path& path) { return graph_from_json(text::read_file(path)); }

const KnowledgeGraph& default_graph() {
  static const KnowledgeGraph g = [] {
    auto data = embedded::find("default_kg");
    if (!data) throw Error(ErrorCode::Io, "missing embedded default_kg");
    return graph_from_json(*data);
  }();
  return g;
}

}  // namespace lklm
