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

// Shared fixtures and independent oracles for the unit and acceptance tests.
// The oracles are deliberately naive: full scans and full enumeration.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lklm/corpus.hpp"
#include "lklm/ngram.hpp"
#include "lklm/retrieval.hpp"

namespace lklm::testing {

inline std::filesystem::path data_dir() { return LKLM_TEST_DATA_DIR; }

inline const std::vector<std::string>& letters() {
  static const std::vector<std::string> v = {"a", "b", "c", "d", "e", "f"};
  return v;
}

// Sentences over the first `vocab` letters, lengths 1..max_len.
inline std::vector<std::vector<std::string>> random_sentences(std::mt19937_64& rng, std::size_t count,
                                                              std::size_t vocab, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, vocab - 1);
  std::vector<std::vector<std::string>> out(count);
  for (auto& s : out) {
    std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) s.push_back(letters()[pick(rng)]);
  }
  return out;
}

inline std::string join(const std::vector<std::string>& tokens, const char* sep = " ") {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += sep;
    out += t;
  }
  return out;
}

// Words the shipped lexicon tags as nouns or verbs, plus fillers.
inline const std::vector<std::string>& manufacturing_words() {
  static const std::vector<std::string> v = {"cut",    "sew",   "fabric", "cotton", "press",  "machine",
                                             "the",    "a",     "fiber",  "disk",   "engine", "motor",
                                             "attach", "seam",  "with",   "and",    "heat",   "battery",
                                             "glue",   "shirt", "iron",   "quickly"};
  return v;
}

inline Corpus random_corpus(std::mt19937_64& rng, std::size_t documents, std::size_t sentences) {
  const auto& words = manufacturing_words();
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::uniform_int_distribution<std::size_t> len(1, 7);
  std::uniform_int_distribution<int> dom(0, 1);
  std::vector<Document> docs;
  for (std::size_t d = 0; d < documents; ++d) {
    std::string raw;
    for (std::size_t s = 0; s < sentences; ++s) {
      std::string sentence;
      std::size_t n = len(rng);
      for (std::size_t i = 0; i < n; ++i) sentence += (i ? " " : "") + words[pick(rng)];
      sentence[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sentence[0])));
      raw += sentence + ". ";
    }
    docs.push_back(make_document("doc" + std::to_string(d), dom(rng) ? "alpha" : "beta", raw));
  }
  return Corpus(std::move(docs));
}

inline KeywordSet random_keywords(std::mt19937_64& rng) {
  static const std::vector<std::pair<std::string, Pos>> pool = {
      {"cut", Pos::Verb},     {"sew", Pos::Verb},   {"fabric", Pos::Noun}, {"cotton", Pos::Noun},
      {"machine", Pos::Noun}, {"fiber", Pos::Noun}, {"disk", Pos::Noun},   {"heat", Pos::Verb},
      {"shirt", Pos::Noun},   {"iron", Pos::Noun},  {"zzqx", Pos::Noun}};
  std::uniform_int_distribution<std::size_t> count(1, 4);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  KeywordSet k;
  for (std::size_t i = count(rng); i > 0; --i) k.lemmas.insert(pool[pick(rng)]);
  return k;
}

// Full scan: every sentence of the domain with at least one keyword lemma.
inline std::vector<RetrievalHit> brute_force_retrieve(const Corpus& corpus, const std::string& domain,
                                                      const KeywordSet& keywords) {
  std::vector<RetrievalHit> hits;
  for (const auto& doc : corpus.documents()) {
    if (doc.domain != domain) continue;
    for (const auto& s : doc.sentences) {
      std::set<std::string> found;
      for (const auto& t : s.tokens) {
        for (const auto& [lemma, pos] : keywords.lemmas) {
          if (t.lemma == lemma) found.insert(lemma);
        }
      }
      if (!found.empty()) hits.push_back({doc.id, s.index, found.size(), s.raw});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
    if (a.match_count != b.match_count) return a.match_count > b.match_count;
    if (a.document_id != b.document_id) return a.document_id < b.document_id;
    return a.sentence_index < b.sentence_index;
  });
  return hits;
}

struct Sequence {
  std::vector<std::string> tokens;
  double log_prob = 0.0;
  double score() const { return log_prob / static_cast<double>(tokens.size()); }
};

// Enumerates every sequence a decoder could emit within `max_len` steps
// (ending in <eos>, or unfinished at exactly max_len) and returns the one
// with the best length-normalized log-probability, ties to the
// lexicographically smaller sequence.
inline Sequence brute_force_best(const NGramModel& model, const std::vector<std::string>& context, int max_len) {
  const auto candidates = decode_candidates(model);
  Sequence best;
  bool have = false;
  std::vector<std::string> path;
  std::vector<double> lp_stack{0.0};
  auto consider = [&](const std::vector<std::string>& tokens, double lp) {
    Sequence s{tokens, lp};
    if (!have || s.score() > best.score() || (s.score() == best.score() && s.tokens < best.tokens)) {
      best = s;
      have = true;
    }
  };
  auto rec = [&](auto&& self) -> void {
    std::vector<std::string> ctx = context;
    ctx.insert(ctx.end(), path.begin(), path.end());
    for (const auto& w : candidates) {
      double lp = lp_stack.back() + std::log(prob(model, ctx, w));
      path.push_back(w);
      if (w == kEos || static_cast<int>(path.size()) == max_len) {
        consider(path, lp);
      } else {
        lp_stack.push_back(lp);
        self(self);
        lp_stack.pop_back();
      }
      path.pop_back();
    }
  };
  rec(rec);
  return best;
}

}  // namespace lklm::testing
