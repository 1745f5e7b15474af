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

#include "lklm/retrieval.hpp"

#include <algorithm>
#include <unordered_set>

#include "lklm/error.hpp"

namespace lklm {

KeywordSet extract_keywords(std::string_view prompt, const Lexicon& lexicon) {
  KeywordSet out;
  for (const Token& t : tag_text(prompt, lexicon)) {
    if (t.pos == Pos::Noun || t.pos == Pos::Verb) out.lemmas.emplace(t.lemma, t.pos);
  }
  if (out.empty()) throw Error(ErrorCode::NoKeywords, "prompt has no nouns or verbs: '" + std::string(prompt) + "'");
  return out;
}

std::size_t match_count(const Sentence& sentence, const KeywordSet& keywords) {
  std::unordered_set<std::string_view> seen;
  for (const Token& t : sentence.tokens) {
    if (keywords.contains(t.lemma)) seen.insert(t.lemma);
  }
  return seen.size();
}

RetrievalResult retrieve_documents(std::span<const Document* const> documents, const KeywordSet& keywords,
                                   std::size_t limit) {
  if (limit == 0) throw Error(ErrorCode::InvalidArgument, "retrieval limit must be >= 1");
  RetrievalResult result;
  for (const Document* doc : documents) {
    for (const Sentence& s : doc->sentences) {
      std::size_t n = match_count(s, keywords);
      if (n > 0) result.hits.push_back(RetrievalHit{doc->id, s.index, n, s.raw});
    }
  }
  std::stable_sort(result.hits.begin(), result.hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
    if (a.match_count != b.match_count) return a.match_count > b.match_count;
    if (a.document_id != b.document_id) return a.document_id < b.document_id;
    return a.sentence_index < b.sentence_index;
  });
  if (result.hits.size() > limit) result.hits.resize(limit);
  return result;
}

RetrievalResult retrieve(const Corpus& corpus, std::string_view domain, const KeywordSet& keywords,
                         std::size_t limit) {
  if (!corpus.has_domain(domain)) throw Error(ErrorCode::UnknownDomain, "no domain '" + std::string(domain) + "'");
  auto docs = corpus.domain_documents(domain);
  return retrieve_documents(docs, keywords, limit);
}

}  // namespace lklm
