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

// Keyword extraction from a prompt and lemma-matched sentence retrieval over
// a corpus domain.

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lklm/corpus.hpp"

namespace lklm {

// lemma -> the class it was extracted as (NOUN or VERB)
struct KeywordSet {
  std::map<std::string, Pos> lemmas;

  bool contains(std::string_view lemma) const { return lemmas.count(std::string(lemma)) > 0; }
  std::size_t size() const noexcept { return lemmas.size(); }
  bool empty() const noexcept { return lemmas.empty(); }
};

KeywordSet extract_keywords(std::string_view prompt, const Lexicon& lexicon = Lexicon::builtin());

struct RetrievalHit {
  std::string document_id;
  std::size_t sentence_index = 0;
  std::size_t match_count = 0;  // distinct keywords present
  std::string raw;

  bool operator==(const RetrievalHit&) const = default;
};

struct RetrievalResult {
  std::vector<RetrievalHit> hits;  // match_count desc, document id asc, sentence index asc
};

inline constexpr std::size_t kDefaultRetrievalLimit = 20;
inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

// Distinct keyword lemmas found among the sentence's token lemmas.
std::size_t match_count(const Sentence& sentence, const KeywordSet& keywords);

RetrievalResult retrieve(const Corpus& corpus, std::string_view domain, const KeywordSet& keywords,
                         std::size_t limit = kDefaultRetrievalLimit);

// Same ordering contract over an arbitrary document set.
RetrievalResult retrieve_documents(std::span<const Document* const> documents, const KeywordSet& keywords,
                                   std::size_t limit = kDefaultRetrievalLimit);

}  // namespace lklm
