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

// Domain reference text: cleaning, sentence splitting, lexicon-driven POS
// tagging, and the on-disk corpus format every other module reads.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace lklm {

enum class Pos { Noun, Verb, Adj, Adv, Stop, Other };

// "NOUN", "VERB", "ADJ", "ADV", "STOP", "OTHER".
std::string_view to_string(Pos pos);
std::optional<Pos> parse_pos(std::string_view name);
// NOUN, VERB, ADJ or ADV.
bool is_content(Pos pos);

struct Token {
  std::string text;
  std::string lemma;
  Pos pos = Pos::Other;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::size_t index = 0;
  std::string raw;
  std::vector<Token> tokens;

  bool operator==(const Sentence&) const = default;
};

struct Document {
  std::string id;
  std::string domain;
  std::vector<Sentence> sentences;

  bool operator==(const Document&) const = default;
};

/// Immutable collection of documents indexed by domain.
///
/// Documents are kept sorted by id; the constructor rejects duplicate ids
/// and empty domain labels.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Document> documents);

  const std::vector<Document>& documents() const noexcept { return documents_; }
  // domain -> sorted document ids
  const std::map<std::string, std::vector<std::string>>& domain_index() const noexcept {
    return domain_index_;
  }
  bool has_domain(std::string_view domain) const;
  std::vector<const Document*> domain_documents(std::string_view domain) const;
  const Document* find(std::string_view id) const;
  std::size_t sentence_count() const noexcept;
  bool empty() const noexcept { return documents_.empty(); }

  bool operator==(const Corpus& other) const { return documents_ == other.documents_; }

 private:
  std::vector<Document> documents_;
  std::map<std::string, std::vector<std::string>> domain_index_;
};

/// Word lists that drive cleaning, splitting and tagging.
///
/// The built-in instance is compiled from data/lexicon; from_directory() loads
/// the same five files from elsewhere so the lists can be swapped.
class Lexicon {
 public:
  struct Sources {
    std::string_view stopwords;
    std::string_view fillers;
    std::string_view abbreviations;
    std::string_view irregular;
    std::string_view pos_lexicon;
  };

  explicit Lexicon(const Sources& sources);

  static const Lexicon& builtin();
  static Lexicon from_directory(const std::filesystem::path& dir);

  bool is_stopword(std::string_view lower) const;
  bool is_filler_heading(std::string_view lower) const;
  bool is_abbreviation(std::string_view lower) const;
  std::optional<Pos> word_class(std::string_view lower) const;
  std::optional<std::string_view> irregular_base(std::string_view lower) const;

  std::size_t stopword_count() const noexcept { return stopwords_.size(); }
  std::size_t class_count() const noexcept { return classes_.size(); }

 private:
  std::unordered_set<std::string> stopwords_;
  std::unordered_set<std::string> fillers_;
  std::unordered_set<std::string> abbreviations_;
  std::unordered_map<std::string, std::string> irregular_;
  std::unordered_map<std::string, Pos> classes_;
};

struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Words are runs of letters/digits (and UTF-8 bytes) joined by internal '-'
// or '\''; every other non-space character is a token of its own.
std::vector<TokenSpan> tokenize_spans(std::string_view text);
std::vector<std::string> tokenize(std::string_view text);
// True when the token contains a letter, digit or non-ASCII byte.
bool is_word(std::string_view token);

Token tag_word(std::string_view surface, const Lexicon& lexicon = Lexicon::builtin());
std::vector<Token> tag_text(std::string_view text, const Lexicon& lexicon = Lexicon::builtin());

std::string clean_text(std::string_view raw, const Lexicon& lexicon = Lexicon::builtin());

// Sentences come back tagged (see tag_pos) with indices 0..n-1.
std::vector<Sentence> split_sentences(std::string_view text,
                                      const Lexicon& lexicon = Lexicon::builtin());

Sentence tag_pos(Sentence sentence, const Lexicon& lexicon = Lexicon::builtin());

Document make_document(std::string id, std::string domain, std::string_view raw,
                       const Lexicon& lexicon = Lexicon::builtin());

struct DomainRule {
  std::string pattern;  // glob against the relative path or the file name
  std::string domain;
};

// Every .txt file under source_dir that matches a rule becomes one document
// with id = file stem. The first matching rule decides the domain.
Corpus build_corpus(const std::filesystem::path& source_dir, std::span<const DomainRule> domain_map,
                    const Lexicon& lexicon = Lexicon::builtin());

std::string corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(std::string_view json);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);

}  // namespace lklm
