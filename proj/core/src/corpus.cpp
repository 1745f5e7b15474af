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

#include "lklm/corpus.hpp"

#include <algorithm>
#include <regex>

#include "embedded_data.hpp"
#include "json.hpp"
#include "lklm/error.hpp"
#include "text.hpp"

namespace lklm {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Pos pos) {
  switch (pos) {
    case Pos::Noun: return "NOUN";
    case Pos::Verb: return "VERB";
    case Pos::Adj: return "ADJ";
    case Pos::Adv: return "ADV";
    case Pos::Stop: return "STOP";
    case Pos::Other: return "OTHER";
  }
  return "OTHER";
}

std::optional<Pos> parse_pos(std::string_view name) {
  for (Pos p : {Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv, Pos::Stop, Pos::Other}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

bool is_content(Pos pos) {
  return pos == Pos::Noun || pos == Pos::Verb || pos == Pos::Adj || pos == Pos::Adv;
}

// ---------------------------------------------------------------------------
// Corpus

Corpus::Corpus(std::vector<Document> documents) : documents_(std::move(documents)) {
  std::sort(documents_.begin(), documents_.end(),
            [](const Document& a, const Document& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    const Document& doc = documents_[i];
    if (i > 0 && documents_[i - 1].id == doc.id) {
      throw Error(ErrorCode::DuplicateId, "document id '" + doc.id + "' appears twice");
    }
    if (doc.domain.empty()) throw Error(ErrorCode::InvalidArgument, "document '" + doc.id + "' has no domain");
    domain_index_[doc.domain].push_back(doc.id);
  }
}

bool Corpus::has_domain(std::string_view domain) const {
  return domain_index_.find(std::string(domain)) != domain_index_.end();
}

std::vector<const Document*> Corpus::domain_documents(std::string_view domain) const {
  std::vector<const Document*> out;
  for (const Document& doc : documents_) {
    if (doc.domain == domain) out.push_back(&doc);
  }
  return out;
}

const Document* Corpus::find(std::string_view id) const {
  auto it = std::lower_bound(documents_.begin(), documents_.end(), id,
                             [](const Document& d, std::string_view key) { return d.id < key; });
  if (it == documents_.end() || it->id != id) return nullptr;
  return &*it;
}

std::size_t Corpus::sentence_count() const noexcept {
  std::size_t n = 0;
  for (const Document& doc : documents_) n += doc.sentences.size();
  return n;
}

// ---------------------------------------------------------------------------
// Lexicon

namespace {

std::unordered_set<std::string> to_set(std::string_view content) {
  std::unordered_set<std::string> out;
  for (auto& w : text::word_list(content)) out.insert(text::to_lower(w));
  return out;
}

std::string_view embedded_or_throw(std::string_view name) {
  auto data = embedded::find(name);
  if (!data) throw Error(ErrorCode::Io, "missing embedded data '" + std::string(name) + "'");
  return *data;
}

}  // namespace

Lexicon::Lexicon(const Sources& sources)
    : stopwords_(to_set(sources.stopwords)),
      fillers_(to_set(sources.fillers)),
      abbreviations_(to_set(sources.abbreviations)) {
  for (const auto& line : text::word_list(sources.irregular)) {
    auto fields = text::split(line, ' ');
    fields.erase(std::remove(fields.begin(), fields.end(), std::string{}), fields.end());
    if (fields.size() != 2) throw Error(ErrorCode::Parse, "irregular form line: '" + line + "'");
    irregular_.emplace(text::to_lower(fields[0]), text::to_lower(fields[1]));
  }
  for (const auto& line : text::word_list(sources.pos_lexicon)) {
    auto tab = line.find_first_of("\t ");
    if (tab == std::string::npos) throw Error(ErrorCode::Parse, "lexicon line: '" + line + "'");
    std::string word = text::to_lower(text::trim(std::string_view(line).substr(0, tab)));
    auto pos = parse_pos(text::trim(std::string_view(line).substr(tab + 1)));
    if (!pos || !is_content(*pos)) throw Error(ErrorCode::Parse, "lexicon class: '" + line + "'");
    auto [it, inserted] = classes_.emplace(word, *pos);
    if (!inserted && it->second != *pos) {
      throw Error(ErrorCode::Parse, "lexicon word '" + word + "' has two classes");
    }
  }
}

const Lexicon& Lexicon::builtin() {
  static const Lexicon lexicon(Sources{
      embedded_or_throw("stopwords"),
      embedded_or_throw("fillers"),
      embedded_or_throw("abbreviations"),
      embedded_or_throw("irregular"),
      embedded_or_throw("pos_lexicon"),
  });
  return lexicon;
}

Lexicon Lexicon::from_directory(const std::filesystem::path& dir) {
  std::string stop = text::read_file(dir / "stopwords.txt");
  std::string fill = text::read_file(dir / "fillers.txt");
  std::string abbr = text::read_file(dir / "abbreviations.txt");
  std::string irr = text::read_file(dir / "irregular.txt");
  std::string pos = text::read_file(dir / "pos_lexicon.txt");
  return Lexicon(Sources{stop, fill, abbr, irr, pos});
}

bool Lexicon::is_stopword(std::string_view lower) const { return stopwords_.count(std::string(lower)) > 0; }
bool Lexicon::is_filler_heading(std::string_view lower) const { return fillers_.count(std::string(lower)) > 0; }
bool Lexicon::is_abbreviation(std::string_view lower) const {
  return abbreviations_.count(std::string(lower)) > 0;
}

std::optional<Pos> Lexicon::word_class(std::string_view lower) const {
  auto it = classes_.find(std::string(lower));
  if (it == classes_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string_view> Lexicon::irregular_base(std::string_view lower) const {
  auto it = irregular_.find(std::string(lower));
  if (it == irregular_.end()) return std::nullopt;
  return std::string_view(it->second);
}

// ---------------------------------------------------------------------------
// Tokenizing and tagging

namespace {

bool is_word_byte(char c) {
  return text::is_ascii_alpha(c) || text::is_ascii_digit(c) || static_cast<unsigned char>(c) >= 0x80;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool has_letter(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    return text::is_ascii_alpha(c) || static_cast<unsigned char>(c) >= 0x80;
  });
}

// Cheap plural folding used for noun lemmas.
std::string fold_plural(std::string_view lower) {
  if (lower.size() > 4 && ends_with(lower, "ies")) return std::string(lower.substr(0, lower.size() - 3)) + "y";
  if (lower.size() > 3 && ends_with(lower, "s") && !ends_with(lower, "ss") && !ends_with(lower, "us") &&
      !ends_with(lower, "is")) {
    return std::string(lower.substr(0, lower.size() - 1));
  }
  return std::string(lower);
}

struct Analysis {
  Pos pos;
  std::string lemma;
};

// Base forms reachable from an inflected word, most specific first.
std::vector<std::pair<std::string, bool>> inflection_candidates(std::string_view w) {
  // second = verb-only inflection (-ed / -ing)
  std::vector<std::pair<std::string, bool>> out;
  auto stem = [&](std::size_t n) { return std::string(w.substr(0, w.size() - n)); };
  if (ends_with(w, "'s") && w.size() > 3) out.emplace_back(stem(2), false);
  if (ends_with(w, "ies") && w.size() > 4) out.emplace_back(stem(3) + "y", false);
  if (ends_with(w, "es") && w.size() > 3) out.emplace_back(stem(2), false);
  if (ends_with(w, "s") && !ends_with(w, "ss") && w.size() > 2) out.emplace_back(stem(1), false);
  if (ends_with(w, "ied") && w.size() > 4) out.emplace_back(stem(3) + "y", true);
  if (ends_with(w, "ed") && w.size() > 3) {
    std::string s = stem(2);
    out.emplace_back(s, true);
    out.emplace_back(stem(1), true);  // -d after a final e
    if (s.size() > 2 && s[s.size() - 1] == s[s.size() - 2]) out.emplace_back(s.substr(0, s.size() - 1), true);
  }
  if (ends_with(w, "ing") && w.size() > 4) {
    std::string s = stem(3);
    out.emplace_back(s, true);
    out.emplace_back(s + "e", true);
    if (s.size() > 2 && s[s.size() - 1] == s[s.size() - 2]) out.emplace_back(s.substr(0, s.size() - 1), true);
  }
  return out;
}

std::optional<Pos> suffix_class(std::string_view w) {
  struct Rule {
    std::string_view suffix;
    Pos pos;
  };
  static constexpr Rule rules[] = {
      {"ing", Pos::Verb},  {"ed", Pos::Verb},    {"ize", Pos::Verb},  {"tion", Pos::Noun},
      {"ment", Pos::Noun}, {"ness", Pos::Noun},  {"ity", Pos::Noun},  {"ous", Pos::Adj},
      {"ful", Pos::Adj},   {"able", Pos::Adj},   {"ly", Pos::Adv},
  };
  for (const Rule& r : rules) {
    // at least three characters of stem, so "red" or "fly" do not fire
    if (w.size() >= r.suffix.size() + 3 && ends_with(w, r.suffix)) return r.pos;
  }
  return std::nullopt;
}

Analysis analyze(std::string_view lower, const Lexicon& lexicon) {
  if (lexicon.is_stopword(lower)) return {Pos::Stop, std::string(lower)};
  if (auto pos = lexicon.word_class(lower)) return {*pos, std::string(lower)};
  if (auto base = lexicon.irregular_base(lower)) {
    auto pos = lexicon.word_class(*base);
    return {pos.value_or(Pos::Verb), std::string(*base)};
  }
  for (const auto& [base, verb_only] : inflection_candidates(lower)) {
    auto pos = lexicon.word_class(base);
    if (!pos) continue;
    if (verb_only && *pos != Pos::Verb) continue;
    if (!verb_only && *pos != Pos::Noun && *pos != Pos::Verb) continue;
    return {*pos, base};
  }
  if (auto pos = suffix_class(lower)) {
    return {*pos, *pos == Pos::Noun ? fold_plural(lower) : std::string(lower)};
  }
  // plural of a suffix-tagged noun ("conversions", "activities")
  std::string singular = fold_plural(lower);
  if (singular != lower) {
    if (auto pos = suffix_class(singular); pos && *pos == Pos::Noun) return {Pos::Noun, singular};
  }
  return {Pos::Other, std::string(lower)};
}

}  // namespace

std::vector<TokenSpan> tokenize_spans(std::string_view text) {
  std::vector<TokenSpan> spans;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (text::is_space(c)) {
      ++i;
      continue;
    }
    if (!is_word_byte(c)) {
      spans.push_back({i, i + 1});
      ++i;
      continue;
    }
    std::size_t j = i;
    for (;;) {
      while (j < n && is_word_byte(text[j])) ++j;
      // internal hyphen or apostrophe joins two word runs
      if (j + 1 < n && (text[j] == '-' || text[j] == '\'') && is_word_byte(text[j + 1])) {
        ++j;
        continue;
      }
      break;
    }
    spans.push_back({i, j});
    i = j;
  }
  return spans;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& span : tokenize_spans(text)) out.emplace_back(text.substr(span.begin, span.end - span.begin));
  return out;
}

bool is_word(std::string_view token) { return std::any_of(token.begin(), token.end(), is_word_byte); }

Token tag_word(std::string_view surface, const Lexicon& lexicon) {
  std::string lower = text::to_lower(surface);
  if (!is_word(surface) || !has_letter(surface)) return Token{std::string(surface), lower, Pos::Other};
  Analysis a = analyze(lower, lexicon);
  return Token{std::string(surface), std::move(a.lemma), a.pos};
}

std::vector<Token> tag_text(std::string_view text, const Lexicon& lexicon) {
  std::vector<Token> tokens;
  for (const auto& span : tokenize_spans(text)) {
    tokens.push_back(tag_word(text.substr(span.begin, span.end - span.begin), lexicon));
  }
  return tokens;
}

// ---------------------------------------------------------------------------
// Cleaning

namespace {

const std::regex& bracket_citation() {
  static const std::regex re(R"(\s*\[\s*\d+(?:\s*(?:-|–|,|;)\s*\d+)*\s*\])");
  return re;
}

const std::regex& author_year_citation() {
  static const std::regex re(R"(\s*\([^()]*?[A-Z][A-Za-z'\-]+[^()]*?(?:19|20)\d{2}[a-z]?\s*\))");
  return re;
}

const std::regex& email_address() {
  static const std::regex re(R"([A-Za-z0-9._%+\-]+@[A-Za-z0-9.\-]+\.[A-Za-z]{2,})");
  return re;
}

const std::regex& phone_candidate() {
  static const std::regex re(R"(\+?\(?\d[\d \t().\-]{6,}\d)");
  return re;
}

std::string remove_phone_numbers(const std::string& s) {
  std::string out;
  std::size_t last = 0;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), phone_candidate()); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    std::string span = m.str();
    auto digits = std::count_if(span.begin(), span.end(), [](char c) { return text::is_ascii_digit(c); });
    if (digits < 9 || digits > 15) continue;
    auto pos = static_cast<std::size_t>(m.position());
    out.append(s, last, pos - last);
    last = pos + span.size();
  }
  out.append(s, last, std::string::npos);
  return out;
}

bool is_heading_line(std::string_view line, const Lexicon& lexicon) {
  line = text::trim(line);
  // leading section numbering such as "1." or "2.3 "
  while (!line.empty() && (text::is_ascii_digit(line.front()) || line.front() == '.')) line.remove_prefix(1);
  line = text::trim(line);
  while (!line.empty() && (line.back() == ':' || line.back() == '.')) line.remove_suffix(1);
  line = text::trim(line);
  if (line.empty()) return false;
  return lexicon.is_filler_heading(text::to_lower(line));
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (text::is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    bool closing = c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?';
    if (pending_space && !closing) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string clean_once(std::string_view raw, const Lexicon& lexicon) {
  std::string s(raw);
  s = std::regex_replace(s, bracket_citation(), "");
  s = std::regex_replace(s, author_year_citation(), "");
  s = std::regex_replace(s, email_address(), "");
  s = remove_phone_numbers(s);
  std::string kept;
  kept.reserve(s.size());
  for (auto line : text::split_lines(s)) {
    if (is_heading_line(line, lexicon)) continue;
    kept.append(line);
    kept.push_back('\n');
  }
  return collapse_whitespace(kept);
}

}  // namespace

std::string clean_text(std::string_view raw, const Lexicon& lexicon) {
  // Passes can expose new matches (a citation hiding a heading), so run to a
  // fixpoint. Every pass only deletes characters, so this terminates.
  std::string current = clean_once(raw, lexicon);
  for (;;) {
    std::string next = clean_once(current, lexicon);
    if (next == current) return current;
    current = std::move(next);
  }
}

// ---------------------------------------------------------------------------
// Sentences

namespace {

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

// The whitespace-delimited word that ends at `end` (exclusive), lowercased.
std::string word_before(std::string_view text, std::size_t end) {
  std::size_t start = end;
  while (start > 0 && !text::is_space(text[start - 1])) --start;
  return text::to_lower(text.substr(start, end - start));
}

}  // namespace

std::vector<Sentence> split_sentences(std::string_view text, const Lexicon& lexicon) {
  std::vector<Sentence> sentences;
  auto emit = [&](std::size_t begin, std::size_t end) {
    std::string_view raw = text::trim(text.substr(begin, end - begin));
    if (raw.empty()) return;
    Sentence s;
    s.index = sentences.size();
    s.raw = std::string(raw);
    sentences.push_back(tag_pos(std::move(s), lexicon));
  };

  const std::size_t n = text.size();
  std::size_t begin = 0;
  std::size_t i = 0;
  while (i < n) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n && is_terminator(text[j])) ++j;
    while (j < n && is_closer(text[j])) ++j;
    bool boundary = false;
    std::size_t next = j;
    if (j == n) {
      boundary = true;
    } else if (text::is_space(text[j])) {
      while (next < n && text::is_space(text[next])) ++next;
      boundary = next == n || text::is_ascii_upper(text[next]);
    }
    if (boundary && text[i] == '.' && j == i + 1 && lexicon.is_abbreviation(word_before(text, i + 1))) {
      boundary = false;
    }
    if (boundary) {
      emit(begin, j);
      begin = next;
    }
    i = j;
  }
  if (begin < n) emit(begin, n);
  return sentences;
}

Sentence tag_pos(Sentence sentence, const Lexicon& lexicon) {
  sentence.tokens = tag_text(sentence.raw, lexicon);
  return sentence;
}

Document make_document(std::string id, std::string domain, std::string_view raw, const Lexicon& lexicon) {
  Document doc;
  doc.id = std::move(id);
  doc.domain = std::move(domain);
  doc.sentences = split_sentences(clean_text(raw, lexicon), lexicon);
  return doc;
}

Corpus build_corpus(const std::filesystem::path& source_dir, std::span<const DomainRule> domain_map,
                    const Lexicon& lexicon) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(source_dir)) {
    throw Error(ErrorCode::EmptySource, source_dir.string() + " is not a directory");
  }
  std::vector<std::pair<fs::path, std::string>> files;  // (path, domain)
  for (const auto& entry : fs::recursive_directory_iterator(source_dir)) {
    if (!entry.is_regular_file()) continue;
    if (text::to_lower(entry.path().extension().string()) != ".txt") continue;
    std::string rel = fs::relative(entry.path(), source_dir).generic_string();
    std::string name = entry.path().filename().string();
    for (const DomainRule& rule : domain_map) {
      if (text::glob_match(rule.pattern, rel) || text::glob_match(rule.pattern, name)) {
        files.emplace_back(entry.path(), rule.domain);
        break;
      }
    }
  }
  if (files.empty()) throw Error(ErrorCode::EmptySource, "no matching .txt files under " + source_dir.string());
  std::sort(files.begin(), files.end());

  std::map<std::string, fs::path> seen;
  std::vector<Document> documents;
  for (const auto& [path, domain] : files) {
    std::string id = path.stem().string();
    if (auto [it, inserted] = seen.emplace(id, path); !inserted) {
      throw Error(ErrorCode::DuplicateId,
                  "id '" + id + "' from both " + it->second.string() + " and " + path.string());
    }
    documents.push_back(make_document(id, domain, text::read_file(path), lexicon));
  }
  Corpus corpus(std::move(documents));
  if (corpus.sentence_count() == 0) throw Error(ErrorCode::EmptySource, "source files contain no sentences");
  return corpus;
}

// ---------------------------------------------------------------------------
// JSON

std::string corpus_to_json(const Corpus& corpus) {
  ordered_json docs = ordered_json::array();
  for (const Document& doc : corpus.documents()) {
    ordered_json sentences = ordered_json::array();
    for (const Sentence& s : doc.sentences) {
      ordered_json tokens = ordered_json::array();
      for (const Token& t : s.tokens) {
        tokens.push_back({{"text", t.text}, {"lemma", t.lemma}, {"pos", to_string(t.pos)}});
      }
      sentences.push_back({{"index", s.index}, {"raw", s.raw}, {"tokens", std::move(tokens)}});
    }
    docs.push_back({{"id", doc.id}, {"domain", doc.domain}, {"sentences", std::move(sentences)}});
  }
  ordered_json root;
  root["documents"] = std::move(docs);
  return root.dump() + "\n";
}

Corpus corpus_from_json(std::string_view json) {
  try {
    auto root = ordered_json::parse(json);
    std::vector<Document> documents;
    for (const auto& d : root.at("documents")) {
      Document doc;
      doc.id = d.at("id").get<std::string>();
      doc.domain = d.at("domain").get<std::string>();
      for (const auto& s : d.at("sentences")) {
        Sentence sentence;
        sentence.index = s.at("index").get<std::size_t>();
        sentence.raw = s.at("raw").get<std::string>();
        for (const auto& t : s.at("tokens")) {
          auto pos = parse_pos(t.at("pos").get<std::string>());
          if (!pos) throw Error(ErrorCode::Parse, "unknown pos tag in corpus JSON");
          sentence.tokens.push_back(Token{t.at("text").get<std::string>(), t.at("lemma").get<std::string>(), *pos});
        }
        doc.sentences.push_back(std::move(sentence));
      }
      documents.push_back(std::move(doc));
    }
    return Corpus(std::move(documents));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("corpus JSON: ") + e.what());
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  text::write_file(path, corpus_to_json(corpus));
}

Corpus load_corpus(const std::filesystem::path& path) { return corpus_from_json(text::read_file(path)); }

}  // namespace lklm
