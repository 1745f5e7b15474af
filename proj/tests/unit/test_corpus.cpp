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

#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "lklm/corpus.hpp"
#include "lklm/error.hpp"
#include "oracles.hpp"

using namespace lklm;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> raws(const std::vector<Sentence>& s) {
  std::vector<std::string> out;
  for (const auto& x : s) out.push_back(x.raw);
  return out;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("lklm_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  void write(const fs::path& rel, const std::string& content) const {
    fs::create_directories((path / rel).parent_path());
    std::ofstream(path / rel) << content;
  }
};

}  // namespace

TEST_CASE("clean_text removes citations and filler headings") {
  CHECK(clean_text("Fibers are strong [12].") == "Fibers are strong.");
  CHECK(clean_text("Abstract\nCotton is a fiber.") == "Cotton is a fiber.");
  CHECK(clean_text("Yarn is spun [1, 3] quickly.") == "Yarn is spun quickly.");
  CHECK(clean_text("Looms weave cloth (Smith et al., 2019).") == "Looms weave cloth.");
  CHECK(clean_text("Write to jane.doe@example.com today.") == "Write to today.");
  CHECK(clean_text("Call 0123 456 7890 now.") == "Call now.");
  CHECK(clean_text("") == "");
}

TEST_CASE("clean_text is idempotent and never grows the text") {
  for (const auto& entry : fs::recursive_directory_iterator(testing::data_dir() / "fixtures" / "corpus")) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path());
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::string once = clean_text(raw);
    CHECK(clean_text(once) == once);
    CHECK(once.size() <= raw.size());
  }
}

TEST_CASE("split_sentences") {
  CHECK(raws(split_sentences("Cut fabric. Sew it.")) == std::vector<std::string>{"Cut fabric.", "Sew it."});
  CHECK(split_sentences("Use glue, e.g. epoxy. Then clamp.").size() == 2);
  CHECK(split_sentences("").empty());
  auto s = split_sentences("One. Two! Three?");
  REQUIRE(s.size() == 3);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i].index == i);
  // lowercase after the period does not split
  CHECK(split_sentences("See fig. three now.").size() == 1);
}

TEST_CASE("split and join round-trip") {
  std::string text = "Cut the fabric. Sew the seam! Is it done? Press it.";
  auto s = split_sentences(text);
  std::vector<std::string> parts = raws(s);
  CHECK(raws(split_sentences(testing::join(parts))) == parts);
}

TEST_CASE("tag_pos follows lexicon priority") {
  auto tokens = tag_text("sew the fabric");
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[0].pos == Pos::Verb);
  CHECK(tokens[1].pos == Pos::Stop);
  CHECK(tokens[2].pos == Pos::Noun);
  CHECK(tag_word("quickly").pos == Pos::Adv);
  CHECK(tag_word("zzqx").pos == Pos::Other);
  CHECK(tag_word("fibers").lemma == "fiber");
  CHECK(tag_word("Fibers").text == "Fibers");
  CHECK(tag_word("glass").lemma == "glass");
  CHECK(tag_word("optimization").pos == Pos::Noun);
  CHECK(tag_word("wonderful").pos == Pos::Adj);
  CHECK(tag_word(",").pos == Pos::Other);
}

TEST_CASE("stop tokens carry stopword lemmas") {
  for (const auto& t : tag_text("The cotton and the fiber are in a mill.")) {
    if (t.pos == Pos::Stop) CHECK(Lexicon::builtin().is_stopword(t.lemma));
    CHECK(!t.text.empty());
    CHECK(!t.lemma.empty());
  }
}

TEST_CASE("build_corpus assigns domains and orders by id") {
  TempDir dir("corpus");
  dir.write("c.txt", "Cotton is soft.");
  dir.write("a.txt", "Cut the fabric.");
  dir.write("b.txt", "Sew the seam.");
  std::vector<DomainRule> rules{{"*", "textiles"}};
  Corpus c = build_corpus(dir.path, rules);
  REQUIRE(c.documents().size() == 3);
  CHECK(c.documents()[0].id == "a");
  CHECK(c.documents()[2].id == "c");
  CHECK(c.domain_index().at("textiles").size() == 3);
}

TEST_CASE("build_corpus errors") {
  TempDir empty("empty");
  std::vector<DomainRule> rules{{"*", "textiles"}};
  CHECK_THROWS_AS(build_corpus(empty.path, rules), Error);
  try {
    build_corpus(empty.path, rules);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptySource);
  }
  TempDir dup("dup");
  dup.write("x/a.txt", "One sentence.");
  dup.write("y/a.txt", "Another sentence.");
  try {
    build_corpus(dup.path, rules);
    FAIL("expected DuplicateId");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateId);
  }
}

TEST_CASE("corpus JSON round-trips byte for byte") {
  std::mt19937_64 rng(7);
  Corpus c = testing::random_corpus(rng, 4, 5);
  std::string json = corpus_to_json(c);
  Corpus back = corpus_from_json(json);
  CHECK(back == c);
  CHECK(corpus_to_json(back) == json);
}

TEST_CASE("every built token has exactly one tag and buckets cover documents") {
  std::vector<DomainRule> rules{{"textiles/*", "textiles"},
                                {"electronics/*", "electronics"},
                                {"remanufacturing/*", "remanufacturing"}};
  Corpus c = build_corpus(testing::data_dir() / "fixtures" / "corpus", rules);
  std::size_t bucketed = 0;
  for (const auto& [domain, ids] : c.domain_index()) bucketed += ids.size();
  CHECK(bucketed == c.documents().size());
  CHECK(c.sentence_count() > 0);
  CHECK(c.has_domain("textiles"));
}
