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

#include <cmath>
#include <random>

#include "doctest.h"
#include "lklm/error.hpp"
#include "lklm/ngram.hpp"
#include "oracles.hpp"

using namespace lklm;

namespace {

using Sentences = std::vector<std::vector<std::string>>;

double sum_over_vocab(const NGramModel& m, const std::vector<std::string>& ctx) {
  double s = 0.0;
  for (const auto& w : m.vocab()) s += prob(m, ctx, w);
  return s;
}

}  // namespace

TEST_CASE("bigram counts by hand") {
  NGramModel m = train_sentences(Sentences{{"a", "b"}}, 2);
  const auto* bos = m.find({std::string(kBos)});
  REQUIRE(bos != nullptr);
  CHECK(bos->next.at("a") == 1);
  CHECK(m.find({"a"})->next.at("b") == 1);
  CHECK(m.find({"b"})->next.at(std::string(kEos)) == 1);
  CHECK(m.find({"a"})->total == 1);
  // every context total equals the sum of its counts
  for (const auto& [ctx, cc] : m.counts()) {
    std::uint64_t sum = 0;
    for (const auto& [w, c] : cc.next) sum += c;
    CHECK(sum == cc.total);
  }
}

TEST_CASE("unigram model has only the empty context") {
  NGramModel m = train_sentences(Sentences{{"a", "b"}, {"c"}}, 1);
  CHECK(m.counts().size() == 1);
  CHECK(m.counts().begin()->first.empty());
}

TEST_CASE("empty corpus is rejected") {
  try {
    train_sentences(Sentences{}, 2);
    FAIL("expected EmptyCorpus");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyCorpus);
  }
  CHECK_THROWS_AS(train(Corpus{}, 3), Error);
}

TEST_CASE("prob matches the add-k formula and backs off") {
  const double k = 0.01;
  NGramModel m = train_sentences(Sentences{{"a", "b"}, {"a", "b"}}, 2, k);
  const double V = static_cast<double>(m.vocab().size());  // a b <bos> <eos> <unk>
  CHECK(V == 5);
  CHECK(prob(m, std::vector<std::string>{"a"}, "b") == doctest::Approx((2 + k) / (2 + k * V)).epsilon(1e-15));
  // unseen context falls back to the unigram branch
  CHECK(prob(m, std::vector<std::string>{"z"}, "b") == prob(m, std::vector<std::string>{}, "b"));
  // unknown words score as <unk>
  CHECK(prob(m, std::vector<std::string>{"a"}, "zz") == prob(m, std::vector<std::string>{"a"}, kUnk));
}

TEST_CASE("probabilities sum to one for every context") {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 3; ++n) {
    NGramModel m = train_sentences(testing::random_sentences(rng, 40, 5, 6), n);
    for (const auto& [ctx, cc] : m.counts()) CHECK(std::abs(sum_over_vocab(m, ctx) - 1.0) < 1e-9);
    CHECK(std::abs(sum_over_vocab(m, {"zzz", "yyy"}) - 1.0) < 1e-9);
  }
}

TEST_CASE("greedy takes the argmax") {
  Sentences s;
  for (int i = 0; i < 5; ++i) s.push_back({"a", "b"});
  s.push_back({"a", "c"});
  NGramModel m = train_sentences(s, 2);
  auto r = greedy_decode(m, "a", 1);
  CHECK(r.text == "b");
  CHECK(r.tokens_generated == 1);
  CHECK(greedy_decode(m, "a", 10).text == greedy_decode(m, "a", 10).text);
  CHECK_THROWS_AS(greedy_decode(m, "a", 0), Error);
}

TEST_CASE("beam escapes a greedy dead end") {
  // After <bos>, "x" is likelier than "y", but "x" continues with a flat
  // spread while "y" is followed by a near-certain "z".
  Sentences s;
  for (int i = 0; i < 4; ++i) s.push_back({"x", "p"});
  for (int i = 0; i < 3; ++i) s.push_back({"x", "q"});
  for (int i = 0; i < 3; ++i) s.push_back({"x", "r"});
  for (int i = 0; i < 6; ++i) s.push_back({"y", "z"});
  for (int i = 0; i < 4; ++i) s.push_back({"w"});
  NGramModel m = train_sentences(s, 2);
  auto ctx = prompt_context(m, "");
  // Oracle: enumerate every sequence of at most three tokens.
  auto best = testing::brute_force_best(m, ctx, 3);
  auto greedy = greedy_decode(m, "", 3);
  auto beam = beam_search(m, ctx, 2, 3);
  CHECK(greedy.text.rfind("x", 0) == 0);
  CHECK(beam.tokens == best.tokens);
  CHECK(beam.tokens == std::vector<std::string>{"y", "z", std::string(kEos)});
}

TEST_CASE("width-1 beam equals greedy") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 1 + trial % 3;
    NGramModel m = train_sentences(testing::random_sentences(rng, 20, 4, 5), n);
    std::string prompt = testing::join(testing::random_sentences(rng, 1, 4, 3)[0]);
    CHECK(beam_decode(m, prompt, 1, 8).text == greedy_decode(m, prompt, 8).text);
  }
}

TEST_CASE("exhaustive beam equals brute force") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    NGramModel m = train_sentences(testing::random_sentences(rng, 12, 3, 4), 2);
    auto ctx = prompt_context(m, "a");
    const int steps = 3;
    int width = 1;
    for (int i = 0; i < steps; ++i) width *= static_cast<int>(decode_candidates(m).size());
    auto beam = beam_search(m, ctx, width, steps);
    auto best = testing::brute_force_best(m, ctx, steps);
    CHECK(beam.tokens == best.tokens);
    CHECK(beam.log_prob == best.log_prob);
  }
}

TEST_CASE("sampling is seeded and concentrates at low temperature") {
  Sentences s;
  for (int i = 0; i < 9; ++i) s.push_back({"a", "b"});
  s.push_back({"a", "c"});
  NGramModel m = train_sentences(s, 2);
  CHECK(sample_decode(m, "a", 42, 1.0, 10).text == sample_decode(m, "a", 42, 1.0, 10).text);
  int b = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    if (sample_decode(m, "a", seed, 0.01, 1).text == "b") ++b;
  }
  CHECK(b >= 990);
  CHECK_THROWS_AS(sample_decode(m, "a", 1, 0.0, 5), Error);
}

TEST_CASE("single-word vocabulary repeats or stops") {
  NGramModel m = train_sentences(Sentences{{"a"}}, 1);
  auto r = sample_decode(m, "", 1, 1.0, 6);
  for (const auto& tok : tokenize(r.text)) CHECK(tok == "a");
  CHECK(r.tokens_generated <= 6);
}

TEST_CASE("model JSON round-trip") {
  std::mt19937_64 rng(1);
  NGramModel m = train_sentences(testing::random_sentences(rng, 10, 4, 4), 3);
  std::string json = model_to_json(m);
  NGramModel back = model_from_json(json);
  CHECK(back == m);
  CHECK(model_to_json(back) == json);
}

TEST_CASE("backend validates and reports") {
  auto m = std::make_shared<const NGramModel>(train_sentences(Sentences{{"cut", "the", "fabric", "."}}, 3));
  NgramBackend backend(m, "toy", 3);
  CHECK(backend.info().model_id == "toy");
  CHECK(backend.info().size_bytes > 0);
  GenerateRequest req;
  req.prompt = "cut";
  req.strategy = Strategy::Beam;
  CHECK_THROWS_AS(backend.generate(req), Error);
  req.beam_width = 2;
  auto r = backend.generate(req);
  CHECK(r.model_id == "toy");
  CHECK(r.strategy == Strategy::Beam);
  CHECK(r.inference_ms >= 0.0);
  CHECK(r.tokens_generated <= static_cast<std::size_t>(req.max_new_tokens));
}

TEST_CASE("detokenize attaches punctuation") {
  std::vector<std::string> t{"Cut", "the", "fabric", ",", "then", "sew", "(", "gently", ")", "."};
  CHECK(detokenize(t) == "Cut the fabric, then sew (gently).");
}
