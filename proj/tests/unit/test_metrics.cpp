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

#include <chrono>
#include <cmath>
#include <thread>

#include "doctest.h"
#include "lklm/error.hpp"
#include "lklm/metrics.hpp"
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

EmbeddingTable toy_table() {
  return parse_embeddings(
      "cotton 1 0 2\n"
      "fabric 0 1 1\n"
      "fiber 2 1 0\n"
      "up 1 0 0\n"
      "down -1 0 0\n"
      "east 0 1 0\n");
}

}  // namespace

TEST_CASE("load_embeddings") {
  auto t = parse_embeddings("a 1 2 3\nb 4 5 6\n");
  CHECK(t.dim() == 3);
  CHECK(t.size() == 2);
  CHECK(code_of([] { parse_embeddings("a 1 2 3\nb 4 5\n"); }) == ErrorCode::DimMismatch);
  CHECK(code_of([] { parse_embeddings(""); }) == ErrorCode::EmptyFile);
  auto shipped = load_embeddings(testing::data_dir() / "fixtures" / "embeddings.txt");
  CHECK(shipped.dim() == 16);
}

TEST_CASE("pool") {
  auto t = toy_table();
  CHECK(pool("cotton", t) == std::vector<double>{1, 0, 2});
  CHECK(pool("COTTON", t) == std::vector<double>{1, 0, 2});
  CHECK(pool("up down", t) == std::vector<double>{0, 0, 0});
  CHECK(pool("zzqx cotton", t) == std::vector<double>{1, 0, 2});
  CHECK(code_of([&] { pool("zzqx qqzx", t); }) == ErrorCode::AllOOV);
}

TEST_CASE("cosine") {
  std::vector<double> u{1, 2, 3}, v{4, 5, 6};
  // 32 / (sqrt(14) * sqrt(77))
  double oracle = (1.0 * 4 + 2.0 * 5 + 3.0 * 6) / (std::sqrt(1.0 + 4 + 9) * std::sqrt(16.0 + 25 + 36));
  CHECK(cosine(u, v) == doctest::Approx(0.974631846).epsilon(1e-6));
  CHECK(cosine(u, v) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(std::abs(cosine(u, u) - 1.0) <= 1e-12);
  CHECK(cosine(v, u) == cosine(u, v));
  std::vector<double> x{1, 0}, y{0, 1};
  CHECK(cosine(x, y) == 0.0);
  std::vector<double> z{0, 0};
  CHECK(code_of([&] { cosine(x, z); }) == ErrorCode::ZeroVector);
  std::vector<double> three{1, 0, 0};
  CHECK(code_of([&] { cosine(x, three); }) == ErrorCode::DimMismatch);
}

TEST_CASE("relevance") {
  auto t = toy_table();
  CHECK(std::abs(relevance("cotton fabric", "cotton fabric", t) - 1.0) <= 1e-12);
  CHECK(relevance("up", "east", t) == 0.0);
  // hand pooling: g = ((1,0,2)+(0,1,1))/2 = (0.5,0.5,1.5)
  //               r = ((2,1,0)+(0,1,1)+(1,0,2))/3 = (1,2/3,1)
  double g[3] = {0.5, 0.5, 1.5}, r[3] = {1.0, 2.0 / 3.0, 1.0};
  double dot = g[0] * r[0] + g[1] * r[1] + g[2] * r[2];
  double ng = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
  double nr = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
  CHECK(relevance("cotton fabric", "fiber fabric cotton", t) == doctest::Approx(dot / (ng * nr)).epsilon(1e-12));
  CHECK(relevance("cotton fabric", "fiber fabric cotton", t) ==
        relevance("fiber fabric cotton", "cotton fabric", t));
}

TEST_CASE("transition density") {
  auto c = count_transitions("However, cut it. Furthermore, sand it.");
  CHECK(c.markers == 2);
  CHECK(c.word_tokens == 6);
  CHECK(transition_density("However, cut it. Furthermore, sand it.") == doctest::Approx(100.0 * 2 / 6));
  CHECK(transition_density("Cut the fabric.") == 0.0);
  CHECK(count_transitions("Sew it. In\naddition, press it.").markers == 1);
  CHECK(transition_density("HOWEVER it works") == transition_density("however it works"));
  CHECK(transition_density("") == 0.0);
}

TEST_CASE("coherence composite") {
  auto t = toy_table();
  auto same = coherence("cotton fabric", "cotton fabric", t);
  CHECK(same.composite == doctest::Approx(0.5));
  auto saturated = coherence("however cotton", "however cotton", t);
  CHECK(saturated.transition_density >= 5.0);
  CHECK(saturated.composite == doctest::Approx(1.0));
  CHECK(coherence("up", "east", t).composite == doctest::Approx(0.25));
  // monotone in both inputs
  CHECK(composite_coherence(1.0, 0.2) <= composite_coherence(2.0, 0.2));
  CHECK(composite_coherence(1.0, 0.2) <= composite_coherence(1.0, 0.3));
}

TEST_CASE("shipped instructional scores") {
  auto s = load_scores(testing::data_dir() / "instructional_scores.csv");
  CHECK(s.size() == 42);
  CHECK(s.at({"gpt2-large", "greedy", "remanufacturing"}) == 1.0);
  CHECK(s.at({"wordnet", "-", "electronics"}) == 0.8);
  CHECK(s.at({"nlp", "-", "textiles"}) == 0.3);
  CHECK(!s.at({"nlp", "-", "remanufacturing"}).has_value());
}

TEST_CASE("score loader errors") {
  const std::string h = "model,strategy,domain,score\n";
  CHECK(code_of([&] { parse_scores(h + "m,s,d,1.5\n"); }) == ErrorCode::OutOfRange);
  CHECK(code_of([&] { parse_scores(h + "m,s,d,1\nm,s,d,0\n"); }) == ErrorCode::DuplicateKey);
  CHECK(code_of([&] { parse_scores(h + "m,s,1\n"); }) == ErrorCode::MalformedRow);
  CHECK(code_of([&] { parse_scores(h + "m,s,d,abc\n"); }) == ErrorCode::MalformedRow);
  CHECK(code_of([&] { parse_scores("a,b\n"); }) == ErrorCode::MalformedRow);
}

TEST_CASE("time_generation brackets the call") {
  auto t = time_generation([] {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    GenerationResult r;
    r.inference_ms = 49.0;
    return r;
  });
  CHECK(t.wall_ms >= 50.0);
  CHECK(t.wall_ms >= t.result.inference_ms);
  CHECK_THROWS_AS(time_generation([]() -> GenerationResult { throw Error(ErrorCode::Timeout, "x"); }), Error);
}

TEST_CASE("report CSV round-trip and bounds") {
  MetricReport rep;
  MetricRow r;
  r.model = "kg";
  r.strategy = "greedy";
  r.domain = "textiles";
  r.relevance = 0.5;
  r.transition_density = 2.0;
  r.coherence_cosine = -0.25;
  r.coherence_composite = composite_coherence(2.0, -0.25);
  r.instructional = 0.8;
  r.load_ms = 3;
  r.inference_ms = 1.5;
  r.size_bytes = 99;
  rep.rows.push_back(r);
  std::string csv = report_to_csv(rep);
  CHECK(csv.rfind(std::string(kReportHeader) + "\n", 0) == 0);
  CHECK(report_to_csv(report_from_csv(csv)) == csv);
  check_row(r);
  r.relevance = 1.5;
  CHECK(code_of([&] { check_row(r); }) == ErrorCode::OutOfRange);
}

TEST_CASE("bounded fields stay in range on random texts") {
  auto table = load_embeddings(testing::data_dir() / "fixtures" / "embeddings.txt");
  std::mt19937_64 rng(4);
  const std::vector<std::string> words = {"cotton", "fabric", "however", "the", "cut", "in", "addition", "disk"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  for (int i = 0; i < 50; ++i) {
    std::string a, b;
    for (int j = 0; j < 6; ++j) a += words[pick(rng)] + " ";
    for (int j = 0; j < 6; ++j) b += words[pick(rng)] + " ";
    MetricRow r;
    r.relevance = relevance(a, b, table);
    auto c = coherence(a, b, table);
    r.transition_density = c.transition_density;
    r.coherence_cosine = c.coherence_cosine;
    r.coherence_composite = c.composite;
    CHECK_NOTHROW(check_row(r));
  }
}
