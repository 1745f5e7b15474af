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

#include <benchmark/benchmark.h>

#include <filesystem>
#include <memory>
#include <vector>

#include "lklm/corpus.hpp"
#include "lklm/lexkg.hpp"
#include "lklm/ngram.hpp"
#include "lklm/retrieval.hpp"

namespace {

using namespace lklm;
const std::filesystem::path kData = LKLM_BENCH_DATA_DIR;

const Corpus& fixture_corpus() {
  static const Corpus corpus = [] {
    std::vector<DomainRule> rules = {
        {"textiles/*", "textiles"}, {"electronics/*", "electronics"}, {"remanufacturing/*", "remanufacturing"}};
    return build_corpus(kData / "fixtures" / "corpus", rules);
  }();
  return corpus;
}

const NGramModel& fixture_model() {
  static const NGramModel model = train(fixture_corpus(), 3);
  return model;
}

constexpr const char* kPrompt = "Construct a cotton T-shirt, starting from fiber production to fabric to finished garment.";

void BM_Train(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(train(fixture_corpus(), static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Train)->DenseRange(1, 3);

void BM_Greedy(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(greedy_decode(fixture_model(), kPrompt, 64));
}
BENCHMARK(BM_Greedy);

void BM_Beam(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(beam_decode(fixture_model(), kPrompt, width, 64));
}
BENCHMARK(BM_Beam)->RangeMultiplier(2)->Range(1, 8);

void BM_Sample(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_decode(fixture_model(), kPrompt, seed++, 1.0, 64));
}
BENCHMARK(BM_Sample);

void BM_Retrieve(benchmark::State& state) {
  const auto keywords = extract_keywords(kPrompt);
  for (auto _ : state) benchmark::DoNotOptimize(retrieve(fixture_corpus(), "textiles", keywords, kUnlimited));
}
BENCHMARK(BM_Retrieve);

void BM_ExpandPrompt(benchmark::State& state) {
  ExpandOptions options;
  options.iterations = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(expand_prompt(kPrompt, default_graph(), options));
}
BENCHMARK(BM_ExpandPrompt)->DenseRange(0, 2);

}  // namespace

BENCHMARK_MAIN();
