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

// Order-n Markov language model with add-k smoothing and longest-seen-suffix
// backoff, plus greedy, beam and sampling decoders.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lklm/corpus.hpp"
#include "lklm/generation.hpp"

namespace lklm {

inline constexpr std::string_view kBos = "<bos>";
inline constexpr std::string_view kEos = "<eos>";
inline constexpr std::string_view kUnk = "<unk>";

class NGramModel {
 public:
  struct ContextCounts {
    std::uint64_t total = 0;
    std::map<std::string, std::uint64_t, std::less<>> next;

    bool operator==(const ContextCounts&) const = default;
  };
  using Context = std::vector<std::string>;

  NGramModel(int order, double k);

  // Pads with order-1 <bos> and one <eos>, then counts every order 1..n.
  void add_sentence(std::span<const std::string> tokens);
  // Raw count insertion, used by the JSON loader.
  void add_count(const Context& context, const std::string& word, std::uint64_t count);
  void add_vocab(const std::string& token) { vocab_.insert(token); }

  int order() const noexcept { return order_; }
  double k() const noexcept { return k_; }
  const std::set<std::string, std::less<>>& vocab() const noexcept { return vocab_; }
  bool in_vocab(std::string_view token) const { return vocab_.find(token) != vocab_.end(); }
  const std::map<Context, ContextCounts>& counts() const noexcept { return counts_; }
  const ContextCounts* find(const Context& context) const;

  bool operator==(const NGramModel&) const = default;

 private:
  int order_;
  double k_;
  std::set<std::string, std::less<>> vocab_;
  std::map<Context, ContextCounts> counts_;
};

NGramModel train(const Corpus& corpus, int n = 3, double k = 0.01);
NGramModel train_sentences(std::span<const std::vector<std::string>> sentences, int n = 3, double k = 0.01);

// P(word | context) = (c(ctx, w) + k) / (c(ctx) + k |V|) on the longest
// suffix of `context` that was seen in training. Unknown words score as <unk>.
double prob(const NGramModel& model, std::span<const std::string> context, std::string_view word);

// Tokens a decoder may emit: the vocabulary without <bos> and <unk>.
std::vector<std::string> decode_candidates(const NGramModel& model);

// Decoding context for a prompt: <bos> padding followed by the prompt tokens
// after its last sentence boundary (. ! ? : or a line break), OOV as <unk>.
std::vector<std::string> prompt_context(const NGramModel& model, std::string_view prompt);

// Joins tokens with spaces, attaching closing punctuation to the left.
std::string detokenize(std::span<const std::string> tokens);

struct BeamHypothesis {
  std::vector<std::string> tokens;  // includes a final <eos> when finished
  double log_prob = 0.0;
  bool finished = false;

  // log_prob / tokens.size()
  double score() const;
};

// Beam search over accumulated log-probabilities. At each step the `width`
// best expansions survive; those ending in <eos> retire to the finished
// pool. The answer is the best of finished and still-active hypotheses by
// length-normalized score, ties to the lexicographically smaller sequence.
BeamHypothesis beam_search(const NGramModel& model, std::span<const std::string> context, int width,
                           int max_new_tokens);

GenerationResult greedy_decode(const NGramModel& model, std::string_view prompt, int max_new_tokens);
GenerationResult beam_decode(const NGramModel& model, std::string_view prompt, int width, int max_new_tokens);
GenerationResult sample_decode(const NGramModel& model, std::string_view prompt, std::uint64_t seed,
                               double temperature, int max_new_tokens);

std::string model_to_json(const NGramModel& model);
NGramModel model_from_json(std::string_view json);
void save_model(const NGramModel& model, const std::filesystem::path& path);
NGramModel load_model(const std::filesystem::path& path);

// Serves an n-gram model through the common Backend interface.
class NgramBackend : public Backend {
 public:
  NgramBackend(std::shared_ptr<const NGramModel> model, std::string model_id, std::uint64_t load_ms = 0);

  BackendInfo info() const override;
  GenerationResult generate(const GenerateRequest& request) const override;
  const NGramModel& model() const noexcept { return *model_; }

 private:
  std::shared_ptr<const NGramModel> model_;
  std::string model_id_;
  std::uint64_t load_ms_;
  std::uint64_t size_bytes_;
};

}  // namespace lklm
