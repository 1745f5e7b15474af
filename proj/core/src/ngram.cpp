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

#include "lklm/ngram.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "json.hpp"
#include "lklm/error.hpp"
#include "text.hpp"

namespace lklm {

using ordered_json = nlohmann::ordered_json;

NGramModel::NGramModel(int order, double k) : order_(order), k_(k) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "n-gram order must be >= 1");
  if (!(k > 0.0)) throw Error(ErrorCode::InvalidArgument, "smoothing constant k must be > 0");
  vocab_.emplace(kBos);
  vocab_.emplace(kEos);
  vocab_.emplace(kUnk);
}

void NGramModel::add_sentence(std::span<const std::string> tokens) {
  std::vector<std::string> padded(static_cast<std::size_t>(order_ - 1), std::string(kBos));
  padded.insert(padded.end(), tokens.begin(), tokens.end());
  padded.emplace_back(kEos);
  for (const auto& t : tokens) vocab_.insert(t);
  for (std::size_t i = static_cast<std::size_t>(order_ - 1); i < padded.size(); ++i) {
    for (std::size_t m = 1; m <= static_cast<std::size_t>(order_); ++m) {
      Context ctx(padded.begin() + static_cast<std::ptrdiff_t>(i - (m - 1)),
                  padded.begin() + static_cast<std::ptrdiff_t>(i));
      ContextCounts& cc = counts_[std::move(ctx)];
      ++cc.next[padded[i]];
      ++cc.total;
    }
  }
}

void NGramModel::add_count(const Context& context, const std::string& word, std::uint64_t count) {
  if (context.size() >= static_cast<std::size_t>(order_)) {
    throw Error(ErrorCode::Parse, "context longer than order - 1");
  }
  for (const auto& t : context) vocab_.insert(t);
  vocab_.insert(word);
  ContextCounts& cc = counts_[context];
  cc.next[word] += count;
  cc.total += count;
}

const NGramModel::ContextCounts* NGramModel::find(const Context& context) const {
  auto it = counts_.find(context);
  return it == counts_.end() ? nullptr : &it->second;
}

NGramModel train_sentences(std::span<const std::vector<std::string>> sentences, int n, double k) {
  NGramModel model(n, k);
  bool any = false;
  for (const auto& s : sentences) {
    if (s.empty()) continue;
    model.add_sentence(s);
    any = true;
  }
  if (!any) throw Error(ErrorCode::EmptyCorpus, "no non-empty sentences to train on");
  return model;
}

NGramModel train(const Corpus& corpus, int n, double k) {
  std::vector<std::vector<std::string>> sentences;
  for (const Document& doc : corpus.documents()) {
    for (const Sentence& s : doc.sentences) {
      std::vector<std::string> tokens;
      tokens.reserve(s.tokens.size());
      for (const Token& t : s.tokens) tokens.push_back(t.text);
      sentences.push_back(std::move(tokens));
    }
  }
  return train_sentences(sentences, n, k);
}

double prob(const NGramModel& model, std::span<const std::string> context, std::string_view word) {
  const double vocab_size = static_cast<double>(model.vocab().size());
  const std::string w = model.in_vocab(word) ? std::string(word) : std::string(kUnk);
  std::size_t longest = std::min(context.size(), static_cast<std::size_t>(model.order() - 1));
  for (std::size_t len = longest + 1; len-- > 0;) {
    NGramModel::Context ctx;
    ctx.reserve(len);
    for (std::size_t i = context.size() - len; i < context.size(); ++i) {
      ctx.push_back(model.in_vocab(context[i]) ? context[i] : std::string(kUnk));
    }
    const auto* cc = model.find(ctx);
    if (!cc || cc->total == 0) continue;
    auto it = cc->next.find(w);
    double c = it == cc->next.end() ? 0.0 : static_cast<double>(it->second);
    return (c + model.k()) / (static_cast<double>(cc->total) + model.k() * vocab_size);
  }
  return 1.0 / vocab_size;  // untrained model
}

std::vector<std::string> decode_candidates(const NGramModel& model) {
  std::vector<std::string> out;
  for (const auto& t : model.vocab()) {
    if (t == kBos || t == kUnk) continue;
    out.push_back(t);
  }
  return out;  // sorted: vocab is an ordered set
}

std::vector<std::string> prompt_context(const NGramModel& model, std::string_view prompt) {
  auto spans = tokenize_spans(prompt);
  std::size_t start = 0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    std::string_view tok = prompt.substr(spans[i].begin, spans[i].end - spans[i].begin);
    bool terminator = tok == "." || tok == "!" || tok == "?" || tok == ":";
    std::size_t gap_end = i + 1 < spans.size() ? spans[i + 1].begin : prompt.size();
    bool line_break = prompt.substr(spans[i].end, gap_end - spans[i].end).find('\n') != std::string_view::npos;
    if (terminator || line_break) start = i + 1;
  }
  std::vector<std::string> ctx(static_cast<std::size_t>(model.order() - 1), std::string(kBos));
  for (std::size_t i = start; i < spans.size(); ++i) {
    std::string tok(prompt.substr(spans[i].begin, spans[i].end - spans[i].begin));
    ctx.push_back(model.in_vocab(tok) ? tok : std::string(kUnk));
  }
  return ctx;
}

std::string detokenize(std::span<const std::string> tokens) {
  static const std::set<std::string, std::less<>> attach_left = {".", ",", ";", ":", "!", "?", ")", "]", "%"};
  static const std::set<std::string, std::less<>> attach_right = {"(", "["};
  std::string out;
  bool glue = true;
  for (const auto& t : tokens) {
    if (!glue && attach_left.find(t) == attach_left.end()) out.push_back(' ');
    out += t;
    glue = attach_right.find(t) != attach_right.end();
  }
  return out;
}

double BeamHypothesis::score() const {
  return tokens.empty() ? log_prob : log_prob / static_cast<double>(tokens.size());
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<std::string> extend(std::span<const std::string> context, std::span<const std::string> tokens) {
  std::vector<std::string> out(context.begin(), context.end());
  out.insert(out.end(), tokens.begin(), tokens.end());
  return out;
}

void require_budget(int max_new_tokens) {
  if (max_new_tokens < 1) throw Error(ErrorCode::InvalidArgument, "max_new_tokens must be >= 1");
}

GenerationResult make_result(std::vector<std::string> tokens, Strategy strategy, Clock::time_point start) {
  if (!tokens.empty() && tokens.back() == kEos) tokens.pop_back();
  GenerationResult r;
  r.text = detokenize(tokens);
  r.tokens_generated = tokens.size();
  r.inference_ms = elapsed_ms(start);
  r.wall_ms = r.inference_ms;
  r.strategy = strategy;
  return r;
}

// Sequence order used for tie-breaks: the lexicographically smaller sequence wins.
bool better(const BeamHypothesis& a, double score_a, const BeamHypothesis& b, double score_b) {
  if (score_a != score_b) return score_a > score_b;
  return a.tokens < b.tokens;
}

}  // namespace

BeamHypothesis beam_search(const NGramModel& model, std::span<const std::string> context, int width,
                           int max_new_tokens) {
  if (width < 1) throw Error(ErrorCode::InvalidArgument, "beam width must be >= 1");
  require_budget(max_new_tokens);
  const auto candidates = decode_candidates(model);
  std::vector<BeamHypothesis> active{BeamHypothesis{}};
  std::vector<BeamHypothesis> finished;
  for (int step = 0; step < max_new_tokens && !active.empty(); ++step) {
    std::vector<BeamHypothesis> expansions;
    expansions.reserve(active.size() * candidates.size());
    for (const auto& h : active) {
      auto ctx = extend(context, h.tokens);
      for (const auto& w : candidates) {
        BeamHypothesis next{h.tokens, h.log_prob + std::log(prob(model, ctx, w)), w == kEos};
        next.tokens.push_back(w);
        expansions.push_back(std::move(next));
      }
    }
    // every expansion has the same length here, so raw log-prob ranks them
    std::size_t keep = std::min(expansions.size(), static_cast<std::size_t>(width));
    std::partial_sort(expansions.begin(), expansions.begin() + static_cast<std::ptrdiff_t>(keep), expansions.end(),
                      [](const BeamHypothesis& a, const BeamHypothesis& b) {
                        return better(a, a.log_prob, b, b.log_prob);
                      });
    active.clear();
    for (std::size_t i = 0; i < keep; ++i) {
      (expansions[i].finished ? finished : active).push_back(std::move(expansions[i]));
    }
  }
  const BeamHypothesis* best = nullptr;
  for (const auto* pool : {&finished, &active}) {
    for (const auto& h : *pool) {
      if (!best || better(h, h.score(), *best, best->score())) best = &h;
    }
  }
  return *best;
}

GenerationResult greedy_decode(const NGramModel& model, std::string_view prompt, int max_new_tokens) {
  require_budget(max_new_tokens);
  auto start = Clock::now();
  auto ctx = prompt_context(model, prompt);
  const auto candidates = decode_candidates(model);
  std::vector<std::string> out;
  // Candidates are ranked by accumulated log-probability, the same quantity
  // beam search ranks, so width-1 beam reproduces this path bit for bit.
  double log_prob = 0.0;
  for (int step = 0; step < max_new_tokens; ++step) {
    const std::string* best = nullptr;
    double best_lp = 0.0;
    for (const auto& w : candidates) {
      double lp = log_prob + std::log(prob(model, ctx, w));
      if (!best || lp > best_lp) {
        best = &w;
        best_lp = lp;
      }
    }
    out.push_back(*best);
    if (*best == kEos) break;
    ctx.push_back(*best);
    log_prob = best_lp;
  }
  return make_result(std::move(out), Strategy::Greedy, start);
}

GenerationResult beam_decode(const NGramModel& model, std::string_view prompt, int width, int max_new_tokens) {
  auto start = Clock::now();
  auto ctx = prompt_context(model, prompt);
  BeamHypothesis best = beam_search(model, ctx, width, max_new_tokens);
  return make_result(std::move(best.tokens), Strategy::Beam, start);
}

GenerationResult sample_decode(const NGramModel& model, std::string_view prompt, std::uint64_t seed,
                               double temperature, int max_new_tokens) {
  require_budget(max_new_tokens);
  if (!(temperature > 0.0)) throw Error(ErrorCode::InvalidArgument, "temperature must be > 0");
  auto start = Clock::now();
  auto ctx = prompt_context(model, prompt);
  const auto candidates = decode_candidates(model);
  std::mt19937_64 rng(seed);
  std::vector<double> log_p(candidates.size());
  std::vector<double> weights(candidates.size());
  std::vector<std::string> out;
  for (int step = 0; step < max_new_tokens; ++step) {
    double max_lp = -INFINITY;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      log_p[i] = std::log(prob(model, ctx, candidates[i]));
      max_lp = std::max(max_lp, log_p[i]);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      weights[i] = std::exp((log_p[i] - max_lp) / temperature);
      total += weights[i];
    }
    double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    std::size_t pick = candidates.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      acc += weights[i];
      if (u < acc) {
        pick = i;
        break;
      }
    }
    out.push_back(candidates[pick]);
    if (candidates[pick] == kEos) break;
    ctx.push_back(candidates[pick]);
  }
  return make_result(std::move(out), Strategy::Sample, start);
}

// ---------------------------------------------------------------------------
// JSON

std::string model_to_json(const NGramModel& model) {
  ordered_json counts = ordered_json::array();
  for (const auto& [ctx, cc] : model.counts()) {
    ordered_json next = ordered_json::object();
    for (const auto& [w, c] : cc.next) next[w] = c;
    counts.push_back({{"context", ctx}, {"next", std::move(next)}});
  }
  ordered_json root;
  root["n"] = model.order();
  root["k"] = model.k();
  root["vocab"] = std::vector<std::string>(model.vocab().begin(), model.vocab().end());
  root["counts"] = std::move(counts);
  return root.dump() + "\n";
}

NGramModel model_from_json(std::string_view json) {
  try {
    auto root = ordered_json::parse(json);
    NGramModel model(root.at("n").get<int>(), root.at("k").get<double>());
    for (const auto& c : root.at("counts")) {
      auto ctx = c.at("context").get<std::vector<std::string>>();
      for (const auto& [w, n] : c.at("next").items()) model.add_count(ctx, w, n.get<std::uint64_t>());
    }
    for (const auto& v : root.at("vocab")) model.add_vocab(v.get<std::string>());
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("model JSON: ") + e.what());
  }
}

void save_model(const NGramModel& model, const std::filesystem::path& path) {
  text::write_file(path, model_to_json(model));
}

NGramModel load_model(const std::filesystem::path& path) { return model_from_json(text::read_file(path)); }

// ---------------------------------------------------------------------------
// Backend

NgramBackend::NgramBackend(std::shared_ptr<const NGramModel> model, std::string model_id, std::uint64_t load_ms)
    : model_(std::move(model)),
      model_id_(std::move(model_id)),
      load_ms_(load_ms),
      size_bytes_(model_to_json(*model_).size()) {}

BackendInfo NgramBackend::info() const { return BackendInfo{model_id_, size_bytes_, load_ms_}; }

GenerationResult NgramBackend::generate(const GenerateRequest& request) const {
  request.validate();
  GenerationResult r;
  switch (request.strategy) {
    case Strategy::Greedy:
      r = greedy_decode(*model_, request.prompt, request.max_new_tokens);
      break;
    case Strategy::Beam:
      r = beam_decode(*model_, request.prompt, *request.beam_width, request.max_new_tokens);
      break;
    case Strategy::Sample:
      r = sample_decode(*model_, request.prompt, request.seed.value_or(0), request.temperature.value_or(1.0),
                        request.max_new_tokens);
      break;
  }
  r.model_id = model_id_;
  return r;
}

}  // namespace lklm
