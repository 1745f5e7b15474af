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

#include "lklm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>

#include <fmt/format.h>

#include "embedded_data.hpp"
#include "json.hpp"
#include "lklm/corpus.hpp"
#include "lklm/error.hpp"
#include "lklm/genclient.hpp"
#include "lklm/lexkg.hpp"
#include "lklm/ngram.hpp"
#include "lklm/retrieval.hpp"
#include "text.hpp"

namespace lklm {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

ModelSpec ModelSpec::parse(std::string_view spec) {
  ModelSpec m;
  if (spec == "nlp") {
    m.kind = Kind::Nlp;
  } else if (spec == "kg") {
    m.kind = Kind::Kg;
  } else if (spec == "ngram") {
    m.kind = Kind::Ngram;
  } else if (spec.rfind("ngram:", 0) == 0) {
    m.kind = Kind::Ngram;
    std::string_view n = spec.substr(6);
    int order = 0;
    for (char c : n) {
      if (c < '0' || c > '9' || order > 100) throw Error(ErrorCode::ConfigError, "bad n-gram order in " + std::string(spec));
      order = order * 10 + (c - '0');
    }
    if (n.empty() || order < 1 || order > 10) {
      throw Error(ErrorCode::ConfigError, "n-gram order must be 1..10 in " + std::string(spec));
    }
    m.order = order;
  } else if (spec.rfind("remote:", 0) == 0) {
    m.kind = Kind::Remote;
    m.url = std::string(spec.substr(7));
    Endpoint::parse(m.url);  // validates
  } else {
    throw Error(ErrorCode::ConfigError, "unknown model spec '" + std::string(spec) + "'");
  }
  return m;
}

std::string ModelSpec::to_string() const {
  switch (kind) {
    case Kind::Nlp: return "nlp";
    case Kind::Kg: return "kg";
    case Kind::Ngram: return "ngram:" + std::to_string(order);
    case Kind::Remote: return "remote:" + url;
  }
  return "nlp";
}

std::vector<PromptSpec> parse_prompts(std::string_view json) {
  auto j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::ConfigError, "prompts file is not valid JSON");
  const auto& list = j.is_object() && j.contains("prompts") ? j["prompts"] : j;
  if (!list.is_array()) throw Error(ErrorCode::ConfigError, "prompts must be an array");
  std::vector<PromptSpec> out;
  for (const auto& p : list) {
    if (!p.is_object() || !p.contains("domain") || !p.contains("prompt") || !p["domain"].is_string() ||
        !p["prompt"].is_string()) {
      throw Error(ErrorCode::ConfigError, "each prompt needs string fields domain and prompt");
    }
    out.push_back({p["domain"].get<std::string>(), p["prompt"].get<std::string>()});
  }
  return out;
}

std::vector<PromptSpec> default_prompts() { return parse_prompts(*embedded::find("prompts")); }

EvalConfig parse_eval_config(std::string_view json, const fs::path& base_dir) {
  auto j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::ConfigError, "eval config must be a JSON object");
  auto path_of = [&](const char* key) -> std::optional<fs::path> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_string()) throw Error(ErrorCode::ConfigError, std::string(key) + " must be a path string");
    fs::path p = j[key].get<std::string>();
    return p.is_absolute() ? p : base_dir / p;
  };
  EvalConfig c;
  try {
    auto corpus = path_of("corpus");
    auto embeddings = path_of("embeddings");
    if (!corpus) throw Error(ErrorCode::ConfigError, "config needs a corpus path");
    if (!embeddings) throw Error(ErrorCode::ConfigError, "config needs an embeddings path");
    c.corpus = *corpus;
    c.embeddings = *embeddings;
    c.scores = path_of("scores");
    c.kg = path_of("kg");

    if (!j.contains("prompts")) {
      c.prompts = default_prompts();
    } else if (j["prompts"].is_string()) {
      c.prompts = parse_prompts(text::read_file(*path_of("prompts")));
    } else {
      c.prompts = parse_prompts(j["prompts"].dump());
    }
    if (c.prompts.empty()) throw Error(ErrorCode::ConfigError, "config needs at least one prompt");

    if (!j.contains("models") || !j["models"].is_array() || j["models"].empty()) {
      throw Error(ErrorCode::ConfigError, "config needs a non-empty models array");
    }
    for (const auto& m : j["models"]) c.models.push_back(ModelSpec::parse(m.get<std::string>()));

    if (j.contains("strategies")) {
      for (const auto& s : j["strategies"]) {
        StrategySpec spec;
        std::string name = s.is_string() ? s.get<std::string>() : s.at("name").get<std::string>();
        auto strategy = parse_strategy(name);
        if (!strategy) throw Error(ErrorCode::ConfigError, "unknown strategy " + name);
        spec.strategy = *strategy;
        if (s.is_object()) {
          spec.beam_width = s.value("beam_width", spec.beam_width);
          spec.temperature = s.value("temperature", spec.temperature);
          spec.seed = s.value("seed", spec.seed);
        }
        if (spec.beam_width < 1) throw Error(ErrorCode::ConfigError, "beam_width must be >= 1");
        if (!(spec.temperature > 0.0)) throw Error(ErrorCode::ConfigError, "temperature must be > 0");
        c.strategies.push_back(spec);
      }
    } else {
      c.strategies = {{Strategy::Beam}, {Strategy::Greedy}, {Strategy::Sample}};
    }
    if (c.strategies.empty()) throw Error(ErrorCode::ConfigError, "config needs at least one strategy");

    c.max_new_tokens = j.value("max_new_tokens", c.max_new_tokens);
    if (c.max_new_tokens < 1) throw Error(ErrorCode::ConfigError, "max_new_tokens must be >= 1");
    c.nlp_sentences = j.value("nlp_sentences", c.nlp_sentences);
    if (c.nlp_sentences < 1) throw Error(ErrorCode::ConfigError, "nlp_sentences must be >= 1");
    if (j.contains("timeout_s")) c.timeout = std::chrono::seconds(j["timeout_s"].get<long long>());
    if (j.contains("output")) {
      const auto& o = j["output"];
      if (o.contains("csv")) c.csv_out = base_dir / o["csv"].get<std::string>();
      if (o.contains("json")) c.json_out = base_dir / o["json"].get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("eval config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::Io) throw;
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return c;
}

EvalConfig load_eval_config(const fs::path& path) {
  return parse_eval_config(text::read_file(path), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

std::string score_alias(std::string_view model) {
  if (model == "kg") return "wordnet";
  return std::string(model);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::uint64_t round_ms(double ms) { return static_cast<std::uint64_t>(std::llround(std::max(0.0, ms))); }

Corpus load_eval_corpus(const fs::path& path) {
  if (!fs::is_directory(path)) return load_corpus(path);
  std::vector<DomainRule> rules;
  std::vector<fs::path> subdirs;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_directory()) subdirs.push_back(entry.path());
  }
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& d : subdirs) {
    std::string name = d.filename().string();
    rules.push_back({name + "/*", name});
  }
  return build_corpus(path, rules);
}

std::string error_text(const std::exception& e) {
  if (const auto* le = dynamic_cast<const Error*>(&e)) return fmt::format("{}: {}", to_string(le->code()), le->what());
  return e.what();
}

// A model prepared for one run: how to produce text for (prompt, strategy).
struct PreparedModel {
  std::string name;  // report model column
  bool replicated = false;
  std::uint64_t load_ms = 0;
  std::uint64_t size_bytes = 0;
  std::optional<std::string> failure;  // set when the model could not be prepared
  std::function<GenerationResult(const PromptSpec&, const StrategySpec&)> generate;
};

}  // namespace

MetricReport run_eval(const EvalConfig& config) {
  if (config.models.empty()) throw Error(ErrorCode::ConfigError, "no models configured");
  if (config.prompts.empty()) throw Error(ErrorCode::ConfigError, "no prompts configured");
  if (config.strategies.empty()) throw Error(ErrorCode::ConfigError, "no strategies configured");

  auto corpus_start = Clock::now();
  auto corpus = std::make_shared<const Corpus>(load_eval_corpus(config.corpus));
  const double corpus_ms = ms_since(corpus_start);
  const EmbeddingTable table = load_embeddings(config.embeddings);
  std::optional<ScoreTable> scores;
  if (config.scores) scores = load_scores(*config.scores);
  const auto timeout = config.timeout.count() > 0 ? config.timeout : default_timeout();

  // Reference text per domain: everything the corpus holds for it.
  std::map<std::string, std::string> references;
  for (const auto& doc : corpus->documents()) {
    auto& ref = references[doc.domain];
    for (const auto& s : doc.sentences) ref += (ref.empty() ? "" : " ") + s.raw;
  }

  std::vector<PreparedModel> models;
  for (const auto& spec : config.models) {
    PreparedModel pm;
    pm.name = spec.to_string();
    pm.replicated = !spec.uses_strategies();
    try {
      switch (spec.kind) {
        case ModelSpec::Kind::Nlp: {
          pm.load_ms = round_ms(corpus_ms);
          pm.size_bytes = corpus_to_json(*corpus).size();
          std::size_t limit = config.nlp_sentences;
          pm.generate = [corpus, limit](const PromptSpec& p, const StrategySpec& s) {
            auto hits = retrieve(*corpus, p.domain, extract_keywords(p.prompt), limit);
            GenerationResult r;
            for (const auto& h : hits.hits) r.text += (r.text.empty() ? "" : " ") + h.raw;
            r.tokens_generated = tokenize(r.text).size();
            r.model_id = "nlp";
            r.strategy = s.strategy;
            return r;
          };
          break;
        }
        case ModelSpec::Kind::Kg: {
          auto start = Clock::now();
          auto graph = std::make_shared<const KnowledgeGraph>(config.kg ? load_graph(*config.kg) : default_graph());
          pm.load_ms = round_ms(ms_since(start));
          pm.size_bytes = graph_to_json(*graph).size();
          pm.generate = [graph](const PromptSpec& p, const StrategySpec& s) {
            GenerationResult r;
            r.text = expand_prompt(p.prompt, *graph);
            r.tokens_generated = tokenize(r.text).size();
            r.model_id = "kg";
            r.strategy = s.strategy;
            return r;
          };
          break;
        }
        case ModelSpec::Kind::Ngram: {
          auto start = Clock::now();
          auto model = std::make_shared<const NGramModel>(train(*corpus, spec.order));
          auto backend = std::make_shared<NgramBackend>(model, pm.name, round_ms(ms_since(start)));
          BackendInfo bi = backend->info();
          pm.load_ms = bi.load_ms;
          pm.size_bytes = bi.size_bytes;
          int max_new = config.max_new_tokens;
          pm.generate = [backend, max_new](const PromptSpec& p, const StrategySpec& s) {
            GenerateRequest req;
            req.prompt = p.prompt;
            req.strategy = s.strategy;
            req.max_new_tokens = max_new;
            if (s.strategy == Strategy::Beam) req.beam_width = s.beam_width;
            if (s.strategy == Strategy::Sample) {
              req.temperature = s.temperature;
              req.seed = s.seed;
            }
            return backend->generate(req);
          };
          break;
        }
        case ModelSpec::Kind::Remote: {
          auto backend = std::make_shared<RemoteBackend>(spec.url, timeout);
          BackendInfo bi = backend->info();
          pm.name = bi.model_id;
          pm.load_ms = bi.load_ms;
          pm.size_bytes = bi.size_bytes;
          int max_new = config.max_new_tokens;
          pm.generate = [backend, max_new](const PromptSpec& p, const StrategySpec& s) {
            GenerateRequest req;
            req.prompt = p.prompt;
            req.strategy = s.strategy;
            req.max_new_tokens = max_new;
            if (s.strategy == Strategy::Beam) req.beam_width = s.beam_width;
            if (s.strategy == Strategy::Sample) {
              req.temperature = s.temperature;
              req.seed = s.seed;
            }
            return backend->generate(req);
          };
          break;
        }
      }
    } catch (const std::exception& e) {
      pm.failure = error_text(e);
    }
    models.push_back(std::move(pm));
  }

  MetricReport report;
  // Rows are evaluated one at a time: timings of shared endpoints stay honest.
  for (const auto& pm : models) {
    for (const auto& prompt : config.prompts) {
      // Strategy-blind models run once per domain and are replicated.
      std::optional<MetricRow> shared;
      std::optional<std::string> shared_error;
      for (const auto& strategy : config.strategies) {
        const std::string strategy_name(to_string(strategy.strategy));
        if (pm.failure) {
          report.failed.push_back({pm.name, strategy_name, prompt.domain, *pm.failure});
          continue;
        }
        if (pm.replicated && (shared || shared_error)) {
          if (shared_error) {
            report.failed.push_back({pm.name, strategy_name, prompt.domain, *shared_error});
          } else {
            MetricRow row = *shared;
            row.strategy = strategy_name;
            report.rows.push_back(std::move(row));
          }
          continue;
        }
        try {
          TimedGeneration timed = time_generation([&] { return pm.generate(prompt, strategy); });
          auto ref = references.find(prompt.domain);
          if (ref == references.end()) {
            throw Error(ErrorCode::UnknownDomain, "corpus has no domain " + prompt.domain);
          }
          MetricRow row;
          row.model = pm.name;
          row.strategy = strategy_name;
          row.domain = prompt.domain;
          row.relevance = relevance(timed.result.text, ref->second, table);
          Coherence c = coherence(timed.result.text, prompt.prompt, table);
          row.transition_density = c.transition_density;
          row.coherence_cosine = c.coherence_cosine;
          row.coherence_composite = c.composite;
          row.load_ms = pm.load_ms;
          row.inference_ms = timed.result.inference_ms > 0.0 ? timed.result.inference_ms : timed.wall_ms;
          row.wall_ms = timed.wall_ms;
          row.size_bytes = pm.size_bytes;
          row.replicated = pm.replicated;
          row.text = timed.result.text;
          check_row(row);
          if (pm.replicated) shared = row;
          report.rows.push_back(std::move(row));
        } catch (const std::exception& e) {
          if (pm.replicated) shared_error = error_text(e);
          report.failed.push_back({pm.name, strategy_name, prompt.domain, error_text(e)});
        }
      }
    }
  }

  if (scores) {
    for (auto& row : report.rows) {
      ScoreKey key{score_alias(row.model), row.replicated ? "-" : row.strategy, row.domain};
      auto it = scores->find(key);
      if (it != scores->end()) row.instructional = it->second;
    }
  }

  if (config.csv_out) text::write_file(*config.csv_out, report_to_csv(report));
  if (config.json_out) text::write_file(*config.json_out, report_to_json(report));
  return report;
}

std::vector<fs::path> write_plot_data(const MetricReport& report, const fs::path& dir) {
  std::map<std::string, std::string> per_domain;
  for (const auto& r : report.rows) {
    auto& body = per_domain[r.domain];
    if (body.empty()) body = "series\trelevance\tcoherence_composite\tinstructional\n";
    body += fmt::format("{}/{}\t{:.6f}\t{:.6f}\t{}\n", r.model, r.strategy, r.relevance, r.coherence_composite,
                        r.instructional ? text::format_number(*r.instructional) : std::string("NaN"));
  }
  // Load, inference and size per model, averaged over its rows.
  struct Timing {
    std::uint64_t load_ms = 0;
    double inference_ms = 0.0;
    std::uint64_t size_bytes = 0;
    std::size_t n = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, Timing> timing;
  for (const auto& r : report.rows) {
    auto [it, inserted] = timing.try_emplace(r.model);
    if (inserted) order.push_back(r.model);
    it->second.load_ms = r.load_ms;
    it->second.size_bytes = r.size_bytes;
    it->second.inference_ms += r.inference_ms;
    ++it->second.n;
  }
  std::vector<fs::path> written;
  for (const auto& [domain, body] : per_domain) {
    fs::path p = dir / (domain + ".tsv");
    text::write_file(p, body);
    written.push_back(p);
  }
  std::string t = "model\tload_ms\tmean_inference_ms\tsize_bytes\n";
  for (const auto& m : order) {
    const auto& x = timing[m];
    t += fmt::format("{}\t{}\t{:.3f}\t{}\n", m, x.load_ms, x.inference_ms / static_cast<double>(x.n), x.size_bytes);
  }
  fs::path tp = dir / "timing.tsv";
  text::write_file(tp, t);
  written.push_back(tp);
  return written;
}

}  // namespace lklm
