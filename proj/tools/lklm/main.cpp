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

// lklm command-line tool. Exit status: 0 ok, 1 usage or input error,
// 2 runtime failure.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "lklm/corpus.hpp"
#include "lklm/decision.hpp"
#include "lklm/error.hpp"
#include "lklm/genclient.hpp"
#include "lklm/harness.hpp"
#include "lklm/lexkg.hpp"
#include "lklm/metrics.hpp"
#include "lklm/ngram.hpp"
#include "lklm/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw lklm::Error(lklm::ErrorCode::Io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << content)) throw lklm::Error(lklm::ErrorCode::Io, "cannot write " + p.string());
}

// --backend for pipeline and serve: ngram[:order] trains on `sentences`.
std::shared_ptr<lklm::Backend> make_backend(const std::string& spec, const std::vector<lklm::Document>& docs) {
  auto m = lklm::ModelSpec::parse(spec);
  switch (m.kind) {
    case lklm::ModelSpec::Kind::Ngram: {
      lklm::Corpus corpus(docs);
      auto model = std::make_shared<const lklm::NGramModel>(lklm::train(corpus, m.order));
      return std::make_shared<lklm::NgramBackend>(model, m.to_string());
    }
    case lklm::ModelSpec::Kind::Remote:
      return std::make_shared<lklm::RemoteBackend>(m.url);
    default:
      throw lklm::Error(lklm::ErrorCode::ConfigError, "backend must be ngram[:order] or remote:URL, got " + spec);
  }
}

lklm::Corpus corpus_from_path(const fs::path& p, const std::string& domain) {
  if (fs::is_directory(p)) {
    std::vector<lklm::DomainRule> rules{{"*", domain}};
    return lklm::build_corpus(p, rules);
  }
  return lklm::load_corpus(p);
}

lklm::ProtocolServer* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lexical/knowledge-graph/language-model toolkit for manufacturing instructions", "lklm"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  // corpus build
  auto* corpus_cmd = app.add_subcommand("corpus", "Corpus operations")->require_subcommand(1);
  auto* corpus_build = corpus_cmd->add_subcommand("build", "Clean, split and tag a directory of .txt files");
  std::string corpus_in, corpus_out;
  std::vector<std::string> corpus_domains;
  corpus_build->add_option("--in", corpus_in, "Source directory")->required();
  corpus_build->add_option("--domain", corpus_domains,
                           "Domain for every file, or GLOB=DOMAIN rules tried in order")
      ->required();
  corpus_build->add_option("--out", corpus_out, "Output corpus JSON")->required();

  // eval run
  auto* eval_cmd = app.add_subcommand("eval", "Model evaluation")->require_subcommand(1);
  auto* eval_run = eval_cmd->add_subcommand("run", "Evaluate models over prompts and strategies");
  std::string eval_config, eval_csv, eval_json;
  eval_run->add_option("--config", eval_config, "Eval config JSON")->required();
  eval_run->add_option("--csv", eval_csv, "Override CSV output path");
  eval_run->add_option("--json", eval_json, "Override JSON output path");

  // recommend
  auto* rec_cmd = app.add_subcommand("recommend", "Recommend a model class for a sector");
  std::string rec_sector, rec_transparency, rec_matrix;
  double rec_budget = 0.0;
  bool rec_json = false;
  rec_cmd->add_option("--sector", rec_sector, "Sector label, e.g. Automotive")->required();
  rec_cmd->add_option("--compute-gb", rec_budget, "Compute budget in GB")->required();
  rec_cmd->add_option("--transparency", rec_transparency, "low | high")->required();
  rec_cmd->add_option("--matrix", rec_matrix, "Sector dependency matrix JSON");
  rec_cmd->add_flag("--json", rec_json, "Print JSON instead of text");

  // pipeline run
  auto* pipe_cmd = app.add_subcommand("pipeline", "Instruction pipeline")->require_subcommand(1);
  auto* pipe_run = pipe_cmd->add_subcommand("run", "Generate an instruction plan for a task");
  std::string pipe_task, pipe_domain = "library", pipe_library, pipe_kg, pipe_robot, pipe_backend, pipe_out,
                         pipe_strategy = "greedy", pipe_summarizer;
  bool pipe_enrich = false;
  int pipe_max_tokens = 64, pipe_width = 5;
  std::uint64_t pipe_seed = 0;
  double pipe_temperature = 1.0;
  pipe_run->add_option("--task", pipe_task, "Task sentence")->required();
  pipe_run->add_option("--domain", pipe_domain, "Task domain label");
  pipe_run->add_option("--library", pipe_library, "Library directory with manifest.json")->required();
  pipe_run->add_option("--kg", pipe_kg, "Knowledge graph JSON")->required();
  pipe_run->add_option("--robot", pipe_robot, "Robot profile JSON")->required();
  pipe_run->add_option("--backend", pipe_backend, "ngram[:order] (trained on the library) or remote:URL")
      ->required();
  pipe_run->add_option("--summarizer", pipe_summarizer, "remote:URL used for summaries");
  pipe_run->add_flag("--enrich", pipe_enrich, "Expand the task text with knowledge-graph glosses");
  pipe_run->add_option("--strategy", pipe_strategy, "greedy | beam | sample");
  pipe_run->add_option("--beam-width", pipe_width, "Beam width");
  pipe_run->add_option("--seed", pipe_seed, "Sampling seed");
  pipe_run->add_option("--temperature", pipe_temperature, "Sampling temperature");
  pipe_run->add_option("--max-new-tokens", pipe_max_tokens, "Generation budget");
  pipe_run->add_option("--out", pipe_out, "Write the plan JSON here instead of stdout");

  // report plot
  auto* report_cmd = app.add_subcommand("report", "Report utilities")->require_subcommand(1);
  auto* report_plot = report_cmd->add_subcommand("plot", "Write bar-chart TSV data from a report CSV");
  std::string plot_in, plot_out;
  report_plot->add_option("--in", plot_in, "Report CSV")->required();
  report_plot->add_option("--out", plot_out, "Output directory")->required();

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Serve an n-gram model over the generation protocol");
  std::string serve_corpus, serve_host = "127.0.0.1";
  int serve_port = 8080, serve_order = 3;
  serve_cmd->add_option("--corpus", serve_corpus, "Corpus JSON or directory of .txt files")->required();
  serve_cmd->add_option("--order", serve_order, "n-gram order");
  serve_cmd->add_option("--host", serve_host, "Bind address");
  serve_cmd->add_option("--port", serve_port, "Port");

  // conformance
  auto* conf_cmd = app.add_subcommand("conformance", "Check a server against the generation protocol");
  std::string conf_url;
  conf_cmd->add_option("--url", conf_url, "http://host:port")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "\n" << app.help();
    return 1;
  }

  try {
    if (corpus_build->parsed()) {
      std::vector<lklm::DomainRule> rules;
      for (const auto& d : corpus_domains) {
        auto eq = d.find('=');
        if (eq == std::string::npos) {
          rules.push_back({"*", d});
        } else {
          rules.push_back({d.substr(0, eq), d.substr(eq + 1)});
        }
      }
      auto corpus = lklm::build_corpus(corpus_in, rules);
      lklm::save_corpus(corpus, corpus_out);
      std::cout << fmt::format("{} documents, {} sentences -> {}\n", corpus.documents().size(),
                               corpus.sentence_count(), corpus_out);
      return 0;
    }

    if (eval_run->parsed()) {
      auto config = lklm::load_eval_config(eval_config);
      if (!eval_csv.empty()) config.csv_out = eval_csv;
      if (!eval_json.empty()) config.json_out = eval_json;
      auto report = lklm::run_eval(config);
      if (!config.csv_out) std::cout << lklm::report_to_csv(report);
      std::cerr << fmt::format("{} rows, {} failed\n", report.rows.size(), report.failed.size());
      for (const auto& f : report.failed) {
        std::cerr << fmt::format("  failed {}/{}/{}: {}\n", f.model, f.strategy, f.domain, f.error);
      }
      return 0;
    }

    if (rec_cmd->parsed()) {
      auto transparency = lklm::parse_transparency(rec_transparency);
      if (!transparency) throw lklm::Error(lklm::ErrorCode::InvalidArgument, "--transparency must be low or high");
      const lklm::SectorDependencyMatrix matrix =
          rec_matrix.empty() ? lklm::default_matrix() : lklm::load_matrix(rec_matrix);
      auto r = lklm::recommend(matrix, rec_sector, rec_budget, *transparency);
      if (rec_json) {
        std::cout << lklm::recommendation_to_json(r);
      } else {
        std::cout << lklm::to_string(r.chosen) << "\n";
        for (const auto& line : r.rationale) std::cout << "  - " << line << "\n";
        for (const auto& w : r.warnings) std::cout << "  warning: " << w << "\n";
        std::cout << "  ranked:";
        for (auto c : r.ranked) std::cout << " " << lklm::to_string(c);
        std::cout << "\n";
      }
      return 0;
    }

    if (pipe_run->parsed()) {
      auto library = lklm::load_library(pipe_library);
      auto graph = lklm::load_graph(pipe_kg);
      auto robot = lklm::load_robot(pipe_robot);
      std::vector<lklm::Document> docs;
      for (const auto& d : library.documents()) docs.push_back(d.document);
      auto backend = make_backend(pipe_backend, docs);
      std::shared_ptr<lklm::Backend> summarizer;
      lklm::PipelineConfig config;
      config.enrich = pipe_enrich;
      if (!pipe_summarizer.empty()) {
        auto m = lklm::ModelSpec::parse(pipe_summarizer);
        if (m.kind != lklm::ModelSpec::Kind::Remote) {
          throw lklm::Error(lklm::ErrorCode::ConfigError, "--summarizer must be remote:URL");
        }
        summarizer = std::make_shared<lklm::RemoteBackend>(m.url);
        config.summarizer = summarizer.get();
      }
      auto strategy = lklm::parse_strategy(pipe_strategy);
      if (!strategy) throw lklm::Error(lklm::ErrorCode::InvalidArgument, "unknown strategy " + pipe_strategy);
      config.decode.strategy = *strategy;
      config.decode.max_new_tokens = pipe_max_tokens;
      if (*strategy == lklm::Strategy::Beam) config.decode.beam_width = pipe_width;
      if (*strategy == lklm::Strategy::Sample) {
        config.decode.seed = pipe_seed;
        config.decode.temperature = pipe_temperature;
      }
      auto plan = lklm::run({pipe_task, pipe_domain}, library, graph, robot, *backend, config);
      auto json = lklm::plan_to_json(plan);
      if (pipe_out.empty()) {
        std::cout << json;
      } else {
        spit(pipe_out, json);
      }
      return 0;
    }

    if (report_plot->parsed()) {
      auto report = lklm::report_from_csv(slurp(plot_in));
      for (const auto& p : lklm::write_plot_data(report, plot_out)) std::cout << p.string() << "\n";
      return 0;
    }

    if (serve_cmd->parsed()) {
      auto corpus = corpus_from_path(serve_corpus, "default");
      auto model = std::make_shared<const lklm::NGramModel>(lklm::train(corpus, serve_order));
      lklm::ProtocolServer server(
          std::make_shared<lklm::NgramBackend>(model, "ngram:" + std::to_string(serve_order)));
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << fmt::format("serving on http://{}:{}\n", serve_host, serve_port);
      server.listen(serve_host, serve_port);
      g_server = nullptr;
      return 0;
    }

    if (conf_cmd->parsed()) {
      auto checks = lklm::run_conformance(conf_url);
      bool ok = true;
      for (const auto& c : checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        ok = ok && c.passed;
      }
      return ok ? 0 : 2;
    }
  } catch (const lklm::Error& e) {
    std::cerr << "error [" << lklm::to_string(e.code()) << "]: " << e.what() << "\n";
    return lklm::is_input_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
