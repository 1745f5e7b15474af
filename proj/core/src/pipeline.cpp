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

#include "lklm/pipeline.hpp"

#include <algorithm>

#include "embedded_data.hpp"
#include "json.hpp"
#include "lklm/error.hpp"
#include "text.hpp"

namespace lklm {

std::string_view to_string(DocTag tag) {
  switch (tag) {
    case DocTag::Instructions: return "instructions";
    case DocTag::Legislation: return "legislation";
    case DocTag::Ethics: return "ethics";
    case DocTag::Datasheet: return "datasheet";
  }
  return "instructions";
}

std::optional<DocTag> parse_doc_tag(std::string_view s) {
  for (DocTag t : {DocTag::Instructions, DocTag::Legislation, DocTag::Ethics, DocTag::Datasheet}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Library

KnowledgeLibrary::KnowledgeLibrary(std::vector<LibraryDocument> documents) : documents_(std::move(documents)) {
  std::sort(documents_.begin(), documents_.end(),
            [](const LibraryDocument& a, const LibraryDocument& b) { return a.document.id < b.document.id; });
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    if (documents_[i].tags.empty()) {
      throw Error(ErrorCode::ConfigError, "library document " + documents_[i].document.id + " has no tags");
    }
    if (i > 0 && documents_[i].document.id == documents_[i - 1].document.id) {
      throw Error(ErrorCode::DuplicateId, "duplicate library document " + documents_[i].document.id);
    }
  }
}

const LibraryDocument* KnowledgeLibrary::find(std::string_view id) const {
  auto it = std::lower_bound(documents_.begin(), documents_.end(), id,
                             [](const LibraryDocument& d, std::string_view key) { return d.document.id < key; });
  return it != documents_.end() && it->document.id == id ? &*it : nullptr;
}

KnowledgeLibrary load_library(const std::filesystem::path& dir, const Lexicon& lexicon) {
  const auto manifest_path = dir / "manifest.json";
  auto manifest = nlohmann::json::parse(text::read_file(manifest_path), nullptr, false);
  if (manifest.is_discarded() || !manifest.is_object()) {
    throw Error(ErrorCode::ConfigError, manifest_path.string() + " must be a JSON object of file -> tags");
  }
  std::vector<LibraryDocument> docs;
  for (const auto& [file, tags] : manifest.items()) {
    if (!tags.is_array()) throw Error(ErrorCode::ConfigError, "tags for " + file + " must be an array");
    LibraryDocument d;
    for (const auto& t : tags) {
      auto tag = t.is_string() ? parse_doc_tag(t.get<std::string>()) : std::nullopt;
      if (!tag) throw Error(ErrorCode::ConfigError, "unknown tag " + t.dump() + " for " + file);
      d.tags.insert(*tag);
    }
    std::filesystem::path p = dir / file;
    d.document = make_document(p.stem().string(), "library", text::read_file(p), lexicon);
    docs.push_back(std::move(d));
  }
  return KnowledgeLibrary(std::move(docs));
}

RobotProfile parse_robot(std::string_view json) {
  auto j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::ConfigError, "robot profile must be a JSON object");
  try {
    RobotProfile r;
    r.name = j.at("name").get<std::string>();
    r.arms = j.at("arms").get<int>();
    r.gripper = j.at("gripper").get<std::string>();
    r.payload_kg = j.at("payload_kg").get<double>();
    r.capabilities = j.value("capabilities", std::vector<std::string>{});
    if (r.arms < 0) throw Error(ErrorCode::ConfigError, "robot arms must be >= 0");
    if (!(r.payload_kg >= 0.0)) throw Error(ErrorCode::ConfigError, "robot payload_kg must be >= 0");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("robot profile: ") + e.what());
  }
}

RobotProfile load_robot(const std::filesystem::path& path) { return parse_robot(text::read_file(path)); }

// ---------------------------------------------------------------------------
// Extraction and summaries

std::vector<ExtractedSentence> extract_knowledge(const TaskSpec& task, const KnowledgeLibrary& library,
                                                 std::size_t limit) {
  if (library.empty()) throw Error(ErrorCode::EmptyInput, "knowledge library is empty");
  KeywordSet keywords = extract_keywords(task.text);
  std::vector<const Document*> docs;
  for (const auto& d : library.documents()) docs.push_back(&d.document);
  RetrievalResult result = retrieve_documents(docs, keywords, limit);
  std::vector<ExtractedSentence> out;
  for (const auto& hit : result.hits) {
    const LibraryDocument* d = library.find(hit.document_id);
    ExtractedSentence e;
    e.document_id = hit.document_id;
    e.sentence_index = hit.sentence_index;
    e.match_count = hit.match_count;
    e.legislation = d->tags.count(DocTag::Legislation) > 0;
    e.sentence = d->document.sentences.at(hit.sentence_index);
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

bool counts_for_summary(const Token& t) { return is_word(t.text) && t.pos != Pos::Stop; }

}  // namespace

LemmaFrequency lemma_frequency(std::span<const ExtractedSentence> sentences) {
  LemmaFrequency f;
  for (const auto& s : sentences) {
    for (const auto& t : s.sentence.tokens) {
      if (counts_for_summary(t)) ++f[t.lemma];
    }
  }
  return f;
}

double sentence_score(const Sentence& sentence, const LemmaFrequency& frequency) {
  std::size_t words = 0;
  std::size_t total = 0;
  for (const auto& t : sentence.tokens) {
    if (!is_word(t.text)) continue;
    ++words;
    if (t.pos == Pos::Stop) continue;
    auto it = frequency.find(t.lemma);
    if (it != frequency.end()) total += it->second;
  }
  return words == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(words);
}

std::string summarize_extractive(std::span<const ExtractedSentence> sentences, std::size_t max_sentences,
                                 const LemmaFrequency& frequency) {
  if (sentences.empty()) throw Error(ErrorCode::EmptyInput, "nothing to summarize");
  if (max_sentences < 1) throw Error(ErrorCode::InvalidArgument, "max_sentences must be >= 1");
  std::vector<std::pair<double, const ExtractedSentence*>> scored;
  for (const auto& s : sentences) scored.emplace_back(sentence_score(s.sentence, frequency), &s);
  auto position = [](const ExtractedSentence* s) { return std::tie(s->document_id, s->sentence_index); };
  std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return position(a.second) < position(b.second);
  });
  scored.resize(std::min(scored.size(), max_sentences));
  std::sort(scored.begin(), scored.end(),
            [&](const auto& a, const auto& b) { return position(a.second) < position(b.second); });
  std::string out;
  for (const auto& [score, s] : scored) {
    if (!out.empty()) out.push_back(' ');
    out += s->sentence.raw;
  }
  return out;
}

std::string summarize_extractive(std::span<const ExtractedSentence> sentences, std::size_t max_sentences) {
  return summarize_extractive(sentences, max_sentences, lemma_frequency(sentences));
}

std::string summarize_remote(std::span<const ExtractedSentence> sentences, const Backend& backend,
                             int budget_tokens) {
  if (sentences.empty()) throw Error(ErrorCode::EmptyInput, "nothing to summarize");
  GenerateRequest req;
  req.prompt = "Summarize:";
  for (const auto& s : sentences) req.prompt += " " + s.sentence.raw;
  req.strategy = Strategy::Greedy;
  req.max_new_tokens = budget_tokens;
  return backend.generate(req).text;
}

// ---------------------------------------------------------------------------
// Templates

std::string_view default_prompt_template() { return *embedded::find("prompt_template"); }

std::string render_prompt(std::string_view tpl, const TaskSpec& task, std::string_view summary,
                          const RobotProfile& robot) {
  auto value = [&](std::string_view name) -> std::string {
    if (name == "task") return task.text;
    if (name == "summary") return std::string(summary);
    if (name == "robot.name") return robot.name;
    if (name == "robot.arms") return std::to_string(robot.arms);
    if (name == "robot.gripper") return robot.gripper;
    if (name == "robot.payload_kg") return text::format_number(robot.payload_kg);
    if (name == "robot.capabilities") {
      std::string out;
      for (const auto& c : robot.capabilities) out += (out.empty() ? "" : ", ") + c;
      return out;
    }
    throw Error(ErrorCode::UnknownVariable, "unknown template variable {{" + std::string(name) + "}}");
  };
  std::string out;
  std::size_t i = 0;
  while (i < tpl.size()) {
    auto open = tpl.find("{{", i);
    auto close = tpl.find("}}", i);
    if (close < open) throw Error(ErrorCode::UnbalancedBraces, "'}}' without matching '{{'");
    if (open == std::string_view::npos) {
      out += tpl.substr(i);
      break;
    }
    out += tpl.substr(i, open - i);
    auto end = tpl.find("}}", open + 2);
    if (end == std::string_view::npos) throw Error(ErrorCode::UnbalancedBraces, "'{{' without matching '}}'");
    std::string_view name = tpl.substr(open + 2, end - open - 2);
    if (name.find("{{") != std::string_view::npos) throw Error(ErrorCode::UnbalancedBraces, "nested '{{'");
    out += value(text::trim(name));
    i = end + 2;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Plans

namespace {

bool is_imperative(const Sentence& s) {
  for (const auto& t : s.tokens) {
    if (!is_word(t.text) || t.pos == Pos::Stop) continue;
    return t.pos == Pos::Verb;
  }
  return false;
}

}  // namespace

InstructionPlan plan_from_text(std::string_view generated) {
  auto sentences = split_sentences(generated);
  std::erase_if(sentences, [](const Sentence& s) { return text::trim(s.raw).empty(); });
  if (sentences.empty()) throw Error(ErrorCode::PlanEmpty, "backend generated no text");
  InstructionPlan plan;
  std::vector<const Sentence*> kept;
  for (const auto& s : sentences) {
    if (is_imperative(s)) kept.push_back(&s);
  }
  if (kept.empty()) {
    plan.warnings.push_back("non-imperative: no generated sentence starts with a verb; using raw sentences");
    for (const auto& s : sentences) kept.push_back(&s);
  }
  std::set<std::string> seen;
  for (const Sentence* s : kept) {
    ProvenanceEntry p;
    p.kind = ProvenanceEntry::Kind::Generated;
    p.step = plan.steps.size();
    plan.provenance.push_back(p);
    plan.steps.push_back(s->raw);
    for (const auto& t : s->tokens) {
      if (t.pos == Pos::Noun && seen.insert(t.lemma).second) plan.parts_checklist.push_back(t.lemma);
    }
  }
  return plan;
}

InstructionPlan generate_plan(const Backend& backend, std::string_view prompt, const GenerateRequest& decode) {
  GenerateRequest req = decode;
  req.prompt = std::string(prompt);
  return plan_from_text(backend.generate(req).text);
}

InstructionPlan run(const TaskSpec& task, const KnowledgeLibrary& library, const KnowledgeGraph& graph,
                    const RobotProfile& robot, const Backend& backend, const PipelineConfig& config,
                    PipelineTrace* trace) {
  std::string stage;
  try {
    stage = "task";
    if (text::trim(task.text).empty()) throw Error(ErrorCode::EmptyInput, "task text is empty");
    TaskSpec prompt_task = task;
    std::vector<std::string> warnings;
    if (config.enrich) {
      stage = "enrich";
      prompt_task.text = expand_prompt(task.text, graph, config.expand);
    }

    stage = "extract";
    auto knowledge = extract_knowledge(task, library, config.retrieval_limit);

    stage = "summarize";
    std::string summary;
    if (knowledge.empty()) {
      warnings.push_back("no library sentence matched the task; generating from the prompt alone");
    } else if (config.summarizer) {
      try {
        summary = summarize_remote(knowledge, *config.summarizer, config.summary_budget);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Timeout) throw;
        warnings.push_back("summarizer timed out; used extractive summary");
        summary = summarize_extractive(knowledge, config.summary_sentences);
      }
    } else {
      summary = summarize_extractive(knowledge, config.summary_sentences);
    }

    stage = "render";
    std::string prompt = render_prompt(
        config.prompt_template.empty() ? default_prompt_template() : std::string_view(config.prompt_template),
        prompt_task, summary, robot);

    stage = "generate";
    InstructionPlan plan = generate_plan(backend, prompt, config.decode);
    for (const auto& k : knowledge) {
      ProvenanceEntry p;
      p.kind = ProvenanceEntry::Kind::Library;
      p.document_id = k.document_id;
      p.sentence_index = k.sentence_index;
      p.legislation = k.legislation;
      plan.provenance.push_back(std::move(p));
    }
    warnings.insert(warnings.end(), plan.warnings.begin(), plan.warnings.end());
    plan.warnings = std::move(warnings);
    if (trace) *trace = PipelineTrace{prompt_task.text, summary, prompt, std::move(knowledge)};
    return plan;
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw Error(e.code(), stage, stage + ": " + e.what());
  }
}

std::string plan_to_json(const InstructionPlan& plan) {
  using nlohmann::ordered_json;
  ordered_json provenance = ordered_json::array();
  for (const auto& p : plan.provenance) {
    if (p.kind == ProvenanceEntry::Kind::Generated) {
      provenance.push_back({{"source", "generated"}, {"step", p.step}});
    } else {
      provenance.push_back({{"source", "library"},
                            {"document", p.document_id},
                            {"sentence", p.sentence_index},
                            {"legislation", p.legislation}});
    }
  }
  ordered_json j;
  j["steps"] = plan.steps;
  j["parts_checklist"] = plan.parts_checklist;
  j["provenance"] = std::move(provenance);
  j["warnings"] = plan.warnings;
  return j.dump(2) + "\n";
}

}  // namespace lklm
