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

// Knowledge-augmented instruction generation: retrieve from a tagged
// document library, summarize, fill a robot-aware prompt template, and turn
// the generated text into an instruction plan with a parts checklist.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lklm/corpus.hpp"
#include "lklm/generation.hpp"
#include "lklm/lexkg.hpp"
#include "lklm/retrieval.hpp"

namespace lklm {

struct TaskSpec {
  std::string text;
  std::string domain;
};

enum class DocTag { Instructions, Legislation, Ethics, Datasheet };
std::string_view to_string(DocTag tag);
std::optional<DocTag> parse_doc_tag(std::string_view s);

struct LibraryDocument {
  Document document;
  std::set<DocTag> tags;
};

class KnowledgeLibrary {
 public:
  KnowledgeLibrary() = default;
  // Throws ConfigError for untagged documents, DuplicateId for repeated ids.
  explicit KnowledgeLibrary(std::vector<LibraryDocument> documents);

  const std::vector<LibraryDocument>& documents() const noexcept { return documents_; }
  const LibraryDocument* find(std::string_view id) const;
  bool empty() const noexcept { return documents_.empty(); }

 private:
  std::vector<LibraryDocument> documents_;  // sorted by id
};

// Reads manifest.json ({"file": ["tag", ...]}) and the files it names.
// Document ids are file stems; the domain is "library".
KnowledgeLibrary load_library(const std::filesystem::path& dir, const Lexicon& lexicon = Lexicon::builtin());

struct RobotProfile {
  std::string name;
  int arms = 0;
  std::string gripper;
  double payload_kg = 0.0;
  std::vector<std::string> capabilities;
};
RobotProfile parse_robot(std::string_view json);
RobotProfile load_robot(const std::filesystem::path& path);

struct ExtractedSentence {
  std::string document_id;
  std::size_t sentence_index = 0;
  std::size_t match_count = 0;
  bool legislation = false;
  Sentence sentence;
};

// Retrieval over every library document; order follows retrieval.
std::vector<ExtractedSentence> extract_knowledge(const TaskSpec& task, const KnowledgeLibrary& library,
                                                 std::size_t limit = kDefaultRetrievalLimit);

using LemmaFrequency = std::map<std::string, std::size_t, std::less<>>;
// Counts of non-STOP word lemmas across the sentences.
LemmaFrequency lemma_frequency(std::span<const ExtractedSentence> sentences);
// Sum of frequencies of the sentence's non-STOP word lemmas divided by its
// word-token count.
double sentence_score(const Sentence& sentence, const LemmaFrequency& frequency);
// Top `max_sentences` by score (ties to smaller (document id, index)),
// emitted in (document id, index) order and joined by spaces.
std::string summarize_extractive(std::span<const ExtractedSentence> sentences, std::size_t max_sentences);
std::string summarize_extractive(std::span<const ExtractedSentence> sentences, std::size_t max_sentences,
                                 const LemmaFrequency& frequency);
// "Summarize: " + joined sentences, greedy decoding with the token budget.
std::string summarize_remote(std::span<const ExtractedSentence> sentences, const Backend& backend,
                             int budget_tokens);

// Substitutes {{task}}, {{summary}} and {{robot.*}}. Throws UnknownVariable
// or UnbalancedBraces.
std::string render_prompt(std::string_view prompt_template, const TaskSpec& task, std::string_view summary,
                          const RobotProfile& robot);
std::string_view default_prompt_template();

struct ProvenanceEntry {
  enum class Kind { Generated, Library };
  Kind kind = Kind::Generated;
  std::size_t step = 0;            // Generated: index into steps
  std::string document_id;         // Library
  std::size_t sentence_index = 0;  // Library
  bool legislation = false;        // Library
};

struct InstructionPlan {
  std::vector<std::string> steps;
  std::vector<std::string> parts_checklist;  // noun lemmas, first-seen order
  std::vector<ProvenanceEntry> provenance;
  std::vector<std::string> warnings;
};

// A generated sentence is a step iff its first non-STOP word is a VERB.
// Falls back to all sentences with a "non-imperative" warning; throws
// PlanEmpty if nothing was generated.
InstructionPlan generate_plan(const Backend& backend, std::string_view prompt, const GenerateRequest& decode);
// Same, from text already generated.
InstructionPlan plan_from_text(std::string_view generated);

struct PipelineConfig {
  std::size_t retrieval_limit = kDefaultRetrievalLimit;
  std::size_t summary_sentences = 3;
  bool enrich = false;
  ExpandOptions expand;
  const Backend* summarizer = nullptr;  // extractive when null
  int summary_budget = 128;
  std::string prompt_template;  // default template when empty
  GenerateRequest decode;       // prompt field is ignored
};

struct PipelineTrace {
  std::string task_text;  // after optional enrichment
  std::string summary;
  std::string prompt;
  std::vector<ExtractedSentence> knowledge;
};

// Errors are rethrown with the failing stage name attached.
InstructionPlan run(const TaskSpec& task, const KnowledgeLibrary& library, const KnowledgeGraph& graph,
                    const RobotProfile& robot, const Backend& backend, const PipelineConfig& config,
                    PipelineTrace* trace = nullptr);

std::string plan_to_json(const InstructionPlan& plan);

}  // namespace lklm
