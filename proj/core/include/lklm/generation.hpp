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

// Request/result records shared by the local n-gram backend and the remote
// HTTP backends, so downstream reporting sees one schema.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace lklm {

enum class Strategy { Greedy, Beam, Sample };

std::string_view to_string(Strategy strategy);
std::optional<Strategy> parse_strategy(std::string_view name);

struct GenerateRequest {
  std::string prompt;
  Strategy strategy = Strategy::Greedy;
  std::optional<int> beam_width;     // required for, and only for, Beam
  int max_new_tokens = 64;
  std::optional<double> temperature;  // Sample only; 1.0 when absent
  std::optional<std::uint64_t> seed;  // Sample only; 0 when absent

  // Throws Error(InvalidRequest) when the fields contradict each other.
  void validate() const;

  bool operator==(const GenerateRequest&) const = default;
};

struct GenerationResult {
  std::string text;
  std::size_t tokens_generated = 0;
  double inference_ms = 0.0;  // backend-reported generate span
  double wall_ms = 0.0;       // caller-observed, includes transport
  std::string model_id;
  Strategy strategy = Strategy::Greedy;
};

struct BackendInfo {
  std::string model_id;
  std::uint64_t size_bytes = 0;
  std::uint64_t load_ms = 0;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendInfo info() const = 0;
  virtual GenerationResult generate(const GenerateRequest& request) const = 0;
};

}  // namespace lklm
