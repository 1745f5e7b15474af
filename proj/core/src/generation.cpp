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

#include "lklm/generation.hpp"

#include "lklm/error.hpp"

namespace lklm {

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::Greedy: return "greedy";
    case Strategy::Beam: return "beam";
    case Strategy::Sample: return "sample";
  }
  return "greedy";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  if (name == "greedy") return Strategy::Greedy;
  if (name == "beam") return Strategy::Beam;
  if (name == "sample") return Strategy::Sample;
  return std::nullopt;
}

void GenerateRequest::validate() const {
  if (max_new_tokens < 1) throw Error(ErrorCode::InvalidRequest, "max_new_tokens must be >= 1");
  if (strategy == Strategy::Beam) {
    if (!beam_width) throw Error(ErrorCode::InvalidRequest, "beam strategy requires beam_width");
    if (*beam_width < 1) throw Error(ErrorCode::InvalidRequest, "beam_width must be >= 1");
  } else if (beam_width) {
    throw Error(ErrorCode::InvalidRequest, "beam_width is only valid with the beam strategy");
  }
  if (temperature && !(*temperature > 0.0)) throw Error(ErrorCode::InvalidRequest, "temperature must be > 0");
}

}  // namespace lklm
