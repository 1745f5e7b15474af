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

#include <stdexcept>
#include <string>
#include <string_view>

namespace lklm {

// One code per failure kind a caller may want to branch on. Codes are grouped
// by the module that raises them.
enum class ErrorCode {
  // generic
  Io,
  Parse,
  InvalidArgument,
  ConfigError,
  // corpus
  EmptySource,
  DuplicateId,
  // lexkg
  NoSense,
  // retrieval
  NoKeywords,
  UnknownDomain,
  // ngram
  EmptyCorpus,
  // genclient
  Unreachable,
  MalformedResponse,
  Timeout,
  ProtocolError,
  InvalidRequest,
  // metrics
  DimMismatch,
  EmptyFile,
  AllOOV,
  ZeroVector,
  OutOfRange,
  DuplicateKey,
  MalformedRow,
  // decision
  BadCellValue,
  MissingSector,
  BadShape,
  UnknownSector,
  // pipeline
  EmptyInput,
  UnknownVariable,
  UnbalancedBraces,
  PlanEmpty,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, std::string stage, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  // Pipeline stage that raised the error, empty outside the pipeline.
  const std::string& stage() const noexcept { return stage_; }

 private:
  ErrorCode code_;
  std::string stage_;
};

// True for errors caused by bad user input (files, flags, names) rather than
// by a failure while running.
bool is_input_error(ErrorCode code);

}  // namespace lklm
