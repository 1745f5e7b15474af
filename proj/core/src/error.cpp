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

#include "lklm/error.hpp"

namespace lklm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::EmptySource: return "EmptySource";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::NoSense: return "NoSense";
    case ErrorCode::NoKeywords: return "NoKeywords";
    case ErrorCode::UnknownDomain: return "UnknownDomain";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::InvalidRequest: return "InvalidRequest";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::AllOOV: return "AllOOV";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::BadCellValue: return "BadCellValue";
    case ErrorCode::MissingSector: return "MissingSector";
    case ErrorCode::BadShape: return "BadShape";
    case ErrorCode::UnknownSector: return "UnknownSector";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::UnbalancedBraces: return "UnbalancedBraces";
    case ErrorCode::PlanEmpty: return "PlanEmpty";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

Error::Error(ErrorCode code, std::string stage, const std::string& message)
    : std::runtime_error("[" + stage + "] " + std::string(to_string(code)) + ": " + message),
      code_(code),
      stage_(std::move(stage)) {}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
    case ErrorCode::Parse:
    case ErrorCode::InvalidArgument:
    case ErrorCode::ConfigError:
    case ErrorCode::EmptySource:
    case ErrorCode::DuplicateId:
    case ErrorCode::UnknownDomain:
    case ErrorCode::DimMismatch:
    case ErrorCode::EmptyFile:
    case ErrorCode::OutOfRange:
    case ErrorCode::DuplicateKey:
    case ErrorCode::MalformedRow:
    case ErrorCode::BadCellValue:
    case ErrorCode::MissingSector:
    case ErrorCode::BadShape:
    case ErrorCode::UnknownSector:
    case ErrorCode::UnknownVariable:
    case ErrorCode::UnbalancedBraces:
      return true;
    default:
      return false;
  }
}

}  // namespace lklm
