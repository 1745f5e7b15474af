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

// Small string and file helpers shared by the core sources. Not installed.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lklm::text {

// ASCII lowercase; bytes >= 0x80 are left alone so UTF-8 survives.
std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string_view> split_lines(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
bool is_ascii_alpha(char c);
bool is_ascii_upper(char c);
bool is_ascii_digit(char c);
bool is_space(char c);

// Shell-style glob with '*' and '?'.
bool glob_match(std::string_view pattern, std::string_view s);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Non-empty, non-comment lines of a word list.
std::vector<std::string> word_list(std::string_view content);

// Shortest round-trip decimal representation.
std::string format_number(double value);

}  // namespace lklm::text
