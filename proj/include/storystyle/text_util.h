// Copyright 2026 The storystyle Authors.
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

#ifndef STORYSTYLE_TEXT_UTIL_H_
#define STORYSTYLE_TEXT_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace storystyle {

std::string_view trim(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char sep);

// Whitespace-separated tokens.
std::vector<std::string_view> split_ws(std::string_view text);

// Strict numeric parsing: the whole field must be consumed.
std::optional<double> parse_double(std::string_view field);
std::optional<std::int64_t> parse_int(std::string_view field);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

// Fixed-point with `digits` decimals, for human-readable reports.
std::string format_fixed(double value, int digits);

// Whole file as a string; throws MissingInputError / IoError.
std::string read_text_file(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, std::string_view text);

// Line iteration that tolerates CRLF endings.
std::vector<std::string> split_lines(std::string_view text);

}  // namespace storystyle

#endif  // STORYSTYLE_TEXT_UTIL_H_
