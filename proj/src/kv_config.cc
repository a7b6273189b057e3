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

#include "storystyle/kv_config.h"

#include <sstream>

#include "storystyle/error.h"
#include "storystyle/text_util.h"

namespace storystyle {

KeyValueConfig KeyValueConfig::parse(std::string_view text,
                                     std::string_view source) {
  KeyValueConfig config;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(std::string(source), i + 1, "expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(std::string(source), i + 1, "empty key");
    config.set(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return config;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  return parse(read_text_file(path), path.string());
}

void KeyValueConfig::set(std::string key, std::string value) {
  entries_[std::move(key)] = std::move(value);
}

bool KeyValueConfig::contains(std::string_view key) const {
  return entries_.find(key) != entries_.end();
}

std::optional<std::string> KeyValueConfig::get_string(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  used_.emplace(key);
  return it->second;
}

std::optional<double> KeyValueConfig::get_double(std::string_view key) const {
  auto raw = get_string(key);
  if (!raw) return std::nullopt;
  auto v = parse_double(*raw);
  if (!v) {
    throw ValidationError("config key '" + std::string(key) +
                          "' expects a number, got '" + *raw + "'");
  }
  return v;
}

std::optional<std::int64_t> KeyValueConfig::get_int(std::string_view key) const {
  auto raw = get_string(key);
  if (!raw) return std::nullopt;
  auto v = parse_int(*raw);
  if (!v) {
    throw ValidationError("config key '" + std::string(key) +
                          "' expects an integer, got '" + *raw + "'");
  }
  return v;
}

std::optional<bool> KeyValueConfig::get_bool(std::string_view key) const {
  auto raw = get_string(key);
  if (!raw) return std::nullopt;
  if (*raw == "true" || *raw == "1" || *raw == "yes") return true;
  if (*raw == "false" || *raw == "0" || *raw == "no") return false;
  throw ValidationError("config key '" + std::string(key) +
                        "' expects true/false, got '" + *raw + "'");
}

std::optional<std::vector<int>> KeyValueConfig::get_int_list(
    std::string_view key) const {
  auto raw = get_string(key);
  if (!raw) return std::nullopt;
  std::vector<int> out;
  for (auto field : split(*raw, ',')) {
    auto v = parse_int(field);
    if (!v) {
      throw ValidationError("config key '" + std::string(key) +
                            "' expects a comma-separated integer list");
    }
    out.push_back(static_cast<int>(*v));
  }
  return out;
}

std::vector<std::string> KeyValueConfig::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [key, value] : entries_) {
    if (!used_.contains(key)) out.push_back(key);
  }
  return out;
}

std::string KeyValueConfig::serialize() const {
  std::ostringstream out;
  for (const auto& [key, value] : entries_) out << key << " = " << value << '\n';
  return out.str();
}

}  // namespace storystyle
