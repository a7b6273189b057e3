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

#ifndef STORYSTYLE_KV_CONFIG_H_
#define STORYSTYLE_KV_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace storystyle {

// Flat `key = value` text. '#' starts a comment line; later assignments
// override earlier ones. Typed getters throw ValidationError naming the key
// when a value does not parse.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text,
                              std::string_view source = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(std::string key, std::string value);
  bool contains(std::string_view key) const;

  std::optional<std::string> get_string(std::string_view key) const;
  std::optional<double> get_double(std::string_view key) const;
  std::optional<std::int64_t> get_int(std::string_view key) const;
  std::optional<bool> get_bool(std::string_view key) const;
  std::optional<std::vector<int>> get_int_list(std::string_view key) const;

  // Keys never read through a getter, for typo detection.
  std::vector<std::string> unused_keys() const;

  // Sorted `key = value` lines.
  std::string serialize() const;

  const std::map<std::string, std::string, std::less<>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
  mutable std::set<std::string, std::less<>> used_;
};

}  // namespace storystyle

#endif  // STORYSTYLE_KV_CONFIG_H_
