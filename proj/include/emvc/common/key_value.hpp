// Copyright 2026 The emvc Authors
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

#ifndef EMVC__COMMON__KEY_VALUE_HPP_
#define EMVC__COMMON__KEY_VALUE_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace emvc
{

// Flat `key = value` text. Keys are kept sorted so that serialization is canonical.
class KeyValueText
{
public:
  static KeyValueText parse(std::string_view text);

  void set(const std::string & key, const std::string & value) { entries_[key] = value; }
  bool contains(const std::string & key) const { return entries_.count(key) != 0; }
  const std::string & get(const std::string & key) const;

  double get_double(const std::string & key) const;
  long long get_int(const std::string & key) const;
  bool get_bool(const std::string & key) const;

  const std::map<std::string, std::string> & entries() const { return entries_; }

  // One `key = value` line per entry, sorted by key.
  std::string serialize() const;

private:
  std::map<std::string, std::string> entries_;
};

double parse_double(std::string_view key, std::string_view value);
long long parse_int(std::string_view key, std::string_view value);
bool parse_bool(std::string_view key, std::string_view value);
std::vector<std::string> split(std::string_view s, char sep);
std::string trim(std::string_view s);

// 64-bit FNV-1a; stable across platforms, used for config and content hashes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace emvc

#endif  // EMVC__COMMON__KEY_VALUE_HPP_
