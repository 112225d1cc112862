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

#include "emvc/common/key_value.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>

#include "emvc/common/error.hpp"

namespace emvc
{

std::string trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

KeyValueText KeyValueText::parse(std::string_view text)
{
  KeyValueText kv;
  int line_no = 0;
  for (const auto & raw : split(text, '\n')) {
    ++line_no;
    auto line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected `key = value`");
    }
    auto key = trim(std::string_view(line).substr(0, eq));
    auto value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    if (kv.contains(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key `" + key + "`");
    }
    kv.set(key, value);
  }
  return kv;
}

const std::string & KeyValueText::get(const std::string & key) const
{
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ConfigError("missing key `" + key + "`");
  }
  return it->second;
}

double KeyValueText::get_double(const std::string & key) const { return parse_double(key, get(key)); }

long long KeyValueText::get_int(const std::string & key) const { return parse_int(key, get(key)); }

bool KeyValueText::get_bool(const std::string & key) const { return parse_bool(key, get(key)); }

std::string KeyValueText::serialize() const
{
  std::string out;
  for (const auto & [k, v] : entries_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value)
{
  const std::string s(value);
  char * end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw ConfigError("`" + std::string(key) + "`: not a number: `" + s + "`");
  }
  return v;
}

long long parse_int(std::string_view key, std::string_view value)
{
  long long v = 0;
  const auto * first = value.data();
  const auto * last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (value.empty() || ec != std::errc{} || ptr != last) {
    throw ConfigError("`" + std::string(key) + "`: not an integer: `" + std::string(value) + "`");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view value)
{
  if (value == "true" || value == "1" || value == "yes" || value == "on") {
    return true;
  }
  if (value == "false" || value == "0" || value == "no" || value == "off") {
    return false;
  }
  throw ConfigError("`" + std::string(key) + "`: not a boolean: `" + std::string(value) + "`");
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed)
{
  std::uint64_t h = seed;
  for (const char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v)
{
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace emvc
