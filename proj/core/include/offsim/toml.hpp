/* Copyright 2026 The Offsim Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace offsim::toml {

// Minimal TOML-subset reader for the profile and preset files: comments,
// [section] headers, and `key = value` lines where a value is a number, a
// quoted string, or a (possibly nested) array of numbers. Enough for
// hand-edited calibration data; not a general TOML implementation.

struct Value {
  enum class Kind { Number, String, Array } kind = Kind::Number;
  double number = 0.0;
  std::string string;
  std::vector<Value> array;

  bool is_number() const { return kind == Kind::Number; }
  bool is_string() const { return kind == Kind::String; }
  bool is_array() const { return kind == Kind::Array; }
};

struct Table {
  // section -> key -> value; top-level keys live under the "" section
  std::map<std::string, std::map<std::string, Value>> sections;

  bool has(const std::string& section, const std::string& key) const;
  const Value& get(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key, double fallback) const;
  std::string string(const std::string& section, const std::string& key) const;
  // Array of [x, y] pairs.
  std::vector<std::pair<std::int64_t, double>> pairs(const std::string& section,
                                                     const std::string& key) const;
};

Table parse(const std::string& text, const std::string& origin = "<string>");
Table parse_file(const std::string& path);

}  // namespace offsim::toml
