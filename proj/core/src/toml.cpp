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

#include "offsim/toml.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "offsim/errors.hpp"

namespace offsim::toml {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

void skip_ws(const std::string& s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

Value parse_value(const std::string& s, std::size_t& i, const std::string& origin, int line);

Value parse_array(const std::string& s, std::size_t& i, const std::string& origin, int line) {
  Value v;
  v.kind = Value::Kind::Array;
  ++i;  // consume '['
  skip_ws(s, i);
  while (i < s.size() && s[i] != ']') {
    v.array.push_back(parse_value(s, i, origin, line));
    skip_ws(s, i);
    if (i < s.size() && s[i] == ',') {
      ++i;
      skip_ws(s, i);
    }
  }
  if (i >= s.size() || s[i] != ']') fail(origin, line, "unterminated array");
  ++i;
  return v;
}

Value parse_value(const std::string& s, std::size_t& i, const std::string& origin, int line) {
  skip_ws(s, i);
  if (i >= s.size()) fail(origin, line, "missing value");
  if (s[i] == '[') return parse_array(s, i, origin, line);
  Value v;
  if (s[i] == '"') {
    v.kind = Value::Kind::String;
    ++i;
    while (i < s.size() && s[i] != '"') v.string.push_back(s[i++]);
    if (i >= s.size()) fail(origin, line, "unterminated string");
    ++i;
    return v;
  }
  std::size_t start = i;
  while (i < s.size() && s[i] != ',' && s[i] != ']' && s[i] != '#' && s[i] != ' ' &&
         s[i] != '\t') {
    ++i;
  }
  const std::string token = s.substr(start, i - start);
  if (token == "true" || token == "false") {
    v.number = token == "true" ? 1.0 : 0.0;
    return v;
  }
  char* end = nullptr;
  v.number = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') fail(origin, line, "bad number '" + token + "'");
  return v;
}

}  // namespace

bool Table::has(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  return s != sections.end() && s->second.count(key) > 0;
}

const Value& Table::get(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  if (s == sections.end() || s->second.count(key) == 0) {
    throw ConfigError("missing key '" + key + "' in section [" + section + "]");
  }
  return s->second.at(key);
}

double Table::number(const std::string& section, const std::string& key) const {
  const Value& v = get(section, key);
  if (!v.is_number()) throw ConfigError("key '" + key + "' is not a number");
  return v.number;
}

double Table::number_or(const std::string& section, const std::string& key,
                        double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

std::string Table::string(const std::string& section, const std::string& key) const {
  const Value& v = get(section, key);
  if (!v.is_string()) throw ConfigError("key '" + key + "' is not a string");
  return v.string;
}

std::vector<std::pair<std::int64_t, double>> Table::pairs(const std::string& section,
                                                          const std::string& key) const {
  const Value& v = get(section, key);
  if (!v.is_array()) throw ConfigError("key '" + key + "' is not an array");
  std::vector<std::pair<std::int64_t, double>> out;
  for (const Value& row : v.array) {
    if (!row.is_array() || row.array.size() != 2 || !row.array[0].is_number() ||
        !row.array[1].is_number()) {
      throw ConfigError("key '" + key + "' must be an array of [x, y] pairs");
    }
    out.emplace_back(static_cast<std::int64_t>(row.array[0].number), row.array[1].number);
  }
  return out;
}

Table parse(const std::string& text, const std::string& origin) {
  Table table;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t i = 0;
    skip_ws(line, i);
    if (i >= line.size() || line[i] == '#') continue;
    if (line[i] == '[') {
      const auto close = line.find(']', i);
      if (close == std::string::npos) fail(origin, lineno, "unterminated section header");
      section = line.substr(i + 1, close - i - 1);
      continue;
    }
    const auto eq = line.find('=', i);
    if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
    std::string key = line.substr(i, eq - i);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    std::size_t vi = eq + 1;
    const Value value = parse_value(line, vi, origin, lineno);
    skip_ws(line, vi);
    if (vi < line.size() && line[vi] != '#') fail(origin, lineno, "trailing characters");
    table.sections[section][key] = value;
  }
  return table;
}

Table parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

}  // namespace offsim::toml
