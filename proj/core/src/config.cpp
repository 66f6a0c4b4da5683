// Copyright 2026 The specshare Authors
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

#include "specshare/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>

#include "specshare/errors.hpp"

namespace specshare {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0')
    throw ParameterError("config key '" + key + "': bad number '" + value +
                         "'");
  return v;
}

}  // namespace

Config Config::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file " + path.string());
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ParameterError("config line " + std::to_string(lineno) +
                           ": expected key=value, got '" + stripped + "'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw ParameterError("config line " + std::to_string(lineno) +
                           ": empty key");
    cfg.kv_[key] = value;
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get_str(const std::string& key,
                            const std::string& fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : parse_double(key, it->second);
}

std::uint64_t Config::get_u64(const std::string& key,
                              std::uint64_t fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0')
    throw ParameterError("config key '" + key + "': bad integer '" +
                         it->second + "'");
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ParameterError("config key '" + key + "': bad boolean '" + v + "'");
}

double Config::get_threshold(const std::string& key, double fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  if (it->second == "inf" || it->second == "infinity")
    return std::numeric_limits<double>::infinity();
  return parse_double(key, it->second);
}

std::uint64_t Config::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [k, v] : kv_) {  // std::map iterates in sorted key order
    mix(k);
    mix("=");
    mix(v);
    mix("\n");
  }
  return h;
}

std::vector<double> parse_levels(const std::string& text) {
  std::vector<double> levels;
  const auto c1 = text.find(':');
  if (c1 != std::string::npos) {
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos)
      throw ParameterError("levels range must be start:step:stop, got '" +
                           text + "'");
    const double start = parse_double("levels", text.substr(0, c1));
    const double step = parse_double("levels", text.substr(c1 + 1, c2 - c1 - 1));
    const double stop = parse_double("levels", text.substr(c2 + 1));
    if (!(step > 0)) throw ParameterError("levels step must be positive");
    // Inclusive endpoint with a half-step guard against rounding; the grid is
    // generated by multiplication so levels stay reproducible.
    for (long i = 0;; ++i) {
      const double x = start + static_cast<double>(i) * step;
      if (x > stop + 0.5 * step) break;
      levels.push_back(std::min(x, stop));
    }
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto comma = text.find(',', pos);
      const std::string tok =
          text.substr(pos, comma == std::string::npos ? std::string::npos
                                                      : comma - pos);
      if (!trim(tok).empty())
        levels.push_back(parse_double("levels", trim(tok)));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (levels.empty()) throw ParameterError("levels list is empty");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (!(levels[i] > levels[i - 1]))
      throw ParameterError("levels must be strictly increasing");
  return levels;
}

}  // namespace specshare
