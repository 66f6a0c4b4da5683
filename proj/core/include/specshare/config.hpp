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

#ifndef SPECSHARE_CONFIG_HPP
#define SPECSHARE_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace specshare {

// Flat key=value run configuration. '#' starts a comment; whitespace around
// keys and values is trimmed. Command-line flags override file values by
// calling set() after from_file().
class Config {
 public:
  Config() = default;

  static Config from_file(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_str(const std::string& key,
                      const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Accepts "inf" / "infinity" for an unbounded threshold.
  double get_threshold(const std::string& key, double fallback) const;

  // FNV-1a over the sorted key=value pairs; stable run identifier.
  std::uint64_t hash() const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

// Level grids in either "start:step:stop" (inclusive) or comma-separated
// form; values must come out strictly increasing.
std::vector<double> parse_levels(const std::string& text);

}  // namespace specshare

#endif  // SPECSHARE_CONFIG_HPP
