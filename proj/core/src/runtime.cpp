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

#include "specshare/runtime.hpp"

#include <cstdlib>
#include <string>

namespace specshare {
namespace {

std::size_t default_threads() {
  if (const char* env = std::getenv("SPECSHARE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::size_t& thread_override() {
  static std::size_t n = 0;
  return n;
}

}  // namespace

std::size_t max_threads() {
  const std::size_t n = thread_override();
  return n > 0 ? n : default_threads();
}

void set_max_threads(std::size_t n) { thread_override() = n; }

}  // namespace specshare
