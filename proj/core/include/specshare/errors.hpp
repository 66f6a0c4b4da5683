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

#ifndef SPECSHARE_ERRORS_HPP
#define SPECSHARE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace specshare {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument values (negative variances, mismatched vector lengths, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Operation invoked on an object in the wrong state (e.g. effective gains
// requested before the primary-user powers were populated).
class StateError : public Error {
 public:
  using Error::Error;
};

// The problem instance admits no solution (e.g. water-filling over a dead
// channel ensemble).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// The requested quantity grows without bound (e.g. a water level with both
// multipliers zero).
class UnboundedError : public Error {
 public:
  using Error::Error;
};

// An internal invariant failed; indicates corrupted inputs or a bug.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace specshare

#endif  // SPECSHARE_ERRORS_HPP
