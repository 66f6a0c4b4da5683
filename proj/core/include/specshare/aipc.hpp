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

#ifndef SPECSHARE_AIPC_HPP
#define SPECSHARE_AIPC_HPP

#include <limits>

#include "specshare/errors.hpp"
#include "specshare/fading.hpp"
#include "specshare/solver.hpp"

namespace specshare {

// Maximize the secondary ergodic capacity subject to the average interference
// power at the primary receiver, mean(g p) <= gamma, and the secondary power
// budget mean(p) <= power_budget. gamma may be infinity (the interference
// constraint drops and the solution is plain water-filling).
struct AipcProblem {
  double gamma = std::numeric_limits<double>::infinity();
  double power_budget = 1.0;

  void validate() const {
    if (!(gamma >= 0))
      throw ParameterError("aipc: gamma must be nonnegative (or inf)");
    if (!(power_budget > 0) || !std::isfinite(power_budget))
      throw ParameterError("aipc: power budget must be positive and finite");
  }
};

// The optimal per-state power: water-filling with a water level 1/(nu g + mu)
// that falls with the interference gain g.
inline double aipc_power(const FadingState& s, const DualPair& d) {
  if (s.h <= 0.0) return 0.0;
  const double denom = d.nu * s.g + d.mu;
  if (!(denom > 0.0))
    throw UnboundedError(
        "aipc_power: nu*g + mu must be positive, otherwise the per-state "
        "power is unbounded");
  const double p = 1.0 / denom - 1.0 / s.h;
  return p > 0.0 ? p : 0.0;
}

PolicySolution solve_aipc(const FadingEnsemble& ens, const AipcProblem& prob,
                          const SolverOptions& opts = {});

}  // namespace specshare

#endif  // SPECSHARE_AIPC_HPP
