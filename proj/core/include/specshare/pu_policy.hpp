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

#ifndef SPECSHARE_PU_POLICY_HPP
#define SPECSHARE_PU_POLICY_HPP

#include "specshare/fading.hpp"

namespace specshare {

// The primary user either transmits at constant power Q in every state or
// water-fills its own channel: q = (d_p - 1/f)^+ with the level d_p chosen so
// the sample-mean power equals the budget.
enum class PuPolicyKind { kConstantPower, kWaterFilling };

struct PuPolicy {
  PuPolicyKind kind = PuPolicyKind::kConstantPower;
  double budget = 1.0;       // Q, average transmit power
  double water_level = 0.0;  // d_p, meaningful for water-filling only
};

// Finds d_p with |mean((d_p - 1/f)^+) - budget| <= tol by bisection; the
// allocated mean is continuous and nondecreasing in d_p. Calibration is
// against the sample ensemble, not the analytic fading integral, so that the
// same expectation operator is used everywhere downstream.
// Throws InfeasibleError when every f is zero.
double calibrate_water_level(const FadingEnsemble& ens, double budget,
                             double tol = 1e-8);

PuPolicy make_cp_policy(double budget);
PuPolicy make_wf_policy(const FadingEnsemble& ens, double budget,
                        double tol = 1e-8);

// Populates q in every state (constant or water-filled) and refreshes the
// effective secondary gains h.
FadingEnsemble& apply_pu_policy(FadingEnsemble& ens, const PuPolicy& policy);

}  // namespace specshare

#endif  // SPECSHARE_PU_POLICY_HPP
