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

#include "specshare/pu_policy.hpp"

#include <algorithm>
#include <cmath>

#include "specshare/errors.hpp"
#include "specshare/runtime.hpp"

namespace specshare {
namespace {

double allocated_mean(const FadingEnsemble& ens, double level) {
  return detail::blocked_mean(ens.size(), [&](std::size_t i) {
    const FadingState& s = ens.states[i];
    if (s.f <= 0.0) return 0.0;
    const double p = level - 1.0 / s.f;
    return p > 0.0 ? p : 0.0;
  });
}

}  // namespace

double calibrate_water_level(const FadingEnsemble& ens, double budget,
                             double tol) {
  if (ens.size() < 1) throw ParameterError("ensemble must be nonempty");
  if (!(budget > 0)) throw ParameterError("power budget must be positive");
  if (!(tol > 0)) throw ParameterError("calibration tolerance must be positive");

  double max_inv_f = 0.0;
  bool any_active = false;
  for (const FadingState& s : ens.states) {
    if (s.f > 0.0) {
      any_active = true;
      max_inv_f = std::max(max_inv_f, 1.0 / s.f);
    }
  }
  if (!any_active)
    throw InfeasibleError(
        "water-filling infeasible: every state has zero primary gain");

  double lo = 0.0;
  double hi = budget + max_inv_f;
  // With dead states present the textbook upper bracket can fall short of the
  // budget; widen until it does not.
  while (allocated_mean(ens, hi) < budget) hi *= 2.0;

  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double mean = allocated_mean(ens, mid);
    if (std::fabs(mean - budget) <= tol) return mid;
    (mean < budget ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PuPolicy make_cp_policy(double budget) {
  if (!(budget > 0)) throw ParameterError("power budget must be positive");
  return {PuPolicyKind::kConstantPower, budget, 0.0};
}

PuPolicy make_wf_policy(const FadingEnsemble& ens, double budget, double tol) {
  return {PuPolicyKind::kWaterFilling, budget,
          calibrate_water_level(ens, budget, tol)};
}

FadingEnsemble& apply_pu_policy(FadingEnsemble& ens, const PuPolicy& policy) {
  if (!(policy.budget > 0)) throw ParameterError("power budget must be positive");
  if (policy.kind == PuPolicyKind::kWaterFilling && !(policy.water_level >= 0))
    throw ParameterError("water level must be calibrated before applying");

  detail::parallel_for(ens.size(), [&](std::size_t i) {
    FadingState& s = ens.states[i];
    if (policy.kind == PuPolicyKind::kConstantPower) {
      s.q = policy.budget;
    } else if (s.f > 0.0) {
      const double p = policy.water_level - 1.0 / s.f;
      s.q = p > 0.0 ? p : 0.0;
    } else {
      s.q = 0.0;
    }
  });
  ens.q_populated = true;
  return populate_effective_gains(ens);
}

}  // namespace specshare
