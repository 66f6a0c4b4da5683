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

#ifndef SPECSHARE_ORACLE_HPP
#define SPECSHARE_ORACLE_HPP

#include <filesystem>
#include <span>
#include <vector>

#include "specshare/aipc.hpp"
#include "specshare/fading.hpp"
#include "specshare/pclc.hpp"

namespace specshare {

// Brute-force reference solvers on tiny finite-support distributions. They
// know nothing about duals: feasibility is checked directly on every grid
// point, so they certify the closed-form solvers from the outside.

struct DiscreteEnsemble {
  std::vector<FadingState> states;  // at most 8 entries
  std::vector<double> weights;      // nonnegative, sum 1 within 1e-12

  void validate() const;
};

double discrete_mean_power(const DiscreteEnsemble& ens,
                           std::span<const double> p);
double discrete_interference(const DiscreteEnsemble& ens,
                             std::span<const double> p);
double discrete_primary_capacity(const DiscreteEnsemble& ens,
                                 std::span<const double> p);
double discrete_primary_capacity_max(const DiscreteEnsemble& ens);
double discrete_secondary_capacity(const DiscreteEnsemble& ens,
                                   std::span<const double> p);

// PclcProblem for a discrete distribution (weighted c_p_max; no ensemble
// fingerprint, the oracle does not check one).
PclcProblem make_pclc_problem(const DiscreteEnsemble& ens, double c_delta,
                              double power_budget);

// Uniform-weight view of a discrete ensemble, for feeding the production
// solvers in cross-checks. Throws unless weights are uniform within 1e-12.
FadingEnsemble to_fading_ensemble(const DiscreteEnsemble& ens);

struct GridSpec {
  int points = 28;          // grid values per axis and pass
  int zoom_passes = 8;      // re-grids around the incumbent
  std::size_t cell_budget = 200'000'000;  // objective evaluations allowed
};

struct OracleResult {
  double objective = 0.0;
  std::vector<double> p;
};

// Maximize sum w log(1 + h p) s.t. sum w g p <= gamma, sum w p <= budget.
// Direct primal grid with zooming for <= 4 states; a dense dual grid with
// feasibility-projected reconstruction otherwise.
OracleResult brute_force_p1(const DiscreteEnsemble& ens,
                            const AipcProblem& prob, const GridSpec& grid = {});

// Maximize sum w log(1 + h p) s.t. sum w log(1 + f q/(1+g p)) >= c0,
// sum w p <= budget. Primal grid only; at most 4 states.
OracleResult brute_force_p2(const DiscreteEnsemble& ens,
                            const PclcProblem& prob, const GridSpec& grid = {});

// Text loader for desk-scale instances: one "weight f e g o q" row per state,
// '#' comments allowed; h is derived as e/(1+o q).
DiscreteEnsemble load_discrete_ensemble(const std::filesystem::path& path);

}  // namespace specshare

#endif  // SPECSHARE_ORACLE_HPP
