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

#ifndef SPECSHARE_PCLC_HPP
#define SPECSHARE_PCLC_HPP

#include <cmath>
#include <cstdint>

#include "specshare/errors.hpp"
#include "specshare/fading.hpp"
#include "specshare/solver.hpp"

namespace specshare {

// Maximize the secondary ergodic capacity subject to a cap on the primary
// ergodic-capacity loss: C_p >= C_0 with C_0 = max(0, c_p_max - c_delta),
// plus the secondary power budget. c_p_max is computed once per
// (ensemble, primary policy) pair and pinned to the ensemble by fingerprint.
struct PclcProblem {
  double c_delta = 0.0;
  double power_budget = 1.0;
  double c_p_max = 0.0;
  double c0 = 0.0;
  std::uint64_t ensemble_fingerprint = 0;
};

PclcProblem make_pclc_problem(const FadingEnsemble& ens, double c_delta,
                              double power_budget);

// The self-bias factor lambda(p) = f q / ((1+g p)(1+g p+f q)): the marginal
// primary-capacity loss per unit interference power in this state. It decays
// from f q/(1+f q) at p = 0 toward zero, which is what lets the secondary
// ramp up power where the primary is weak.
struct SelfBiasTerm {
  double value = 0.0;
};

inline SelfBiasTerm lambda_factor(const FadingState& s, double p) {
  const double a = s.f * s.q;
  if (!(a > 0.0)) return {0.0};
  const double u = 1.0 + s.g * p;
  return {a / (u * (u + a))};
}

namespace detail {

// G(z) = F(z) - z - 1/h with F(z) = 1/(lambda(z) nu g + mu). The optimal
// positive power is a root of G; F increases from F(0) to 1/mu, so a root
// bracketed by [0, 1/mu] exists whenever the activation test F(0) > 1/h
// passes.
inline double pclc_g(const FadingState& s, const DualPair& d, double z) {
  const double lam = lambda_factor(s, z).value;
  return 1.0 / (lam * d.nu * s.g + d.mu) - z - 1.0 / s.h;
}

// Per-state Lagrangian value at power p (the non-concavity guard compares
// this at the bracketed root against p = 0).
inline double pclc_phi(const FadingState& s, const DualPair& d, double p) {
  const double a = s.f * s.q;
  return std::log1p(s.h * p) + d.nu * std::log1p(a / (1.0 + s.g * p)) -
         d.mu * p;
}

}  // namespace detail

struct PclcPowerResult {
  double p = 0.0;
  double residual = 0.0;     // |G(p)| when p > 0
  int roots_in_bracket = 0;  // sign changes of G on [0, 1/mu]
  bool guard_chose_zero = false;  // activation passed but p = 0 won anyway
};

// Per-state optimal power at the given multipliers. Clearing denominators
// turns G into a cubic in p, so its critical points split [0, 1/mu] into
// monotone pieces; every sign change is bracketed there and polished by
// bisection with Newton acceleration to |G| <= root_tol. The returned power
// is the Lagrangian argmax over p = 0 and all roots: the typical unique-root
// case reduces to the activation test plus one bisection, and multi-root
// brackets are covered too and reported, never silently resolved.
// Requires mu > 0: the bracket is unbounded otherwise.
PclcPowerResult pclc_power(const FadingState& s, const DualPair& d,
                           double root_tol = 1e-10, int max_iters = 200);

PolicySolution solve_pclc(const FadingEnsemble& ens, const PclcProblem& prob,
                          const SolverOptions& opts = {});

}  // namespace specshare

#endif  // SPECSHARE_PCLC_HPP
