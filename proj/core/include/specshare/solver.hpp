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

#ifndef SPECSHARE_SOLVER_HPP
#define SPECSHARE_SOLVER_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace specshare {

// Nonnegative Lagrange multipliers shared by both power-control solvers:
// nu prices the protection constraint (interference power or capacity loss),
// mu prices the secondary transmit-power budget.
struct DualPair {
  double nu = 0.0;
  double mu = 0.0;
};

// How the dual variables are searched. Both paths end in the same bisection
// finisher that certifies feasibility and complementary slackness; the
// subgradient phase (Polyak-style steps on the dual) is the default and acts
// as a warm start, "bisection" skips straight to the finisher.
enum class DualMethod { kSubgradient, kBisection };

struct SolverOptions {
  DualMethod method = DualMethod::kSubgradient;
  int max_iters = 5000;     // subgradient iteration cap
  double tol = 1e-6;        // dual tolerance on constraint residuals
  double root_tol = 1e-10;  // per-state fixed-point residual (pclc)
  int max_root_iters = 200;
  bool polish = true;  // run the certifying finisher after the subgradient
};

// A solved power-control policy on one ensemble, with its optimality
// certificate. kkt_residual is the max over stationarity, primal feasibility
// and complementary-slackness residuals; converged means it is within tol.
struct PolicySolution {
  std::vector<double> p;
  DualPair duals;
  double achieved_interference = 0.0;  // mean g p
  double achieved_power = 0.0;         // mean p
  double c_s = 0.0;
  double c_p = 0.0;
  int iterations = 0;  // dual evaluations (subgradient steps + finisher)
  bool converged = false;

  double kkt_residual = std::numeric_limits<double>::quiet_NaN();
  double duality_gap = std::numeric_limits<double>::quiet_NaN();
  // pclc diagnostics from the certification pass
  double max_fixed_point_residual = 0.0;
  std::uint64_t fixed_point_checks = 0;
  int multi_root_states = 0;
  int tie_repaired_state = -1;  // index of a pinned tie state, -1 if none
  std::string diagnostic;
};

namespace num {

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iters = 0;
  bool converged = false;  // |fx| <= ftol
};

// Root of a continuous f on a bracket [lo, hi] with f(lo) and f(hi) of
// opposite sign (zero endpoints accepted). Bisection with a secant step when
// it stays safely inside the bracket; stops once |f| <= ftol, keeps the
// bracket shrinking regardless. Returns the best point seen.
template <class F>
RootResult find_root(F&& f, double lo, double hi, double flo, double fhi,
                     double ftol, int max_iters = 240) {
  RootResult best;
  best.x = std::fabs(flo) <= std::fabs(fhi) ? lo : hi;
  best.fx = std::fabs(flo) <= std::fabs(fhi) ? flo : fhi;
  if (std::fabs(best.fx) <= ftol) {
    best.converged = true;
    return best;
  }

  double a = lo, fa = flo, b = hi, fb = fhi;
  double prev_x = a, prev_f = fa;
  for (int k = 0; k < max_iters; ++k) {
    double x = 0.5 * (a + b);
    // Secant through the two most recent points, accepted when interior.
    const double denom = fb - prev_f;
    if (denom != 0.0) {
      const double xs = b - fb * (b - prev_x) / denom;
      const double width = b - a;
      if (xs > a + 0.01 * width && xs < b - 0.01 * width) x = xs;
    }
    if (!(x > a && x < b)) x = 0.5 * (a + b);
    const double fx = f(x);
    ++best.iters;
    if (std::fabs(fx) < std::fabs(best.fx)) {
      best.x = x;
      best.fx = fx;
    }
    if (std::fabs(fx) <= ftol) {
      best.converged = true;
      return best;
    }
    prev_x = b;
    prev_f = fb;
    if ((fx < 0.0) == (fb < 0.0)) {
      b = x;
      fb = fx;
    } else {
      a = x;
      fa = fx;
    }
    if (!(b - a > 0.0) ||
        (b - a) <= 4.0 * std::numeric_limits<double>::epsilon() *
                       (std::fabs(a) + std::fabs(b) + 1e-300))
      break;
  }
  (void)fa;
  return best;
}

}  // namespace num
}  // namespace specshare

#endif  // SPECSHARE_SOLVER_HPP
