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

#ifndef SPECSHARE_FRONTIER_HPP
#define SPECSHARE_FRONTIER_HPP

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "specshare/config.hpp"
#include "specshare/fading.hpp"
#include "specshare/pu_policy.hpp"
#include "specshare/solver.hpp"

namespace specshare {

enum class ConstraintKind { kAipc, kPclc, kAipcLowerBound };

ConstraintKind constraint_kind_from_string(const std::string& s);
std::string to_string(ConstraintKind k);

// One point of the primary/secondary ergodic-capacity frontier. For the
// lower-bound curve c_p is defined, not measured: c_p_max - log(1 + Gamma).
struct FrontierPoint {
  ConstraintKind kind = ConstraintKind::kAipc;
  double level = 0.0;  // Gamma or C_delta
  double c_p = 0.0;
  double c_s = 0.0;
  bool converged = false;
  double residual = 0.0;  // solver kkt residual
};

struct SweepConfig {
  ChannelDistribution dist;
  std::size_t n = 100000;
  std::uint64_t seed = 1;
  PuPolicyKind pu_kind = PuPolicyKind::kConstantPower;
  double pu_budget = 10.0;
  double pu_calib_tol = 1e-8;
  double su_budget = 10.0;
  ConstraintKind kind = ConstraintKind::kAipc;
  std::vector<double> levels;          // strictly increasing
  bool levels_as_loss_fraction = false;  // pclc: level = fraction of c_p_max
  SolverOptions solver = sweep_solver_defaults();

  // Sweeps default to the bisection finisher alone; the subgradient warm
  // phase costs one root find per state per iteration and does not change
  // the certified result.
  static SolverOptions sweep_solver_defaults() {
    SolverOptions o;
    o.method = DualMethod::kBisection;
    return o;
  }
};

// Builds the ensemble, applies the primary policy, then solves one point per
// level on that single shared ensemble. Non-convergence at a level flags the
// point and the sweep continues.
std::vector<FrontierPoint> trace_frontier(const SweepConfig& cfg);

// Same, on an already prepared ensemble (q populated); used to lay several
// curves over one set of fading draws.
std::vector<FrontierPoint> trace_frontier(const FadingEnsemble& ens,
                                          const SweepConfig& cfg);

// Relative secondary-capacity gain of curve a over curve b where both curves
// cross c_p = (1 - loss_fraction) * c_p_max (monotone piecewise-linear
// interpolation in c_p). Throws ParameterError when the target lies outside
// either curve's span.
double compare_at_loss(std::span<const FrontierPoint> a,
                       std::span<const FrontierPoint> b, double loss_fraction,
                       double c_p_max);

// CSV with header kind,level,c_p,c_s,converged,residuals; 12 significant
// digits, '.' decimal separator. Bit-identical for identical configs.
void write_frontier_csv(std::span<const FrontierPoint> points,
                        std::ostream& out);
void write_frontier_csv(std::span<const FrontierPoint> points,
                        const std::filesystem::path& path);

// Run-metadata record next to the CSV: seed, n, config hash, version.
void write_run_metadata(const Config& cfg, const std::filesystem::path& path);

// Per-state solution dump shared by the aipc and pclc commands: a '#'
// summary header (duals, capacities, residuals) followed by
// "index p g*p" rows.
void write_solution_dump(const FadingEnsemble& ens, const PolicySolution& sol,
                         std::ostream& out);

// SweepConfig from the flat config keys (dist.*, mc.*, pu.*, su.*,
// frontier.*, solver.*).
SweepConfig sweep_from_config(const Config& cfg);
SolverOptions solver_from_config(const Config& cfg);

}  // namespace specshare

#endif  // SPECSHARE_FRONTIER_HPP
