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

#include "specshare/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "specshare/aipc.hpp"
#include "specshare/capacity.hpp"
#include "specshare/errors.hpp"
#include "specshare/pclc.hpp"
#include "specshare/version.hpp"

namespace specshare {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

ConstraintKind constraint_kind_from_string(const std::string& s) {
  if (s == "aipc") return ConstraintKind::kAipc;
  if (s == "pclc") return ConstraintKind::kPclc;
  if (s == "aipc-lower-bound" || s == "aipc_lower_bound")
    return ConstraintKind::kAipcLowerBound;
  throw ParameterError("unknown constraint kind '" + s + "'");
}

std::string to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::kAipc:
      return "aipc";
    case ConstraintKind::kPclc:
      return "pclc";
    case ConstraintKind::kAipcLowerBound:
      return "aipc-lower-bound";
  }
  return "?";
}

std::vector<FrontierPoint> trace_frontier(const SweepConfig& cfg) {
  FadingEnsemble ens = sample_ensemble(cfg.dist, cfg.n, cfg.seed);
  const PuPolicy policy = cfg.pu_kind == PuPolicyKind::kConstantPower
                              ? make_cp_policy(cfg.pu_budget)
                              : make_wf_policy(ens, cfg.pu_budget,
                                               cfg.pu_calib_tol);
  apply_pu_policy(ens, policy);
  return trace_frontier(ens, cfg);
}

std::vector<FrontierPoint> trace_frontier(const FadingEnsemble& ens,
                                          const SweepConfig& cfg) {
  if (cfg.levels.empty()) throw ParameterError("sweep has no levels");
  for (std::size_t i = 1; i < cfg.levels.size(); ++i)
    if (!(cfg.levels[i] > cfg.levels[i - 1]))
      throw ParameterError("sweep levels must be strictly increasing");

  const double c_p_max = primary_capacity_max(ens);
  std::vector<FrontierPoint> points;
  points.reserve(cfg.levels.size());

  for (const double level : cfg.levels) {
    FrontierPoint pt;
    pt.kind = cfg.kind;
    pt.level = level;
    switch (cfg.kind) {
      case ConstraintKind::kAipc:
      case ConstraintKind::kAipcLowerBound: {
        const AipcProblem prob{level, cfg.su_budget};
        const PolicySolution sol = solve_aipc(ens, prob, cfg.solver);
        pt.c_s = sol.c_s;
        pt.c_p = cfg.kind == ConstraintKind::kAipc
                     ? sol.c_p
                     : c_p_max - std::log1p(level);
        pt.converged = sol.converged;
        pt.residual = sol.kkt_residual;
        break;
      }
      case ConstraintKind::kPclc: {
        const double c_delta =
            cfg.levels_as_loss_fraction ? level * c_p_max : level;
        const PclcProblem prob =
            make_pclc_problem(ens, c_delta, cfg.su_budget);
        const PolicySolution sol = solve_pclc(ens, prob, cfg.solver);
        pt.c_s = sol.c_s;
        pt.c_p = sol.c_p;
        pt.converged = sol.converged;
        pt.residual = sol.kkt_residual;
        break;
      }
    }
    points.push_back(pt);
  }
  return points;
}

namespace {

// c_s at the target c_p by piecewise-linear interpolation along the curve
// sorted by c_p.
double interpolate_cs(std::span<const FrontierPoint> curve, double target) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(curve.size());
  for (const FrontierPoint& p : curve) pts.emplace_back(p.c_p, p.c_s);
  std::sort(pts.begin(), pts.end());
  if (pts.empty() || target < pts.front().first - 1e-12 ||
      target > pts.back().first + 1e-12)
    throw ParameterError(
        "compare_at_loss: target primary capacity outside the curve's span");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (std::fabs(pts[i].first - target) <= 1e-12) return pts[i].second;
    if (pts[i].first > target) {
      const auto& [x0, y0] = pts[i - 1];
      const auto& [x1, y1] = pts[i];
      const double t = (target - x0) / (x1 - x0);
      return y0 + t * (y1 - y0);
    }
  }
  return pts.back().second;
}

}  // namespace

double compare_at_loss(std::span<const FrontierPoint> a,
                       std::span<const FrontierPoint> b, double loss_fraction,
                       double c_p_max) {
  if (!(loss_fraction >= 0.0) || !(loss_fraction <= 1.0))
    throw ParameterError("loss fraction must lie in [0, 1]");
  const double target = (1.0 - loss_fraction) * c_p_max;
  const double cs_a = interpolate_cs(a, target);
  const double cs_b = interpolate_cs(b, target);
  if (cs_b == 0.0)
    throw ParameterError("compare_at_loss: reference capacity is zero");
  return (cs_a - cs_b) / cs_b;
}

void write_frontier_csv(std::span<const FrontierPoint> points,
                        std::ostream& out) {
  out << "kind,level,c_p,c_s,converged,residuals\n";
  for (const FrontierPoint& p : points) {
    out << to_string(p.kind) << ',' << fmt(p.level) << ',' << fmt(p.c_p) << ','
        << fmt(p.c_s) << ',' << (p.converged ? 1 : 0) << ',' << fmt(p.residual)
        << '\n';
  }
}

void write_frontier_csv(std::span<const FrontierPoint> points,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // fixed newlines everywhere
  if (!out) throw ParameterError("cannot open " + path.string() + " for write");
  write_frontier_csv(points, out);
  if (!out) throw ParameterError("write failed for " + path.string());
}

void write_run_metadata(const Config& cfg, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot open " + path.string() + " for write");
  char buf[64];
  out << "version=" << kVersion << '\n';
  out << "seed=" << cfg.get_u64("mc.seed", 1) << '\n';
  out << "n=" << cfg.get_u64("mc.n", 100000) << '\n';
  std::snprintf(buf, sizeof buf, "config_hash=%016llx\n",
                static_cast<unsigned long long>(cfg.hash()));
  out << buf;
}

void write_solution_dump(const FadingEnsemble& ens, const PolicySolution& sol,
                         std::ostream& out) {
  out << "# nu=" << fmt(sol.duals.nu) << " mu=" << fmt(sol.duals.mu) << '\n';
  out << "# c_p=" << fmt(sol.c_p) << " c_s=" << fmt(sol.c_s) << '\n';
  out << "# mean_p=" << fmt(sol.achieved_power)
      << " mean_gp=" << fmt(sol.achieved_interference) << '\n';
  out << "# kkt_residual=" << fmt(sol.kkt_residual)
      << " converged=" << (sol.converged ? 1 : 0)
      << " iterations=" << sol.iterations << '\n';
  out << "# index p gp\n";
  char buf[96];
  for (std::size_t i = 0; i < sol.p.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu %.12g %.12g\n", i, sol.p[i],
                  ens.states[i].g * sol.p[i]);
    out << buf;
  }
}

SolverOptions solver_from_config(const Config& cfg) {
  SolverOptions o = SweepConfig::sweep_solver_defaults();
  const std::string method = cfg.get_str("solver.method", "bisection");
  if (method == "subgradient")
    o.method = DualMethod::kSubgradient;
  else if (method == "bisection")
    o.method = DualMethod::kBisection;
  else
    throw ParameterError("solver.method must be subgradient or bisection");
  o.max_iters = static_cast<int>(cfg.get_u64("solver.max_iters", 5000));
  o.tol = cfg.get_double("solver.tol", 1e-6);
  o.root_tol = cfg.get_double("solver.root_tol", 1e-10);
  return o;
}

SweepConfig sweep_from_config(const Config& cfg) {
  SweepConfig sc;
  sc.dist.var_f = cfg.get_double("dist.var_f", 1.0);
  sc.dist.var_e = cfg.get_double("dist.var_e", 1.0);
  sc.dist.var_g = cfg.get_double("dist.var_g", 0.5);
  sc.dist.var_o = cfg.get_double("dist.var_o", 0.01);
  sc.n = cfg.get_u64("mc.n", 100000);
  sc.seed = cfg.get_u64("mc.seed", 1);
  const std::string pu = cfg.get_str("pu.policy", "cp");
  if (pu == "cp")
    sc.pu_kind = PuPolicyKind::kConstantPower;
  else if (pu == "wf")
    sc.pu_kind = PuPolicyKind::kWaterFilling;
  else
    throw ParameterError("pu.policy must be cp or wf");
  sc.pu_budget = cfg.get_double("pu.budget", 10.0);
  sc.pu_calib_tol = cfg.get_double("pu.calib_tol", 1e-8);
  sc.su_budget = cfg.get_double("su.budget", 10.0);
  sc.kind = constraint_kind_from_string(cfg.get_str("frontier.kind", "aipc"));
  if (cfg.has("frontier.levels"))
    sc.levels = parse_levels(cfg.get_str("frontier.levels", ""));
  sc.levels_as_loss_fraction = cfg.get_bool("frontier.levels_as_fraction",
                                            false);
  sc.solver = solver_from_config(cfg);
  return sc;
}

}  // namespace specshare
