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

// Batch driver for the spectrum-sharing power-control library. Subcommands:
//
//   sample      draw a fading ensemble and write it as columnar text
//   solve-aipc  one average-interference-constrained solve, dump + summary
//   solve-pclc  one capacity-loss-constrained solve, dump + summary
//   frontier    sweep constraint levels, write CSV + run metadata
//   mac-bound   fixed-policy multiple-access bounds for a solved policy
//   oracle      brute-force reference solve on a small discrete ensemble
//
// Every command reads a flat key=value config (--config, or the path in
// SPECSHARE_CONFIG), with flags overriding file values.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "specshare/aipc.hpp"
#include "specshare/capacity.hpp"
#include "specshare/config.hpp"
#include "specshare/errors.hpp"
#include "specshare/fading.hpp"
#include "specshare/frontier.hpp"
#include "specshare/oracle.hpp"
#include "specshare/pclc.hpp"
#include "specshare/pu_policy.hpp"
#include "specshare/version.hpp"

namespace {

using namespace specshare;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
};

Config load_config(const CommonArgs& args) {
  Config cfg;
  std::string path = args.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("SPECSHARE_CONFIG")) path = env;
  }
  if (!path.empty()) cfg = Config::from_file(path);
  for (const std::string& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ParameterError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path,
                  "key=value config file (default: $SPECSHARE_CONFIG)");
  cmd->add_option("-s,--set", args.overrides,
                  "override a config key, e.g. --set mc.n=10000");
}

FadingEnsemble prepared_ensemble(const Config& cfg) {
  const SweepConfig sc = sweep_from_config(cfg);
  FadingEnsemble ens = sample_ensemble(sc.dist, sc.n, sc.seed);
  const PuPolicy policy =
      sc.pu_kind == PuPolicyKind::kConstantPower
          ? make_cp_policy(sc.pu_budget)
          : make_wf_policy(ens, sc.pu_budget, sc.pu_calib_tol);
  apply_pu_policy(ens, policy);
  return ens;
}

void print_summary(const PolicySolution& sol) {
  std::printf("nu=%.12g mu=%.12g\n", sol.duals.nu, sol.duals.mu);
  std::printf("c_p=%.12g c_s=%.12g\n", sol.c_p, sol.c_s);
  std::printf("mean_p=%.12g mean_gp=%.12g\n", sol.achieved_power,
              sol.achieved_interference);
  std::printf("kkt_residual=%.3g converged=%d iterations=%d\n",
              sol.kkt_residual, sol.converged ? 1 : 0, sol.iterations);
  if (!sol.diagnostic.empty())
    std::printf("diagnostic=%s\n", sol.diagnostic.c_str());
}

void maybe_dump(const FadingEnsemble& ens, const PolicySolution& sol,
                const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot open " + path + " for write");
  write_solution_dump(ens, sol, out);
}

PolicySolution solve_from_config(const FadingEnsemble& ens, const Config& cfg,
                                 ConstraintKind kind) {
  const SolverOptions opts = solver_from_config(cfg);
  const double su_budget = cfg.get_double("su.budget", 10.0);
  if (kind == ConstraintKind::kPclc) {
    double c_delta;
    if (cfg.has("pclc.c_delta")) {
      c_delta = cfg.get_double("pclc.c_delta", 0.0);
    } else {
      const double fraction = cfg.get_double("pclc.loss_fraction", 0.05);
      c_delta = fraction * primary_capacity_max(ens);
    }
    return solve_pclc(ens, make_pclc_problem(ens, c_delta, su_budget), opts);
  }
  const double gamma = cfg.get_threshold(
      "aipc.gamma", std::numeric_limits<double>::infinity());
  return solve_aipc(ens, AipcProblem{gamma, su_budget}, opts);
}

int cmd_sample(const CommonArgs& args, const std::string& out_path) {
  const Config cfg = load_config(args);
  const SweepConfig sc = sweep_from_config(cfg);
  const FadingEnsemble ens = sample_ensemble(sc.dist, sc.n, sc.seed);
  save_ensemble(ens, std::filesystem::path(out_path));
  std::printf("wrote %zu states to %s\n", ens.size(), out_path.c_str());
  return 0;
}

int cmd_solve(const CommonArgs& args, ConstraintKind kind,
              const std::string& dump_path) {
  const Config cfg = load_config(args);
  const FadingEnsemble ens = prepared_ensemble(cfg);
  const PolicySolution sol = solve_from_config(ens, cfg, kind);
  print_summary(sol);
  maybe_dump(ens, sol, dump_path);
  return sol.converged ? 0 : 3;
}

int cmd_frontier(const CommonArgs& args, const std::string& csv_path,
                 const std::string& meta_path) {
  const Config cfg = load_config(args);
  const SweepConfig sc = sweep_from_config(cfg);
  const auto points = trace_frontier(sc);
  write_frontier_csv(points, std::filesystem::path(csv_path));
  write_run_metadata(cfg, meta_path.empty()
                              ? std::filesystem::path(csv_path + ".meta")
                              : std::filesystem::path(meta_path));
  std::printf("wrote %zu frontier points to %s\n", points.size(),
              csv_path.c_str());
  for (const FrontierPoint& p : points)
    if (!p.converged)
      std::fprintf(stderr, "warning: level %.6g did not converge\n", p.level);
  return 0;
}

int cmd_mac_bound(const CommonArgs& args) {
  const Config cfg = load_config(args);
  const FadingEnsemble ens = prepared_ensemble(cfg);
  const ConstraintKind kind =
      constraint_kind_from_string(cfg.get_str("frontier.kind", "aipc"));
  const PolicySolution sol = solve_from_config(ens, cfg, kind);
  const MacBounds mb = mac_rate_bounds(ens, sol.p);
  std::printf("c_p=%.12g c_s=%.12g\n", sol.c_p, sol.c_s);
  std::printf("pu_bound=%.12g su_bound=%.12g sum_bound=%.12g\n", mb.pu_bound,
              mb.su_bound, mb.sum_bound);
  const bool inside = sol.c_p <= mb.pu_bound && sol.c_s <= mb.su_bound &&
                      sol.c_p + sol.c_s <= mb.sum_bound;
  std::printf("inside_bounds=%d\n", inside ? 1 : 0);
  return inside ? 0 : 3;
}

int cmd_oracle(const CommonArgs& args, const std::string& states_path,
               const std::string& problem) {
  const Config cfg = load_config(args);
  const DiscreteEnsemble ens = load_discrete_ensemble(states_path);
  GridSpec grid;
  grid.points = static_cast<int>(cfg.get_u64("oracle.points", 28));
  grid.zoom_passes = static_cast<int>(cfg.get_u64("oracle.zoom_passes", 6));
  const double budget = cfg.get_double("su.budget", 10.0);

  OracleResult res;
  if (problem == "p1") {
    const double gamma = cfg.get_threshold(
        "aipc.gamma", std::numeric_limits<double>::infinity());
    res = brute_force_p1(ens, AipcProblem{gamma, budget}, grid);
  } else if (problem == "p2") {
    const double c_delta = cfg.get_double("pclc.c_delta", 0.0);
    res = brute_force_p2(ens, make_pclc_problem(ens, c_delta, budget), grid);
  } else {
    throw ParameterError("oracle problem must be p1 or p2");
  }
  std::printf("objective=%.12g\n", res.objective);
  for (std::size_t i = 0; i < res.p.size(); ++i)
    std::printf("p[%zu]=%.12g\n", i, res.p[i]);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectrum-sharing power control and capacity frontiers"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonArgs sample_args, aipc_args, pclc_args, frontier_args, mac_args,
      oracle_args;
  std::string sample_out = "ensemble.txt";
  std::string aipc_dump, pclc_dump;
  std::string frontier_csv = "frontier.csv", frontier_meta;
  std::string oracle_states, oracle_problem = "p1";

  CLI::App* sample = app.add_subcommand("sample", "draw a fading ensemble");
  add_common(sample, sample_args);
  sample->add_option("-o,--out", sample_out, "output ensemble file");

  CLI::App* aipc = app.add_subcommand(
      "solve-aipc", "solve under the average-interference constraint");
  add_common(aipc, aipc_args);
  aipc->add_option("--gamma", [&aipc_args](const std::vector<std::string>& v) {
    aipc_args.overrides.push_back("aipc.gamma=" + v.back());
    return true;
  }, "interference threshold (number or 'inf')");
  aipc->add_option("-o,--dump", aipc_dump, "per-state solution dump file");

  CLI::App* pclc = app.add_subcommand(
      "solve-pclc", "solve under the primary capacity-loss constraint");
  add_common(pclc, pclc_args);
  pclc->add_option("--c-delta",
                   [&pclc_args](const std::vector<std::string>& v) {
                     pclc_args.overrides.push_back("pclc.c_delta=" + v.back());
                     return true;
                   },
                   "tolerable primary capacity loss in nats");
  pclc->add_option("--loss-fraction",
                   [&pclc_args](const std::vector<std::string>& v) {
                     pclc_args.overrides.push_back("pclc.loss_fraction=" +
                                                   v.back());
                     return true;
                   },
                   "loss as a fraction of the interference-free capacity");
  pclc->add_option("-o,--dump", pclc_dump, "per-state solution dump file");

  CLI::App* frontier =
      app.add_subcommand("frontier", "sweep levels and trace the frontier");
  add_common(frontier, frontier_args);
  frontier->add_option("--kind",
                       [&frontier_args](const std::vector<std::string>& v) {
                         frontier_args.overrides.push_back("frontier.kind=" +
                                                           v.back());
                         return true;
                       },
                       "aipc | pclc | aipc-lower-bound");
  frontier->add_option("--levels",
                       [&frontier_args](const std::vector<std::string>& v) {
                         frontier_args.overrides.push_back("frontier.levels=" +
                                                           v.back());
                         return true;
                       },
                       "start:step:stop or comma list");
  frontier->add_option("-o,--out", frontier_csv, "output CSV path");
  frontier->add_option("--meta", frontier_meta,
                       "metadata path (default: <out>.meta)");

  CLI::App* mac = app.add_subcommand(
      "mac-bound", "multiple-access rate bounds for a solved policy");
  add_common(mac, mac_args);

  CLI::App* oracle =
      app.add_subcommand("oracle", "brute-force reference solve");
  add_common(oracle, oracle_args);
  oracle->add_option("--states", oracle_states,
                     "discrete ensemble file (weight f e g o q rows)")
      ->required();
  oracle->add_option("--problem", oracle_problem, "p1 | p2");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sample->parsed()) return cmd_sample(sample_args, sample_out);
    if (aipc->parsed())
      return cmd_solve(aipc_args, ConstraintKind::kAipc, aipc_dump);
    if (pclc->parsed())
      return cmd_solve(pclc_args, ConstraintKind::kPclc, pclc_dump);
    if (frontier->parsed())
      return cmd_frontier(frontier_args, frontier_csv, frontier_meta);
    if (mac->parsed()) return cmd_mac_bound(mac_args);
    if (oracle->parsed())
      return cmd_oracle(oracle_args, oracle_states, oracle_problem);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
