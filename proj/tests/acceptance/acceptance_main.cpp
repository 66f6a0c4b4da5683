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

// End-to-end acceptance checks for the spectrum-sharing power-control
// library. Each criterion prints one PASS/FAIL line; the exit status is
// nonzero if any fail. Expected runtime: a few minutes (the figure
// reproductions sweep 11 capacity-loss levels at n = 1e5 for both primary
// policies).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "specshare/aipc.hpp"
#include "specshare/capacity.hpp"
#include "specshare/frontier.hpp"
#include "specshare/oracle.hpp"
#include "specshare/pclc.hpp"
#include "specshare/pu_policy.hpp"

using namespace specshare;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kSeed = 20260808;

FadingState random_state(std::mt19937_64& rng, double q) {
  std::exponential_distribution<double> direct(1.0);
  std::exponential_distribution<double> cross(2.0);
  std::exponential_distribution<double> leak(100.0);
  FadingState s;
  s.f = direct(rng);
  s.e = direct(rng);
  s.g = cross(rng);
  s.o = leak(rng);
  s.q = q;
  s.h = s.e / (1.0 + s.o * s.q);
  return s;
}

DiscreteEnsemble random_discrete(std::mt19937_64& rng, int k, double q) {
  DiscreteEnsemble d;
  for (int i = 0; i < k; ++i) d.states.push_back(random_state(rng, q));
  d.weights.assign(k, 1.0 / k);
  return d;
}

// One primary policy's worth of frontier data on the shared section-V setup.
struct SweepData {
  FadingEnsemble ens;
  double c_p_max = 0.0;
  std::vector<double> pclc_fracs;
  std::vector<double> aipc_levels;
  std::vector<PolicySolution> pclc_sols;
  std::vector<PolicySolution> aipc_sols;
  std::vector<FrontierPoint> pclc_pts;
  std::vector<FrontierPoint> aipc_pts;
  PolicySolution zero_loss;
};

SweepData build_sweep(PuPolicyKind kind, std::size_t n) {
  SweepData d;
  const ChannelDistribution dist{1.0, 1.0, 0.5, 0.01};
  d.ens = sample_ensemble(dist, n, kSeed);
  const PuPolicy policy = kind == PuPolicyKind::kConstantPower
                              ? make_cp_policy(10.0)
                              : make_wf_policy(d.ens, 10.0, 1e-8);
  apply_pu_policy(d.ens, policy);
  d.c_p_max = primary_capacity_max(d.ens);

  SolverOptions opts;
  opts.method = DualMethod::kBisection;

  d.pclc_fracs = {0.01, 0.02, 0.035, 0.05, 0.07,  0.10,
                  0.13, 0.17, 0.22,  0.28, 0.35};
  for (const double frac : d.pclc_fracs) {
    const PclcProblem prob =
        make_pclc_problem(d.ens, frac * d.c_p_max, 10.0);
    PolicySolution sol = solve_pclc(d.ens, prob, opts);
    FrontierPoint pt;
    pt.kind = ConstraintKind::kPclc;
    pt.level = frac;
    pt.c_p = sol.c_p;
    pt.c_s = sol.c_s;
    pt.converged = sol.converged;
    pt.residual = sol.kkt_residual;
    d.pclc_pts.push_back(pt);
    d.pclc_sols.push_back(std::move(sol));
  }

  d.aipc_levels = {0.03, 0.05, 0.08, 0.12, 0.18, 0.26,
                   0.38, 0.55, 0.80, 1.15, 1.60};
  for (const double gamma : d.aipc_levels) {
    PolicySolution sol = solve_aipc(d.ens, {gamma, 10.0}, opts);
    FrontierPoint pt;
    pt.kind = ConstraintKind::kAipc;
    pt.level = gamma;
    pt.c_p = sol.c_p;
    pt.c_s = sol.c_s;
    pt.converged = sol.converged;
    pt.residual = sol.kkt_residual;
    d.aipc_pts.push_back(pt);
    d.aipc_sols.push_back(std::move(sol));
  }

  d.zero_loss = solve_pclc(d.ens, make_pclc_problem(d.ens, 0.0, 10.0), opts);
  return d;
}

double interp_cs(const std::vector<FrontierPoint>& curve, double target_cp,
                 bool* in_span) {
  std::vector<std::pair<double, double>> pts;
  for (const FrontierPoint& p : curve) pts.emplace_back(p.c_p, p.c_s);
  std::sort(pts.begin(), pts.end());
  *in_span = target_cp >= pts.front().first - 1e-12 &&
             target_cp <= pts.back().first + 1e-12;
  if (!*in_span) return 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].first >= target_cp) {
      const double t =
          (target_cp - pts[i - 1].first) / (pts[i].first - pts[i - 1].first);
      return pts[i - 1].second + t * (pts[i].second - pts[i - 1].second);
    }
  }
  return pts.back().second;
}

struct Criterion {
  std::string name;
  std::function<bool(std::string&)> run;
};

}  // namespace

int main() {
  std::printf("acceptance: spectrum-sharing power control\n");
  std::printf("building section-V sweeps (n = 1e5, both primary policies)...\n");
  std::fflush(stdout);
  const SweepData cp = build_sweep(PuPolicyKind::kConstantPower, 100000);
  const SweepData wf = build_sweep(PuPolicyKind::kWaterFilling, 100000);

  std::vector<Criterion> criteria;

  criteria.push_back({"1. oracle equivalence (P1), 20 randomized 3-5-state "
                      "ensembles, 1e-3 relative, kkt <= 1e-6",
                      [](std::string& detail) {
    std::mt19937_64 rng(811);
    std::uniform_real_distribution<double> ugamma(0.15, 1.2);
    std::uniform_real_distribution<double> upow(2.0, 12.0);
    std::uniform_real_distribution<double> uq(2.0, 15.0);
    double worst_rel = 0.0, worst_kkt = 0.0;
    int done = 0;
    for (int attempt = 0; attempt < 200 && done < 20; ++attempt) {
      const int k = 3 + attempt % 3;
      const DiscreteEnsemble de = random_discrete(rng, k, uq(rng));
      const AipcProblem prob{ugamma(rng), upow(rng)};
      const OracleResult oracle = brute_force_p1(de, prob);
      if (oracle.objective < 0.05) continue;  // keep the relative bar meaningful
      const PolicySolution sol = solve_aipc(to_fading_ensemble(de), prob);
      worst_rel = std::max(worst_rel, std::fabs(sol.c_s - oracle.objective) /
                                          oracle.objective);
      worst_kkt = std::max(worst_kkt, sol.kkt_residual);
      ++done;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%d instances, max rel diff %.2e, max kkt %.2e", done,
                  worst_rel, worst_kkt);
    detail = buf;
    return done == 20 && worst_rel <= 1e-3 && worst_kkt <= 1e-6;
  }});

  criteria.push_back({"2. oracle equivalence (P2), 20 randomized 2-3-state "
                      "ensembles, 1e-3 relative, feasibility <= 1e-6",
                      [](std::string& detail) {
    std::mt19937_64 rng(812);
    std::uniform_real_distribution<double> ufrac(0.05, 0.6);
    std::uniform_real_distribution<double> upow(2.0, 10.0);
    std::uniform_real_distribution<double> uq(2.0, 15.0);
    GridSpec grid;
    grid.points = 32;
    grid.zoom_passes = 7;
    double worst_rel = 0.0, worst_feas = 0.0;
    int done = 0;
    for (int attempt = 0; attempt < 200 && done < 20; ++attempt) {
      const int k = 2 + attempt % 2;
      const DiscreteEnsemble de = random_discrete(rng, k, uq(rng));
      const double c_delta = ufrac(rng) * discrete_primary_capacity_max(de);
      const double budget = upow(rng);
      const PclcProblem dprob = make_pclc_problem(de, c_delta, budget);
      const OracleResult oracle = brute_force_p2(de, dprob, grid);
      if (oracle.objective < 0.05) continue;
      const FadingEnsemble fe = to_fading_ensemble(de);
      const PclcProblem prob = make_pclc_problem(fe, c_delta, budget);
      const PolicySolution sol = solve_pclc(fe, prob);
      worst_rel = std::max(worst_rel, std::fabs(sol.c_s - oracle.objective) /
                                          oracle.objective);
      worst_feas = std::max({worst_feas, prob.c0 - sol.c_p,
                             sol.achieved_power - budget});
      ++done;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%d instances, max rel diff %.2e, max infeasibility %.2e",
                  done, worst_rel, worst_feas);
    detail = buf;
    return done == 20 && worst_rel <= 1e-3 && worst_feas <= 1e-6;
  }});

  criteria.push_back({"3. capacity-loss bound, 1e3 random feasible policies "
                      "per primary policy at n = 1e4, zero violations",
                      [](std::string& detail) {
    int violations = 0;
    double closest = kInf;
    for (const PuPolicyKind kind :
         {PuPolicyKind::kConstantPower, PuPolicyKind::kWaterFilling}) {
      FadingEnsemble ens =
          sample_ensemble(ChannelDistribution{1.0, 1.0, 0.5, 0.01}, 10000, 313);
      const PuPolicy policy = kind == PuPolicyKind::kConstantPower
                                  ? make_cp_policy(10.0)
                                  : make_wf_policy(ens, 10.0, 1e-8);
      apply_pu_policy(ens, policy);

      std::mt19937_64 rng(kind == PuPolicyKind::kConstantPower ? 91 : 92);
      std::exponential_distribution<double> ed(0.25);
      std::uniform_real_distribution<double> ug(-4.6, 2.3);  // ln-uniform
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      std::vector<double> p(ens.size());
      for (int trial = 0; trial < 1000; ++trial) {
        const double gamma = std::exp(ug(rng));
        double mean_gp = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
          p[i] = ed(rng);
          mean_gp += ens.states[i].g * p[i];
        }
        mean_gp /= static_cast<double>(p.size());
        // strictly inside the constraint so rounding cannot break the
        // precondition
        double scale = mean_gp > gamma ? gamma / mean_gp * (1.0 - 1e-12) : 1.0;
        if (trial % 3 == 0) scale *= u01(rng);  // interior points too
        for (double& v : p) v *= scale;

        const LossBoundCheck r = capacity_loss_bound_check(ens, p, gamma, 1e-9);
        if (!r.precondition_ok || !r.holds) ++violations;
        closest = std::min(closest, r.bound - r.loss);
      }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "2000 trials, smallest margin %.3e nats",
                  closest);
    detail = buf;
    return violations == 0;
  }});

  criteria.push_back({"4. fixed-point certification, residual <= 1e-10 over "
                      ">= 1e6 state/dual combinations",
                      [&](std::string& detail) {
    std::uint64_t checks = 0;
    double worst = 0.0;
    for (const SweepData* d : {&cp, &wf}) {
      for (const PolicySolution& s : d->pclc_sols) {
        checks += s.fixed_point_checks;
        worst = std::max(worst, s.max_fixed_point_residual);
      }
      checks += d->zero_loss.fixed_point_checks;
      worst = std::max(worst, d->zero_loss.max_fixed_point_residual);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%llu checks, max residual %.2e",
                  static_cast<unsigned long long>(checks), worst);
    detail = buf;
    return checks >= 1000000ull && worst <= 1e-10;
  }});

  // Monte Carlo standard error of a secondary-capacity estimate.
  const auto cs_stderr = [](const FadingEnsemble& ens,
                            const std::vector<double>& p) {
    double m = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < ens.size(); ++i)
      m += std::log1p(ens.states[i].h * p[i]);
    m /= static_cast<double>(ens.size());
    for (std::size_t i = 0; i < ens.size(); ++i) {
      const double d = std::log1p(ens.states[i].h * p[i]) - m;
      s2 += d * d;
    }
    return std::sqrt(s2) / static_cast<double>(ens.size());
  };

  criteria.push_back({"5. figure reproduction, constant-power policy: gain "
                      "at 5% loss within [20%, 36%]",
                      [&](std::string& detail) {
    const double gain =
        compare_at_loss(cp.pclc_pts, cp.aipc_pts, 0.05, cp.c_p_max);
    const double se = cs_stderr(cp.ens, cp.pclc_sols[3].p);  // 5% level
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "gain %.1f%% (c_s standard error %.2e nats)", 100.0 * gain,
                  se);
    detail = buf;
    return gain >= 0.20 && gain <= 0.36;
  }});

  criteria.push_back({"6. figure reproduction, water-filling policy: gain "
                      "at 5% loss within [40%, 60%]",
                      [&](std::string& detail) {
    const double gain =
        compare_at_loss(wf.pclc_pts, wf.aipc_pts, 0.05, wf.c_p_max);
    char buf[160];
    std::snprintf(buf, sizeof buf, "gain %.1f%%", 100.0 * gain);
    detail = buf;
    return gain >= 0.40 && gain <= 0.60;
  }});

  criteria.push_back({"7. zero-loss endpoints: CP secondary capacity <= 1e-3, "
                      "WF >= 0.05 nats",
                      [&](std::string& detail) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "CP c_s = %.3e, WF c_s = %.4f",
                  cp.zero_loss.c_s, wf.zero_loss.c_s);
    detail = buf;
    return cp.zero_loss.c_s <= 1e-3 && wf.zero_loss.c_s >= 0.05;
  }});

  criteria.push_back({"8. frontier monotonicity, PCLC dominance, lower-bound "
                      "ordering (11-point grids, both policies)",
                      [&](std::string& detail) {
    double worst_mono = 0.0, worst_dom = -kInf;
    bool lb_ok = true;
    for (const SweepData* d : {&cp, &wf}) {
      for (const auto* curve : {&d->pclc_pts, &d->aipc_pts}) {
        for (std::size_t i = 1; i < curve->size(); ++i) {
          worst_mono = std::max(
              worst_mono, (*curve)[i - 1].c_s - (*curve)[i].c_s);
          worst_mono = std::max(
              worst_mono, (*curve)[i].c_p - (*curve)[i - 1].c_p);
        }
      }
      for (const FrontierPoint& a : d->aipc_pts) {
        bool in_span = false;
        const double cs_p = interp_cs(d->pclc_pts, a.c_p, &in_span);
        if (in_span) worst_dom = std::max(worst_dom, a.c_s - cs_p);
      }
      for (std::size_t i = 0; i < d->aipc_levels.size(); ++i) {
        const double lb = d->c_p_max - std::log1p(d->aipc_levels[i]);
        if (lb > d->aipc_pts[i].c_p + 1e-12) lb_ok = false;
      }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "worst monotonicity slip %.2e, worst dominance slack %.2e",
                  worst_mono, worst_dom);
    detail = buf;
    return worst_mono <= 1e-4 && worst_dom <= 1e-4 && lb_ok;
  }});

  criteria.push_back({"9. determinism: identical config gives bytewise "
                      "identical frontier CSV",
                      [](std::string& detail) {
    SweepConfig cfg;
    cfg.n = 20000;
    cfg.seed = 777;
    cfg.pu_kind = PuPolicyKind::kWaterFilling;
    cfg.kind = ConstraintKind::kPclc;
    cfg.levels = {0.02, 0.05, 0.1, 0.2, 0.3};
    cfg.levels_as_loss_fraction = true;
    const auto run = [&] {
      std::ostringstream out;
      write_frontier_csv(trace_frontier(cfg), out);
      return out.str();
    };
    const std::string a = run();
    const std::string b = run();
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu bytes, %s", a.size(),
                  a == b ? "identical" : "DIFFER");
    detail = buf;
    return !a.empty() && a == b;
  }});

  criteria.push_back({"10. every solved policy lies inside the fixed-policy "
                      "MAC rate bounds, zero violations",
                      [&](std::string& detail) {
    int checked = 0, violations = 0;
    double tightest = kInf;
    for (const SweepData* d : {&cp, &wf}) {
      auto check = [&](const PolicySolution& s) {
        const MacBounds b = mac_rate_bounds(d->ens, s.p);
        ++checked;
        if (s.c_p > b.pu_bound + 1e-9 || s.c_s > b.su_bound + 1e-9 ||
            s.c_p + s.c_s > b.sum_bound + 1e-9)
          ++violations;
        tightest = std::min({tightest, b.pu_bound - s.c_p, b.su_bound - s.c_s,
                             b.sum_bound - s.c_p - s.c_s});
      };
      for (const PolicySolution& s : d->pclc_sols) check(s);
      for (const PolicySolution& s : d->aipc_sols) check(s);
      check(d->zero_loss);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d policies, smallest margin %.3g nats",
                  checked, tightest);
    detail = buf;
    return violations == 0;
  }});

  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("%s  %s — %s\n", ok ? "PASS" : "FAIL", c.name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
