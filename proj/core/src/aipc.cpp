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

#include "specshare/aipc.hpp"

#include <algorithm>
#include <cmath>

#include "specshare/capacity.hpp"
#include "specshare/runtime.hpp"

namespace specshare {
namespace {

constexpr double kMuFloor = 1e-12;  // keeps subgradient iterates bounded

struct Means {
  double p = 0.0;
  double gp = 0.0;
};

class AipcWork {
 public:
  AipcWork(const FadingEnsemble& ens, const AipcProblem& prob,
           const SolverOptions& opts)
      : ens_(ens), prob_(prob), opts_(opts), p_(ens.size(), 0.0) {
    for (const FadingState& s : ens.states) {
      max_h_ = std::max(max_h_, s.h);
      if (s.g > 0.0 && s.h > 0.0) nu_off_ = std::max(nu_off_, s.h / s.g);
      if (s.h > 0.0 && !(s.g > 0.0)) has_free_state_ = true;
    }
  }

  double max_h() const { return max_h_; }
  double nu_off() const { return nu_off_; }
  bool has_free_state() const { return has_free_state_; }
  int evals() const { return evals_; }
  const std::vector<double>& p() const { return p_; }

  Means fill(const DualPair& d) {
    ++evals_;
    detail::parallel_for(ens_.size(), [&](std::size_t i) {
      p_[i] = aipc_power(ens_.states[i], d);
    });
    Means m;
    m.p = detail::blocked_mean(ens_.size(),
                               [&](std::size_t i) { return p_[i]; });
    m.gp = detail::blocked_mean(ens_.size(), [&](std::size_t i) {
      return ens_.states[i].g * p_[i];
    });
    return m;
  }

  // mu with mean power == budget at the given nu. The allocated mean is
  // continuous and strictly decreasing in mu wherever it is positive;
  // bracketed around the previous root when one is known.
  double mu_for_budget(double nu) {
    const double budget = prob_.power_budget;
    auto excess = [&](double mu) { return fill({nu, mu}).p - budget; };
    double lo, hi, flo, fhi;
    if (mu_hint_ > 0.0 && mu_hint_ < max_h_) {
      lo = mu_hint_ * 0.5;
      hi = std::min(mu_hint_ * 2.0, max_h_);
      flo = excess(lo);
      fhi = excess(hi);
    } else {
      hi = max_h_;  // every state off
      fhi = excess(hi);
      lo = hi / 4.0;
      flo = excess(lo);
    }
    while (fhi > 0.0 && hi < max_h_) {
      lo = hi;
      flo = fhi;
      hi = std::min(hi * 16.0, max_h_);
      fhi = excess(hi);
    }
    if (fhi > 0.0) return max_h_;
    while (flo < 0.0 && lo > 1e-300) {
      hi = lo;
      fhi = flo;
      lo /= 16.0;
      flo = excess(lo);
    }
    if (flo < 0.0) return lo;
    const auto r = num::find_root(excess, lo, hi, flo, fhi,
                                  1e-13 * std::max(1.0, budget));
    mu_hint_ = r.x;
    return r.x;
  }

  PolicySolution finalize(const DualPair& d) {
    const Means m = fill(d);
    PolicySolution sol;
    sol.p = p_;
    sol.duals = d;
    sol.achieved_power = m.p;
    sol.achieved_interference = m.gp;
    sol.c_s = secondary_capacity(ens_, sol.p);
    sol.c_p = primary_capacity(ens_, sol.p);
    sol.iterations = evals_;

    // Stationarity holds by construction of the closed form; recompute it
    // anyway together with feasibility and complementary slackness.
    double stat = 0.0;
    for (std::size_t i = 0; i < ens_.size(); ++i) {
      const FadingState& s = ens_.states[i];
      if (s.h <= 0.0) continue;
      const double level = d.nu * s.g + d.mu;
      if (p_[i] > 0.0)
        stat = std::max(stat,
                        std::fabs(s.h / (1.0 + s.h * p_[i]) - level));
      else
        stat = std::max(stat, std::max(0.0, s.h - level));
    }
    const bool finite_gamma = std::isfinite(prob_.gamma);
    const double feas_g =
        finite_gamma ? std::max(0.0, m.gp - prob_.gamma) : 0.0;
    const double feas_p = std::max(0.0, m.p - prob_.power_budget);
    const double cs_g =
        finite_gamma && d.nu > 0.0 ? d.nu * std::fabs(prob_.gamma - m.gp) : 0.0;
    const double cs_p = d.mu * std::fabs(prob_.power_budget - m.p);
    sol.kkt_residual =
        std::max({stat, feas_g, feas_p, cs_g, cs_p});
    sol.converged = sol.kkt_residual <= opts_.tol;
    sol.duality_gap = dual_value(d, m) - sol.c_s;
    return sol;
  }

  double dual_value(const DualPair& d, const Means& m) {
    const double lagr = detail::blocked_mean(ens_.size(), [&](std::size_t i) {
      const FadingState& s = ens_.states[i];
      return std::log1p(s.h * p_[i]) - (d.nu * s.g + d.mu) * p_[i];
    });
    double v = lagr + d.mu * prob_.power_budget;
    if (std::isfinite(prob_.gamma)) v += d.nu * prob_.gamma;
    (void)m;
    return v;
  }

  // Objective of the current powers scaled back to feasibility; a valid lower
  // bound on the optimum used for Polyak steps.
  double feasible_objective(const Means& m) {
    double scale = 1.0;
    if (std::isfinite(prob_.gamma) && m.gp > prob_.gamma)
      scale = std::min(scale, prob_.gamma / m.gp);
    if (m.p > prob_.power_budget)
      scale = std::min(scale, prob_.power_budget / m.p);
    return detail::blocked_mean(ens_.size(), [&](std::size_t i) {
      return std::log1p(ens_.states[i].h * scale * p_[i]);
    });
  }

 private:
  const FadingEnsemble& ens_;
  const AipcProblem& prob_;
  const SolverOptions& opts_;
  std::vector<double> p_;
  double max_h_ = 0.0;
  double mu_hint_ = -1.0;  // last budget-balancing mu, warm start
  double nu_off_ = 0.0;  // smallest nu shutting every interfering state off
  bool has_free_state_ = false;
  int evals_ = 0;
};

// Polyak-style projected subgradient descent on the dual. Serves as the
// documented default search; the bisection finisher then certifies the
// result (see solve_aipc).
DualPair subgradient_phase(AipcWork& work, const AipcProblem& prob,
                           const SolverOptions& opts, bool* hit_tol) {
  const bool finite_gamma = std::isfinite(prob.gamma);
  DualPair d{finite_gamma ? 0.5 / (1.0 + prob.gamma) : 0.0,
             1.0 / (prob.power_budget + 1.0 / work.max_h())};
  double best_primal = 0.0;
  *hit_tol = false;
  for (int k = 0; k < opts.max_iters; ++k) {
    const Means m = work.fill(d);
    best_primal = std::max(best_primal, work.feasible_objective(m));

    const double slack_g = finite_gamma ? prob.gamma - m.gp : 0.0;
    const double slack_p = prob.power_budget - m.p;
    const double resid = std::max(
        {finite_gamma ? std::max(0.0, -slack_g) : 0.0, std::max(0.0, -slack_p),
         d.nu * std::fabs(slack_g), d.mu * std::fabs(slack_p)});
    if (resid <= opts.tol) {
      *hit_tol = true;
      return d;
    }

    const double dv = work.dual_value(d, m);
    const double margin = 0.05 * std::max(1.0, std::fabs(dv)) / (10.0 + k);
    const double norm2 = slack_g * slack_g + slack_p * slack_p;
    if (norm2 <= 0.0) return d;
    const double step = (dv - best_primal + margin) / norm2;
    if (finite_gamma) d.nu = std::max(0.0, d.nu - step * slack_g);
    d.mu = std::max(kMuFloor, d.mu - step * slack_p);
  }
  return d;
}

}  // namespace

PolicySolution solve_aipc(const FadingEnsemble& ens, const AipcProblem& prob,
                          const SolverOptions& opts) {
  prob.validate();
  if (ens.size() < 1) throw ParameterError("ensemble must be nonempty");

  AipcWork work(ens, prob, opts);

  if (work.max_h() <= 0.0) {
    PolicySolution sol;
    sol.p.assign(ens.size(), 0.0);
    sol.c_p = primary_capacity(ens, sol.p);
    sol.kkt_residual = 0.0;
    sol.converged = true;
    sol.duality_gap = 0.0;
    sol.diagnostic = "degenerate ensemble: every effective gain is zero";
    return sol;
  }

  if (opts.method == DualMethod::kSubgradient) {
    bool hit_tol = false;
    const DualPair d = subgradient_phase(work, prob, opts, &hit_tol);
    if (!opts.polish) return work.finalize(d);
    // fall through to the certifying finisher
  }

  // Active-set enumeration. Each case is verified before being returned, so
  // the order only affects speed.
  const double budget = prob.power_budget;

  // Interference constraint slack at the plain water-filling solution.
  const double mu_wf = work.mu_for_budget(0.0);
  {
    const Means m = work.fill({0.0, mu_wf});
    if (!std::isfinite(prob.gamma) ||
        m.gp <= prob.gamma * (1.0 + 1e-12) + 1e-12)
      return work.finalize({0.0, mu_wf});
  }

  const double nu_off = work.nu_off();

  // Power budget slack, interference tight (mu = 0). Only meaningful when no
  // state can absorb unlimited power for free.
  if (!work.has_free_state()) {
    double lo = nu_off / 16.0;
    double flo = work.fill({lo, 0.0}).gp - prob.gamma;
    while (flo < 0.0 && lo > 1e-300) {
      lo /= 16.0;
      flo = work.fill({lo, 0.0}).gp - prob.gamma;
    }
    if (flo >= 0.0) {
      const double fhi = work.fill({nu_off, 0.0}).gp - prob.gamma;
      const auto r = num::find_root(
          [&](double nu) { return work.fill({nu, 0.0}).gp - prob.gamma; }, lo,
          nu_off, flo, fhi, 1e-13 * std::max(1.0, prob.gamma));
      if (work.fill({r.x, 0.0}).p <= budget * (1.0 + 1e-12))
        return work.finalize({r.x, 0.0});
    }
  }

  // Both constraints tight: nested bisection, mu balancing the power budget
  // inside every evaluation of the interference residual.
  auto interference_residual = [&](double nu) {
    const double mu = work.mu_for_budget(nu);
    return work.fill({nu, mu}).gp - prob.gamma;
  };
  const double f0 = interference_residual(0.0);
  const double f1 = interference_residual(nu_off);
  const auto r = num::find_root(interference_residual, 0.0, nu_off, f0, f1,
                                1e-13 * std::max(1.0, prob.gamma));
  return work.finalize({r.x, work.mu_for_budget(r.x)});
}

}  // namespace specshare
