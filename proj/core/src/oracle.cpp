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

#include "specshare/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <string>

#include "specshare/errors.hpp"

namespace specshare {
namespace {

constexpr double kFeasSlack = 1e-12;

double weighted(const DiscreteEnsemble& ens,
                const std::function<double(const FadingState&, double)>& term,
                std::span<const double> p) {
  double s = 0.0;
  for (std::size_t i = 0; i < ens.states.size(); ++i)
    s += ens.weights[i] * term(ens.states[i], p.empty() ? 0.0 : p[i]);
  return s;
}

// Grid values for one pass. Pass 0 covers [0, cap] with a geometric ladder
// (plus 0 itself); later passes place a linear window around the incumbent.
std::vector<double> axis_grid(int points, double cap, int pass, double center,
                              double prev_step) {
  std::vector<double> v;
  v.reserve(points + 2);
  if (cap <= 0.0) {
    v.push_back(0.0);
    return v;
  }
  if (pass == 0) {
    v.push_back(0.0);
    const double lo = cap * 1e-7;
    const double ratio = std::pow(cap / lo, 1.0 / (points - 1));
    double x = lo;
    for (int k = 0; k < points; ++k) {
      v.push_back(std::min(x, cap));
      x *= ratio;
    }
  } else {
    const double half = prev_step;
    const double lo = std::max(0.0, center - half);
    const double hi = std::min(cap, center + half);
    const double step = (hi - lo) / points;
    for (int k = 0; k <= points; ++k) v.push_back(lo + step * k);
    if (lo > 0.0) v.push_back(0.0);  // keep the off state reachable
  }
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

struct PrimalGridProblem {
  std::vector<double> caps;
  std::function<bool(std::span<const double>)> feasible;
  std::function<double(std::span<const double>)> objective;
  // derivative of the protection constraint's per-state term in p_i
  // (weights excluded): g for the interference constraint, g*lambda(p) for
  // the capacity-loss constraint
  std::function<double(std::size_t, double)> dprotect;
};

// Local polish for the primal grids: single-axis pushes, power-preserving
// pair transfers, loss-preserving pair transfers (first order, with the
// exact feasibility recheck absorbing curvature), and both-constraint-
// preserving triple transfers. Frees axis-aligned grids from stalling on
// the diagonal faces of the coupled constraints.
void transfer_polish(const DiscreteEnsemble& ens,
                     const PrimalGridProblem& prob, std::vector<double>* p,
                     double* objective) {
  const std::size_t k = p->size();
  const std::vector<double>& w = ens.weights;
  double scale = 0.0;
  for (double c : prob.caps) scale = std::max(scale, c);
  if (!(scale > 0.0)) return;

  // marginal protection-constraint term of state i at its current power
  const auto dloss = [&](std::size_t i) { return prob.dprotect(i, (*p)[i]); };

  const auto try_move = [&](const std::vector<double>& q) {
    for (std::size_t i = 0; i < k; ++i)
      if (q[i] < 0.0 || q[i] > prob.caps[i]) return false;
    if (!prob.feasible(q)) return false;
    const double obj = prob.objective(q);
    if (obj <= *objective + 1e-15) return false;
    *p = q;
    *objective = obj;
    return true;
  };

  bool improved = true;
  for (int sweep = 0; sweep < 80 && improved; ++sweep) {
    improved = false;
    std::vector<double> q(k);
    for (std::size_t i = 0; i < k; ++i) {
      if (w[i] <= 0.0) continue;
      for (double step = 0.1 * scale; step > 1e-10 * scale; step *= 0.4) {
        for (const double sgn : {1.0, -1.0}) {
          // single axis
          q = *p;
          q[i] += sgn * step;
          if (try_move(q)) {
            improved = true;
            break;
          }
          bool moved = false;
          for (std::size_t j = 0; j < k && !moved; ++j) {
            if (j == i || w[j] <= 0.0) continue;
            // power-preserving pair
            q = *p;
            q[i] += sgn * step;
            q[j] -= sgn * step * w[i] / w[j];
            if (try_move(q)) moved = true;
            // loss-preserving pair (first order)
            const double li = dloss(i), lj = dloss(j);
            if (!moved && lj > 0.0) {
              q = *p;
              q[i] += sgn * step;
              q[j] -= sgn * step * (w[i] * li) / (w[j] * lj);
              if (try_move(q)) moved = true;
            }
            // both-constraint-preserving triple
            for (std::size_t l = 0; l + 1 <= k && !moved; ++l) {
              if (l == i || l == j || w[l] <= 0.0) continue;
              const double ll = dloss(l);
              // solve w_j dj + w_l dl = -w_i, w_j lj dj + w_l ll dl = -w_i li
              const double det = w[j] * w[l] * (ll - lj);
              if (std::fabs(det) < 1e-14) continue;
              const double dj = w[i] * w[l] * (li - ll) / det;
              const double dl = w[i] * w[j] * (lj - li) / det;
              q = *p;
              q[i] += sgn * step;
              q[j] += sgn * step * dj;
              q[l] += sgn * step * dl;
              if (try_move(q)) moved = true;
            }
          }
          if (moved) {
            improved = true;
            break;
          }
        }
        if (improved) break;
      }
    }
  }
}

OracleResult primal_zoom(const PrimalGridProblem& prob, const GridSpec& grid) {
  const std::size_t k = prob.caps.size();
  OracleResult best;
  best.p.assign(k, 0.0);
  best.objective = -std::numeric_limits<double>::infinity();
  if (prob.feasible(best.p)) best.objective = prob.objective(best.p);

  std::size_t cells_used = 0;
  const auto charge = [&](std::size_t cells) {
    cells_used += cells;
    if (cells_used > grid.cell_budget)
      throw ParameterError("oracle grid exceeds the configured cell budget");
  };

  // First pass over the whole box; keep a handful of well-separated
  // incumbents, since the feasible region can hold several basins.
  struct Seed {
    double obj;
    std::vector<double> p;
  };
  std::vector<Seed> seeds;
  {
    std::vector<std::vector<double>> axes(k);
    std::size_t cells = 1;
    for (std::size_t i = 0; i < k; ++i) {
      axes[i] = axis_grid(grid.points, prob.caps[i], 0, 0.0, 0.0);
      cells *= axes[i].size();
    }
    charge(cells);
    std::vector<std::size_t> idx(k, 0);
    std::vector<double> p(k, 0.0);
    for (;;) {
      for (std::size_t i = 0; i < k; ++i) p[i] = axes[i][idx[i]];
      if (prob.feasible(p)) {
        const double obj = prob.objective(p);
        if (obj > best.objective) {
          best.objective = obj;
          best.p = p;
        }
        const auto apart = [&](const Seed& s) {
          for (std::size_t i = 0; i < k; ++i) {
            const double d = std::fabs(s.p[i] - p[i]);
            if (d > 0.15 * prob.caps[i] &&
                (p[i] < 0.25 * s.p[i] || p[i] > 4.0 * s.p[i]))
              return true;
          }
          return false;
        };
        bool placed = false;
        for (Seed& s : seeds) {
          if (!apart(s)) {
            if (obj > s.obj) {
              s.obj = obj;
              s.p = p;
            }
            placed = true;
            break;
          }
        }
        if (!placed) {
          if (seeds.size() < 4) {
            seeds.push_back({obj, p});
          } else {
            auto worst = std::min_element(
                seeds.begin(), seeds.end(),
                [](const Seed& a, const Seed& b) { return a.obj < b.obj; });
            if (obj > worst->obj) *worst = {obj, p};
          }
        }
      }
      std::size_t carry = 0;
      while (carry < k && ++idx[carry] == axes[carry].size()) {
        idx[carry] = 0;
        ++carry;
      }
      if (carry == k) break;
    }
  }
  std::sort(seeds.begin(), seeds.end(),
            [](const Seed& a, const Seed& b) { return a.obj > b.obj; });

  for (const Seed& seed : seeds) {
    std::vector<double> center = seed.p;
    std::vector<double> step(k);
    for (std::size_t i = 0; i < k; ++i)
      step[i] = std::max(2.0 * center[i], 0.1 * prob.caps[i]);
    std::vector<double> local = seed.p;
    double local_obj = seed.obj;

    for (int pass = 1; pass < grid.zoom_passes; ++pass) {
      std::vector<std::vector<double>> axes(k);
      std::size_t cells = 1;
      for (std::size_t i = 0; i < k; ++i) {
        axes[i] =
            axis_grid(grid.points, prob.caps[i], pass, center[i], step[i]);
        cells *= axes[i].size();
      }
      charge(cells);
      std::vector<std::size_t> idx(k, 0);
      std::vector<double> p(k, 0.0);
      for (;;) {
        for (std::size_t i = 0; i < k; ++i) p[i] = axes[i][idx[i]];
        if (prob.feasible(p)) {
          const double obj = prob.objective(p);
          if (obj > local_obj) {
            local_obj = obj;
            local = p;
          }
        }
        std::size_t carry = 0;
        while (carry < k && ++idx[carry] == axes[carry].size()) {
          idx[carry] = 0;
          ++carry;
        }
        if (carry == k) break;
      }
      for (std::size_t i = 0; i < k; ++i) {
        center[i] = local[i];
        double spacing = prob.caps[i];
        const auto& ax = axes[i];
        for (std::size_t j = 1; j < ax.size(); ++j)
          if (ax[j] >= center[i]) {
            spacing = ax[j] - ax[j - 1];
            break;
          }
        step[i] = 2.0 * spacing;
      }
    }
    if (local_obj > best.objective) {
      best.objective = local_obj;
      best.p = local;
    }
  }
  if (!std::isfinite(best.objective))
    throw InfeasibleError("oracle: no feasible grid point found");
  return best;
}

}  // namespace

void DiscreteEnsemble::validate() const {
  if (states.empty() || states.size() > 8)
    throw ParameterError("discrete ensemble must hold 1..8 states");
  if (weights.size() != states.size())
    throw ParameterError("weights and states must have equal length");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ParameterError("weights must be nonnegative");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw ParameterError("weights must sum to 1 within 1e-12");
}

double discrete_mean_power(const DiscreteEnsemble& ens,
                           std::span<const double> p) {
  return weighted(ens, [](const FadingState&, double pi) { return pi; }, p);
}

double discrete_interference(const DiscreteEnsemble& ens,
                             std::span<const double> p) {
  return weighted(
      ens, [](const FadingState& s, double pi) { return s.g * pi; }, p);
}

double discrete_primary_capacity(const DiscreteEnsemble& ens,
                                 std::span<const double> p) {
  return weighted(ens,
                  [](const FadingState& s, double pi) {
                    return std::log1p(s.f * s.q / (1.0 + s.g * pi));
                  },
                  p);
}

double discrete_primary_capacity_max(const DiscreteEnsemble& ens) {
  return weighted(
      ens, [](const FadingState& s, double) { return std::log1p(s.f * s.q); },
      {});
}

double discrete_secondary_capacity(const DiscreteEnsemble& ens,
                                   std::span<const double> p) {
  return weighted(
      ens, [](const FadingState& s, double pi) { return std::log1p(s.h * pi); },
      p);
}

PclcProblem make_pclc_problem(const DiscreteEnsemble& ens, double c_delta,
                              double power_budget) {
  ens.validate();
  if (!(c_delta >= 0) || !std::isfinite(c_delta))
    throw ParameterError("pclc: c_delta must be nonnegative and finite");
  if (!(power_budget > 0))
    throw ParameterError("pclc: power budget must be positive");
  PclcProblem prob;
  prob.c_delta = c_delta;
  prob.power_budget = power_budget;
  prob.c_p_max = discrete_primary_capacity_max(ens);
  prob.c0 = std::max(0.0, prob.c_p_max - c_delta);
  prob.ensemble_fingerprint = 0;
  return prob;
}

FadingEnsemble to_fading_ensemble(const DiscreteEnsemble& ens) {
  ens.validate();
  const double uniform = 1.0 / static_cast<double>(ens.states.size());
  for (double w : ens.weights)
    if (std::fabs(w - uniform) > 1e-12)
      throw ParameterError(
          "to_fading_ensemble requires uniform weights; the production "
          "solvers weight states equally");
  FadingEnsemble out;
  out.states = ens.states;
  out.q_populated = true;
  return out;
}

namespace {

// Dense dual grid with primal reconstruction, any number of states. The
// reconstruction is scaled back into the feasible set, so the certificate
// is still a primal objective value.
OracleResult dual_grid_p1(const DiscreteEnsemble& ens, const AipcProblem& prob,
                          const GridSpec& grid) {
  const std::size_t k = ens.states.size();
  const bool finite_gamma = std::isfinite(prob.gamma);
  double max_h = 0.0;
  for (const FadingState& s : ens.states) max_h = std::max(max_h, s.h);
  if (max_h <= 0.0) return {0.0, std::vector<double>(k, 0.0)};

  const double nu_center = finite_gamma ? 1.0 / (1.0 + prob.gamma) : 0.0;
  const double mu_center = 1.0 / (prob.power_budget + 1.0 / max_h);

  OracleResult best{-std::numeric_limits<double>::infinity(),
                    std::vector<double>(k, 0.0)};
  std::vector<double> p(k, 0.0);
  double nu_c = std::max(nu_center, 1e-9);
  double mu_c = mu_center;

  // Reconstruct from the duals, project back into the feasible set, keep the
  // best primal objective. track_center shifts the zoom window.
  const auto eval_pair = [&](double nu, double mu, bool track_center) {
    if (!(mu > 0.0) && !(nu > 0.0)) return;
    for (std::size_t i = 0; i < k; ++i)
      p[i] = aipc_power(ens.states[i], {nu, mu});
    double scale = 1.0;
    const double mp = discrete_mean_power(ens, p);
    if (mp > prob.power_budget) scale = prob.power_budget / mp;
    if (finite_gamma) {
      const double gi = discrete_interference(ens, p);
      if (gi > prob.gamma)
        scale = std::min(scale, gi > 0.0 ? prob.gamma / gi : 1.0);
    }
    for (std::size_t i = 0; i < k; ++i) p[i] *= scale;
    const double obj = discrete_secondary_capacity(ens, p);
    if (obj > best.objective) {
      best.objective = obj;
      best.p = p;
      if (track_center) {
        if (nu > 0.0) nu_c = nu;
        mu_c = mu;
      }
    }
  };

  double span = 1e7;
  for (int pass = 0; pass < grid.zoom_passes + 2; ++pass) {
    const double ratio = std::pow(span * span, 1.0 / (grid.points - 1));
    std::vector<double> nus{0.0};
    std::vector<double> mus;
    if (finite_gamma) {
      double x = nu_c / span;
      for (int j = 0; j < grid.points; ++j) {
        nus.push_back(x);
        x *= ratio;
      }
    }
    double y = mu_c / span;
    for (int j = 0; j < grid.points; ++j) {
      mus.push_back(y);
      y *= ratio;
    }
    for (double nu : nus)
      for (double mu : mus) eval_pair(nu, mu, true);
    span = std::max(1.5, std::pow(span, 0.35));
  }

  // Linear micro-grids around the incumbent pair (and along nu = 0).
  for (const double half : {0.05, 0.004}) {
    for (int a = -20; a <= 20; ++a) {
      const double nu = nu_c * (1.0 + half * a / 20.0);
      for (int b = -20; b <= 20; ++b) {
        const double mu = mu_c * (1.0 + half * b / 20.0);
        if (finite_gamma) eval_pair(std::max(nu, 0.0), mu, false);
        eval_pair(0.0, mu, false);
      }
    }
  }

  // Compass descent on the incumbent pair down to machine scales.
  double step = 0.02;
  for (int round = 0; round < 400 && step > 1e-9; ++round) {
    const double before = best.objective;
    for (const double dn : {1.0 + step, 1.0 - step, 1.0}) {
      for (const double dm : {1.0 + step, 1.0 - step, 1.0}) {
        if (finite_gamma) eval_pair(nu_c * dn, mu_c * dm, true);
        eval_pair(0.0, mu_c * dm, true);
      }
    }
    if (!(best.objective > before)) step *= 0.5;
  }
  return best;
}

}  // namespace

OracleResult brute_force_p1(const DiscreteEnsemble& ens,
                            const AipcProblem& prob, const GridSpec& grid) {
  ens.validate();
  prob.validate();
  const std::size_t k = ens.states.size();
  const bool finite_gamma = std::isfinite(prob.gamma);

  const OracleResult dual = dual_grid_p1(ens, prob, grid);
  if (k > 6) return dual;

  PrimalGridProblem gp;
  gp.caps.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double w = ens.weights[i];
    if (w <= 0.0 || ens.states[i].h <= 0.0) {
      gp.caps[i] = 0.0;
      continue;
    }
    double cap = prob.power_budget / w;
    if (finite_gamma && ens.states[i].g > 0.0)
      cap = std::min(cap, prob.gamma / (w * ens.states[i].g));
    gp.caps[i] = cap;
  }
  gp.feasible = [&](std::span<const double> p) {
    if (discrete_mean_power(ens, p) > prob.power_budget * (1.0 + kFeasSlack))
      return false;
    if (finite_gamma && discrete_interference(ens, p) >
                            prob.gamma * (1.0 + kFeasSlack) + 1e-15)
      return false;
    return true;
  };
  gp.objective = [&](std::span<const double> p) {
    return discrete_secondary_capacity(ens, p);
  };
  gp.dprotect = [&](std::size_t i, double) { return ens.states[i].g; };

  // Above four states the full-resolution grid blows past the cell budget;
  // a coarse grid still seeds the transfer polish well.
  GridSpec g = grid;
  if (k > 4) {
    g.points = 12;
    g.zoom_passes = std::min(grid.zoom_passes, 6);
  }
  OracleResult primal = primal_zoom(gp, g);
  transfer_polish(ens, gp, &primal.p, &primal.objective);
  // Two independent routes to the same convex optimum; report the better
  // feasible point.
  return primal.objective >= dual.objective ? primal : dual;
}

OracleResult brute_force_p2(const DiscreteEnsemble& ens,
                            const PclcProblem& prob, const GridSpec& grid) {
  ens.validate();
  if (ens.states.size() > 4)
    throw ParameterError(
        "brute_force_p2 supports at most 4 states (direct primal grid)");

  const std::size_t k = ens.states.size();
  PrimalGridProblem gp;
  gp.caps.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double w = ens.weights[i];
    gp.caps[i] = (w > 0.0 && ens.states[i].h > 0.0)
                     ? prob.power_budget / w
                     : 0.0;
  }
  gp.feasible = [&](std::span<const double> p) {
    if (discrete_mean_power(ens, p) > prob.power_budget * (1.0 + kFeasSlack))
      return false;
    return discrete_primary_capacity(ens, p) >= prob.c0 - kFeasSlack;
  };
  gp.objective = [&](std::span<const double> p) {
    return discrete_secondary_capacity(ens, p);
  };
  gp.dprotect = [&](std::size_t i, double p) {
    const FadingState& s = ens.states[i];
    const double a = s.f * s.q;
    if (!(a > 0.0)) return 0.0;
    const double u = 1.0 + s.g * p;
    return s.g * a / (u * (u + a));
  };
  OracleResult best = primal_zoom(gp, grid);
  transfer_polish(ens, gp, &best.p, &best.objective);
  return best;
}

DiscreteEnsemble load_discrete_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open " + path.string());
  DiscreteEnsemble ens;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    double w = 0.0;
    FadingState s;
    if (std::sscanf(line.c_str(), "%lg %lg %lg %lg %lg %lg", &w, &s.f, &s.e,
                    &s.g, &s.o, &s.q) != 6)
      throw ParameterError("malformed discrete-ensemble row: " + line);
    s.h = s.e / (1.0 + s.o * s.q);
    ens.weights.push_back(w);
    ens.states.push_back(s);
  }
  ens.validate();
  return ens;
}

}  // namespace specshare
