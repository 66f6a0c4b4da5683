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

#include "specshare/pclc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specshare/capacity.hpp"
#include "specshare/runtime.hpp"

namespace specshare {
namespace {

// Smallest mu the dual search ever evaluates. Below this the curve values
// grow past 1/mu = 1e5 and a 1e-10 absolute residual on G drops under the
// double rounding noise of evaluating G itself; a power budget that cannot
// be exhausted at this mu is treated as slack (branch B).
constexpr double kMuSolveFloor = 1e-5;
constexpr double kNuCap = 1e18;
constexpr double kUncapped = 1e12;  // stand-in power for a state the mu=0
                                    // curve cannot cap (see branch B)

double g_prime(const FadingState& s, const DualPair& d, double z) {
  const double a = s.f * s.q;
  const double u = 1.0 + s.g * z;
  const double w = u * (u + a);
  const double lam = a / w;
  const double denom = lam * d.nu * s.g + d.mu;
  const double F = 1.0 / denom;
  const double dlam = -a * s.g * (2.0 * u + a) / (w * w);
  return -d.nu * s.g * dlam * F * F - 1.0;
}

struct CurveRoot {
  double z = 0.0;
  double residual = 0.0;
};

// Root of G on a bracket with G(pos) >= 0 >= G(neg); bisection with Newton
// steps accepted inside the bracket, stopping on |G| <= root_tol. seed, when
// inside the bracket, replaces the midpoint as the first iterate.
CurveRoot refine_root(const FadingState& s, const DualPair& d, double pos,
                      double neg, double root_tol, int max_iters,
                      double seed = std::numeric_limits<double>::quiet_NaN()) {
  CurveRoot best{pos, std::numeric_limits<double>::infinity()};
  double z = 0.5 * (pos + neg);
  if (seed > std::min(pos, neg) && seed < std::max(pos, neg)) z = seed;
  for (int k = 0; k < max_iters; ++k) {
    const double gz = detail::pclc_g(s, d, z);
    if (std::fabs(gz) < best.residual) best = {z, std::fabs(gz)};
    if (best.residual <= root_tol) return best;
    (gz >= 0.0 ? pos : neg) = z;
    const double gp = g_prime(s, d, z);
    double zn = 0.5 * (pos + neg);
    if (gp != 0.0 && std::isfinite(gp)) {
      const double step = z - gz / gp;
      const double lo = std::min(pos, neg), hi = std::max(pos, neg);
      if (step > lo && step < hi) zn = step;
    }
    z = zn;
  }
  return best;
}

// G(z) and the cubic num(z) = (1+gz)(1+gz+a)(1 - mu(z+1/h)) - nu g a (z+1/h)
// share their sign and roots (the discarded denominator is positive). The
// cubic's critical points split the bracket into monotone pieces, so every
// root of G can be bracketed exactly.
struct CurveRoots {
  double z[3];
  double residual[3];
  int count = 0;
};

CurveRoots pclc_curve_roots(const FadingState& s, const DualPair& d,
                            double root_tol, int max_iters) {
  CurveRoots out;
  const double a = s.f * s.q;
  const double g = s.g;
  const double n = d.nu * g * a;
  const double beta = 1.0 - d.mu / s.h;
  const double c3 = -d.mu * g * g;
  const double c2 = beta * g * g - d.mu * g * (2.0 + a);
  const double c1 = beta * g * (2.0 + a) - d.mu * (1.0 + a) - n;
  const double c0 = beta * (1.0 + a) - n / s.h;
  auto cubic = [&](double t) { return ((c3 * t + c2) * t + c1) * t + c0; };

  // Breakpoints: 0, the cubic's critical points inside the bracket, 1/mu.
  double bp[4];
  int nbp = 0;
  bp[nbp++] = 0.0;
  const double zmax = 1.0 / d.mu;
  const double qa = 3.0 * c3, qb = 2.0 * c2, qc = c1;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    const double qq = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
    double t1 = qq / qa;
    double t2 = qc / qq;
    if (t1 > t2) std::swap(t1, t2);
    if (t1 > 0.0 && t1 < zmax) bp[nbp++] = t1;
    if (t2 > 0.0 && t2 < zmax) bp[nbp++] = t2;
  }
  bp[nbp++] = zmax;

  for (int i = 0; i + 1 < nbp; ++i) {
    const double x0 = bp[i], x1 = bp[i + 1];
    const double s0 = cubic(x0), s1 = cubic(x1);
    if ((s0 >= 0.0) == (s1 >= 0.0)) continue;
    // Seed the refinement with Newton on the cubic itself; polynomial steps
    // are cheap and the piece is monotone.
    double t = 0.5 * (x0 + x1);
    for (int k = 0; k < 10; ++k) {
      const double c = cubic(t);
      const double dc = (3.0 * c3 * t + 2.0 * c2) * t + c1;
      if (dc == 0.0) break;
      const double tn = t - c / dc;
      if (!(tn > x0 && tn < x1)) break;
      const bool done = std::fabs(tn - t) <= 1e-12 * (1.0 + std::fabs(t));
      t = tn;
      if (done) break;
    }
    const CurveRoot r =
        s0 >= 0.0 ? refine_root(s, d, x0, x1, root_tol, max_iters, t)
                  : refine_root(s, d, x1, x0, root_tol, max_iters, t);
    out.z[out.count] = r.z;
    out.residual[out.count] = r.residual;
    ++out.count;
  }
  return out;
}

// A few Newton steps on the mu = 0 curve, cleaning quadratic-formula roots
// up to machine residuals for the fixed-point audit.
double polish_root_mu0(const FadingState& s, double nu, double z) {
  const DualPair d{nu, 0.0};
  for (int k = 0; k < 4; ++k) {
    const double gz = detail::pclc_g(s, d, z);
    const double gp = g_prime(s, d, z);
    if (!(std::fabs(gp) > 0.0) || !std::isfinite(gp)) break;
    const double zn = z - gz / gp;
    if (!(zn > 0.0) || !std::isfinite(zn)) break;
    z = zn;
  }
  return z;
}

// Branch-B per-state power: the first positive crossing of z = F(z) - 1/h at
// mu = 0, i.e. the local maximum of the per-state Lagrangian along the
// capacity-loss manifold. With mu = 0 the cleared-denominator form is a
// quadratic. Returns 0 when the activation test fails and kUncapped when the
// curve never crosses (no finite stationary point at mu = 0).
double first_root_mu0(const FadingState& s, double nu, double root_tol,
                      int max_iters) {
  if (s.h <= 0.0) return 0.0;
  const double a = s.f * s.q;
  const double g = s.g;
  const double n = nu * g * a;
  const double qa = g * g;
  const double qb = g * (2.0 + a) - n;
  const double qc = (1.0 + a) - n / s.h;
  if (qc <= 0.0) return 0.0;  // activation fails at mu = 0
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0 || qb >= 0.0) return kUncapped;
  const double sq = std::sqrt(disc);
  const double qq = -0.5 * (qb - sq);  // qb < 0 here
  const double z_small = qc / qq;
  if (!(z_small > 0.0) || !std::isfinite(z_small)) return kUncapped;
  // Polish on G directly; the parabola's vertex lies strictly between the
  // two roots, giving a valid negative-side bracket end.
  const double vertex = -qb / (2.0 * qa);
  const CurveRoot r =
      refine_root(s, {nu, 0.0}, 0.0, vertex, root_tol, max_iters);
  return r.residual <= std::max(root_tol, 1e-9 * (1.0 + z_small)) ? r.z
                                                                  : z_small;
}

}  // namespace

PclcProblem make_pclc_problem(const FadingEnsemble& ens, double c_delta,
                              double power_budget) {
  if (!ens.q_populated)
    throw StateError("apply a primary policy before building a pclc problem");
  if (!(c_delta >= 0) || !std::isfinite(c_delta))
    throw ParameterError("pclc: c_delta must be nonnegative and finite");
  if (!(power_budget > 0) || !std::isfinite(power_budget))
    throw ParameterError("pclc: power budget must be positive and finite");
  PclcProblem prob;
  prob.c_delta = c_delta;
  prob.power_budget = power_budget;
  prob.c_p_max = primary_capacity_max(ens);
  prob.c0 = std::max(0.0, prob.c_p_max - c_delta);
  prob.ensemble_fingerprint = ens.fingerprint();
  return prob;
}

PclcPowerResult pclc_power(const FadingState& s, const DualPair& d,
                           double root_tol, int max_iters) {
  if (!(d.mu > 0.0))
    throw UnboundedError(
        "pclc_power: mu must be positive, the root bracket [0, 1/mu] is "
        "unbounded otherwise");
  PclcPowerResult r;
  if (s.h <= 0.0) return r;

  const double a = s.f * s.q;
  if (!(a > 0.0) || !(s.g > 0.0) || !(d.nu > 0.0)) {
    // The bias term vanishes and the policy is plain water-filling.
    const double p = 1.0 / d.mu - 1.0 / s.h;
    r.p = p > 0.0 ? p : 0.0;
    return r;
  }

  const CurveRoots roots = pclc_curve_roots(s, d, root_tol, max_iters);
  r.roots_in_bracket = roots.count;
  double best_phi = d.nu * std::log1p(a);  // p = 0
  for (int k = 0; k < roots.count; ++k) {
    const double phi = detail::pclc_phi(s, d, roots.z[k]);
    if (phi > best_phi) {
      best_phi = phi;
      r.p = roots.z[k];
      r.residual = roots.residual[k];
    }
  }
  const double lam0 = a / (1.0 + a);
  const bool activation = 1.0 / (lam0 * d.nu * s.g + d.mu) - 1.0 / s.h > 0.0;
  r.guard_chose_zero = activation && r.p == 0.0;
  return r;
}

namespace {

struct FillStats {
  double mean_p = 0.0;
  double mean_gp = 0.0;
  double c_p = 0.0;
  double c_s = 0.0;
  int uncapped = 0;
};

// One point of the dual search, replayable through fill()/fill_mu0(), or an
// explicit power vector from the combinatorial mu = 0 search.
struct CandidateSpec {
  DualPair d;
  int pin = -1;
  double pin_val = 0.0;
  bool branch_b = false;
  bool has_explicit = false;
  std::vector<double> explicit_p;
};

class PclcWork {
 public:
  PclcWork(const FadingEnsemble& ens, const PclcProblem& prob,
           const SolverOptions& opts)
      : ens_(ens), prob_(prob), opts_(opts), p_(ens.size(), 0.0) {
    for (const FadingState& s : ens.states)
      max_h_ = std::max(max_h_, s.h);
  }

  double max_h() const { return max_h_; }
  int evals() const { return evals_; }
  const std::vector<double>& p() const { return p_; }

  // Fills p_ at the given duals (exact per-state argmax) and accumulates the
  // fixed-point residual statistics over all positive powers.
  FillStats fill(const DualPair& d, int pin = -1, double pin_val = 0.0) {
    ++evals_;
    detail::parallel_for(ens_.size(), [&](std::size_t i) {
      p_[i] = static_cast<int>(i) == pin
                  ? pin_val
                  : pclc_power(ens_.states[i], d, opts_.root_tol,
                               opts_.max_root_iters)
                        .p;
    });
    collect_residuals(d, pin, false);
    const FillStats st = stats(pin);
    note_feasible({d, pin, pin_val, false}, st);
    return st;
  }

  // Branch-B fill: per-state first crossing at mu = 0.
  FillStats fill_mu0(double nu) {
    ++evals_;
    detail::parallel_for(ens_.size(), [&](std::size_t i) {
      const FadingState& s = ens_.states[i];
      const double a = s.f * s.q;
      if (s.h <= 0.0) {
        p_[i] = 0.0;
      } else if (!(a > 0.0) || !(s.g > 0.0) || !(nu > 0.0)) {
        p_[i] = kUncapped;  // nothing restrains this state at mu = 0
      } else {
        p_[i] = first_root_mu0(ens_.states[i], nu, opts_.root_tol,
                               opts_.max_root_iters);
      }
    });
    collect_residuals({nu, 0.0}, -1, true);
    const FillStats st = stats(-1);
    note_feasible({{nu, 0.0}, -1, 0.0, true}, st);
    return st;
  }

  // Best feasible point seen anywhere during the dual search; a fallback
  // when no dual point certifies.
  bool has_feasible_snapshot() const { return best_seen_obj_ >= 0.0; }
  CandidateSpec feasible_snapshot() const { return best_seen_; }

  // Loads an explicit power vector and returns its statistics.
  FillStats load_explicit(const CandidateSpec& spec) {
    ++evals_;
    p_ = spec.explicit_p;
    collect_residuals(spec.d, spec.pin, spec.d.mu <= 0.0);
    return stats(spec.pin);
  }

  // mu = 0 with few states: the power budget is slack and each active
  // state's power is a stationary point of the loss manifold, a root of the
  // cleared-denominator quadratic. The optimum can sit on the rising side of
  // the curve (its per-state Lagrangian value is below p = 0), so no argmax
  // selection finds it. The per-state root structure changes only at
  // closed-form critical multipliers (the constant term's sign flip and the
  // discriminant zero), so between consecutive criticals every activation
  // pattern can be driven to a tight loss constraint by one root find.
  // Exhaustive over patterns; only affordable for small ensembles.
  bool best_combo_mu0(CandidateSpec* out) {
    const std::size_t n = ens_.size();
    if (n > 8) return false;
    for (const FadingState& s : ens_.states)
      if (s.h > 0.0 && !(s.f * s.q * s.g > 0.0))
        return false;  // a loss-free state would soak unbounded power

    // candidate powers of state i at multiplier nu: 0 plus up to two roots
    const auto candidates_at = [&](double nu, std::size_t i, double c[3]) {
      const FadingState& s = ens_.states[i];
      c[0] = 0.0;
      int cnt = 1;
      if (s.h <= 0.0) return cnt;
      const double a = s.f * s.q;
      const double g = s.g;
      const double m = nu * g * a;
      const double qa = g * g;
      const double qb = g * (2.0 + a) - m;
      const double qc = (1.0 + a) - m / s.h;
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc <= 0.0) return cnt;
      const double sq = std::sqrt(disc);
      const double qq = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
      const double r1 = qq / qa;
      const double r2 = qc / qq;
      const double lo = std::min(r1, r2), hi = std::max(r1, r2);
      if (lo > 0.0) c[cnt++] = lo;
      if (hi > 0.0) c[cnt++] = hi;
      return cnt;
    };

    const auto eval_combo = [&](const std::vector<double>& p, double* c_p,
                                double* mean_p, double* c_s) {
      double sp = 0.0, scp = 0.0, scs = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const FadingState& s = ens_.states[i];
        sp += p[i];
        scp += std::log1p(s.f * s.q / (1.0 + s.g * p[i]));
        scs += std::log1p(s.h * p[i]);
      }
      *mean_p = sp / static_cast<double>(n);
      *c_p = scp / static_cast<double>(n);
      *c_s = scs / static_cast<double>(n);
    };

    // Critical multipliers where any state's root count can change.
    std::vector<double> knots{1e-6, 1e10};
    for (const FadingState& s : ens_.states) {
      if (s.h <= 0.0) continue;
      const double a = s.f * s.q;
      const double g = s.g;
      // constant term zero: nu g a / h = 1 + a
      knots.push_back((1.0 + a) * s.h / (g * a));
      // discriminant zero in x = nu g a:
      // x^2 + x (4 g^2/h - 2 g (2+a)) + g^2 a^2 = 0
      const double b = 4.0 * g * g / s.h - 2.0 * g * (2.0 + a);
      const double c = g * g * a * a;
      const double disc = b * b - 4.0 * c;
      if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        const double qq = -0.5 * (b + (b >= 0.0 ? sq : -sq));
        for (const double x : {qq, c / qq})
          if (x > 0.0) knots.push_back(x / (g * a));
      }
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    double best_obj = -1.0;
    double best_nu = 0.0;
    std::vector<double> best_p;

    std::vector<double> p(n, 0.0);
    std::vector<int> idx(n, 0);
    std::vector<int> cnt(n, 0);
    double cand[3 * 8];
    std::vector<double> pr(n, 0.0);

    // Powers for one pattern at nu; false when a chosen root is gone.
    const auto replay = [&](const std::vector<int>& choice, double nu,
                            std::vector<double>* pp) {
      double cc[3];
      for (std::size_t i = 0; i < n; ++i) {
        if (choice[i] == 0) {
          (*pp)[i] = 0.0;
          continue;
        }
        if (choice[i] >= candidates_at(nu, i, cc)) return false;
        (*pp)[i] = cc[choice[i]];
      }
      return true;
    };

    const auto consider = [&](const std::vector<int>& choice, double nu) {
      if (!replay(choice, nu, &pr)) return;
      double c_p, mean_p, c_s;
      eval_combo(pr, &c_p, &mean_p, &c_s);
      if (c_p >= prob_.c0 - 1e-12 &&
          mean_p <= prob_.power_budget * (1.0 + 1e-12) && c_s > best_obj) {
        best_obj = c_s;
        best_nu = nu;
        best_p = pr;
      }
    };

    for (std::size_t kn = 0; kn + 1 < knots.size(); ++kn) {
      if (!(knots[kn] > 0.0)) continue;
      // interior endpoints, clear of the structure changes
      const double lo = knots[kn] * (1.0 + 1e-9);
      const double hi = knots[kn + 1] * (1.0 - 1e-9);
      if (!(hi > lo)) continue;
      const double mid = std::sqrt(lo * hi);
      for (std::size_t i = 0; i < n; ++i)
        cnt[i] = candidates_at(mid, i, cand + 3 * i);

      std::fill(idx.begin(), idx.end(), 0);
      for (;;) {
        // sample the pattern across the window (the loss gap need not be
        // monotone in nu) and tighten every crossing found
        const auto loss_gap = [&](double nu) {
          if (!replay(idx, nu, &pr))
            return std::numeric_limits<double>::quiet_NaN();
          double c_p, mean_p, c_s;
          eval_combo(pr, &c_p, &mean_p, &c_s);
          return c_p - prob_.c0;
        };
        constexpr int kInner = 16;
        const double ratio = std::pow(hi / lo, 1.0 / kInner);
        double x_prev = lo;
        double f_prev = loss_gap(lo);
        consider(idx, lo);
        for (int j = 1; j <= kInner; ++j) {
          const double x = j == kInner ? hi : lo * std::pow(ratio, j);
          const double f = loss_gap(x);
          consider(idx, x);
          if (std::isfinite(f_prev) && std::isfinite(f) &&
              (f_prev < 0.0) != (f < 0.0)) {
            const auto r = num::find_root(loss_gap, x_prev, x, f_prev, f,
                                          1e-12 * std::max(1.0, prob_.c0));
            consider(idx, r.x);
          }
          x_prev = x;
          f_prev = f;
        }
        std::size_t carry = 0;
        while (carry < n && ++idx[carry] == cnt[carry]) {
          idx[carry] = 0;
          ++carry;
        }
        if (carry == n) break;
      }
    }
    if (best_obj < 0.0) return false;

    // Polish the returned roots on the exact curve for the residual audit.
    for (std::size_t i = 0; i < n; ++i) {
      if (!(best_p[i] > 0.0)) continue;
      best_p[i] = polish_root_mu0(ens_.states[i], best_nu, best_p[i]);
    }
    out->d = {best_nu, 0.0};
    out->pin = -1;
    out->pin_val = 0.0;
    out->branch_b = true;
    out->has_explicit = true;
    out->explicit_p = std::move(best_p);
    return true;
  }

  // Three-state ensembles with both constraints tight keep one degree of
  // freedom: grid the first state's power (with local zooming), and for each
  // value scan the remaining two-state tight-tight curve. Exact up to the
  // final grid resolution; candidates compete on objective like the rest.
  bool best_triple_tight(CandidateSpec* out) {
    if (ens_.size() != 3) return false;
    const double total = 3.0 * prob_.power_budget;
    const auto cp_of = [&](const double pv[3]) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i) {
        const FadingState& st = ens_.states[i];
        s += std::log1p(st.f * st.q / (1.0 + st.g * pv[i]));
      }
      return s / 3.0;
    };
    const auto cs_of = [&](const double pv[3]) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i)
        s += std::log1p(ens_.states[i].h * pv[i]);
      return s / 3.0;
    };

    double best_obj = -1.0;
    double best_pv[3] = {0.0, 0.0, 0.0};
    const auto value_at = [&](double p0, double out_pv[3]) {
      const double rest = total - p0;
      double found = -1.0;
      if (rest < 0.0) return found;
      double pv[3] = {p0, 0.0, rest};
      const auto gap = [&](double p1) {
        pv[1] = p1;
        pv[2] = rest - p1;
        return cp_of(pv) - prob_.c0;
      };
      constexpr int kInner = 256;
      double x_prev = 0.0, f_prev = gap(0.0);
      for (int j = 1; j <= kInner; ++j) {
        const double x = rest * j / kInner;
        const double f = gap(x);
        if ((f_prev < 0.0) != (f < 0.0)) {
          const auto r = num::find_root(gap, x_prev, x, f_prev, f,
                                        1e-13 * std::max(1.0, prob_.c0));
          pv[1] = r.x;
          pv[2] = rest - r.x;
          const double obj = cs_of(pv);
          if (obj > found) {
            found = obj;
            out_pv[0] = pv[0];
            out_pv[1] = pv[1];
            out_pv[2] = pv[2];
          }
        }
        x_prev = x;
        f_prev = f;
      }
      return found;
    };

    // Dense first sweep; the manifold objective is multimodal in p0, so the
    // local zooms start from every separated peak.
    constexpr int kSweep = 256;
    std::vector<double> sweep(kSweep + 1, -1.0);
    double tmp_pv[3];
    for (int j = 0; j <= kSweep; ++j) {
      const double v = value_at(total * j / kSweep, tmp_pv);
      sweep[j] = v;
      if (v > best_obj) {
        best_obj = v;
        best_pv[0] = tmp_pv[0];
        best_pv[1] = tmp_pv[1];
        best_pv[2] = tmp_pv[2];
      }
    }
    if (best_obj < 0.0) return false;

    std::vector<int> peaks;
    for (int j = 0; j <= kSweep; ++j) {
      if (sweep[j] < 0.0) continue;
      const double left = j > 0 ? sweep[j - 1] : -1.0;
      const double right = j < kSweep ? sweep[j + 1] : -1.0;
      if (sweep[j] >= left && sweep[j] >= right) peaks.push_back(j);
    }
    std::sort(peaks.begin(), peaks.end(),
              [&](int a, int b) { return sweep[a] > sweep[b]; });
    if (peaks.size() > 3) peaks.resize(3);

    for (const int pk : peaks) {
      double center = total * pk / kSweep;
      double half = total / kSweep;
      for (int pass = 0; pass < 3; ++pass) {
        const double lo = std::max(0.0, center - half);
        const double hi = std::min(total, center + half);
        double local = -1.0, local_p0 = center;
        for (int j = 0; j <= 64; ++j) {
          const double p0 = lo + (hi - lo) * j / 64.0;
          const double v = value_at(p0, tmp_pv);
          if (v > local) {
            local = v;
            local_p0 = p0;
            if (v > best_obj) {
              best_obj = v;
              best_pv[0] = tmp_pv[0];
              best_pv[1] = tmp_pv[1];
              best_pv[2] = tmp_pv[2];
            }
          }
        }
        center = local_p0;
        half = 2.0 * (hi - lo) / 64.0;
      }
    }

    // Implied multipliers from two active states when consistent.
    DualPair d{0.0, 0.0};
    int a1 = -1, a2 = -1;
    for (int i = 0; i < 3; ++i)
      if (best_pv[i] > 1e-12) (a1 < 0 ? a1 : a2) = i;
    if (a1 >= 0 && a2 >= 0) {
      double lhs[2], lam[2];
      const int act[2] = {a1, a2};
      for (int j = 0; j < 2; ++j) {
        const FadingState& st = ens_.states[act[j]];
        lhs[j] = st.h / (1.0 + st.h * best_pv[act[j]]);
        lam[j] = lambda_factor(st, best_pv[act[j]]).value * st.g;
      }
      const double det = lam[0] - lam[1];
      if (std::fabs(det) > 1e-12) {
        const double nu = (lhs[0] - lhs[1]) / det;
        const double mu = lhs[0] - nu * lam[0];
        if (nu >= -1e-9 && mu >= -1e-9)
          d = {std::max(nu, 0.0), std::max(mu, 0.0)};
      }
    }
    out->d = d;
    out->pin = -1;
    out->pin_val = 0.0;
    out->branch_b = d.mu <= 0.0;
    out->has_explicit = true;
    out->explicit_p = {best_pv[0], best_pv[1], best_pv[2]};
    return true;
  }

  // Two-state ensembles with both constraints tight have their powers pinned
  // by the two equations alone, and the loss curve can cross the budget line
  // several times; the best crossing need not be a per-state Lagrangian
  // argmax (the rising-side phenomenon again), so scan the budget line for
  // every crossing directly.
  bool best_pair_tight(CandidateSpec* out) {
    if (ens_.size() != 2) return false;
    const double total = 2.0 * prob_.power_budget;
    const auto cp_gap = [&](double p0) {
      double s = 0.0;
      const double pv[2] = {p0, total - p0};
      for (int i = 0; i < 2; ++i) {
        const FadingState& st = ens_.states[i];
        s += std::log1p(st.f * st.q / (1.0 + st.g * pv[i]));
      }
      return 0.5 * s - prob_.c0;
    };
    double best_obj = -1.0, best_p0 = 0.0;
    constexpr int kGrid = 4096;
    double prev_x = 0.0;
    double prev_f = cp_gap(0.0);
    for (int j = 1; j <= kGrid; ++j) {
      const double x = total * j / kGrid;
      const double f = cp_gap(x);
      if ((prev_f < 0.0) != (f < 0.0)) {
        const auto r = num::find_root(cp_gap, prev_x, x, prev_f, f,
                                      1e-13 * std::max(1.0, prob_.c0));
        const double obj =
            0.5 * (std::log1p(ens_.states[0].h * r.x) +
                   std::log1p(ens_.states[1].h * (total - r.x)));
        if (obj > best_obj) {
          best_obj = obj;
          best_p0 = r.x;
        }
      }
      prev_x = x;
      prev_f = f;
    }
    if (best_obj < 0.0) return false;

    // Multipliers implied by the two stationarity identities, for reporting
    // and the residual audit; the candidate competes on its objective alone.
    const double pv[2] = {best_p0, total - best_p0};
    double lhs[2], lam[2];
    for (int i = 0; i < 2; ++i) {
      const FadingState& st = ens_.states[i];
      lhs[i] = st.h / (1.0 + st.h * pv[i]);
      lam[i] = lambda_factor(st, pv[i]).value * st.g;
    }
    DualPair d{0.0, 0.0};
    const double det = lam[0] - lam[1];
    if (std::fabs(det) > 1e-12) {
      const double nu = (lhs[0] - lhs[1]) / det;
      const double mu = lhs[0] - nu * lam[0];
      if (nu >= -1e-9 && mu >= -1e-9)
        d = {std::max(nu, 0.0), std::max(mu, 0.0)};
    }
    out->d = d;
    out->pin = -1;
    out->pin_val = 0.0;
    out->branch_b = d.mu <= 0.0;
    out->has_explicit = true;
    out->explicit_p = {pv[0], pv[1]};
    return true;
  }

  double mu_for_budget(double nu, int pin = -1, double pin_val = 0.0) {
    const double budget = prob_.power_budget;
    const double mu_max = std::max(max_h_, kMuSolveFloor * 2.0);
    auto excess = [&](double mu) {
      return fill({nu, mu}, pin, pin_val).mean_p - budget;
    };

    // The allocated mean is nonincreasing in mu. Bracket around the previous
    // root when one is known, otherwise from the top of the range.
    double lo, hi, flo, fhi;
    if (mu_hint_ > kMuSolveFloor && mu_hint_ < mu_max) {
      lo = std::max(mu_hint_ * 0.5, kMuSolveFloor);
      hi = std::min(mu_hint_ * 2.0, mu_max);
      flo = excess(lo);
      fhi = excess(hi);
    } else {
      hi = mu_max;
      fhi = excess(hi);
      lo = std::max(hi / 4.0, kMuSolveFloor);
      flo = excess(lo);
    }
    while (fhi > 0.0 && hi < mu_max) {
      lo = hi;
      flo = fhi;
      hi = std::min(hi * 16.0, mu_max);
      fhi = excess(hi);
    }
    if (fhi > 0.0) return mu_max;  // pinned power already exhausts the budget
    while (flo < 0.0 && lo > kMuSolveFloor) {
      hi = lo;
      fhi = flo;
      lo = std::max(lo / 16.0, kMuSolveFloor);
      flo = excess(lo);
    }
    if (flo < 0.0) return lo;  // budget slack even at the floor: branch B land
    // 1e-9 on the mean keeps mu's complementary slackness far below the 1e-6
    // bar (mu stays O(1)) without grinding on tie discontinuities.
    const auto r = num::find_root(excess, lo, hi, flo, fhi,
                                  1e-9 * std::max(1.0, budget));
    mu_hint_ = r.x;
    return r.x;
  }

  // Budget balancing that survives tie discontinuities. The allocated mean
  // is a staircase in mu whenever far-hump states flip on/off; when the
  // bisection jams on a step, the flip state is pinned at the intermediate
  // power that makes the budget exactly tight (the time-sharing solution).
  struct BudgetBalance {
    double mu = 0.0;
    int pin = -1;
    double pin_val = 0.0;
    double mean_p = 0.0;
    double c_p = 0.0;
  };

  BudgetBalance balance_budget(double nu) {
    const double budget = prob_.power_budget;
    const double mu = mu_for_budget(nu);
    const FillStats st = fill({nu, mu});
    BudgetBalance bb{mu, -1, 0.0, st.mean_p, st.c_p};
    if (std::fabs(st.mean_p - budget) <= 4e-9 * std::max(1.0, budget))
      return bb;

    // Straddle the tie; only the flip state moves across this window.
    const double mu_a = mu * (1.0 - 4e-9);
    const double mu_b = mu * (1.0 + 4e-9);
    const FillStats sa = fill({nu, mu_a});
    std::vector<double> pa = p_;
    const FillStats sb = fill({nu, mu_b});
    int t = -1;
    double dmax = 0.0;
    for (std::size_t i = 0; i < ens_.size(); ++i) {
      const double dp = std::fabs(pa[i] - p_[i]);
      if (dp > dmax) {
        dmax = dp;
        t = static_cast<int>(i);
      }
    }
    if (t < 0) return bb;

    const bool off_is_b = sb.mean_p <= budget;
    const double mu_off = off_is_b ? mu_b : mu_a;
    const double mean_off = off_is_b ? sb.mean_p : sa.mean_p;
    const double p_off = off_is_b ? p_[t] : pa[t];
    double pin_val = static_cast<double>(ens_.size()) * (budget - mean_off) +
                     p_off;
    const double p_lo = std::min(pa[t], p_[t]);
    const double p_hi = std::max(pa[t], p_[t]);
    pin_val = std::min(std::max(pin_val, p_lo), p_hi);

    const FillStats sp = fill({nu, mu_off}, t, pin_val);
    return {mu_off, t, pin_val, sp.mean_p, sp.c_p};
  }

  // Certification pass + final packaging. The per-state powers are refilled
  // at the final multipliers and multi-root brackets are counted; branch-B
  // solutions keep their mu = 0 powers.
  PolicySolution finalize(const CandidateSpec& spec) {
    const DualPair d = spec.d;
    const int pin = spec.pin;
    FillStats st;
    int multi_roots = 0;
    std::vector<char> multi_root_state(ens_.size(), 0);
    if (spec.has_explicit) {
      st = load_explicit(spec);
    } else if (spec.branch_b) {
      st = fill_mu0(d.nu);
    } else {
      st = fill(d, pin, spec.pin_val);
      for (std::size_t i = 0; i < ens_.size(); ++i) {
        if (static_cast<int>(i) == pin) continue;
        const auto r = pclc_power(ens_.states[i], d, opts_.root_tol,
                                  opts_.max_root_iters);
        if (r.roots_in_bracket > 1) {
          ++multi_roots;
          multi_root_state[i] = 1;
        }
      }
    }

    PolicySolution sol;
    sol.p = p_;
    sol.duals = d;
    sol.achieved_power = st.mean_p;
    sol.achieved_interference = st.mean_gp;
    sol.c_p = st.c_p;
    sol.c_s = secondary_capacity(ens_, sol.p);
    sol.iterations = evals_;
    sol.multi_root_states = multi_roots;
    sol.tie_repaired_state = pin;
    sol.max_fixed_point_residual = max_fp_residual_;
    sol.fixed_point_checks = fp_checks_;

    // Activation rule: p > 0 iff lambda(0) nu g + mu < h. This characterizes
    // states in the unique-root regime of the fixed-point curve; multi-root
    // states satisfy the sharper argmax condition instead and are reported
    // via multi_root_states. Explicit mu = 0 patterns choose activations
    // combinatorially, so the rule does not apply to them.
    double activation = 0.0;
    if (!spec.has_explicit) {
      for (std::size_t i = 0; i < ens_.size(); ++i) {
        if (static_cast<int>(i) == pin || multi_root_state[i]) continue;
        const FadingState& s = ens_.states[i];
        if (s.h <= 0.0) continue;
        const double level = lambda_factor(s, 0.0).value * d.nu * s.g + d.mu;
        if (p_[i] > 0.0)
          activation = std::max(activation, std::max(0.0, level - s.h));
        else
          activation = std::max(activation, std::max(0.0, s.h - level));
      }
    }

    const double feas_c = std::max(0.0, prob_.c0 - st.c_p);
    const double feas_p = std::max(0.0, st.mean_p - prob_.power_budget);
    const double cs_c = d.nu > 0.0 ? d.nu * std::fabs(st.c_p - prob_.c0) : 0.0;
    const double cs_p = d.mu * std::fabs(prob_.power_budget - st.mean_p);
    sol.kkt_residual = std::max(
        {activation, feas_c, feas_p, cs_c, cs_p, max_fp_residual_});
    sol.converged = sol.kkt_residual <= opts_.tol && st.uncapped == 0;
    if (st.uncapped > 0)
      sol.diagnostic = "mu = 0 branch left states without a finite cap";

    if (spec.branch_b || spec.has_explicit) {
      // The per-state Lagrangian is unbounded at mu = 0: the dual value does
      // not exist and the gap is reported as infinite.
      sol.duality_gap = std::numeric_limits<double>::infinity();
    } else {
      // A pinned (time-shared) state contributes its Lagrangian shortfall to
      // the reported gap even when the solution is optimal.
      const double sup_mean = detail::blocked_mean(
          ens_.size(), [&](std::size_t i) {
            const FadingState& s = ens_.states[i];
            const double a = s.f * s.q;
            const double at_p = detail::pclc_phi(s, d, p_[i]);
            const double at_zero = d.nu * std::log1p(a);
            return std::max(at_p, at_zero);
          });
      sol.duality_gap =
          sup_mean - d.nu * prob_.c0 + d.mu * prob_.power_budget - sol.c_s;
    }
    return sol;
  }

 private:
  FillStats stats(int pin) {
    FillStats st;
    st.mean_p = detail::blocked_mean(ens_.size(),
                                     [&](std::size_t i) { return p_[i]; });
    st.mean_gp = detail::blocked_mean(ens_.size(), [&](std::size_t i) {
      return ens_.states[i].g * p_[i];
    });
    st.c_p = detail::blocked_mean(ens_.size(), [&](std::size_t i) {
      const FadingState& s = ens_.states[i];
      return std::log1p(s.f * s.q / (1.0 + s.g * p_[i]));
    });
    st.c_s = detail::blocked_mean(ens_.size(), [&](std::size_t i) {
      return std::log1p(ens_.states[i].h * p_[i]);
    });
    for (std::size_t i = 0; i < ens_.size(); ++i)
      if (p_[i] >= kUncapped && static_cast<int>(i) != pin) ++st.uncapped;
    return st;
  }

  void note_feasible(const CandidateSpec& spec, const FillStats& st) {
    if (st.uncapped > 0) return;
    if (st.c_p < prob_.c0 - 1e-12) return;
    if (st.mean_p > prob_.power_budget * (1.0 + 1e-12)) return;
    if (st.c_s > best_seen_obj_) {
      best_seen_obj_ = st.c_s;
      best_seen_ = spec;
    }
  }

  void collect_residuals(const DualPair& d, int pin, bool mu0) {
    if (!(d.nu > 0.0) && !(d.mu > 0.0)) return;  // no usable multipliers
    // The audit covers every combination whose curve scale keeps a 1e-10
    // absolute residual above double rounding noise; the solve floor on mu
    // keeps all production fills inside that regime.
    const double scale_cap =
        opts_.root_tol / (8.0 * std::numeric_limits<double>::epsilon());
    for (std::size_t i = 0; i < ens_.size(); ++i) {
      if (static_cast<int>(i) == pin || !(p_[i] > 0.0) || p_[i] >= kUncapped)
        continue;
      const FadingState& s = ens_.states[i];
      const double scale =
          p_[i] + 1.0 / s.h + (mu0 ? 0.0 : 1.0 / d.mu);
      if (scale > scale_cap) continue;
      const double resid = std::fabs(
          detail::pclc_g(s, mu0 ? DualPair{d.nu, 0.0} : d, p_[i]));
      ++fp_checks_;
      max_fp_residual_ = std::max(max_fp_residual_, resid);
    }
  }

  const FadingEnsemble& ens_;
  const PclcProblem& prob_;
  const SolverOptions& opts_;
  std::vector<double> p_;
  double max_h_ = 0.0;
  double mu_hint_ = -1.0;  // last budget-balancing mu, warm start
  int evals_ = 0;
  std::uint64_t fp_checks_ = 0;
  double max_fp_residual_ = 0.0;
  double best_seen_obj_ = -1.0;
  CandidateSpec best_seen_;
};

// Polyak-style projected subgradient on (nu, mu); warm start for the
// finisher, and the documented default search.
DualPair subgradient_phase(PclcWork& work, const FadingEnsemble& ens,
                           const PclcProblem& prob, const SolverOptions& opts,
                           bool* hit_tol) {
  DualPair d{1.0, 1.0 / (prob.power_budget + 1.0 / work.max_h())};
  double best_primal = 0.0;
  *hit_tol = false;
  for (int k = 0; k < opts.max_iters; ++k) {
    const FillStats st = work.fill(d);
    // Feasible objective bound: scale the powers back inside the budget and
    // keep the result only if the capacity-loss constraint still holds.
    {
      const double scale =
          st.mean_p > prob.power_budget ? prob.power_budget / st.mean_p : 1.0;
      const double cp_scaled =
          scale == 1.0 ? st.c_p
                       : detail::blocked_mean(ens.size(), [&](std::size_t i) {
                           const FadingState& s = ens.states[i];
                           return std::log1p(s.f * s.q /
                                             (1.0 + s.g * scale *
                                                        work.p()[i]));
                         });
      if (cp_scaled >= prob.c0) {
        const double obj =
            detail::blocked_mean(ens.size(), [&](std::size_t i) {
              return std::log1p(ens.states[i].h * scale * work.p()[i]);
            });
        best_primal = std::max(best_primal, obj);
      }
    }

    const double slack_c = st.c_p - prob.c0;
    const double slack_p = prob.power_budget - st.mean_p;
    const double resid =
        std::max({std::max(0.0, -slack_c), std::max(0.0, -slack_p),
                  d.nu * std::fabs(slack_c), d.mu * std::fabs(slack_p)});
    if (resid <= opts.tol) {
      *hit_tol = true;
      return d;
    }

    const double dv = detail::blocked_mean(ens.size(), [&](std::size_t i) {
                        const FadingState& s = ens.states[i];
                        return std::max(detail::pclc_phi(s, d, work.p()[i]),
                                        d.nu * std::log1p(s.f * s.q));
                      }) -
                      d.nu * prob.c0 + d.mu * prob.power_budget;
    const double margin = 0.05 * std::max(1.0, std::fabs(dv)) / (10.0 + k);
    const double norm2 = slack_c * slack_c + slack_p * slack_p;
    if (norm2 <= 0.0) return d;
    const double step = (dv - best_primal + margin) / norm2;
    d.nu = std::max(0.0, d.nu - step * slack_c);
    d.mu = std::max(kMuSolveFloor, d.mu - step * slack_p);
  }
  return d;
}

}  // namespace

PolicySolution solve_pclc(const FadingEnsemble& ens, const PclcProblem& prob,
                          const SolverOptions& opts) {
  if (ens.size() < 1) throw ParameterError("ensemble must be nonempty");
  if (prob.ensemble_fingerprint != ens.fingerprint())
    throw ConsistencyError(
        "pclc problem was built for a different ensemble (fingerprint "
        "mismatch)");

  PclcWork work(ens, prob, opts);

  if (work.max_h() <= 0.0) {
    PolicySolution sol;
    sol.p.assign(ens.size(), 0.0);
    sol.c_p = prob.c_p_max;
    sol.kkt_residual = 0.0;
    sol.converged = true;
    sol.duality_gap = 0.0;
    sol.diagnostic = "degenerate ensemble: every effective gain is zero";
    return sol;
  }

  if (opts.method == DualMethod::kSubgradient) {
    bool hit_tol = false;
    const DualPair d = subgradient_phase(work, ens, prob, opts, &hit_tol);
    if (!opts.polish) return work.finalize({d, -1, 0.0, false});
  }

  const double feas_tol = std::max(1e-12, 1e-12 * prob.c0);

  // Loss constraint slack at plain water-filling: nu = 0.
  const double mu_wf = work.mu_for_budget(0.0);
  if (work.fill({0.0, mu_wf}).c_p >= prob.c0 - feas_tol)
    return work.finalize({{0.0, mu_wf}, -1, 0.0, false});

  // Zero tolerable loss: the secondary may only use states where the primary
  // is deaf to it (g f q = 0); water-fill those with the full budget.
  if (prob.c_delta <= 0.0) {
    std::vector<char> free_state(ens.size(), 0);
    bool any_usable = false;
    for (std::size_t i = 0; i < ens.size(); ++i) {
      const FadingState& s = ens.states[i];
      if (!(s.g * s.f * s.q > 0.0)) {
        free_state[i] = 1;
        if (s.h > 0.0) any_usable = true;
      }
    }

    PolicySolution sol;
    sol.p.assign(ens.size(), 0.0);
    double mu = 0.0;
    if (any_usable) {
      // Water level over the free states only, budget measured on the whole
      // ensemble mean.
      auto restricted_mean = [&](double m) {
        return detail::blocked_mean(ens.size(), [&](std::size_t i) {
          if (!free_state[i] || ens.states[i].h <= 0.0) return 0.0;
          const double p = 1.0 / m - 1.0 / ens.states[i].h;
          return p > 0.0 ? p : 0.0;
        });
      };
      double hi = work.max_h();
      double lo = hi / 4.0;
      while (restricted_mean(lo) < prob.power_budget && lo > 1e-300) lo /= 16.0;
      const auto r = num::find_root(
          [&](double m) { return restricted_mean(m) - prob.power_budget; },
          lo, hi, restricted_mean(lo) - prob.power_budget,
          restricted_mean(hi) - prob.power_budget,
          1e-13 * std::max(1.0, prob.power_budget));
      mu = r.x;
      for (std::size_t i = 0; i < ens.size(); ++i) {
        if (!free_state[i] || ens.states[i].h <= 0.0) continue;
        const double p = 1.0 / mu - 1.0 / ens.states[i].h;
        sol.p[i] = p > 0.0 ? p : 0.0;
      }
    }
    // Certificate multiplier: large enough to silence every lossy state.
    double nu = 0.0;
    for (std::size_t i = 0; i < ens.size(); ++i) {
      const FadingState& s = ens.states[i];
      if (free_state[i] || s.h <= mu) continue;
      nu = std::max(nu, (s.h - mu) / (lambda_factor(s, 0.0).value * s.g));
    }
    sol.duals = {nu, mu};
    sol.achieved_power = detail::blocked_mean(
        ens.size(), [&](std::size_t i) { return sol.p[i]; });
    sol.achieved_interference = detail::blocked_mean(
        ens.size(), [&](std::size_t i) { return ens.states[i].g * sol.p[i]; });
    sol.c_p = primary_capacity(ens, sol.p);
    sol.c_s = secondary_capacity(ens, sol.p);
    sol.iterations = work.evals();
    const double cs_p =
        mu * std::fabs(prob.power_budget - sol.achieved_power);
    sol.kkt_residual = std::max(std::max(0.0, prob.c0 - sol.c_p), cs_p);
    sol.converged = sol.kkt_residual <= opts.tol;
    sol.duality_gap = 0.0;
    return sol;
  }

  // Candidate dual points, assessed by replaying their fills. A candidate
  // certifies when both constraints hold and complementary slackness is
  // tight; a certified reconstruction equals the dual value, so it is a
  // global optimum of the nonconvex primal.
  struct Assessed {
    CandidateSpec spec;
    double obj = -1.0;
    bool feasible = false;
    bool certified = false;
  };
  const double half_tol = 0.5 * opts.tol;
  auto assess = [&](const CandidateSpec& spec) {
    Assessed a;
    a.spec = spec;
    const FillStats st = spec.has_explicit ? work.load_explicit(spec)
                         : spec.branch_b
                             ? work.fill_mu0(spec.d.nu)
                             : work.fill(spec.d, spec.pin, spec.pin_val);
    a.obj = st.c_s;
    a.feasible = st.uncapped == 0 && st.c_p >= prob.c0 - half_tol &&
                 st.mean_p <= prob.power_budget + half_tol;
    // Only a mu > 0 argmax reconstruction with tight complementary slackness
    // proves optimality (its objective equals the dual value, which bounds
    // every feasible policy). mu = 0 points are merely feasible stationary
    // candidates and keep competing on objective.
    const double cs_c = spec.d.nu * std::fabs(st.c_p - prob.c0);
    const double cs_p = spec.d.mu * std::fabs(prob.power_budget - st.mean_p);
    a.certified = a.feasible && !spec.branch_b && !spec.has_explicit &&
                  spec.d.mu > 0.0 && cs_c <= half_tol && cs_p <= half_tol;
    // A pinned state weakens the certificate by its Lagrangian shortfall; a
    // genuine time-sharing tie costs nothing, anything more is just a
    // feasible point.
    if (a.certified && spec.pin >= 0) {
      const FadingState& ps = ens.states[spec.pin];
      const double aa = ps.f * ps.q;
      double best_phi = spec.d.nu * std::log1p(aa);
      const CurveRoots roots =
          pclc_curve_roots(ps, spec.d, opts.root_tol, opts.max_root_iters);
      for (int r = 0; r < roots.count; ++r)
        best_phi = std::max(best_phi,
                            detail::pclc_phi(ps, spec.d, roots.z[r]));
      const double shortfall =
          best_phi - detail::pclc_phi(ps, spec.d, spec.pin_val);
      if (shortfall > 1e-7 * std::max(1.0, std::fabs(a.obj)) *
                          static_cast<double>(ens.size()))
        a.certified = false;
    }
    return a;
  };
  std::vector<Assessed> candidates;

  // Branch A: both constraints tight. Nested bisection, with the budget
  // balanced (through mu plus a possible time-shared pin) inside every
  // loss-residual evaluation.
  auto loss_residual = [&](double nu) {
    return work.balance_budget(nu).c_p - prob.c0;
  };

  double nu_lo = 0.0;
  double f_lo = work.fill({0.0, mu_wf}).c_p - prob.c0;  // < 0 here
  double nu_hi = 1.0;
  double f_hi = loss_residual(nu_hi);
  while (f_hi < 0.0 && nu_hi < kNuCap) {
    nu_lo = nu_hi;
    f_lo = f_hi;
    nu_hi *= 8.0;
    f_hi = loss_residual(nu_hi);
  }
  const double nu_reach = nu_hi;

  if (f_hi >= 0.0) {
    // 2e-8 on the loss keeps nu's complementary slackness within tol for
    // moderate nu; the tie repair re-tightens when it is not enough.
    const auto r = num::find_root(loss_residual, nu_lo, nu_hi, f_lo, f_hi,
                                  2e-8 * std::max(1.0, prob.c0));
    const double nu = r.x;
    const auto bb = work.balance_budget(nu);
    candidates.push_back(assess({{nu, bb.mu}, bb.pin, bb.pin_val, false}));

    if (!candidates.back().certified) {
      // The loss constraint stuck on a state flip across the outer root (a
      // time-sharing tie in nu). Pin the most ambiguous state and drive the
      // loss constraint tight with its power while mu keeps the budget tight.
      const DualPair d{nu, bb.mu};
      int tie = -1;
      double tie_gap = std::numeric_limits<double>::infinity();
      double tie_root = 0.0;
      for (std::size_t i = 0; i < ens.size(); ++i) {
        const FadingState& s = ens.states[i];
        if (s.h <= 0.0) continue;
        const double a = s.f * s.q;
        if (!(a > 0.0) || !(s.g > 0.0)) continue;
        // Best positive stationary point regardless of the p = 0 guard: the
        // power this state would take when switched on.
        const CurveRoots roots =
            pclc_curve_roots(s, d, opts.root_tol, opts.max_root_iters);
        if (roots.count == 0) continue;
        double best_z = roots.z[0];
        double best_phi = detail::pclc_phi(s, d, best_z);
        for (int k = 1; k < roots.count; ++k) {
          const double phi = detail::pclc_phi(s, d, roots.z[k]);
          if (phi > best_phi) {
            best_phi = phi;
            best_z = roots.z[k];
          }
        }
        const double gap = std::fabs(best_phi - d.nu * std::log1p(a));
        if (gap < tie_gap) {
          tie_gap = gap;
          tie = static_cast<int>(i);
          tie_root = best_z;
        }
      }
      if (tie >= 0) {
        auto pinned_loss = [&](double pt) {
          const double m = work.mu_for_budget(nu, tie, pt);
          return work.fill({nu, m}, tie, pt).c_p - prob.c0;
        };
        const double f_off = pinned_loss(0.0);
        const double f_on = pinned_loss(tie_root);
        if (f_off >= 0.0 && f_on <= 0.0) {
          const auto rp = num::find_root(pinned_loss, 0.0, tie_root, f_off,
                                         f_on, 1e-10 * std::max(1.0, prob.c0));
          const double m = work.mu_for_budget(nu, tie, rp.x);
          candidates.push_back(assess({{nu, m}, tie, rp.x, false}));
        }
      }
    }
  }

  auto pick = [&](bool needs_certificate) -> const Assessed* {
    const Assessed* best = nullptr;
    for (const Assessed& a : candidates) {
      if (needs_certificate ? !a.certified : !a.feasible) continue;
      if (!best || a.obj > best->obj) best = &a;
    }
    return best;
  };

  if (const Assessed* c = pick(true))
    return work.finalize(c->spec);

  // Nothing certified: the dual surface is kinky (tiny ensembles) or the
  // power constraint is genuinely slack. Widen the search.
  //
  // Branch B: per-state powers are the first crossings of the mu = 0 curve
  // (the power budget goes slack); nu makes the loss constraint tight.
  {
    auto loss_residual_mu0 = [&](double nu) {
      return work.fill_mu0(nu).c_p - prob.c0;
    };
    double b_lo = 1.0, fb_lo = loss_residual_mu0(b_lo);
    while (fb_lo > 0.0 && b_lo > 1e-12) {
      b_lo /= 16.0;
      fb_lo = loss_residual_mu0(b_lo);
    }
    double b_hi = std::max(2.0 * b_lo, 1.0), fb_hi = loss_residual_mu0(b_hi);
    while (fb_hi < 0.0 && b_hi < kNuCap) {
      b_lo = b_hi;
      fb_lo = fb_hi;
      b_hi *= 8.0;
      fb_hi = loss_residual_mu0(b_hi);
    }
    if (fb_lo <= 0.0 && fb_hi >= 0.0) {
      const auto rb = num::find_root(loss_residual_mu0, b_lo, b_hi, fb_lo,
                                     fb_hi, 1e-12 * std::max(1.0, prob.c0));
      candidates.push_back(assess({{rb.x, 0.0}, -1, 0.0, true}));
    }
  }

  // Small ensembles: enumerate mu = 0 activation patterns exactly, and the
  // whole both-constraints-tight set for two and three states.
  {
    CandidateSpec combo;
    if (work.best_combo_mu0(&combo)) candidates.push_back(assess(combo));
    CandidateSpec pair;
    if (work.best_pair_tight(&pair)) candidates.push_back(assess(pair));
    CandidateSpec triple;
    if (work.best_triple_tight(&triple)) candidates.push_back(assess(triple));
  }

  // Rescue scan: the loss residual need not be monotone in nu, so look for
  // additional sign changes across the whole range reached above.
  {
    const double scan_lo = 1e-3;
    const double scan_hi = std::min(nu_reach * 8.0, kNuCap);
    constexpr int kScan = 20;
    double prev_nu = scan_lo;
    double prev_f = loss_residual(prev_nu);
    const double step = std::pow(scan_hi / scan_lo, 1.0 / kScan);
    int extra = 0;
    for (int j = 1; j <= kScan && extra < 4; ++j) {
      const double nu = scan_lo * std::pow(step, j);
      const double f = loss_residual(nu);
      if ((prev_f < 0.0) != (f < 0.0)) {
        const auto r = prev_f < 0.0
                           ? num::find_root(loss_residual, prev_nu, nu, prev_f,
                                            f, 2e-8 * std::max(1.0, prob.c0))
                           : num::find_root(loss_residual, nu, prev_nu, f,
                                            prev_f,
                                            2e-8 * std::max(1.0, prob.c0));
        const auto bb = work.balance_budget(r.x);
        candidates.push_back(
            assess({{r.x, bb.mu}, bb.pin, bb.pin_val, false}));
        ++extra;
      }
      prev_nu = nu;
      prev_f = f;
    }
  }

  // Anything feasible the search visited is an admissible fallback. The
  // final pick is the best feasible objective: a certified point, when one
  // exists, bounds every feasible policy and wins automatically.
  if (work.has_feasible_snapshot())
    candidates.push_back(assess(work.feasible_snapshot()));

  if (const Assessed* c = pick(false)) {
    PolicySolution sol = work.finalize(c->spec);
    if (!sol.converged && sol.diagnostic.empty())
      sol.diagnostic =
          "nonconvex kink: returned the best feasible reconstruction found";
    return sol;
  }

  PolicySolution sol = work.finalize({{nu_reach, 0.0}, -1, 0.0, true});
  sol.converged = false;
  sol.diagnostic = "no feasible dual reconstruction found";
  return sol;
}

}  // namespace specshare
