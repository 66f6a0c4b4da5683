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

#ifndef SPECSHARE_CAPACITY_HPP
#define SPECSHARE_CAPACITY_HPP

#include <span>

#include "specshare/fading.hpp"

namespace specshare {

// All capacities are ergodic rates in nats per channel use: sample means of
// log(1 + SINR) over one ensemble. Using the same sample-mean operator for
// constraints and capacities keeps solvers and frontier evaluations mutually
// consistent.

struct CapacityPoint {
  double c_p = 0.0;
  double c_s = 0.0;
};

// Fixed-policy rate bounds from the auxiliary two-user multiple-access
// channel with collocated receivers: per state || h_p ||^2 = f + o,
// || h_s ||^2 = g + e, and the joint bound uses the 2x2 determinant
// (1 + q(f+o))(1 + p(g+e)) - q p |h_p^H h_s|^2.
struct MacBounds {
  double pu_bound = 0.0;
  double su_bound = 0.0;
  double sum_bound = 0.0;
};

// mean log(1 + f q / (1 + g p)); the primary rate with the secondary
// interference treated as noise.
double primary_capacity(const FadingEnsemble& ens, std::span<const double> p);

// mean log(1 + f q); the interference-free primary rate.
double primary_capacity_max(const FadingEnsemble& ens);

// mean log(1 + h p).
double secondary_capacity(const FadingEnsemble& ens, std::span<const double> p);

// Checks the protection guarantee of the average-interference constraint: if
// mean(g p) <= gamma then the primary capacity loss is at most log(1+gamma).
struct LossBoundCheck {
  bool holds = false;            // loss <= log(1+gamma) + slack
  bool precondition_ok = false;  // mean(g p) <= gamma
  double loss = 0.0;             // primary_capacity_max - primary_capacity
  double bound = 0.0;            // log(1 + gamma)
  double achieved_interference = 0.0;
};
LossBoundCheck capacity_loss_bound_check(const FadingEnsemble& ens,
                                         std::span<const double> p,
                                         double gamma, double slack = 1e-9);

MacBounds mac_rate_bounds(const FadingEnsemble& ens, std::span<const double> p);

}  // namespace specshare

#endif  // SPECSHARE_CAPACITY_HPP
