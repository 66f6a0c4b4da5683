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

#include "specshare/capacity.hpp"

#include <cmath>

#include "specshare/errors.hpp"
#include "specshare/runtime.hpp"

namespace specshare {
namespace {

void check_length(const FadingEnsemble& ens, std::span<const double> p) {
  if (p.size() != ens.size())
    throw ParameterError("power vector length does not match ensemble size");
}

}  // namespace

double primary_capacity(const FadingEnsemble& ens, std::span<const double> p) {
  check_length(ens, p);
  return detail::blocked_mean(ens.size(), [&](std::size_t i) {
    const FadingState& s = ens.states[i];
    return std::log1p(s.f * s.q / (1.0 + s.g * p[i]));
  });
}

double primary_capacity_max(const FadingEnsemble& ens) {
  return detail::blocked_mean(ens.size(), [&](std::size_t i) {
    const FadingState& s = ens.states[i];
    return std::log1p(s.f * s.q);
  });
}

double secondary_capacity(const FadingEnsemble& ens,
                          std::span<const double> p) {
  check_length(ens, p);
  return detail::blocked_mean(ens.size(), [&](std::size_t i) {
    return std::log1p(ens.states[i].h * p[i]);
  });
}

LossBoundCheck capacity_loss_bound_check(const FadingEnsemble& ens,
                                         std::span<const double> p,
                                         double gamma, double slack) {
  check_length(ens, p);
  LossBoundCheck r;
  r.achieved_interference = detail::blocked_mean(
      ens.size(), [&](std::size_t i) { return ens.states[i].g * p[i]; });
  r.precondition_ok = r.achieved_interference <= gamma;
  r.loss = primary_capacity_max(ens) - primary_capacity(ens, p);
  r.bound = std::log1p(gamma);
  r.holds = r.loss <= r.bound + slack;
  return r;
}

MacBounds mac_rate_bounds(const FadingEnsemble& ens,
                          std::span<const double> p) {
  check_length(ens, p);
  MacBounds b;
  b.pu_bound = detail::blocked_mean(ens.size(), [&](std::size_t i) {
    const FadingState& s = ens.states[i];
    return std::log1p(s.q * (s.f + s.o));
  });
  b.su_bound = detail::blocked_mean(ens.size(), [&](std::size_t i) {
    const FadingState& s = ens.states[i];
    return std::log1p(p[i] * (s.g + s.e));
  });
  b.sum_bound = detail::blocked_mean(ens.size(), [&](std::size_t i) {
    const FadingState& s = ens.states[i];
    const double det = (1.0 + s.q * (s.f + s.o)) * (1.0 + p[i] * (s.g + s.e)) -
                       s.q * p[i] * s.cross_mag2;
    // Cauchy-Schwarz keeps det >= 1 + q(f+o) + p(g+e); anything else means
    // cross_mag2 is corrupted.
    if (!(det > 0))
      throw ConsistencyError(
          "nonpositive determinant in mac_rate_bounds: cross_mag2 exceeds its "
          "Cauchy-Schwarz bound");
    return std::log(det);
  });
  return b;
}

}  // namespace specshare
