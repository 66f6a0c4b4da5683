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

#ifndef SPECSHARE_TESTS_TEST_UTIL_HPP
#define SPECSHARE_TESTS_TEST_UTIL_HPP

#include <random>
#include <vector>

#include "specshare/fading.hpp"
#include "specshare/oracle.hpp"

namespace testutil {

inline specshare::FadingState make_state(double f, double e, double g,
                                         double o, double q) {
  specshare::FadingState s;
  s.f = f;
  s.e = e;
  s.g = g;
  s.o = o;
  s.q = q;
  s.h = e / (1.0 + o * q);
  s.cross_mag2 = 0.0;
  return s;
}

inline specshare::FadingEnsemble make_ensemble(
    std::vector<specshare::FadingState> states) {
  specshare::FadingEnsemble ens;
  ens.states = std::move(states);
  ens.q_populated = true;
  return ens;
}

inline specshare::DiscreteEnsemble uniform_discrete(
    const std::vector<specshare::FadingState>& states) {
  specshare::DiscreteEnsemble d;
  d.states = states;
  d.weights.assign(states.size(), 1.0 / static_cast<double>(states.size()));
  return d;
}

// Random state with roughly the magnitudes of the simulated network (direct
// gains near 1, cross gains weaker). Draws are sequenced explicitly so the
// instances do not depend on argument evaluation order.
inline specshare::FadingState random_state(std::mt19937_64& rng, double q) {
  std::exponential_distribution<double> direct(1.0);
  std::exponential_distribution<double> cross(2.0);
  std::exponential_distribution<double> leak(100.0);
  const double f = direct(rng);
  const double e = direct(rng);
  const double g = cross(rng);
  const double o = leak(rng);
  return make_state(f, e, g, o, q);
}

}  // namespace testutil

#endif  // SPECSHARE_TESTS_TEST_UTIL_HPP
