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

#include <cmath>
#include <sstream>

#include <doctest.h>

#include "specshare/errors.hpp"
#include "specshare/fading.hpp"
#include "specshare/pu_policy.hpp"

using namespace specshare;

namespace {

double mean_of(const FadingEnsemble& ens, double FadingState::* field) {
  double s = 0.0;
  for (const FadingState& st : ens.states) s += st.*field;
  return s / static_cast<double>(ens.size());
}

double corr(const FadingEnsemble& ens, double FadingState::* a,
            double FadingState::* b) {
  const double ma = mean_of(ens, a), mb = mean_of(ens, b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (const FadingState& st : ens.states) {
    const double da = st.*a - ma, db = st.*b - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_SUITE("fading") {

TEST_CASE("zero-variance channel is identically zero") {
  ChannelDistribution dist;
  dist.var_g = 0.0;
  const FadingEnsemble ens = sample_ensemble(dist, 1000, 9);
  for (const FadingState& s : ens.states) CHECK(s.g == 0.0);
}

TEST_CASE("simulated gains have the configured means") {
  const ChannelDistribution dist{1.0, 1.0, 0.5, 0.01};
  const FadingEnsemble ens = sample_ensemble(dist, 100000, 42);
  CHECK(std::fabs(mean_of(ens, &FadingState::f) - 1.0) <= 0.02);
  CHECK(std::fabs(mean_of(ens, &FadingState::g) - 0.5) <= 0.01);
}

TEST_CASE("same (dist, n, seed) regenerates identical ensembles") {
  const ChannelDistribution dist{1.0, 1.0, 0.5, 0.01};
  const FadingEnsemble a = sample_ensemble(dist, 4096, 7);
  const FadingEnsemble b = sample_ensemble(dist, 4096, 7);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.states[i].f == b.states[i].f);
    CHECK(a.states[i].e == b.states[i].e);
    CHECK(a.states[i].g == b.states[i].g);
    CHECK(a.states[i].o == b.states[i].o);
    CHECK(a.states[i].cross_mag2 == b.states[i].cross_mag2);
  }
}

TEST_CASE("states are pure in (seed, index): prefixes agree across sizes") {
  const ChannelDistribution dist;
  const FadingEnsemble small = sample_ensemble(dist, 64, 123);
  const FadingEnsemble big = sample_ensemble(dist, 4099, 123);
  for (std::size_t i = 0; i < small.size(); ++i) {
    CHECK(small.states[i].f == big.states[i].f);
    CHECK(small.states[i].cross_mag2 == big.states[i].cross_mag2);
  }
}

TEST_CASE("moments and independence at n = 1e6") {
  const ChannelDistribution dist{1.0, 1.0, 0.5, 0.01};
  const FadingEnsemble ens = sample_ensemble(dist, 1000000, 2026);
  const double n = static_cast<double>(ens.size());

  // Exponential(mean v): variance v^2; three standard errors.
  struct Chan {
    double FadingState::* field;
    double v;
  } chans[] = {{&FadingState::f, 1.0},
               {&FadingState::e, 1.0},
               {&FadingState::g, 0.5},
               {&FadingState::o, 0.01}};
  for (const auto& c : chans) {
    const double m = mean_of(ens, c.field);
    CHECK(std::fabs(m - c.v) <= 3.0 * c.v / std::sqrt(n));
    double var = 0.0;
    for (const FadingState& s : ens.states) {
      const double d = s.*c.field - m;
      var += d * d;
    }
    var /= n;
    // var(sample variance) ~ 8 v^4 / n for the exponential
    CHECK(std::fabs(var - c.v * c.v) <=
          3.0 * c.v * c.v * std::sqrt(8.0 / n));
  }

  CHECK(std::fabs(corr(ens, &FadingState::f, &FadingState::e)) <= 0.01);
  CHECK(std::fabs(corr(ens, &FadingState::f, &FadingState::g)) <= 0.01);
  CHECK(std::fabs(corr(ens, &FadingState::f, &FadingState::o)) <= 0.01);
  CHECK(std::fabs(corr(ens, &FadingState::e, &FadingState::g)) <= 0.01);
  CHECK(std::fabs(corr(ens, &FadingState::e, &FadingState::o)) <= 0.01);
  CHECK(std::fabs(corr(ens, &FadingState::g, &FadingState::o)) <= 0.01);

  // Cauchy-Schwarz on the stored cross term, every state.
  for (const FadingState& s : ens.states)
    CHECK(s.cross_mag2 <= (s.f + s.o) * (s.g + s.e) * (1.0 + 1e-12));
}

TEST_CASE("effective gains") {
  FadingEnsemble ens;
  ens.states.resize(3);
  ens.states[0].e = 1.0;
  ens.states[0].o = 0.0;
  ens.states[0].q = 10.0;
  ens.states[1].e = 2.0;
  ens.states[1].o = 0.5;
  ens.states[1].q = 2.0;
  ens.states[2].e = 0.0;
  ens.states[2].o = 3.0;
  ens.states[2].q = 1.0;

  SUBCASE("requires populated primary powers") {
    CHECK_THROWS_AS(populate_effective_gains(ens), StateError);
  }
  SUBCASE("h = e / (1 + o q)") {
    ens.q_populated = true;
    populate_effective_gains(ens);
    CHECK(ens.states[0].h == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ens.states[1].h == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ens.states[2].h == 0.0);
  }
}

TEST_CASE("parameter validation") {
  ChannelDistribution bad;
  bad.var_g = -0.1;
  CHECK_THROWS_AS(sample_ensemble(bad, 10, 1), ParameterError);
  ChannelDistribution dead;
  dead.var_f = 0.0;
  CHECK_THROWS_AS(sample_ensemble(dead, 10, 1), ParameterError);
  CHECK_THROWS_AS(sample_ensemble(ChannelDistribution{}, 0, 1),
                  ParameterError);
}

TEST_CASE("columnar export round-trips bit-exactly") {
  const ChannelDistribution dist{1.0, 1.0, 0.5, 0.01};
  const FadingEnsemble ens = sample_ensemble(dist, 64, 77);
  std::stringstream buf;
  save_ensemble(ens, buf);
  const FadingEnsemble back = load_ensemble(buf);
  REQUIRE(back.size() == ens.size());
  CHECK(back.seed == ens.seed);
  CHECK(back.dist.var_g == ens.dist.var_g);
  for (std::size_t i = 0; i < ens.size(); ++i) {
    CHECK(back.states[i].f == ens.states[i].f);
    CHECK(back.states[i].e == ens.states[i].e);
    CHECK(back.states[i].g == ens.states[i].g);
    CHECK(back.states[i].o == ens.states[i].o);
    CHECK(back.states[i].cross_mag2 == ens.states[i].cross_mag2);
  }
}

TEST_CASE("fingerprint tracks the primary powers") {
  FadingEnsemble ens = sample_ensemble(ChannelDistribution{}, 128, 5);
  const std::uint64_t before = ens.fingerprint();
  apply_pu_policy(ens, make_cp_policy(10.0));
  CHECK(ens.fingerprint() != before);
}

}  // TEST_SUITE
