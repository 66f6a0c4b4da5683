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

#ifndef SPECSHARE_FADING_HPP
#define SPECSHARE_FADING_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace specshare {

// Variance of each circularly-symmetric complex channel gain. The power gain
// of a CN(0, v) draw is exponential with mean v.
//
//   var_f : primary Tx -> primary Rx
//   var_e : secondary Tx -> secondary Rx
//   var_g : secondary Tx -> primary Rx (interference to the primary)
//   var_o : primary Tx -> secondary Rx (interference to the secondary)
struct ChannelDistribution {
  double var_f = 1.0;
  double var_e = 1.0;
  double var_g = 0.5;
  double var_o = 0.01;

  // Throws ParameterError for negative variances or a degenerate direct link
  // (var_f == 0 or var_e == 0 would make both capacities identically zero).
  void validate() const;
};

// One joint fading realization. f, e, g, o are channel power gains;
// cross_mag2 is |h_p^H h_s|^2 for the collocated-receiver rate bounds, with
// h_p = (f~, o~) and h_s = (g~, e~) the underlying complex channel vectors.
// q is the primary user's transmit power in this state (filled by a PuPolicy)
// and h = e / (1 + o q) the secondary link gain once the primary interference
// is folded into the noise.
struct FadingState {
  double f = 0.0;
  double e = 0.0;
  double g = 0.0;
  double o = 0.0;
  double cross_mag2 = 0.0;
  double q = 0.0;
  double h = 0.0;
};

// A seeded set of i.i.d. joint fading states. All expectations in the library
// are sample means over one of these; (dist, n, seed) regenerates the states
// bit-identically.
struct FadingEnsemble {
  std::vector<FadingState> states;
  ChannelDistribution dist;
  std::uint64_t seed = 0;
  bool q_populated = false;

  std::size_t size() const { return states.size(); }

  // FNV-1a over the distribution, seed and per-state payload (including q
  // and h). Used to detect solver inputs that drifted from a cached problem.
  std::uint64_t fingerprint() const;
};

// Draws n joint states. Gains are |CN(0, var)|^2, mutually independent across
// channels and states; cross_mag2 comes from the same complex draws. q is left
// at 0 and h at e until a primary policy runs. Each state is a pure function
// of (seed, index), so sampling may be partitioned across workers freely.
FadingEnsemble sample_ensemble(const ChannelDistribution& dist, std::size_t n,
                               std::uint64_t seed);

// Recomputes h = e / (1 + o q) on every state. Requires q populated.
FadingEnsemble& populate_effective_gains(FadingEnsemble& ens);

// Columnar text export for cross-implementation comparison: one header line
// with the distribution parameters, n and seed, then one state per row
// (f e g o cross_mag2) at full double precision.
void save_ensemble(const FadingEnsemble& ens, std::ostream& out);
void save_ensemble(const FadingEnsemble& ens, const std::filesystem::path& p);
FadingEnsemble load_ensemble(std::istream& in);
FadingEnsemble load_ensemble(const std::filesystem::path& p);

}  // namespace specshare

#endif  // SPECSHARE_FADING_HPP
