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

#include "specshare/fading.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "specshare/errors.hpp"
#include "specshare/philox.hpp"
#include "specshare/runtime.hpp"

namespace specshare {
namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a_double(std::uint64_t h, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  return fnv1a(h, &bits, sizeof bits);
}

}  // namespace

void ChannelDistribution::validate() const {
  if (var_f < 0 || var_e < 0 || var_g < 0 || var_o < 0)
    throw ParameterError("channel variances must be nonnegative");
  if (!(var_f > 0) || !(var_e > 0))
    throw ParameterError(
        "var_f and var_e must be positive; a dead direct link makes both "
        "capacities identically zero");
  if (!std::isfinite(var_f) || !std::isfinite(var_e) ||
      !std::isfinite(var_g) || !std::isfinite(var_o))
    throw ParameterError("channel variances must be finite");
}

std::uint64_t FadingEnsemble::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  h = fnv1a_double(h, dist.var_f);
  h = fnv1a_double(h, dist.var_e);
  h = fnv1a_double(h, dist.var_g);
  h = fnv1a_double(h, dist.var_o);
  h = fnv1a(h, &seed, sizeof seed);
  const std::uint64_t n = states.size();
  h = fnv1a(h, &n, sizeof n);
  for (const FadingState& s : states) {
    h = fnv1a_double(h, s.f);
    h = fnv1a_double(h, s.e);
    h = fnv1a_double(h, s.g);
    h = fnv1a_double(h, s.o);
    h = fnv1a_double(h, s.cross_mag2);
    h = fnv1a_double(h, s.q);
    h = fnv1a_double(h, s.h);
  }
  return h;
}

FadingEnsemble sample_ensemble(const ChannelDistribution& dist, std::size_t n,
                               std::uint64_t seed) {
  dist.validate();
  if (n < 1) throw ParameterError("ensemble size must be at least 1");

  FadingEnsemble ens;
  ens.dist = dist;
  ens.seed = seed;
  ens.states.resize(n);

  // A CN(0, v) gain has N(0, v/2) real and imaginary parts.
  const double sf = std::sqrt(dist.var_f / 2.0);
  const double se = std::sqrt(dist.var_e / 2.0);
  const double sg = std::sqrt(dist.var_g / 2.0);
  const double so = std::sqrt(dist.var_o / 2.0);

  detail::parallel_for(n, [&](std::size_t i) {
    const auto z = state_gaussians(seed, i);
    const double fr = sf * z[0], fi = sf * z[1];
    const double er = se * z[2], ei = se * z[3];
    const double gr = sg * z[4], gi = sg * z[5];
    const double orr = so * z[6], oi = so * z[7];

    FadingState& s = ens.states[i];
    s.f = fr * fr + fi * fi;
    s.e = er * er + ei * ei;
    s.g = gr * gr + gi * gi;
    s.o = orr * orr + oi * oi;
    // h_p^H h_s with h_p = (f~, o~), h_s = (g~, e~).
    const double re = fr * gr + fi * gi + orr * er + oi * ei;
    const double im = fr * gi - fi * gr + orr * ei - oi * er;
    s.cross_mag2 = re * re + im * im;
    s.q = 0.0;
    s.h = s.e;
  });
  ens.q_populated = false;
  return ens;
}

FadingEnsemble& populate_effective_gains(FadingEnsemble& ens) {
  if (!ens.q_populated)
    throw StateError(
        "effective gains requested before primary powers were populated");
  detail::parallel_for(ens.size(), [&](std::size_t i) {
    FadingState& s = ens.states[i];
    s.h = s.e / (1.0 + s.o * s.q);
  });
  return ens;
}

void save_ensemble(const FadingEnsemble& ens, std::ostream& out) {
  char line[192];
  std::snprintf(line, sizeof line,
                "var_f=%.17g var_e=%.17g var_g=%.17g var_o=%.17g n=%zu "
                "seed=%llu\n",
                ens.dist.var_f, ens.dist.var_e, ens.dist.var_g, ens.dist.var_o,
                ens.states.size(),
                static_cast<unsigned long long>(ens.seed));
  out << line;
  for (const FadingState& s : ens.states) {
    std::snprintf(line, sizeof line, "%.17g %.17g %.17g %.17g %.17g\n", s.f,
                  s.e, s.g, s.o, s.cross_mag2);
    out << line;
  }
}

void save_ensemble(const FadingEnsemble& ens,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot open " + path.string() + " for write");
  save_ensemble(ens, out);
  if (!out) throw ParameterError("write failed for " + path.string());
}

FadingEnsemble load_ensemble(std::istream& in) {
  std::string header;
  if (!std::getline(in, header))
    throw ParameterError("ensemble file is empty");

  FadingEnsemble ens;
  std::size_t n = 0;
  unsigned long long seed = 0;
  if (std::sscanf(header.c_str(),
                  "var_f=%lg var_e=%lg var_g=%lg var_o=%lg n=%zu seed=%llu",
                  &ens.dist.var_f, &ens.dist.var_e, &ens.dist.var_g,
                  &ens.dist.var_o, &n, &seed) != 6)
    throw ParameterError("malformed ensemble header: " + header);
  ens.seed = seed;
  ens.states.reserve(n);

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    FadingState s;
    if (std::sscanf(line.c_str(), "%lg %lg %lg %lg %lg", &s.f, &s.e, &s.g,
                    &s.o, &s.cross_mag2) != 5)
      throw ParameterError("malformed ensemble row: " + line);
    s.q = 0.0;
    s.h = s.e;
    ens.states.push_back(s);
  }
  if (ens.states.size() != n)
    throw ParameterError("ensemble row count does not match header");
  ens.q_populated = false;
  return ens;
}

FadingEnsemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open " + path.string());
  return load_ensemble(in);
}

}  // namespace specshare
