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
#include <cstdio>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "specshare/aipc.hpp"
#include "specshare/capacity.hpp"
#include "specshare/config.hpp"
#include "specshare/errors.hpp"
#include "specshare/frontier.hpp"

using namespace specshare;

namespace {

SweepConfig small_sweep(ConstraintKind kind) {
  SweepConfig cfg;
  cfg.n = 800;
  cfg.seed = 404;
  cfg.pu_kind = PuPolicyKind::kConstantPower;
  cfg.pu_budget = 10.0;
  cfg.su_budget = 10.0;
  cfg.kind = kind;
  return cfg;
}

}  // namespace

TEST_SUITE("frontier") {

TEST_CASE("level grids parse in both forms") {
  const auto r = parse_levels("0:0.1:1.0");
  REQUIRE(r.size() == 11);
  CHECK(r.front() == 0.0);
  CHECK(r.back() == 1.0);
  const auto c = parse_levels("0.5,1,2.25");
  REQUIRE(c.size() == 3);
  CHECK(c[2] == 2.25);
  CHECK_THROWS_AS(parse_levels("3,2,1"), ParameterError);
  CHECK_THROWS_AS(parse_levels(""), ParameterError);
  CHECK_THROWS_AS(parse_levels("0:-1:5"), ParameterError);
}

TEST_CASE("config files: comments, overrides, hashing") {
  const char* path = "test_config.tmp";
  {
    std::ofstream out(path);
    out << "# run setup\n"
        << "mc.n = 1234   # samples\n"
        << "pu.policy=wf\n"
        << "aipc.gamma=inf\n";
  }
  Config cfg = Config::from_file(path);
  CHECK(cfg.get_u64("mc.n", 0) == 1234);
  CHECK(cfg.get_str("pu.policy", "") == "wf");
  CHECK(std::isinf(cfg.get_threshold("aipc.gamma", 0.0)));
  const std::uint64_t h1 = cfg.hash();
  cfg.set("mc.n", "999");
  CHECK(cfg.hash() != h1);
  std::remove(path);

  CHECK_THROWS_AS(Config::from_file("does_not_exist.cfg"), ParameterError);
}

TEST_CASE("sweep config from flat keys") {
  Config cfg;
  cfg.set("pu.policy", "wf");
  cfg.set("frontier.kind", "pclc");
  cfg.set("frontier.levels", "0:0.25:1");
  cfg.set("frontier.levels_as_fraction", "true");
  cfg.set("solver.method", "subgradient");
  const SweepConfig sc = sweep_from_config(cfg);
  CHECK(sc.pu_kind == PuPolicyKind::kWaterFilling);
  CHECK(sc.kind == ConstraintKind::kPclc);
  CHECK(sc.levels.size() == 5);
  CHECK(sc.levels_as_loss_fraction);
  CHECK(sc.solver.method == DualMethod::kSubgradient);
  cfg.set("pu.policy", "bogus");
  CHECK_THROWS_AS(sweep_from_config(cfg), ParameterError);
}

TEST_CASE("loss sweep endpoints") {
  SweepConfig cfg = small_sweep(ConstraintKind::kPclc);
  cfg.levels = {0.2, 0.6, 1.2};  // fractions of c_p_max
  cfg.levels_as_loss_fraction = true;
  FadingEnsemble ens = sample_ensemble(cfg.dist, cfg.n, cfg.seed);
  apply_pu_policy(ens, make_cp_policy(cfg.pu_budget));
  const auto pts = trace_frontier(ens, cfg);
  REQUIRE(pts.size() == 3);
  // the last level exceeds the whole capacity: unconstrained endpoint
  const PolicySolution wf = solve_aipc(
      ens, {std::numeric_limits<double>::infinity(), cfg.su_budget});
  CHECK(pts.back().c_s == doctest::Approx(wf.c_s).epsilon(1e-9));
}

TEST_CASE("interference sweep starts at the silent corner") {
  SweepConfig cfg = small_sweep(ConstraintKind::kAipc);
  cfg.levels = {0.0, 0.4};
  FadingEnsemble ens = sample_ensemble(cfg.dist, cfg.n, cfg.seed);
  apply_pu_policy(ens, make_cp_policy(cfg.pu_budget));
  const auto pts = trace_frontier(ens, cfg);
  CHECK(pts[0].c_s <= 1e-9);
  CHECK(pts[0].c_p ==
        doctest::Approx(primary_capacity_max(ens)).epsilon(1e-9));
  CHECK(pts[1].c_s > pts[0].c_s);
}

TEST_CASE("lower-bound curve is defined, not measured, and sits below") {
  SweepConfig cfg = small_sweep(ConstraintKind::kAipcLowerBound);
  cfg.levels = {0.1, 0.3, 0.7};
  FadingEnsemble ens = sample_ensemble(cfg.dist, cfg.n, cfg.seed);
  apply_pu_policy(ens, make_cp_policy(cfg.pu_budget));
  const double c_p_max = primary_capacity_max(ens);
  const auto lb = trace_frontier(ens, cfg);
  cfg.kind = ConstraintKind::kAipc;
  const auto measured = trace_frontier(ens, cfg);
  for (std::size_t i = 0; i < lb.size(); ++i) {
    CHECK(lb[i].c_p == c_p_max - std::log1p(lb[i].level));  // exact
    CHECK(lb[i].c_p <= measured[i].c_p + 1e-12);
    CHECK(lb[i].c_s == doctest::Approx(measured[i].c_s).epsilon(1e-9));
  }
}

TEST_CASE("csv output: header, row count, bitwise determinism") {
  SweepConfig cfg = small_sweep(ConstraintKind::kPclc);
  cfg.levels = parse_levels("0:0.1:1.0");
  cfg.levels_as_loss_fraction = true;
  cfg.n = 400;

  const auto run = [&] {
    const auto pts = trace_frontier(cfg);
    std::ostringstream out;
    write_frontier_csv(pts, out);
    return out.str();
  };
  const std::string a = run();
  const std::string b = run();
  CHECK(a == b);

  std::istringstream lines(a);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "kind,level,c_p,c_s,converged,residuals");
  int rows = 0;
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 11);
}

TEST_CASE("comparing curves at a loss target") {
  std::vector<FrontierPoint> a, b;
  for (int i = 0; i <= 4; ++i) {
    FrontierPoint p;
    p.c_p = 1.0 + 0.1 * i;
    p.c_s = 2.0 - 0.2 * i;
    a.push_back(p);
    b.push_back(p);
  }
  const double c_p_max = 1.4 / 0.95;
  CHECK(compare_at_loss(a, b, 0.05, c_p_max) == doctest::Approx(0.0));
  for (FrontierPoint& p : b) p.c_s *= 0.8;
  CHECK(compare_at_loss(a, b, 0.05, c_p_max) == doctest::Approx(0.25));
  CHECK_THROWS_AS(compare_at_loss(a, b, 0.9, c_p_max), ParameterError);
}

TEST_CASE("solution dump carries the summary header") {
  FadingEnsemble ens = sample_ensemble(ChannelDistribution{}, 50, 5);
  apply_pu_policy(ens, make_cp_policy(10.0));
  const PolicySolution sol = solve_aipc(ens, {0.4, 10.0});
  std::ostringstream out;
  write_solution_dump(ens, sol, out);
  const std::string text = out.str();
  CHECK(text.find("# nu=") != std::string::npos);
  CHECK(text.find("# index p gp") != std::string::npos);
  int rows = 0;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line))
    if (!line.empty() && line[0] != '#') ++rows;
  CHECK(rows == 50);
}

}  // TEST_SUITE
