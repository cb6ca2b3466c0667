// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "tpl/error.hpp"
#include "tpl/optimizer.hpp"
#include "tpl/topology.hpp"

using namespace tpl;

namespace {

OptimizerConfig small(int k, int nx, int ny, int restarts = 2) {
  OptimizerConfig c;
  c.k = k;
  c.nx = nx;
  c.ny = ny;
  c.restarts = restarts;
  c.max_outer_iters = 60;
  return c;
}

}  // namespace

TEST_CASE("partition energy of strips") {
  const TorusGeometry thin(1, 0.25);
  const auto e = partition_energy(strip_partition(thin, 3, 192, 48));
  REQUIRE(e.per_domain.size() == 3);
  for (double v : e.per_domain) {
    CHECK(v == doctest::Approx(9 * kPi2).epsilon(1e-3));
    CHECK(v == doctest::Approx(e.per_domain[0]).epsilon(1e-9));
  }
  CHECK(e.max_energy == doctest::Approx(9 * kPi2).epsilon(1e-3));

  const auto two = partition_energy(strip_partition(TorusGeometry(1, 0.75), 2, 128, 96));
  CHECK(two.max_energy == doctest::Approx(4 * kPi2).epsilon(1e-3));

  CHECK_THROWS_AS(partition_energy(strip_partition(thin, 1, 16, 4)), Error);
}

TEST_CASE("upper bound") {
  CHECK(upper_bound(TorusGeometry(1, 0.25), 3) == doctest::Approx(9 * kPi2));
  CHECK(upper_bound(TorusGeometry(1, 1), 2) == doctest::Approx(4 * kPi2));
  CHECK(upper_bound(TorusGeometry(1, 2), 2) == doctest::Approx(kPi2));
  CHECK(upper_bound(TorusGeometry(2, 1), 2) == doctest::Approx(kPi2));
}

TEST_CASE("config validation and json") {
  OptimizerConfig c;
  CHECK_NOTHROW(c.validate());
  const auto back = OptimizerConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  const auto parsed = OptimizerConfig::from_json(R"({"k": 4, "nx": 64, "ny": 16, "seed": 9})");
  CHECK(parsed.k == 4);
  CHECK(parsed.seed == 9);
  CHECK(parsed.restarts == c.restarts);
  CHECK_THROWS_AS(OptimizerConfig::from_json(R"({"bogus": 1})"), Error);
  CHECK_THROWS_AS(OptimizerConfig::from_json("not json"), Error);
  CHECK_THROWS_AS(OptimizerConfig::from_json(R"({"reassign_damping": 1.5})"), Error);
  CHECK_THROWS_AS(OptimizerConfig::from_json(R"({"k": 1})"), Error);
  CHECK_THROWS_AS(OptimizerConfig::from_json(R"({"nx": 2})"), Error);
}

TEST_CASE("optimize on a small thin torus") {
  const TorusGeometry g(1, 0.25);
  const auto cfg = small(3, 48, 12);
  const auto r = optimize(g, cfg);
  CHECK(r.partition.k() == 3);
  CHECK(r.partition.nx() == 48);
  CHECK(r.energy.target.has_value());
  CHECK(r.energy.max_energy == doctest::Approx(partition_energy(r.partition).max_energy));
  CHECK(r.energy.max_energy <= upper_bound(g, 3) * 1.10);
  const auto topo = analyze_topology(r.partition);
  for (const auto& d : topo.domains) CHECK(d.euler == 0);
  CHECK(topo.euler_residual_twice == 0);
  REQUIRE_FALSE(r.trace.empty());
  CHECK(r.trace.front().restart == 0);
  CHECK(r.trace.back().restart == cfg.restarts - 1);
  for (const auto& row : r.trace) CHECK(row.per_domain.size() == 3);
}

TEST_CASE("optimize is deterministic and honours the thread cap") {
  const TorusGeometry g(1, 0.4);
  const auto cfg = small(4, 32, 12, 1);
  const auto a = optimize(g, cfg);
  const auto b = optimize(g, cfg);
  CHECK(a.partition == b.partition);
  std::ostringstream ta, tb;
  write_trace_csv(ta, a.trace);
  write_trace_csv(tb, b.trace);
  CHECK(ta.str() == tb.str());
  CHECK(ta.str().rfind("restart,iteration,max_energy,max_energy_over_pi2,flips,lambda_1,lambda_2,lambda_3,lambda_4\n", 0) == 0);
  const auto j = nlohmann::json::parse(trace_json(a.trace));
  CHECK(j.size() == a.trace.size());

  auto other = cfg;
  other.seed = 77;
  CHECK_NOTHROW(optimize(g, other));
}

TEST_CASE("thin torus verification") {
  CHECK(thin_threshold(3) == doctest::Approx(1.0 / 3));
  CHECK(thin_threshold(2) == doctest::Approx(1.0));
  CHECK(thin_threshold(4) == doctest::Approx(0.5));

  SUBCASE("refused above the threshold") {
    const auto rep = verify_thin_torus(TorusGeometry(1, 0.5), 3);
    CHECK_FALSE(rep.hypothesis_met);
    CHECK_FALSE(rep.passed());
    CHECK(rep.refusal.find("HypothesisNotMet") != std::string::npos);
  }
  SUBCASE("even case on a coarse grid") {
    auto cfg = small(2, 64, 58, 4);
    cfg.max_outer_iters = 200;
    const auto rep = verify_thin_torus(TorusGeometry(1, 0.9), 2, cfg);
    CHECK(rep.hypothesis_met);
    for (const auto& c : rep.checks) {
      INFO(c.name << ": " << c.detail);
      CHECK(c.passed);
    }
    CHECK(rep.passed());
    const auto j = nlohmann::json::parse(rep.to_json());
    CHECK(j["k"] == 2);
  }
}
