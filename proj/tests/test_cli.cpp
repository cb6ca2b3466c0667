// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tpl/cli.hpp"
#include "tpl/geometry.hpp"
#include "tpl/parallel.hpp"
#include "tpl/partition.hpp"
#include "tpl/topology.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = tpl::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("tplcli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::vector<std::string> csv_row(const std::string& text, int row) {
  std::istringstream is(text);
  std::string line;
  for (int r = 0; r <= row; ++r) std::getline(is, line);
  std::vector<std::string> cells;
  std::stringstream ls(line);
  for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
  return cells;
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run({}).code == tpl::cli::kUsage);
  CHECK(run({"bogus"}).code == tpl::cli::kUsage);
  CHECK(run({"--help"}).code == tpl::cli::kPass);
  CHECK(run({"spectrum", "--count", "0", "--out", scratch("c0").string()}).code == tpl::cli::kUsage);
  CHECK(run({"spectrum", "--b", "-1", "--count", "3", "--out", scratch("neg").string()}).code == tpl::cli::kUsage);
  CHECK(run({"spectrum", "--count", "x"}).code == tpl::cli::kUsage);
  CHECK(run({"solve", "--b", "0.25", "--k", "3", "--config", "/nonexistent/cfg.json"}).code == tpl::cli::kUsage);
  CHECK(run({"solve", "--b", "0.25", "--k", "3", "--grid", "12by4"}).code == tpl::cli::kUsage);
  CHECK(run({"verify", "nosuch"}).code == tpl::cli::kUsage);
}

TEST_CASE("cap overflow maps to the resource exit code") {
  const auto r = run({"spectrum", "--b", "0.000001", "--count", "4000000", "--out", scratch("cap").string()});
  CHECK(r.code == tpl::cli::kResource);
  CHECK(r.err.find("CapOverflow") != std::string::npos);
}

TEST_CASE("spectrum command") {
  const auto dir = scratch("spectrum");
  const auto r = run({"spectrum", "--a", "1", "--b", "0.4", "--count", "10", "--out", dir.string()});
  REQUIRE(r.code == tpl::cli::kPass);
  const auto csv = slurp(dir / "spectrum.csv");
  const auto row4 = csv_row(csv, 4);
  CHECK(row4[0] == "4");
  CHECK(std::stod(row4[4]) == doctest::Approx(16));
  CHECK(std::stod(row4[3]) == doctest::Approx(16 * tpl::kPi2).epsilon(1e-15));
  CHECK(r.out.find("16 pi^2") != std::string::npos);

  const auto cover = scratch("cover");
  REQUIRE(run({"spectrum", "--a", "2", "--b", "0.5", "--count", "7", "--out", cover.string()}).code == 0);
  const auto row6 = csv_row(slurp(cover / "spectrum.csv"), 6);
  CHECK(std::stod(row6[4]) == doctest::Approx(9));
  CHECK(row6[7] == "yes");

  const auto m = json::parse(slurp(dir / "manifest.json"));
  CHECK(m["command"] == "spectrum");
  CHECK(m["params"]["b"] == 0.4);
  CHECK(m.contains("created"));
}

TEST_CASE("nodal command") {
  const auto dir = scratch("nodal");
  auto r = run({"nodal", "--m", "3", "--n", "2", "--lam", "1", "--theta1", "0", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out == "2\n");
  CHECK(slurp(dir / "nodal.pgm").rfind("P5\n192 128\n255\n", 0) == 0);
  CHECK(run({"nodal", "--m", "2", "--n", "0", "--out", dir.string()}).out == "4\n");
  CHECK(run({"nodal", "--m", "1", "--n", "1", "--form", "product-sin", "--out", dir.string()}).out == "4\n");
  CHECK(run({"nodal", "--m", "1", "--n", "1", "--form", "triangle", "--out", dir.string()}).code == tpl::cli::kUsage);
  CHECK(run({"nodal", "--m", "1", "--n", "1", "--res", "8", "--out", dir.string()}).code == tpl::cli::kUsage);
}

TEST_CASE("verify suites") {
  const auto dir = scratch("verify");
  const auto scan = run({"verify", "courant-scan", "--b", "0.37", "--mmax", "6", "--out", dir.string()});
  CHECK(scan.code == 0);
  const auto j = json::parse(scan.out);
  CHECK(j["pairs"].size() == 36);
  for (const auto& p : j["pairs"]) CHECK(p["courant_sharp"] == "no");

  CHECK(run({"verify", "sharp-scan", "--b", "0.97", "--count", "40", "--out", dir.string()}).code == 0);
  CHECK(run({"verify", "knots", "--pmax", "12", "--out", dir.string()}).code == 0);

  const auto part = dir / "strips.tplp";
  fs::create_directories(dir);
  tpl::save_partition(part.string(), tpl::strip_partition(tpl::TorusGeometry(1, 0.25), 3, 48, 12));
  const auto euler = run({"verify", "euler", "--input", part.string(), "--out", dir.string()});
  CHECK(euler.code == 0);
  CHECK(json::parse(euler.out)["residual_twice"] == 0);
  const auto lift = run({"verify", "lift", "--input", part.string(), "--out", dir.string()});
  CHECK(lift.code == 0);
  CHECK(json::parse(lift.out)["lifted_k"] == 6);
  CHECK(run({"verify", "euler", "--input", (dir / "missing.tplp").string()}).code == tpl::cli::kUsage);

  const auto refused = run({"verify", "thin-torus", "--b", "0.5", "--k", "3", "--out", dir.string()});
  CHECK(refused.code == tpl::cli::kUsage);
  // A torus with merged eigenvalues cannot certify the scan.
  CHECK(run({"verify", "courant-scan", "--b", "1", "--mmax", "2", "--out", dir.string()}).code ==
        tpl::cli::kVerificationFailed);
}

TEST_CASE("solve writes its outputs and replays byte-identically") {
  const auto dir = scratch("solve");
  const auto cfg = scratch("cfg.json");
  {
    std::ofstream os(cfg);
    os << R"({"restarts": 2, "max_outer_iters": 40, "nx": 48, "ny": 12})";
  }
  const auto r = run({"solve", "--b", "0.25", "--k", "3", "--config", cfg.string(), "--out", dir.string()});
  REQUIRE(r.code == 0);
  for (const char* f : {"partition.tplp", "partition.pgm", "trace.csv", "trace.json", "topology.json", "energy.json",
                        "manifest.json"})
    CHECK(fs::exists(dir / f));
  CHECK(r.out.find("pi^2") != std::string::npos);
  const auto energy = json::parse(slurp(dir / "energy.json"));
  CHECK(energy["max_energy_over_pi2"].get<double>() ==
        doctest::Approx(energy["max_energy"].get<double>() / tpl::kPi2));
  const auto part = tpl::load_partition((dir / "partition.tplp").string());
  CHECK(part.nx() == 48);

  const auto again = scratch("replay");
  const auto rr = run({"replay", (dir / "manifest.json").string(), "--out", again.string()});
  REQUIRE(rr.code == 0);
  CHECK(slurp(again / "trace.csv") == slurp(dir / "trace.csv"));
  CHECK(slurp(again / "partition.tplp") == slurp(dir / "partition.tplp"));

  const auto sdir = scratch("spec_replay");
  REQUIRE(run({"spectrum", "--b", "0.61", "--count", "25", "--out", sdir.string()}).code == 0);
  const auto sagain = scratch("spec_replay2");
  REQUIRE(run({"replay", (sdir / "manifest.json").string(), "--out", sagain.string()}).code == 0);
  CHECK(slurp(sagain / "spectrum.csv") == slurp(sdir / "spectrum.csv"));
}

TEST_CASE("solve on the k = 4 example reports a bipartite partition") {
  const auto dir = scratch("solve4");
  const auto r = run({"solve", "--b", "0.4", "--k", "4", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(json::parse(slurp(dir / "topology.json"))["bipartite"] == true);
  CHECK(r.out.find("bipartite: true") != std::string::npos);
}

TEST_CASE("thread cap") {
  ::setenv("TPL_THREADS", "3", 1);
  CHECK(tpl::thread_count() == 3);
  std::atomic<int> sum{0};
  tpl::parallel_for(100, [&](std::size_t i) { sum += static_cast<int>(i); });
  CHECK(sum == 4950);
  CHECK_THROWS(tpl::parallel_for(10, [](std::size_t i) {
    if (i == 7) throw std::runtime_error("boom");
  }));
  ::setenv("TPL_THREADS", "1", 1);
  CHECK(tpl::thread_count() == 1);
  ::unsetenv("TPL_THREADS");
}
