// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tpl/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tpl/error.hpp"
#include "tpl/nodal.hpp"
#include "tpl/optimizer.hpp"
#include "tpl/spectrum.hpp"
#include "tpl/topology.hpp"

namespace tpl::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string pi2(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v << " (" << v / kPi2 << " pi^2)";
  return os.str();
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) fail(ErrorCode::Io, "cannot create output directory " + dir);
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::Io, "cannot write " + path.string());
  os << text;
}

// Parameters resolved for a run; serialized into the manifest.
struct RunManifest {
  std::string command;
  json params = json::object();
  std::vector<std::string> argv;
  std::string output_dir;

  void write() const {
    json j{{"command", command},
           {"params", params},
           {"argv", argv},
           {"output_dir", output_dir},
           {"tool_version", kToolVersion},
           {"created", timestamp()}};
    write_text(fs::path(output_dir) / "manifest.json", j.dump(2) + "\n");
  }
};

std::pair<int, int> parse_grid(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) fail(ErrorCode::InvalidArgument, "grid must look like NXxNY");
  try {
    std::size_t p1 = 0, p2 = 0;
    const int nx = std::stoi(s.substr(0, x), &p1);
    const int ny = std::stoi(s.substr(x + 1), &p2);
    if (p1 != x || p2 != s.size() - x - 1) throw std::invalid_argument(s);
    return {nx, ny};
  } catch (const std::logic_error&) {
    fail(ErrorCode::InvalidArgument, "grid must look like NXxNY, got " + s);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::Io, "cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::IndivisibleResolution:
    case ErrorCode::DegenerateInput:
    case ErrorCode::Io:
    case ErrorCode::InvalidPartition:
    case ErrorCode::HypothesisNotMet:
      return kUsage;
    case ErrorCode::CapOverflow:
    case ErrorCode::SolverDiverged:
      return kResource;
    default:
      return kVerificationFailed;
  }
}

EigenForm parse_form(const std::string& s) {
  if (s == "general") return EigenForm::general;
  if (s == "lemma") return EigenForm::lemma;
  if (s == "product-cos") return EigenForm::product_cos;
  if (s == "product-sin") return EigenForm::product_sin;
  fail(ErrorCode::InvalidArgument, "unknown form " + s);
}

// ---------------------------------------------------------------------------

struct SpectrumArgs {
  double a = 1.0, b = 1.0;
  int count = 0;
};

int cmd_spectrum(const SpectrumArgs& p, RunManifest& m, std::ostream& out) {
  if (p.count < 1) fail(ErrorCode::InvalidArgument, "--count must be >= 1");
  const TorusGeometry geom(p.a, p.b);
  m.params = {{"a", p.a}, {"b", p.b}, {"count", p.count}};
  const auto rows = spectrum_rows(geom, static_cast<std::size_t>(p.count));
  const auto dir = prepare_dir(m.output_dir);
  std::ostringstream csv;
  write_spectrum_csv(csv, rows);
  write_text(dir / "spectrum.csv", csv.str());
  m.write();
  out << "T(" << p.a << "," << p.b << ")"
      << (geom.is_rational() ? " exact rational ordering" : " floating ordering") << '\n';
  for (const auto& r : rows) {
    out << "lambda_" << r.index << " = " << pi2(r.value) << "  mode (" << r.mode.m << "," << r.mode.n
        << ")  courant_index " << r.courant_index << "  sharp " << to_string(r.courant_sharp) << '\n';
  }
  out << "wrote " << (dir / "spectrum.csv").string() << '\n';
  return kPass;
}

struct NodalArgs {
  double a = 1.0, b = 1.0;
  int m = 1, n = 1;
  double mu = 1.0, lam = 1.0, theta1 = 0.0, theta2 = 0.0;
  std::string form = "lemma";
  int branch = 1;
  int per_osc = 64;
};

int cmd_nodal(const NodalArgs& p, RunManifest& m, std::ostream& out) {
  const TorusGeometry geom(p.a, p.b);
  const auto spec = EigenfunctionSpec::make({p.m, p.n}, parse_form(p.form), p.lam, p.theta1, p.theta2,
                                            p.mu, p.branch);
  const int nx = p.per_osc * std::max(p.m, 1);
  const int ny = p.per_osc * std::max(p.n, 1);
  m.params = {{"a", p.a},         {"b", p.b},           {"m", p.m},     {"n", p.n},
              {"mu", p.mu},       {"lam", p.lam},       {"theta1", p.theta1},
              {"theta2", p.theta2}, {"form", p.form},   {"branch", p.branch},
              {"nx", nx},         {"ny", ny}};
  const int count = count_nodal_domains(spec, geom, nx, ny);
  const auto labels = label_nodal_domains(sign_grid(spec, geom, nx, ny));
  const auto dir = prepare_dir(m.output_dir);
  {
    std::ofstream pgm(dir / "nodal.pgm", std::ios::binary);
    write_labels_pgm(pgm, nx, ny, labels.labels);
    std::ofstream csv(dir / "nodal_labels.csv", std::ios::binary);
    write_labels_csv(csv, nx, ny, labels.labels);
  }
  m.params["count"] = count;
  m.write();
  out << count << '\n';
  return kPass;
}

struct SolveArgs {
  double a = 1.0, b = 0.25;
  int k = 3;
  std::string grid;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> restarts;
  std::optional<int> max_iters;
};

OptimizerConfig resolve_config(const SolveArgs& p) {
  OptimizerConfig cfg;
  if (!p.config.empty()) cfg = OptimizerConfig::from_json(read_file(p.config));
  cfg.k = p.k;
  if (!p.grid.empty()) {
    std::tie(cfg.nx, cfg.ny) = parse_grid(p.grid);
  } else if (p.config.empty()) {
    cfg.nx = 128;
    cfg.ny = std::max(8, static_cast<int>(std::lround(128.0 * std::min(p.a, p.b) / std::max(p.a, p.b))));
    if (p.a < p.b) std::swap(cfg.nx, cfg.ny);
  }
  if (p.seed) cfg.seed = *p.seed;
  if (p.restarts) cfg.restarts = *p.restarts;
  if (p.max_iters) cfg.max_outer_iters = *p.max_iters;
  cfg.validate();
  return cfg;
}

int cmd_solve(const SolveArgs& p, RunManifest& m, std::ostream& out) {
  const TorusGeometry geom(p.a, p.b);
  const auto cfg = resolve_config(p);
  m.params = {{"a", p.a}, {"b", p.b}, {"config", json::parse(cfg.to_json())}};
  const auto res = optimize(geom, cfg);
  const auto topo = analyze_topology(res.partition);
  const auto dir = prepare_dir(m.output_dir);
  save_partition((dir / "partition.tplp").string(), res.partition);
  {
    std::ofstream pgm(dir / "partition.pgm", std::ios::binary);
    write_partition_pgm(pgm, res.partition);
    std::ofstream csv(dir / "trace.csv", std::ios::binary);
    write_trace_csv(csv, res.trace);
  }
  write_text(dir / "trace.json", trace_json(res.trace) + "\n");
  write_text(dir / "topology.json", topology_report_json(topo) + "\n");
  const double target = static_cast<double>(cfg.k) * cfg.k * kPi2;
  json energy{{"per_domain", res.energy.per_domain},
              {"per_domain_over_pi2", json::array()},
              {"max_energy", res.energy.max_energy},
              {"max_energy_over_pi2", res.energy.max_energy / kPi2},
              {"upper_bound", upper_bound(geom, cfg.k)},
              {"upper_bound_over_pi2", upper_bound(geom, cfg.k) / kPi2},
              {"k2pi2", target},
              {"relative_to_k2pi2", res.energy.max_energy / target - 1.0},
              {"converged", res.converged},
              {"stop_reason", to_string(res.stop_reason)},
              {"best_restart", res.best_restart}};
  for (double e : res.energy.per_domain) energy["per_domain_over_pi2"].push_back(e / kPi2);
  write_text(dir / "energy.json", energy.dump(2) + "\n");
  m.write();

  out << "Lambda = " << pi2(res.energy.max_energy) << '\n';
  out << "k^2 pi^2 = " << pi2(target) << ", relative deviation " << res.energy.max_energy / target - 1.0
      << '\n';
  out << "upper bound = " << pi2(upper_bound(geom, cfg.k)) << '\n';
  out << "converged: " << (res.converged ? "true" : "false") << " (stopped on " << to_string(res.stop_reason)
      << ")\n";
  out << "euler characteristics:";
  for (const auto& d : topo.domains) out << ' ' << d.euler;
  out << "\ncritical points: " << topo.critical_points.size() << '\n';
  out << "bipartite: " << (topo.bipartite ? "true" : "false") << '\n';
  out << "outputs in " << dir.string() << '\n';
  return kPass;
}

struct VerifyArgs {
  std::string suite;
  double a = 1.0, b = 0.37;
  int mmax = 6;
  int count = 40;
  int k = 3;
  int pmax = 12;
  int fx = 2, fy = 2;
  std::string input;
  std::string config;
};

int cmd_verify(const VerifyArgs& p, RunManifest& m, std::ostream& out) {
  json report{{"suite", p.suite}};
  bool passed = false;
  if (p.suite == "courant-scan") {
    if (p.mmax < 1) fail(ErrorCode::InvalidArgument, "--mmax must be >= 1");
    const TorusGeometry geom(p.a, p.b);
    m.params = {{"a", p.a}, {"b", p.b}, {"mmax", p.mmax}};
    passed = true;
    auto& pairs = report["pairs"] = json::array();
    for (int mm = 1; mm <= p.mmax; ++mm) {
      for (int nn = 1; nn <= p.mmax; ++nn) {
        const EigenIndex idx{mm, nn};
        const auto ci = courant_index(geom, idx);
        const auto sharp = is_courant_sharp(geom, idx);
        const bool ok = sharp == Sharpness::no && ci >= courant_lower_bound(idx);
        passed = passed && ok;
        pairs.push_back({{"m", mm},
                         {"n", nn},
                         {"courant_index", ci},
                         {"lower_bound", courant_lower_bound(idx)},
                         {"max_nodal", 4 * mm * nn},
                         {"courant_sharp", to_string(sharp)},
                         {"pass", ok}});
      }
    }
  } else if (p.suite == "sharp-scan") {
    if (p.count < 1) fail(ErrorCode::InvalidArgument, "--count must be >= 1");
    const TorusGeometry geom(p.a, p.b);
    m.params = {{"a", p.a}, {"b", p.b}, {"count", p.count}};
    const auto rows = spectrum_rows(geom, static_cast<std::size_t>(p.count));
    std::vector<std::int64_t> sharp;
    bool any_undetermined = false;
    for (const auto& r : rows) {
      if (r.courant_sharp == Sharpness::yes && r.index == r.courant_index) sharp.push_back(r.index);
      any_undetermined = any_undetermined || r.courant_sharp == Sharpness::undetermined;
    }
    report["courant_sharp_indices"] = sharp;
    report["undetermined_present"] = any_undetermined;
    passed = sharp == std::vector<std::int64_t>{1, 2} && !any_undetermined;
  } else if (p.suite == "euler") {
    const auto part = load_partition(p.input);
    m.params = {{"input", p.input}};
    report["residual_twice"] = check_euler_identity(part);
    report["k"] = part.k();
    passed = report["residual_twice"] == 0;
  } else if (p.suite == "lift") {
    const auto part = load_partition(p.input);
    m.params = {{"input", p.input}, {"fx", p.fx}, {"fy", p.fy}};
    const auto lifted = lift_partition(part, p.fx, p.fy);
    report["k"] = part.k();
    report["lifted_k"] = lifted.k();
    report["bipartite"] = is_bipartite(lifted);
    passed = lifted.k() == 2 * part.k() && is_bipartite(lifted);
  } else if (p.suite == "thin-torus") {
    const TorusGeometry geom(p.a, p.b);
    std::optional<OptimizerConfig> cfg;
    if (!p.config.empty()) cfg = OptimizerConfig::from_json(read_file(p.config));
    m.params = {{"a", p.a}, {"b", p.b}, {"k", p.k}, {"config", p.config}};
    const auto rep = verify_thin_torus(geom, p.k, cfg);
    report["report"] = json::parse(rep.to_json());
    if (!rep.hypothesis_met) {
      out << report.dump(2) << '\n';
      m.write();
      return kUsage;
    }
    passed = rep.passed();
  } else if (p.suite == "knots") {
    if (p.pmax < 1) fail(ErrorCode::InvalidArgument, "--pmax must be >= 1");
    m.params = {{"pmax", p.pmax}};
    passed = true;
    auto& rows = report["pairs"] = json::array();
    for (int pp = 1; pp <= p.pmax; ++pp) {
      for (int qq = 1; qq <= p.pmax; ++qq) {
        const auto g = knot_components(pp, qq);
        const auto t = knot_components_traced(pp, qq);
        passed = passed && g == t;
        rows.push_back({{"p", pp}, {"q", qq}, {"gcd", g}, {"traced", t}});
      }
    }
  } else {
    fail(ErrorCode::InvalidArgument, "unknown suite " + p.suite);
  }
  report["passed"] = passed;
  const auto dir = prepare_dir(m.output_dir);
  write_text(dir / ("verify_" + p.suite + ".json"), report.dump(2) + "\n");
  m.write();
  out << report.dump(2) << '\n';
  return passed ? kPass : kVerificationFailed;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& out,
               std::ostream& err) {
  json j;
  try {
    j = json::parse(read_file(manifest_path));
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("bad manifest: ") + e.what());
  }
  if (!j.contains("argv") || !j["argv"].is_array()) fail(ErrorCode::InvalidArgument, "manifest lacks argv");
  auto argv = j["argv"].get<std::vector<std::string>>();
  if (!argv.empty() && argv.front() == "replay") fail(ErrorCode::InvalidArgument, "manifest records a replay");
  if (!out_dir.empty()) {
    std::vector<std::string> filtered;
    for (std::size_t i = 0; i < argv.size(); ++i) {
      if (argv[i] == "--out" && i + 1 < argv.size()) {
        ++i;
        continue;
      }
      if (argv[i].rfind("--out=", 0) == 0) continue;
      filtered.push_back(argv[i]);
    }
    filtered.push_back("--out");
    filtered.push_back(out_dir);
    argv = std::move(filtered);
  }
  return dispatch(argv, out, err);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectra, nodal domains and minimal partitions of flat tori", "tplcli"};
  app.require_subcommand(1);
  std::string out_dir = "tpl_out";

  SpectrumArgs sp;
  auto* spectrum = app.add_subcommand("spectrum", "Enumerate T(a,b) eigenvalues with Courant data");
  spectrum->add_option("--a", sp.a, "horizontal circumference")->capture_default_str();
  spectrum->add_option("--b", sp.b, "vertical circumference")->capture_default_str();
  spectrum->add_option("--count", sp.count, "eigenvalues, counted with multiplicity")->required();
  spectrum->add_option("--out", out_dir, "output directory")->capture_default_str();

  NodalArgs np;
  auto* nodal = app.add_subcommand("nodal", "Count nodal domains of an explicit eigenfunction");
  nodal->add_option("--a", np.a)->capture_default_str();
  nodal->add_option("--b", np.b)->capture_default_str();
  nodal->add_option("--m", np.m)->required();
  nodal->add_option("--n", np.n)->required();
  nodal->add_option("--mu", np.mu)->capture_default_str();
  nodal->add_option("--lam", np.lam)->capture_default_str();
  nodal->add_option("--theta1", np.theta1)->capture_default_str();
  nodal->add_option("--theta2", np.theta2)->capture_default_str();
  nodal->add_option("--form", np.form, "lemma | general | product-cos | product-sin")->capture_default_str();
  nodal->add_option("--branch", np.branch, "sign of the cos term for product-sin")->capture_default_str();
  nodal->add_option("--res", np.per_osc, "cells per oscillation")->capture_default_str();
  nodal->add_option("--out", out_dir)->capture_default_str();

  SolveArgs so;
  std::uint64_t seed = 0;
  int restarts = 0, max_iters = 0;
  auto* solve = app.add_subcommand("solve", "Optimize a k-partition of T(a,b)");
  solve->add_option("--a", so.a)->capture_default_str();
  solve->add_option("--b", so.b)->required();
  solve->add_option("--k", so.k)->required();
  solve->add_option("--grid", so.grid, "NXxNY");
  solve->add_option("--config", so.config, "OptimizerConfig JSON file");
  auto* seed_opt = solve->add_option("--seed", seed);
  auto* restarts_opt = solve->add_option("--restarts", restarts);
  auto* iters_opt = solve->add_option("--max-iters", max_iters);
  solve->add_option("--out", out_dir)->capture_default_str();

  VerifyArgs vp;
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", vp.suite, "courant-scan | sharp-scan | euler | lift | thin-torus | knots")
      ->required();
  verify->add_option("--a", vp.a)->capture_default_str();
  verify->add_option("--b", vp.b)->capture_default_str();
  verify->add_option("--mmax", vp.mmax)->capture_default_str();
  verify->add_option("--count", vp.count)->capture_default_str();
  verify->add_option("--k", vp.k)->capture_default_str();
  verify->add_option("--pmax", vp.pmax)->capture_default_str();
  verify->add_option("--fx", vp.fx)->capture_default_str();
  verify->add_option("--fy", vp.fy)->capture_default_str();
  verify->add_option("--input", vp.input, "partition container");
  verify->add_option("--config", vp.config, "OptimizerConfig JSON file");
  verify->add_option("--out", out_dir)->capture_default_str();

  std::string manifest;
  std::string replay_out;
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("manifest", manifest)->required();
  replay->add_option("--out", replay_out, "output directory (default: the recorded one)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  RunManifest m;
  m.argv = args;
  m.output_dir = out_dir;
  if (*spectrum) {
    m.command = "spectrum";
    return cmd_spectrum(sp, m, out);
  }
  if (*nodal) {
    m.command = "nodal";
    return cmd_nodal(np, m, out);
  }
  if (*solve) {
    m.command = "solve";
    if (seed_opt->count()) so.seed = seed;
    if (restarts_opt->count()) so.restarts = restarts;
    if (iters_opt->count()) so.max_iters = max_iters;
    return cmd_solve(so, m, out);
  }
  if (*verify) {
    m.command = "verify";
    return cmd_verify(vp, m, out);
  }
  return cmd_replay(manifest, replay_out, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailed;
  }
}

}  // namespace tpl::cli
