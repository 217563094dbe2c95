// dampeuler: command-line driver for the experiment pipelines.
//
// Exit status: 0 success, 2 usage error, 3 runtime failure, 4 --verify found
// a violated invariant.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "dampeuler/cli/artifacts.hpp"
#include "dampeuler/cli/config.hpp"
#include "dampeuler/cli/pipelines.hpp"
#include "dampeuler/core/errors.hpp"

namespace {

using namespace dampeuler;
using namespace dampeuler::cli;

struct Flags {
  std::string config;
  std::string out;
  int threads = 1;
  bool verify = false;
};

ExperimentConfig load_config(const Flags& f, Mode mode) {
  json j = json::object();
  if (!f.config.empty()) {
    std::ifstream is(f.config);
    if (!is) throw UsageError("--config", "cannot open '" + f.config + "'");
    try {
      j = json::parse(is);
    } catch (const json::parse_error& e) {
      throw UsageError("--config", std::string("invalid JSON: ") + e.what());
    }
  }
  ExperimentConfig c = config_from_json(j, mode);
  if (!f.out.empty()) c.output = f.out;
  return c;
}

json checks_json(const std::vector<Check>& checks) {
  json a = json::array();
  for (const auto& c : checks) a.push_back({{"check", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return a;
}

int run(Mode mode, const Flags& flags) {
  const ExperimentConfig c = load_config(flags, mode);
  ArtifactWriter w(c.output, config_hash(c));
  json resolved = config_to_json(c);
  resolved.erase("output");
  w.write_json("config.json", resolved);
  json summary = json::object();
  std::vector<Check> checks;
  try {
    switch (mode) {
      case Mode::Burgers: {
        const auto r = run_burgers(c);
        write_burgers(w, c, r);
        summary = {{"finite", r.exact.finite}, {"log1p_T", r.exact.log1p_time}};
        if (flags.verify) checks = verify_burgers(r);
        break;
      }
      case Mode::Euler2d: {
        const auto r = run_euler2d(c, flags.threads);
        write_euler2d(w, c, r);
        summary = {{"outcome", outcome_of(r.run)}, {"steps", r.run.steps}};
        if (r.run.blowup) summary["t_blowup"] = r.run.blowup->t;
        if (flags.verify) checks = verify_euler2d(c, r);
        break;
      }
      case Mode::Diagnose: {
        if (!c.diagnose.snapshot.empty()) {
          const auto s = euler2d::read_snapshot_file(c.diagnose.snapshot);
          w.write_csv("snapshot_diagnostics.csv", diagnose_snapshot(c, s),
                      "diagnostics of " + std::filesystem::path(c.diagnose.snapshot).filename().string());
          summary = {{"t", s.t}, {"n", s.grid.n}};
        } else {
          const auto r = run_diagnose(c, flags.threads);
          write_diagnose(w, c, r);
          summary = {{"outcome", outcome_of(r.euler.run)},
                     {"t_to", r.t_to},
                     {"window_truncated", r.window_truncated}};
          if (flags.verify) checks = verify_diagnose(c, r);
        }
        break;
      }
      case Mode::Testbench: {
        const auto r = run_testbench(c);
        write_testbench(w, r);
        summary = {{"rows", r.rows.size()}};
        if (flags.verify) checks = verify_testbench(r);
        break;
      }
      case Mode::SpecfunCheck: {
        const auto r = run_specfun_check(c);
        write_specfun_check(w, r);
        summary = {{"psi_samples", r.psi.size()}, {"adjoint_points", r.adjoint.size()}};
        if (flags.verify) checks = verify_specfun_check(r);
        break;
      }
      case Mode::Sweep: {
        const auto rows = run_sweep(c, flags.threads);
        write_sweep(w, c, rows);
        summary = {{"cells", rows.size()}};
        if (flags.verify) checks = verify_sweep(rows);
        break;
      }
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    w.write_json("error.json", {{"error", e.what()}, {"mode", to_string(mode)}});
    w.write_manifest(c, "failed", summary);
    std::cerr << "dampeuler " << to_string(mode) << ": " << e.what() << "\n";
    return 3;
  }
  if (flags.verify) {
    write_checks(w, checks);
    summary["verify"] = checks_json(checks);
  }
  const bool ok = all_passed(checks);
  w.write_manifest(c, ok ? "ok" : "verify-failed", summary);
  for (const auto& ch : checks) {
    std::cout << (ch.passed ? "PASS " : "FAIL ") << ch.name << ": " << ch.detail << "\n";
  }
  std::cout << "wrote " << w.entries().size() << " files and manifest.json to " << c.output << "\n";
  return ok ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Damped compressible Euler experiments"};
  app.set_version_flag("--version", std::string("dampeuler ") + kSoftwareVersion);
  app.require_subcommand(1);
  Flags flags;
  std::optional<Mode> chosen;
  const std::pair<Mode, const char*> commands[] = {
      {Mode::Burgers, "Burgers lifespan and grid blowup detection"},
      {Mode::Euler2d, "2-D damped Euler run"},
      {Mode::Diagnose, "blowup functionals along a run, or diagnostics of a snapshot"},
      {Mode::Testbench, "weighted inequality test-bench on the analytic catalog"},
      {Mode::SpecfunCheck, "hypergeometric and Riemann-function identity checks"},
      {Mode::Sweep, "phase-diagram sweep over (lambda, mu, eps)"},
  };
  for (const auto& [mode, help] : commands) {
    auto* sub = app.add_subcommand(to_string(mode), help);
    sub->add_option("--config", flags.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output directory (overrides the config)");
    sub->add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--verify", flags.verify, "run the invariant suite on the result");
    sub->callback([&chosen, m = mode] { chosen = m; });
  }
  CLI11_PARSE(app, argc, argv);
  try {
    return run(*chosen, flags);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
