#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dampeuler/cli/artifacts.hpp"
#include "dampeuler/cli/config.hpp"
#include "dampeuler/cli/pipelines.hpp"

using namespace dampeuler;
using namespace dampeuler::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dampeuler_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string usage_path(const json& j, std::optional<Mode> mode = Mode::Burgers) {
  try {
    config_from_json(j, mode);
  } catch (const UsageError& e) {
    return e.path();
  }
  return "<accepted>";
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DAMPEULER_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

json manifest_of(const fs::path& dir) { return json::parse(read_file(dir / "manifest.json")); }

}  // namespace

TEST(Decimal, ParsesExactlyAndKeepsText) {
  const auto d = Decimal::parse("0.1", "x");
  EXPECT_EQ(d.text, "0.1");
  EXPECT_EQ(d.value, 0.1);
  EXPECT_EQ(Decimal::parse("1e-3", "x").value, 1e-3);
  EXPECT_EQ(Decimal::parse("+2", "x").value, 2.0);
  EXPECT_EQ(Decimal::parse(".5", "x").value, 0.5);
  for (const char* bad : {"", "abc", "1,5", "inf", "nan", "1e999", "0x10", "1.2.3", " 1"}) {
    EXPECT_THROW(Decimal::parse(bad, "law.mu"), UsageError) << bad;
  }
}

TEST(Config, DefaultsValidateAndModeIsRequired) {
  EXPECT_NO_THROW(config_from_json(json::object(), Mode::Burgers));
  EXPECT_EQ(usage_path(json::object(), std::nullopt), "mode");
  EXPECT_EQ(config_from_json({{"mode", "euler2d"}}).mode, Mode::Euler2d);
  EXPECT_EQ(usage_path({{"mode", "euler2d"}}, Mode::Burgers), "mode");
  EXPECT_EQ(usage_path({{"mode", "plot"}}, std::nullopt), "mode");
}

TEST(Config, UsageErrorsNameTheField) {
  EXPECT_EQ(usage_path({{"law", {{"lambda", 0.5}}}}), "law.lambda");
  EXPECT_EQ(usage_path({{"law", {{"mu", "0"}}}}), "law.mu");
  EXPECT_EQ(usage_path({{"law", {{"lambda", "-1"}}}}), "law.lambda");
  EXPECT_EQ(usage_path({{"gas", {{"gamma", 1.0}}}}), "gas.gamma");
  EXPECT_EQ(usage_path({{"eps", -0.1}}), "eps");
  EXPECT_EQ(usage_path({{"eps", "0.1"}}), "eps");
  EXPECT_EQ(usage_path({{"grid", {{"n", 4}}}}), "grid.n");
  EXPECT_EQ(usage_path({{"grid", {{"n", 64.5}}}}), "grid.n");
  EXPECT_EQ(usage_path({{"grid", {{"nn", 64}}}}), "grid.nn");
  EXPECT_EQ(usage_path({{"colour", "red"}}), "colour");
  EXPECT_EQ(usage_path({{"data", {{"family", "vortex"}}}}), "data.family");
  EXPECT_EQ(usage_path({{"data", {{"M_tilde", 1.0}}}}), "data.M_tilde");
  EXPECT_EQ(usage_path({{"solver", {{"snapshot_times", {1.0, 99.0}}}}}), "solver.snapshot_times[1]");
  EXPECT_EQ(usage_path({{"sweep", {{"mu", {"1", 2}}}}}), "sweep.mu[1]");
  EXPECT_EQ(usage_path({{"data", 3}}), "data");
  EXPECT_EQ(usage_path({{"seed", -1}}), "seed");
}

TEST(Config, EmptySweepIsAUsageError) {
  EXPECT_EQ(usage_path(json::object(), Mode::Sweep), "sweep.lambda");
  EXPECT_EQ(usage_path({{"sweep", {{"lambda", {"1"}}, {"mu", {"1"}}}}}, Mode::Sweep), "sweep.eps");
  const json big = {{"sweep",
                     {{"lambda", {"0", "1", "2"}}, {"mu", {"1", "2"}}, {"eps", {0.1}}, {"budget", 5}}}};
  EXPECT_EQ(usage_path(big, Mode::Sweep), "sweep");
}

TEST(Config, RoundTripIsBitExact) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const char* families[] = {"zero", "rotational", "irrotational", "outflow"};
  for (int k = 0; k < 50; ++k) {
    ExperimentConfig c;
    c.mode = static_cast<Mode>(k % 6);
    c.law.lambda = Decimal::parse(std::to_string(k % 4) + ".25", "law.lambda");
    c.law.mu = Decimal::parse("0." + std::to_string(1 + k), "law.mu");
    c.gas.gamma = 1.0 + U(rng);
    c.eps = U(rng) * 0.3 + 1e-9;
    c.t_end = 1.0 + 50.0 * U(rng);
    c.seed = rng();
    c.data.family = families[k % 4];
    c.data.M = 0.5 + U(rng);
    c.data.rho_amplitude = U(rng) - 0.5;
    c.grid.L = 1.0 + 10.0 * U(rng);
    c.grid.n = 8 + k;
    c.solver.extra_thresholds = {100.0, 1e4 * (1.0 + U(rng))};
    c.solver.snapshot_times = {c.t_end * U(rng)};
    c.testbench.times = {0.0, U(rng)};
    c.sweep.lambda = {Decimal::parse("0.5", "x"), Decimal::parse("2", "x")};
    c.sweep.mu = {Decimal::parse("1e-1", "x")};
    c.sweep.eps = {U(rng) + 1e-3};
    c.output = "dir" + std::to_string(k);
    const json j = config_to_json(c);
    const auto back = config_from_json(json::parse(j.dump()));
    EXPECT_TRUE(back == c) << j.dump();
    EXPECT_EQ(config_to_json(back).dump(), j.dump());
  }
}

TEST(Config, HashIgnoresOutputDirectoryOnly) {
  ExperimentConfig a;
  ExperimentConfig b = a;
  b.output = "elsewhere";
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.eps = std::nextafter(a.eps, 1.0);
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Artifacts, Sha256KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Artifacts, NumbersRoundTripThroughText) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 35.000001481449516}) {
    EXPECT_EQ(std::stod(fmt(x)), x);
  }
  EXPECT_EQ(fmt(INFINITY), "inf");
  EXPECT_EQ(fmt(std::optional<double>()), "");
}

TEST(Artifacts, CsvHasCommentBlockThenHeader) {
  CsvTable t({"a", "b"});
  t.row(1.5, std::string("x,y"));
  t.row(2, "plain");
  EXPECT_THROW(t.row(1.0), std::logic_error);
  const std::string text = t.render("abc123", "demo");
  EXPECT_EQ(text, std::string("# dampeuler ") + kSoftwareVersion +
                      "\n# config_sha256 abc123\n# demo\na,b\n1.5,\"x,y\"\n2,plain\n");
}

TEST(Artifacts, ManifestListsEveryFileWithItsHash) {
  const auto dir = scratch("manifest");
  ExperimentConfig c;
  ArtifactWriter w(dir, config_hash(c));
  w.write_bytes("b.txt", "beta");
  w.write_bytes("a.txt", "alpha");
  euler2d::FlowState2D s(euler2d::Grid2D(2.0, 8), 0.5);
  w.write_snapshot("s.del1", s);
  const json m = w.write_manifest(c, "ok");
  ASSERT_EQ(m["files"].size(), 3u);
  EXPECT_EQ(m["files"][0]["path"], "a.txt");
  EXPECT_EQ(m["files"][0]["sha256"], sha256_hex("alpha"));
  EXPECT_EQ(m["files"][2]["bytes"], 4u + 4u + 8u + 8u + 3u * 64u * 8u);
  EXPECT_TRUE(check_manifest(dir).empty());
  std::ofstream(dir / "a.txt") << "tampered";
  EXPECT_EQ(check_manifest(dir), std::vector<std::string>{"a.txt"});
}

TEST(Pipelines, MinimalBurgersConfigGivesLifespan) {
  auto c = config_from_json(json::object(), Mode::Burgers);
  c.grid.nx = 512;
  c.t_end = 2.0;
  const auto r = run_burgers(c);
  // lambda = mu = 1: I(t) = ln(1+t), T = e^(1/eps) - 1.
  ASSERT_TRUE(r.exact.finite);
  EXPECT_NEAR(r.exact.log1p_time, 10.0, 1e-6);
  EXPECT_FALSE(r.grid.blowup_time);
  const auto dir = scratch("burgers");
  ArtifactWriter w(dir, config_hash(c));
  write_burgers(w, c, r);
  const std::string csv = read_file(dir / "lifespan.csv");
  EXPECT_NE(csv.find("\nlambda,mu,eps,"), std::string::npos);
  EXPECT_NE(csv.find("\n1,1,0.1,bump,"), std::string::npos);
}

TEST(Pipelines, SweepGivesOneLabelledRowPerCell) {
  const json j = {{"sweep", {{"lambda", {"0.5", "1", "2"}}, {"mu", {"0.5", "2"}}, {"eps", {0.1}}}}};
  const auto c = config_from_json(j, Mode::Sweep);
  const auto rows = run_sweep(c, 2);
  ASSERT_EQ(rows.size(), 6u);
  const char* cases[] = {"Case1", "Case1", "Case3", "Case2", "Case4", "Case4"};
  const char* outcomes[] = {"global", "global", "blowup", "global", "blowup", "blowup"};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(to_string(rows[k].label.kind), cases[k]) << k;
    EXPECT_EQ(rows[k].outcome, outcomes[k]) << k;
    EXPECT_TRUE(rows[k].consistent()) << k;
    EXPECT_EQ(rows[k].t_blowup.has_value(), rows[k].outcome == "blowup");
  }
  EXPECT_EQ(rows[0].lambda.text, "0.5");
  EXPECT_EQ(rows[1].mu.text, "2");
}

TEST(Pipelines, FailingSweepCellIsRecordedAndSweepContinues) {
  const json j = {{"sweep", {{"lambda", {"1"}}, {"mu", {"0.5", "2"}}, {"eps", {0.3}}}}};
  auto c = config_from_json(j, Mode::Sweep);
  c.data.profile = "no-such-profile";
  const auto rows = run_sweep(c, 1);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.outcome, "failed");
    EXPECT_FALSE(r.detail.empty());
  }
  EXPECT_FALSE(all_passed(verify_sweep(rows)));
}

TEST(Pipelines, Euler2dSweepCellsRunToTheEnd) {
  const json j = {{"sweep", {{"lambda", {"0.5", "2"}}, {"mu", {"1"}}, {"eps", {0.05}},
                             {"cell_mode", "euler2d"}}},
                  {"grid", {{"L", 6.0}, {"n", 64}}},
                  {"t_end", 1.0}};
  const auto rows = run_sweep(config_from_json(j, Mode::Sweep), 2);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.outcome, "global-to-t_end") << r.detail;
    EXPECT_NE(r.detail.find("max gradient ratio"), std::string::npos);
  }
  EXPECT_TRUE(rows[0].consistent());
  EXPECT_FALSE(rows[1].consistent());
}

TEST(Pipelines, SpecfunCheckIdentitiesHold) {
  auto c = config_from_json(json::object(), Mode::SpecfunCheck);
  c.specfun.psi_samples = 30;
  c.specfun.adjoint_points = 5;
  const auto r = run_specfun_check(c);
  EXPECT_EQ(r.psi.size(), 30u);
  EXPECT_EQ(r.adjoint.size(), 15u);
  for (const auto& x : r.psi) {
    EXPECT_LE(x.z, 0.0);
    EXPECT_GT(x.z, -0.5);
  }
  for (const auto& ch : verify_specfun_check(r)) EXPECT_TRUE(ch.passed) << ch.name << " " << ch.detail;
}

TEST(Pipelines, Euler2dVerifySuitePassesOnSmoothRun) {
  const json j = {{"law", {{"lambda", "0.5"}, {"mu", "1"}}}, {"eps", 0.05}, {"t_end", 2.0},
                  {"grid", {{"L", 6.0}, {"n", 64}}}, {"data", {{"family", "irrotational"}, {"M", 2.0}}},
                  {"solver", {{"sample_every", 0.5}}}};
  const auto c = config_from_json(j, Mode::Euler2d);
  const auto r = run_euler2d(c, 1);
  EXPECT_FALSE(r.run.blowup);
  EXPECT_EQ(r.series.front().t, 0.0);
  EXPECT_EQ(r.series.back().t, 2.0);
  EXPECT_TRUE(r.series.back().calE2.has_value());
  for (const auto& ch : verify_euler2d(c, r)) EXPECT_TRUE(ch.passed) << ch.name << " " << ch.detail;
}

TEST(Binary, ExitCodes) {
  const auto dir = scratch("exit");
  EXPECT_EQ(run_cli("burgers --out " + (dir / "a").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "a" / "lifespan.csv"));
  EXPECT_EQ(run_cli("sweep --out " + (dir / "b").string()), 2);
  std::ofstream(dir / "bad.json") << R"({"law": {"lambda": 0.5}})";
  EXPECT_EQ(run_cli("burgers --config " + (dir / "bad.json").string() + " --out " +
                    (dir / "c").string()),
            2);
  std::ofstream(dir / "broken.json") << "{";
  EXPECT_EQ(run_cli("burgers --config " + (dir / "broken.json").string()), 2);
  EXPECT_NE(run_cli("frobnicate"), 0);
  std::ofstream(dir / "snap.json") << R"({"diagnose": {"snapshot": "/nonexistent.del1"}})";
  EXPECT_EQ(run_cli("diagnose --config " + (dir / "snap.json").string() + " --out " +
                    (dir / "d").string()),
            3);
  EXPECT_TRUE(fs::exists(dir / "d" / "error.json"));
  EXPECT_EQ(manifest_of(dir / "d")["status"], "failed");
}

TEST(Binary, RerunGivesIdenticalHashesAcrossThreadCounts) {
  const auto dir = scratch("determinism");
  std::ofstream(dir / "e.json") << R"({"law": {"lambda": "0.5", "mu": "1"}, "eps": 0.05,
    "t_end": 1.5, "grid": {"L": 6, "n": 64}, "solver": {"sample_every": 0.5, "snapshot_times": [1]}})";
  const std::string cfg = " --config " + (dir / "e.json").string();
  ASSERT_EQ(run_cli("euler2d" + cfg + " --out " + (dir / "one").string()), 0);
  ASSERT_EQ(run_cli("euler2d" + cfg + " --threads 3 --out " + (dir / "three").string()), 0);
  const json a = manifest_of(dir / "one"), b = manifest_of(dir / "three");
  EXPECT_EQ(a["files"], b["files"]);
  EXPECT_EQ(a["files"].size(), 7u);
  EXPECT_EQ(a["config_sha256"], b["config_sha256"]);
  EXPECT_TRUE(check_manifest(dir / "one").empty());
  const auto s = euler2d::read_snapshot_file((dir / "one" / "snapshot_0.del1").string());
  EXPECT_GE(s.t, 1.0);
  EXPECT_EQ(s.grid.n, 64);
}

TEST(Binary, VerifyFlagWritesChecks) {
  const auto dir = scratch("verify");
  ASSERT_EQ(run_cli("specfun-check --verify --out " + dir.string()), 0);
  const std::string v = read_file(dir / "verify.csv");
  EXPECT_NE(v.find("critical_bracket_exactly_zero,true"), std::string::npos);
  EXPECT_EQ(manifest_of(dir)["status"], "ok");
}
