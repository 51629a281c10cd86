#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

// End-to-end tests that spawn the installed binary, so flag parsing, exit
// codes and artifact bytes are all exercised exactly as a user sees them.

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code = -1;
  std::string out;  // stdout + stderr interleaved
};

CliResult run_cli(const std::string& args, const std::string& env = "") {
  std::string cmd = env.empty() ? "" : env + " ";
  cmd += std::string(GRADOPT_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  EXPECT_NE(pipe, nullptr) << cmd;
  CliResult r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  EXPECT_TRUE(in.good()) << p;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path specs_dir() { return fs::path(GRADOPT_SPECS_DIR); }

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "gradopt-cli-test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(Cli, VersionFlag) {
  CliResult r = run_cli("--version");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("gradopt 0.1.0"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli("").code, 2);                       // subcommand required
  EXPECT_EQ(run_cli("run --bogus-flag").code, 2);       // unknown flag
  EXPECT_EQ(run_cli("frobnicate").code, 2);             // unknown subcommand
  EXPECT_EQ(run_cli("run --config /no/such.spec").code, 2);
  CliResult r = run_cli("smooth-eval --objective toy9 --t 0.5 --x 0");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("error:"), std::string::npos);
}

TEST(Cli, SmoothEvalQuadraticPinnedValue) {
  CliResult r = run_cli("smooth-eval --objective quadratic --t 0.5 --x 0");
  ASSERT_EQ(r.code, 0) << r.out;
  nlohmann::json j = nlohmann::json::parse(r.out);
  // Gaussian-smoothed x^2 at 0 picks up the per-coordinate variance 2t.
  EXPECT_NEAR(j["value"].get<double>(), 1.0, 1e-8);
  EXPECT_NEAR(j["gradient"][0].get<double>(), 0.0, 1e-8);
  EXPECT_DOUBLE_EQ(j["t"].get<double>(), 0.5);
}

TEST(Cli, SmoothEvalScaleFlagsAreExclusive) {
  EXPECT_EQ(run_cli("smooth-eval --objective quadratic --t 0.5 --nu 2 --x 0").code, 2);
  EXPECT_EQ(run_cli("smooth-eval --objective quadratic --x 0").code, 2);
  // --nu alone works and matches the reciprocal t.
  CliResult r = run_cli("smooth-eval --objective quadratic --nu 2 --x 0");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(r.out)["t"].get<double>(), 0.5);
}

TEST(Cli, SmoothEvalMonteCarloIsSeeded) {
  std::string args =
      "smooth-eval --objective toy1 --t 0.1 --x 2 --samples 64 --seed 9";
  CliResult a = run_cli(args);
  CliResult b = run_cli(args);
  ASSERT_EQ(a.code, 0) << a.out;
  EXPECT_EQ(a.out, b.out);
  nlohmann::json j = nlohmann::json::parse(a.out);
  ASSERT_TRUE(j.contains("mc_gradient"));
  EXPECT_NEAR(j["mc_gradient"][0].get<double>(), j["gradient"][0].get<double>(),
              2.0);
}

TEST(Cli, KernelProbeReportsNormalization) {
  CliResult ok = run_cli("kernel-probe --kernel gaussian --dim 2 --t 0.7");
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_NE(ok.out.find("OK"), std::string::npos);

  // Truncating the Gaussian tail at the support radius leaves a mass deficit
  // around 1e-15, so an absurdly tight tolerance must report failure.
  CliResult bad =
      run_cli("kernel-probe --kernel gaussian --dim 2 --t 0.7 --tol 1e-16");
  EXPECT_EQ(bad.code, 1) << bad.out;
  EXPECT_NE(bad.out.find("NOT NORMALIZED"), std::string::npos);
}

TEST(Cli, RunArtifactsAreByteIdenticalAcrossInvocationsAndThreads) {
  fs::path a = fresh_dir("run-a"), b = fresh_dir("run-b"), c = fresh_dir("run-c");
  std::string base = "run --config " + (specs_dir() / "toy2.spec").string() +
                     " --seed 42 --set n_inits=6 --format csv,json,svg";
  CliResult ra = run_cli(base + " --threads 1 --output-dir " + a.string());
  CliResult rb = run_cli(base + " --threads 3 --output-dir " + b.string());
  CliResult rc = run_cli(base + " --threads 1 --output-dir " + c.string());
  ASSERT_EQ(ra.code, 0) << ra.out;
  ASSERT_EQ(rb.code, 0) << rb.out;
  ASSERT_EQ(rc.code, 0) << rc.out;
  for (const char* name :
       {"toy2_runs.csv", "toy2_summary.csv", "toy2_report.json",
        "toy2_panels.svg"}) {
    std::string bytes = slurp(a / name);
    EXPECT_FALSE(bytes.empty()) << name;
    EXPECT_EQ(bytes, slurp(b / name)) << name << " differs across --threads";
    EXPECT_EQ(bytes, slurp(c / name)) << name << " differs across reruns";
  }
  // Summary table lists every arm.
  for (const char* label : {"plain-sgd", "single-t0.02", "single-t0.0002", "ml-2"})
    EXPECT_NE(ra.out.find(label), std::string::npos) << label;
  // The echoed config records the effective seed and override.
  nlohmann::json rep = nlohmann::json::parse(slurp(a / "toy2_report.json"));
  EXPECT_EQ(rep["config"]["master_seed"], 42);
  EXPECT_EQ(rep["config"]["n_inits"], 6);
  EXPECT_EQ(rep["master_seed"], 42);
}

TEST(Cli, SeedFlagChangesResults) {
  fs::path a = fresh_dir("seed-a"), b = fresh_dir("seed-b");
  std::string base = "run --config " + (specs_dir() / "toy2.spec").string() +
                     " --set n_inits=4 --format csv";
  ASSERT_EQ(run_cli(base + " --seed 1 --output-dir " + a.string()).code, 0);
  ASSERT_EQ(run_cli(base + " --seed 2 --output-dir " + b.string()).code, 0);
  EXPECT_NE(slurp(a / "toy2_runs.csv"), slurp(b / "toy2_runs.csv"));
}

TEST(Cli, OutputDirEnvVarIsHonored) {
  fs::path dir = fresh_dir("env-dir");
  std::string cmd = "run --config " + (specs_dir() / "toy2.spec").string() +
                    " --set n_inits=2 --format json";
  CliResult r = run_cli(cmd, "GRADOPT_OUTPUT_DIR=" + dir.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir / "toy2_report.json"));
}

}  // namespace
