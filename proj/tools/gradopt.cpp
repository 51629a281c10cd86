#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gradopt/gradopt.hpp"

namespace {

using namespace gradopt;

std::string default_output_dir() {
  const char* env = std::getenv("GRADOPT_OUTPUT_DIR");
  return env && *env ? env : "gradopt-out";
}

Vec parse_point(const std::vector<double>& coords) {
  if (coords.empty()) throw InvalidArgument("--x needs at least one coordinate");
  return coords;
}

int cmd_run(const std::string& config_path, bool has_seed, std::uint64_t seed,
            const std::string& out_dir, int threads,
            std::vector<std::string> formats,
            const std::vector<std::string>& overrides) {
  nlohmann::json j = load_json_file(config_path);
  for (const std::string& ov : overrides) apply_override(j, ov);
  ExperimentSpec spec = parse_experiment(j);
  if (has_seed) {
    spec.master_seed = seed;
    j["master_seed"] = seed;
  }

  auto t0 = std::chrono::steady_clock::now();
  BatchReport report = run_batch(spec, threads);
  report.config_echo = j;
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  if (formats.empty()) formats = {"json"};
  auto written =
      export_report(report, out_dir, {formats.begin(), formats.end()});

  std::printf("experiment %s: objective=%s inits=%d seed=%llu threads=%d\n",
              report.name.c_str(), report.objective_name.c_str(),
              report.n_inits,
              static_cast<unsigned long long>(report.master_seed), threads);
  std::printf("  %-24s %8s %8s %14s %14s\n", "arm", "basin", "eps-opt",
              "mean value", "median value");
  for (const ArmResult& arm : report.arms) {
    std::printf("  %-24s %8.3f %8.3f %14.6g %14.6g\n", arm.label.c_str(),
                arm.basin_frac_any, arm.epsilon_frac, arm.value_mean,
                arm.value_median);
    for (const auto& [idx, msg] : arm.failures)
      std::printf("    failed init %d: %s\n", idx, msg.c_str());
  }
  std::printf("elapsed: %.2f s\n", report.elapsed_seconds);
  for (const auto& path : written)
    std::printf("wrote %s\n", path.string().c_str());
  return 0;
}

int cmd_verify(int threads, std::uint64_t seed, const std::string& out_dir) {
  SuiteOptions opt;
  opt.threads = threads;
  opt.seed = seed;
  auto t0 = std::chrono::steady_clock::now();
  std::vector<DiagnosticReport> reports = run_verification_suite(opt);
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  bool all = true;
  for (const DiagnosticReport& rep : reports) {
    all = all && rep.passed;
    std::printf("[%s] %-38s", rep.passed ? "PASS" : "FAIL", rep.name.c_str());
    if (rep.bound) std::printf(" bound=%g", *rep.bound);
    if (!rep.measured.empty())
      std::printf(" %s=%g", rep.measured.back().first.c_str(),
                  rep.measured.back().second);
    std::printf("\n");
    for (const std::string& note : rep.notes)
      std::printf("       %s\n", note.c_str());
  }
  std::filesystem::create_directories(out_dir);
  auto path = std::filesystem::path(out_dir) / "verify_report.json";
  {
    std::ofstream out(path, std::ios::binary);
    out << diagnostics_to_json(reports).dump(2) << "\n";
  }
  std::printf("%zu/%zu checks passed, elapsed %.2f s\n",
              static_cast<std::size_t>(
                  std::count_if(reports.begin(), reports.end(),
                                [](const auto& r) { return r.passed; })),
              reports.size(), elapsed);
  std::printf("wrote %s\n", path.string().c_str());
  return all ? 0 : 1;
}

int cmd_smooth_eval(const std::string& objective, const std::string& kernel,
                    bool has_t, double t, bool has_nu, double nu,
                    const std::vector<double>& coords, int samples,
                    std::uint64_t seed) {
  if (has_t == has_nu)
    throw InvalidArgument("give exactly one of --t or --nu");
  SmoothingScale scale =
      has_t ? SmoothingScale::from_t(t) : SmoothingScale::from_nu(nu);
  ObjectiveHandle obj = objective_by_name(objective);
  Vec x = parse_point(coords);
  require_dim(x, obj.dim(), "--x");
  KernelSpec spec = KernelSpec::from_name(kernel, obj.dim());

  nlohmann::json out;
  out["objective"] = objective;
  out["kernel"] = kernel;
  out["t"] = scale.t;
  out["x"] = x;
  out["value"] = smoothed_value_quadrature(obj, spec, scale, x);
  out["gradient"] = smoothed_grad_quadrature(obj, spec, scale, x);
  if (samples > 0) {
    SmoothedProblem problem(obj, spec, scale, samples);
    RngStream rng(seed);
    out["mc_gradient"] = mc_smoothed_gradient(problem, x, rng);
    out["samples"] = samples;
    out["seed"] = seed;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_kernel_probe(const std::string& kernel, int dim, bool has_t, double t,
                     bool has_nu, double nu, long budget, double tol) {
  if (has_t == has_nu)
    throw InvalidArgument("give exactly one of --t or --nu");
  SmoothingScale scale =
      has_t ? SmoothingScale::from_t(t) : SmoothingScale::from_nu(nu);
  KernelSpec spec = KernelSpec::from_name(kernel, dim);
  double mass = normalization_probe(spec, scale, budget);
  double err = std::abs(mass - 1.0);
  std::printf("kernel=%s dim=%d t=%s length_scale=%s\n", kernel.c_str(), dim,
              g17(scale.t).c_str(), g17(spec.length_scale(scale)).c_str());
  std::printf("mass=%s abs_error=%s tol=%s\n", g17(mass).c_str(),
              g17(err).c_str(), g17(tol).c_str());
  std::printf("support_radius=%s\n", g17(spec.support_radius(scale)).c_str());
  if (err <= tol) {
    std::printf("OK\n");
    return 0;
  }
  std::printf("NOT NORMALIZED\n");
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradopt: graduated optimization toolkit"};
  app.set_version_flag("--version", "gradopt 0.1.0");
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run a batch experiment from a spec file");
  std::string config_path, out_dir = default_output_dir();
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<std::string> formats, overrides;
  run->add_option("--config", config_path, "experiment spec (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "override the spec's master_seed");
  run->add_option("--output-dir", out_dir,
                  "artifact directory (default $GRADOPT_OUTPUT_DIR or "
                  "./gradopt-out)");
  run->add_option("--threads", threads, "worker threads (results identical)")
      ->check(CLI::PositiveNumber);
  run->add_option("--format", formats, "csv, json, svg (default json)")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "json", "svg"}));
  run->add_option("--set", overrides,
                  "override a spec entry, e.g. --set n_inits=50");

  // verify
  auto* verify = app.add_subcommand("verify", "run the diagnostic suite");
  std::uint64_t verify_seed = 7;
  int verify_threads = 1;
  std::string verify_dir = default_output_dir();
  verify->add_option("--seed", verify_seed, "suite seed");
  verify->add_option("--threads", verify_threads, "worker threads")
      ->check(CLI::PositiveNumber);
  verify->add_option("--output-dir", verify_dir, "where verify_report.json goes");

  // smooth-eval
  auto* se = app.add_subcommand(
      "smooth-eval", "evaluate a smoothed objective and gradient at a point");
  std::string se_objective, se_kernel = "gaussian";
  double se_t = 0, se_nu = 0;
  std::vector<double> se_x;
  int se_samples = 0;
  std::uint64_t se_seed = 1;
  se->add_option("--objective", se_objective, "built-in objective name")
      ->required();
  se->add_option("--kernel", se_kernel, "gaussian or uniform-box");
  auto* se_t_opt = se->add_option("--t", se_t, "smoothing scale t");
  auto* se_nu_opt = se->add_option("--nu", se_nu, "sharpness nu = 1/t");
  se->add_option("--x", se_x, "evaluation point coordinates")
      ->required()
      ->delimiter(',');
  se->add_option("--samples", se_samples,
                 "also print a Monte Carlo gradient with this many samples");
  se->add_option("--seed", se_seed, "seed for the Monte Carlo gradient");

  // kernel-probe
  auto* kp = app.add_subcommand("kernel-probe",
                                "numerically check kernel normalization");
  std::string kp_kernel = "gaussian";
  int kp_dim = 1;
  double kp_t = 0, kp_nu = 0, kp_tol = 1e-6;
  long kp_budget = 100000;
  kp->add_option("--kernel", kp_kernel, "gaussian or uniform-box");
  kp->add_option("--dim", kp_dim, "dimension (1 or 2)")
      ->check(CLI::PositiveNumber);
  auto* kp_t_opt = kp->add_option("--t", kp_t, "smoothing scale t");
  auto* kp_nu_opt = kp->add_option("--nu", kp_nu, "sharpness nu = 1/t");
  kp->add_option("--budget", kp_budget, "max integrand evaluations");
  kp->add_option("--tol", kp_tol, "acceptable |mass - 1|");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run)
      return cmd_run(config_path, run->count("--seed") > 0, seed, out_dir,
                     threads, formats, overrides);
    if (*verify) return cmd_verify(verify_threads, verify_seed, verify_dir);
    if (*se)
      return cmd_smooth_eval(se_objective, se_kernel, se_t_opt->count() > 0,
                             se_t, se_nu_opt->count() > 0, se_nu, se_x,
                             se_samples, se_seed);
    if (*kp)
      return cmd_kernel_probe(kp_kernel, kp_dim, kp_t_opt->count() > 0, kp_t,
                              kp_nu_opt->count() > 0, kp_nu, kp_budget, kp_tol);
  } catch (const gradopt::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const gradopt::Unsupported& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
