#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gradopt/parallel.hpp"
#include "gradopt/scheduler.hpp"
#include "gradopt/smoothing.hpp"
#include "gradopt/solver.hpp"

namespace gradopt {

/// Outcome of one verification check. `measured` carries the quantities the
/// verdict was computed from, so a failing report is directly actionable;
/// `tolerance_spec` states the acceptance rule in prose.
struct DiagnosticReport {
  std::string name;
  bool passed = false;
  std::vector<std::pair<std::string, double>> measured;
  std::optional<double> bound;
  std::string tolerance_spec;
  std::uint64_t seeds_used = 0;
  std::vector<std::string> notes;

  void add(const std::string& label, double v) { measured.emplace_back(label, v); }
  void fail(const std::string& why) {
    passed = false;
    notes.push_back(why);
  }
};

namespace detail {

// Fixed chunk layout for embarrassingly parallel replication loops: results
// are reduced in chunk-index order, so totals do not depend on the thread
// count. Streams are derived per chunk from (seed, tag, chunk).
inline constexpr int kChunks = 64;

inline std::pair<long, long> chunk_range(long total, int chunk) {
  long base = total / kChunks, rem = total % kChunks;
  long begin = chunk * base + std::min<long>(chunk, rem);
  long len = base + (chunk < rem ? 1 : 0);
  return {begin, begin + len};
}

/// Argmin of a 1-D function over [lo, hi]: coarse grid then golden-section
/// refinement around the best grid point.
template <typename F>
double locate_minimum_1d(F&& f, double lo, double hi, int grid_n,
                         int refine_iters = 80) {
  double best_x = lo, best_v = f(lo);
  double h = (hi - lo) / (grid_n - 1);
  for (int i = 1; i < grid_n; ++i) {
    double x = (i == grid_n - 1) ? hi : lo + i * h;
    double v = f(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  double a = std::max(lo, best_x - h), b = std::min(hi, best_x + h);
  const double gr = 0.6180339887498949;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < refine_iters && (b - a) > 1e-12; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// ---------------------------------------------------------------------------

struct UnbiasednessParams {
  SmoothingScale scale{0.5};
  int sample_count = 10;
  std::vector<Vec> probes;
  long reps = 100000;
  double z_limit = 4.0;  // standard errors
  std::uint64_t seed = 2024;
  int threads = 1;
};

/// Estimator mean test: the replicated MC smoothed gradient must agree with
/// the quadrature gradient to within z_limit standard errors per component.
inline DiagnosticReport check_unbiasedness(const ObjectiveHandle& obj,
                                           const KernelSpec& kernel,
                                           const UnbiasednessParams& p) {
  DiagnosticReport rep;
  rep.name = "unbiasedness-" + obj.name;
  rep.tolerance_spec =
      "per component |mean - quadrature| <= " + std::to_string(p.z_limit) +
      " standard errors over " + std::to_string(p.reps) + " reps";
  rep.seeds_used = static_cast<std::uint64_t>(p.probes.size()) * detail::kChunks;
  rep.passed = true;

  SmoothedProblem problem(obj, kernel, p.scale, p.sample_count);
  RngStream root(p.seed);
  int dim = obj.dim();
  double worst_z = 0.0;

  for (std::size_t pi = 0; pi < p.probes.size(); ++pi) {
    const Vec& x = p.probes[pi];
    Vec quad = smoothed_grad_quadrature(obj, kernel, p.scale, x);

    std::vector<Vec> sums(detail::kChunks, Vec(dim, 0.0));
    std::vector<Vec> sq_sums(detail::kChunks, Vec(dim, 0.0));
    parallel_for(p.threads, detail::kChunks, [&](std::size_t c) {
      auto [b, e] = detail::chunk_range(p.reps, static_cast<int>(c));
      RngStream rng = root.derive({0x1u, static_cast<std::uint64_t>(pi), c});
      for (long r = b; r < e; ++r) {
        Vec g = mc_smoothed_gradient(problem, x, rng);
        for (int j = 0; j < dim; ++j) {
          sums[c][j] += g[j];
          sq_sums[c][j] += g[j] * g[j];
        }
      }
    });

    for (int j = 0; j < dim; ++j) {
      double s = 0.0, s2 = 0.0;
      for (int c = 0; c < detail::kChunks; ++c) {
        s += sums[c][j];
        s2 += sq_sums[c][j];
      }
      double mean = s / p.reps;
      double var = std::max(0.0, s2 / p.reps - mean * mean);
      double se = std::sqrt(var / p.reps);
      double diff = std::abs(mean - quad[j]);
      // Exact-oracle corner (zero variance): require agreement to roundoff.
      double z = se > 0.0 ? diff / se : (diff <= 1e-12 ? 0.0 : p.z_limit + 1);
      worst_z = std::max(worst_z, z);
      if (z > p.z_limit)
        rep.fail("probe " + std::to_string(pi) + " component " +
                 std::to_string(j) + ": |" + std::to_string(mean) + " - " +
                 std::to_string(quad[j]) + "| = " + std::to_string(z) + " SE");
    }
  }
  rep.add("worst_z_score", worst_z);
  rep.bound = p.z_limit;
  return rep;
}

// ---------------------------------------------------------------------------

struct VarianceBoundParams {
  SmoothingScale scale{0.5};
  std::vector<int> sample_counts{1, 10, 100};
  std::vector<Vec> probes;
  long reps = 4000;
  double slack = 1.10;
  double sigma = 0.0;  // oracle noise level entering the bound
  double M = 0.0;      // max |grad f|^2 (grid estimate)
  std::uint64_t seed = 2025;
  int threads = 1;
};

/// Second-moment test: E|g_N - grad f^t|^2 <= sigma^2 + (sigma^2 + M)/N,
/// with multiplicative slack for the grid-estimated M.
inline DiagnosticReport check_variance_bound(const ObjectiveHandle& obj,
                                             const KernelSpec& kernel,
                                             const VarianceBoundParams& p) {
  DiagnosticReport rep;
  rep.name = "variance-bound-" + obj.name;
  rep.tolerance_spec =
      "empirical MSE <= (sigma^2 + (sigma^2+M)/N) * " + std::to_string(p.slack);
  rep.seeds_used = static_cast<std::uint64_t>(p.probes.size()) *
                   p.sample_counts.size() * detail::kChunks;
  rep.passed = true;

  RngStream root(p.seed);
  double worst_ratio = 0.0;
  for (std::size_t pi = 0; pi < p.probes.size(); ++pi) {
    const Vec& x = p.probes[pi];
    Vec quad = smoothed_grad_quadrature(obj, kernel, p.scale, x);
    for (std::size_t ni = 0; ni < p.sample_counts.size(); ++ni) {
      int N = p.sample_counts[ni];
      SmoothedProblem problem(obj, kernel, p.scale, N);
      std::vector<double> sums(detail::kChunks, 0.0);
      parallel_for(p.threads, detail::kChunks, [&](std::size_t c) {
        auto [b, e] = detail::chunk_range(p.reps, static_cast<int>(c));
        RngStream rng = root.derive(
            {0x2u, static_cast<std::uint64_t>(pi), static_cast<std::uint64_t>(ni), c});
        double local = 0.0;
        for (long r = b; r < e; ++r)
          local += squared_norm(sub(mc_smoothed_gradient(problem, x, rng), quad));
        sums[c] = local;
      });
      double mse = 0.0;
      for (double s : sums) mse += s;
      mse /= p.reps;
      double bound = p.sigma * p.sigma + (p.sigma * p.sigma + p.M) / N;
      double ratio = bound > 0.0 ? mse / bound : (mse == 0.0 ? 0.0 : 1e30);
      worst_ratio = std::max(worst_ratio, ratio);
      rep.add("mse[probe=" + std::to_string(pi) + ",N=" + std::to_string(N) + "]",
              mse);
      if (ratio > p.slack)
        rep.fail("probe " + std::to_string(pi) + ", N=" + std::to_string(N) +
                 ": MSE " + std::to_string(mse) + " exceeds bound " +
                 std::to_string(bound) + " * slack");
    }
  }
  rep.add("worst_mse_over_bound", worst_ratio);
  rep.bound = p.slack;
  return rep;
}

/// MSE ~ c/N check (noise-free oracle): least-squares slope of log MSE vs
/// log N must be -1 within `slope_tol`.
inline DiagnosticReport check_mse_scaling(const ObjectiveHandle& obj,
                                          const KernelSpec& kernel,
                                          SmoothingScale scale, const Vec& x,
                                          const std::vector<int>& Ns,
                                          long reps, double slope_tol,
                                          std::uint64_t seed, int threads = 1) {
  DiagnosticReport rep;
  rep.name = "mse-scaling-" + obj.name;
  rep.tolerance_spec = "log-log slope of MSE vs N within " +
                       std::to_string(slope_tol) + " of -1";
  rep.seeds_used = static_cast<std::uint64_t>(Ns.size()) * detail::kChunks;

  Vec quad = smoothed_grad_quadrature(obj, kernel, scale, x);
  RngStream root(seed);
  std::vector<double> log_n, log_mse;
  for (std::size_t ni = 0; ni < Ns.size(); ++ni) {
    SmoothedProblem problem(obj, kernel, scale, Ns[ni]);
    std::vector<double> sums(detail::kChunks, 0.0);
    parallel_for(threads, detail::kChunks, [&](std::size_t c) {
      auto [b, e] = detail::chunk_range(reps, static_cast<int>(c));
      RngStream rng = root.derive({0x3u, static_cast<std::uint64_t>(ni), c});
      double local = 0.0;
      for (long r = b; r < e; ++r)
        local += squared_norm(sub(mc_smoothed_gradient(problem, x, rng), quad));
      sums[c] = local;
    });
    double mse = 0.0;
    for (double s : sums) mse += s;
    mse /= reps;
    rep.add("mse[N=" + std::to_string(Ns[ni]) + "]", mse);
    log_n.push_back(std::log(double(Ns[ni])));
    log_mse.push_back(std::log(mse));
  }
  // Simple least squares.
  double n = double(log_n.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < log_n.size(); ++i) {
    sx += log_n[i];
    sy += log_mse[i];
    sxx += log_n[i] * log_n[i];
    sxy += log_n[i] * log_mse[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.add("slope", slope);
  rep.bound = slope_tol;
  rep.passed = std::abs(slope + 1.0) <= slope_tol;
  if (!rep.passed)
    rep.fail("slope " + std::to_string(slope) + " not within tolerance of -1");
  return rep;
}

// ---------------------------------------------------------------------------

struct LipschitzParams {
  SmoothingScale scale{0.5};
  int n_pairs = 100;
  double L = 0.0;          // measured raw-gradient Lipschitz constant
  double slack = 1e-6;     // relative
  std::uint64_t seed = 2026;
};

/// Smoothing must not increase the gradient's Lipschitz constant:
/// |grad f^t(x) - grad f^t(y)| <= L |x - y| for random pairs in the domain.
inline DiagnosticReport check_lipschitz_inheritance(const ObjectiveHandle& obj,
                                                    const KernelSpec& kernel,
                                                    const LipschitzParams& p) {
  DiagnosticReport rep;
  rep.name = "lipschitz-inheritance-" + obj.name;
  rep.tolerance_spec = "pair slope <= L * (1 + " + std::to_string(p.slack) + ")";
  rep.seeds_used = 1;
  rep.passed = true;

  RngStream rng(p.seed);
  double worst = 0.0;
  double min_sep = 1e-9 * obj.domain.width();
  for (int i = 0; i < p.n_pairs; ++i) {
    Vec x = rng.uniform_vec(obj.domain);
    Vec y = rng.uniform_vec(obj.domain);
    double d = distance(x, y);
    if (d < min_sep) {
      --i;  // degenerate pair, resample
      continue;
    }
    Vec gx = smoothed_grad_quadrature(obj, kernel, p.scale, x);
    Vec gy = smoothed_grad_quadrature(obj, kernel, p.scale, y);
    worst = std::max(worst, norm(sub(gx, gy)) / d);
  }
  rep.add("max_pair_slope", worst);
  rep.add("L", p.L);
  rep.bound = p.L * (1.0 + p.slack);
  if (worst > *rep.bound)
    rep.fail("max pair slope " + std::to_string(worst) + " exceeds L bound");
  return rep;
}

// ---------------------------------------------------------------------------

/// s(t) = max over an evaluation grid of |f^t - f| must be nonincreasing as
/// t decreases, with the terminal value under `threshold`.
inline DiagnosticReport check_uniform_convergence(
    const ObjectiveHandle& obj, const KernelSpec& kernel,
    const std::vector<double>& t_grid_decreasing, int eval_grid_n,
    double threshold) {
  if (obj.dim() != 1)
    throw Unsupported("check_uniform_convergence: 1-D objectives only");
  DiagnosticReport rep;
  rep.name = "uniform-convergence-" + obj.name;
  rep.tolerance_spec =
      "s(t) nonincreasing along the grid (1e-9 slack) and s(t_min) < " +
      std::to_string(threshold);
  rep.passed = true;

  const double lo = obj.domain.lower, hi = obj.domain.upper;
  std::vector<double> s_values;
  for (double t : t_grid_decreasing) {
    SmoothingScale scale(t);
    double s = 0.0;
    for (int i = 0; i < eval_grid_n; ++i) {
      double x = lo + (hi - lo) * i / (eval_grid_n - 1);
      double ft = smoothed_value_quadrature(obj, kernel, scale, Vec{x});
      s = std::max(s, std::abs(ft - obj.value(Vec{x})));
    }
    s_values.push_back(s);
    rep.add("s[t=" + std::to_string(t) + "]", s);
  }
  for (std::size_t i = 1; i < s_values.size(); ++i) {
    if (s_values[i] > s_values[i - 1] + 1e-9)
      rep.fail("s increased from t=" + std::to_string(t_grid_decreasing[i - 1]) +
               " to t=" + std::to_string(t_grid_decreasing[i]));
  }
  rep.bound = threshold;
  if (!(s_values.back() < threshold))
    rep.fail("terminal s = " + std::to_string(s_values.back()) +
             " not below threshold " + std::to_string(threshold));
  return rep;
}

// ---------------------------------------------------------------------------

struct PlRateParams {
  double mu = 2.0;
  double sigma = 1.0;
  int sample_count = 10;
  double t = 0.01;
  std::vector<long> checkpoints{100, 1000};
  int n_seeds = 400;
  double alpha_const = 0.05;  // for the constant-step part; alpha/2 also run
  long plateau_iters = 3000;
  long plateau_window = 1000;
  double bound_slack = 1.25;
  double halving_tol = 1.10;
  std::uint64_t seed = 2027;
  int threads = 1;
};

namespace detail {
/// Mean suboptimality curve of smoothed SGD on the PL quadratic
/// f(x) = (mu/2) x^2 (for which f^t - f^t_min = f - f_min = (mu/2) x^2).
/// Returns E[f(x_k) - f_min] where x_k is the iterate after k updates.
inline std::vector<double> pl_mean_suboptimality(const PlRateParams& p,
                                                 const StepSchedule& schedule,
                                                 long iters,
                                                 std::uint64_t stream_tag) {
  ObjectiveHandle obj =
      make_pl_quadratic(p.mu, 1, NoiseSpec::additive_gaussian(p.sigma));
  SmoothedProblem problem(obj, KernelSpec::gaussian(1), SmoothingScale(p.t),
                          p.sample_count);
  SolverConfig config;
  config.schedule = schedule;
  config.max_iters = iters;
  config.record_trajectory = true;

  RngStream root(p.seed);
  std::vector<std::vector<double>> per_seed(p.n_seeds);
  parallel_for(p.threads, static_cast<std::size_t>(p.n_seeds), [&](std::size_t s) {
    RngStream rng = root.derive({stream_tag, s});
    Trajectory traj = sgd_run(problem, config, Vec{1.0}, rng);
    std::vector<double> sub(traj.iterates->size());
    for (std::size_t k = 0; k < sub.size(); ++k)
      sub[k] = 0.5 * p.mu * squared_norm((*traj.iterates)[k]);
    per_seed[s] = std::move(sub);
  });

  std::vector<double> mean(static_cast<std::size_t>(iters) + 1, 0.0);
  for (const auto& sub : per_seed)
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += sub[k];
  for (double& m : mean) m /= p.n_seeds;
  return mean;
}
}  // namespace detail

/// Convergence-rate test on the PL quadratic, both schedules:
///  (a) PLDecay(mu): E[f(x_k) - f_min] <= (L/(2 k mu^2))(sigma^2+M)(1+1/N)
///      at each checkpoint, within bound_slack;
///  (b) Constant alpha: the noise plateau must be <= the theoretical plateau
///      (L alpha / (4 mu))(sigma^2+M)(1+1/N) within bound_slack, and halving
///      alpha must at least halve the measured plateau (within halving_tol).
/// Constants L and M are grid-estimated from the objective, not assumed.
inline DiagnosticReport check_pl_rate(const PlRateParams& p) {
  if (!(p.alpha_const > 0.0 && p.alpha_const < 1.0 / (2.0 * p.mu)))
    throw InvalidArgument("check_pl_rate: alpha_const must lie in (0, 1/(2mu))");
  DiagnosticReport rep;
  rep.name = "pl-rate";
  rep.tolerance_spec =
      "decay: E[f - f*] at checkpoints <= theory bound * " +
      std::to_string(p.bound_slack) +
      "; constant: plateau under theory plateau * slack, and plateau(alpha/2)"
      " <= 0.5 * plateau(alpha) * " + std::to_string(p.halving_tol);
  rep.seeds_used = static_cast<std::uint64_t>(p.n_seeds) * 3;
  rep.passed = true;

  LandscapeConstants consts =
      estimate_constants(make_pl_quadratic(p.mu), 100001);
  const double L = consts.L, M = consts.M;
  const double noise_term =
      (p.sigma * p.sigma + M) * (1.0 + 1.0 / p.sample_count);

  // (a) decaying schedule
  long max_cp = *std::max_element(p.checkpoints.begin(), p.checkpoints.end());
  auto mean_decay = detail::pl_mean_suboptimality(
      p, StepSchedule::pl_decay(p.mu), max_cp, 0x10u);
  for (long k : p.checkpoints) {
    double e_k = mean_decay[static_cast<std::size_t>(k)];
    double bound = L * noise_term / (2.0 * k * p.mu * p.mu);
    rep.add("decay_subopt[k=" + std::to_string(k) + "]", e_k);
    rep.add("decay_bound[k=" + std::to_string(k) + "]", bound);
    if (e_k > bound * p.bound_slack)
      rep.fail("decay schedule at k=" + std::to_string(k) + ": " +
               std::to_string(e_k) + " > bound*slack");
  }

  // (b) constant schedule at alpha and alpha/2
  double plateaus[2];
  for (int half = 0; half < 2; ++half) {
    double alpha = half == 0 ? p.alpha_const : 0.5 * p.alpha_const;
    auto mean_const = detail::pl_mean_suboptimality(
        p, StepSchedule::constant(alpha), p.plateau_iters,
        0x20u + static_cast<std::uint64_t>(half));
    double plateau = 0.0;
    for (long k = p.plateau_iters - p.plateau_window + 1; k <= p.plateau_iters;
         ++k)
      plateau += mean_const[static_cast<std::size_t>(k)];
    plateau /= p.plateau_window;
    plateaus[half] = plateau;
    double theorem_plateau = L * alpha * noise_term / (4.0 * p.mu);
    // Geometric term at the window start; negligible for sane windows.
    double transient = std::pow(1.0 - 2.0 * p.mu * alpha,
                                double(p.plateau_iters - p.plateau_window)) *
                       0.5 * p.mu;
    rep.add("const_plateau[alpha=" + std::to_string(alpha) + "]", plateau);
    rep.add("const_bound[alpha=" + std::to_string(alpha) + "]",
            theorem_plateau);
    if (plateau > (theorem_plateau + transient) * p.bound_slack)
      rep.fail("constant schedule alpha=" + std::to_string(alpha) +
               ": plateau " + std::to_string(plateau) + " > bound*slack");
  }
  if (plateaus[1] > 0.5 * plateaus[0] * p.halving_tol)
    rep.fail("halving alpha did not halve the plateau: " +
             std::to_string(plateaus[0]) + " -> " + std::to_string(plateaus[1]));
  rep.add("plateau_ratio", plateaus[1] / plateaus[0]);
  return rep;
}

// ---------------------------------------------------------------------------

struct ArgminConvergenceParams {
  std::vector<double> t_grid_decreasing;
  std::vector<double> targets;  // minimizer set of the raw objective
  int grid_n = 2001;
  double threshold = 0.05;
  double mono_slack = 1e-6;
};

/// Locates argmin of f^t on a 1-D grid (plus refinement) for each t and
/// checks that the distance to the raw objective's minimizer set is
/// nonincreasing and ends below `threshold`.
inline DiagnosticReport check_argmin_convergence(
    const ObjectiveHandle& obj, const KernelSpec& kernel,
    const ArgminConvergenceParams& p) {
  if (obj.dim() != 1)
    throw Unsupported("check_argmin_convergence: 1-D objectives only");
  if (p.targets.empty())
    throw InvalidArgument("check_argmin_convergence: no targets");
  DiagnosticReport rep;
  rep.name = "argmin-convergence-" + obj.name;
  rep.tolerance_spec = "distance to the minimizer set nonincreasing (slack " +
                       std::to_string(p.mono_slack) + "), terminal < " +
                       std::to_string(p.threshold);
  rep.passed = true;

  std::vector<double> dists;
  for (double t : p.t_grid_decreasing) {
    SmoothingScale scale(t);
    double xmin = detail::locate_minimum_1d(
        [&](double x) {
          return smoothed_value_quadrature(obj, kernel, scale, Vec{x});
        },
        obj.domain.lower, obj.domain.upper, p.grid_n);
    double d = 1e300;
    for (double tgt : p.targets) d = std::min(d, std::abs(xmin - tgt));
    dists.push_back(d);
    rep.add("dist[t=" + std::to_string(t) + "]", d);
  }
  for (std::size_t i = 1; i < dists.size(); ++i)
    if (dists[i] > dists[i - 1] + p.mono_slack)
      rep.fail("distance increased at t=" +
               std::to_string(p.t_grid_decreasing[i]));
  rep.bound = p.threshold;
  if (!(dists.back() < p.threshold))
    rep.fail("terminal distance " + std::to_string(dists.back()) +
             " not below " + std::to_string(p.threshold));
  return rep;
}

// ---------------------------------------------------------------------------

struct SuiteOptions {
  int threads = 1;
  std::uint64_t seed = 7;
};

/// The bundled verification suite: kernel normalization, estimator
/// unbiasedness and variance against the quadrature oracle, MSE scaling,
/// Lipschitz inheritance, uniform convergence (thresholds are measured
/// fixtures), rate bounds on the PL quadratic, and argmin drift.
inline std::vector<DiagnosticReport> run_verification_suite(
    const SuiteOptions& opt = {}) {
  std::vector<DiagnosticReport> reports;

  {  // kernel normalization probes
    DiagnosticReport rep;
    rep.name = "kernel-normalization";
    rep.tolerance_spec = "|probe - 1| <= 1e-8 for bundled kernel/scale pairs";
    rep.passed = true;
    struct Case {
      KernelSpec kernel;
      double t;
    };
    std::vector<Case> cases{{KernelSpec::gaussian(1), 1.0},
                            {KernelSpec::gaussian(1), 0.01},
                            {KernelSpec::gaussian(2), 0.25},
                            {KernelSpec::uniform_box(1), 0.5},
                            {KernelSpec::uniform_box(2), 2.0}};
    for (std::size_t i = 0; i < cases.size(); ++i) {
      double mass =
          normalization_probe(cases[i].kernel, SmoothingScale(cases[i].t));
      rep.add("mass[case=" + std::to_string(i) + "]", mass);
      if (std::abs(mass - 1.0) > 1e-8)
        rep.fail("case " + std::to_string(i) + " probe " +
                 std::to_string(mass));
    }
    rep.bound = 1e-8;
    reports.push_back(std::move(rep));
  }

  {  // unbiasedness: toy1 with additive noise, toy2 with component choice
    UnbiasednessParams p;
    p.scale = SmoothingScale(0.5);
    p.sample_count = 10;
    p.probes = {{-6.0}, {-2.5}, {0.5}, {3.0}, {7.0}};
    p.reps = 100000;
    p.seed = opt.seed + 1;
    p.threads = opt.threads;
    reports.push_back(check_unbiasedness(
        make_toy1(NoiseSpec::additive_gaussian(1.0)), KernelSpec::gaussian(1), p));

    UnbiasednessParams q;
    q.scale = SmoothingScale(0.2);
    q.sample_count = 10;
    q.probes = {{1.0, -1.0}, {0.5, 0.5}, {-1.2, 0.3}, {1.8, 1.1}, {-0.4, -1.6}};
    q.reps = 100000;
    q.seed = opt.seed + 2;
    q.threads = opt.threads;
    reports.push_back(check_unbiasedness(
        make_toy2(NoiseSpec::component_choice()), KernelSpec::gaussian(2), q));
  }

  {  // variance bound: exact constants on the quadratic, measured on toy1
    auto quad_obj = make_quadratic(1);
    auto qc = estimate_constants(quad_obj, 1001);
    VarianceBoundParams p;
    p.scale = SmoothingScale(0.1);
    p.probes = {{0.5}};
    p.reps = 4000;
    p.sigma = 0.0;
    p.M = qc.M;
    p.seed = opt.seed + 3;
    p.threads = opt.threads;
    reports.push_back(
        check_variance_bound(quad_obj, KernelSpec::gaussian(1), p));

    auto toy1 = make_toy1(NoiseSpec::additive_gaussian(1.0));
    auto tc = estimate_constants(toy1, 100001);
    VarianceBoundParams v;
    v.scale = SmoothingScale(0.5);
    v.probes = {{-6.0}, {-2.5}, {0.5}, {3.0}, {7.0}};
    v.reps = 4000;
    v.sigma = 1.0;
    v.M = tc.M;
    v.seed = opt.seed + 4;
    v.threads = opt.threads;
    reports.push_back(check_variance_bound(toy1, KernelSpec::gaussian(1), v));

    auto toy2 = make_toy2(NoiseSpec::component_choice());
    auto t2c = estimate_constants(toy2, 401);
    VarianceBoundParams w;
    w.scale = SmoothingScale(0.2);
    w.probes = {{1.0, -1.0}, {0.5, 0.5}, {-1.2, 0.3}};
    w.reps = 4000;
    w.sigma = std::sqrt(t2c.sigma_sq);
    w.M = t2c.M;
    w.seed = opt.seed + 9;
    w.threads = opt.threads;
    reports.push_back(check_variance_bound(toy2, KernelSpec::gaussian(2), w));

    reports.push_back(check_mse_scaling(
        make_quadratic(1), KernelSpec::gaussian(1), SmoothingScale(0.1),
        Vec{0.5}, {1, 4, 16, 64, 256}, 4000, 0.1, opt.seed + 5, opt.threads));
  }

  {  // Lipschitz inheritance, one case per built-in benchmark
    struct Case {
      ObjectiveHandle obj;
      double t;
      int res;
    };
    std::vector<Case> cases;
    cases.push_back({make_quadratic(1), 0.25, 1001});
    cases.push_back({make_toy1(), 0.5, 100001});
    cases.push_back({make_toy2(), 0.2, 401});
    cases.push_back({make_double_well(), 0.1, 10001});
    for (auto& c : cases) {
      LipschitzParams p;
      p.scale = SmoothingScale(c.t);
      p.n_pairs = 100;
      p.L = estimate_constants(c.obj, c.res).L;
      p.seed = opt.seed + 6;
      reports.push_back(check_lipschitz_inheritance(
          c.obj, KernelSpec::gaussian(c.obj.dim()), p));
    }
  }

  {  // uniform convergence; thresholds are measured fixtures + headroom
    auto toy1 = make_toy1();
    // toy1's s(t) is dominated by the 10*x*sin(x) term: s(t) ~ 99t on
    // [-10, 10], measured s(0.01) = 0.793.
    ObjectiveHandle toy1_clipped = toy1;
    toy1_clipped.domain = BoxDomain(-10.0, 10.0, 1);
    reports.push_back(check_uniform_convergence(
        toy1_clipped, KernelSpec::gaussian(1), {1.0, 0.3, 0.1, 0.03, 0.01},
        1001, 0.85));
    // Quadratic: s(t) = 2t exactly; check the identity itself.
    DiagnosticReport rep;
    rep.name = "uniform-convergence-quadratic-exact";
    rep.tolerance_spec = "|s(t) - 2t| <= 1e-6 (smoothing offset identity)";
    rep.passed = true;
    auto quad_obj = make_quadratic(1);
    for (double t : {1.0, 0.3, 0.1, 0.03, 0.01}) {
      double s = 0.0;
      for (int i = 0; i <= 100; ++i) {
        double x = -1.0 + 0.02 * i;
        s = std::max(s, std::abs(smoothed_value_quadrature(
                             quad_obj, SmoothingScale(t), Vec{x}) -
                         quad_obj.value(Vec{x})));
      }
      rep.add("s[t=" + std::to_string(t) + "]", s);
      if (std::abs(s - 2.0 * t) > 1e-6)
        rep.fail("s(t) != 2t at t=" + std::to_string(t));
    }
    reports.push_back(std::move(rep));
  }

  {  // rate bounds
    PlRateParams p;
    p.seed = opt.seed + 8;
    p.threads = opt.threads;
    reports.push_back(check_pl_rate(p));
  }

  {  // argmin drift: toy1 (symmetric pair) and the asymmetric double well
    auto toy1 = make_toy1();
    double x_star = detail::locate_minimum_1d(
        [&](double x) { return toy1.value(Vec{x}); }, 0.0, 50.0, 20001);
    ArgminConvergenceParams p;
    p.t_grid_decreasing = {10.0, 3.0, 1.0, 0.3, 0.1, 0.03};
    p.targets = {-x_star, x_star};  // toy1 is even
    p.grid_n = 2001;
    p.threshold = 0.05;
    reports.push_back(
        check_argmin_convergence(toy1, KernelSpec::gaussian(1), p));

    auto dw = make_double_well();
    double dw_star = detail::locate_minimum_1d(
        [&](double x) { return dw.value(Vec{x}); }, dw.domain.lower,
        dw.domain.upper, 20001);
    ArgminConvergenceParams q;
    q.t_grid_decreasing = {1.0, 0.3, 0.1, 0.03, 0.01};
    q.targets = {dw_star};
    q.grid_n = 2001;
    q.threshold = 0.05;
    reports.push_back(check_argmin_convergence(dw, KernelSpec::gaussian(1), q));
  }

  return reports;
}

}  // namespace gradopt
