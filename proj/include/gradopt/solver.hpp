#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gradopt/rng.hpp"
#include "gradopt/smoothing.hpp"
#include "gradopt/types.hpp"

namespace gradopt {

/// Step-size schedule. Constant(alpha), or PLDecay(mu):
/// alpha_k = (2k+1) / (2*mu*(k+1)^2), the classic decaying schedule for
/// PL objectives with constant mu.
struct StepSchedule {
  enum class Kind { Constant, PLDecay };
  Kind kind = Kind::Constant;
  double alpha = 0.0;  // Constant
  double mu = 0.0;     // PLDecay

  static StepSchedule constant(double alpha) {
    if (!(alpha > 0.0))
      throw InvalidArgument("StepSchedule: alpha must be > 0");
    StepSchedule s;
    s.kind = Kind::Constant;
    s.alpha = alpha;
    return s;
  }
  static StepSchedule pl_decay(double mu) {
    if (!(mu > 0.0)) throw InvalidArgument("StepSchedule: mu must be > 0");
    StepSchedule s;
    s.kind = Kind::PLDecay;
    s.mu = mu;
    return s;
  }
};

/// alpha_k for 1-based iteration k.
inline double step_size(const StepSchedule& s, long k) {
  if (k < 1) throw InvalidArgument("step_size: iterations are 1-based");
  switch (s.kind) {
    case StepSchedule::Kind::Constant:
      return s.alpha;
    case StepSchedule::Kind::PLDecay: {
      double kd = static_cast<double>(k);
      return (2.0 * kd + 1.0) / (2.0 * s.mu * (kd + 1.0) * (kd + 1.0));
    }
  }
  return s.alpha;  // unreachable
}

enum class BoundaryPolicy { ClampWarn, Error };

struct SolverConfig {
  StepSchedule schedule = StepSchedule::constant(1e-3);
  long max_iters = 1000;
  bool record_trajectory = false;
  BoundaryPolicy boundary_policy = BoundaryPolicy::ClampWarn;
};

/// Coordinate-wise projection onto the box; second member reports whether
/// any coordinate moved.
inline std::pair<Vec, bool> clamp_to_domain(const BoxDomain& box,
                                            const Vec& x) {
  require_dim(x, box.dim, "clamp_to_domain");
  Vec y = x;
  bool hit = false;
  for (double& yi : y) {
    if (yi < box.lower) {
      yi = box.lower;
      hit = true;
    } else if (yi > box.upper) {
      yi = box.upper;
      hit = true;
    }
  }
  return {std::move(y), hit};
}

struct Trajectory {
  /// Present when record_trajectory was set: x_1 (the start) through the
  /// final iterate, inclusive.
  std::optional<std::vector<Vec>> iterates;
  Vec final_point;
  double value_at_final = 0.0;  // raw (unsmoothed) objective at final_point
  long iterations_run = 0;
  long boundary_hits = 0;
};

/// Projected SGD over a generic gradient oracle g(x, rng):
///   x_{k+1} = clamp(x_k - alpha_k * g(x_k)),  k = 1..max_iters.
/// The oracle owns all randomness; this loop consumes the stream only
/// through it, sequentially, so trajectories are seed-reproducible.
template <typename Oracle>
Trajectory sgd_loop(Oracle&& oracle, const ObjectiveHandle& obj,
                    const SolverConfig& config, const Vec& x0,
                    RngStream& rng) {
  require_dim(x0, obj.dim(), "sgd_loop");
  if (!obj.domain.contains(x0))
    throw InvalidArgument("sgd_loop: x0 outside the domain");
  if (config.max_iters < 1)
    throw InvalidArgument("sgd_loop: max_iters must be >= 1");

  Trajectory out;
  if (config.record_trajectory) out.iterates.emplace();
  Vec x = x0;
  if (out.iterates) out.iterates->push_back(x);

  for (long k = 1; k <= config.max_iters; ++k) {
    double alpha = step_size(config.schedule, k);
    Vec g = oracle(x, rng);
    if (!all_finite(g))
      throw NumericalError("sgd_loop: non-finite gradient at iteration " +
                               std::to_string(k),
                           static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= alpha * g[i];
    auto [clamped, hit] = clamp_to_domain(obj.domain, x);
    x = std::move(clamped);
    if (hit) {
      if (config.boundary_policy == BoundaryPolicy::Error)
        throw NumericalError("sgd_loop: iterate left the domain at iteration " +
                                 std::to_string(k),
                             static_cast<std::size_t>(k));
      ++out.boundary_hits;
    }
    if (out.iterates) out.iterates->push_back(x);
    ++out.iterations_run;
  }

  out.final_point = std::move(x);
  out.value_at_final = obj.value(out.final_point);
  return out;
}

/// SGD on a smoothed problem: the oracle is mc_smoothed_gradient.
inline Trajectory sgd_run(const SmoothedProblem& problem,
                          const SolverConfig& config, const Vec& x0,
                          RngStream& rng) {
  return sgd_loop(
      [&problem](const Vec& x, RngStream& r) {
        return mc_smoothed_gradient(problem, x, r);
      },
      problem.objective, config, x0, rng);
}

/// SGD directly on the objective's stochastic oracle (no smoothing); with
/// NoiseSpec::None this is plain deterministic gradient descent.
inline Trajectory sgd_run_plain(const ObjectiveHandle& obj,
                                const SolverConfig& config, const Vec& x0,
                                RngStream& rng) {
  obj.validate();
  return sgd_loop(
      [&obj](const Vec& x, RngStream& r) {
        return obj.stochastic_gradient(x, r);
      },
      obj, config, x0, rng);
}

}  // namespace gradopt
