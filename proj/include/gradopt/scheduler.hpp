#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gradopt/kernels.hpp"
#include "gradopt/solver.hpp"
#include "gradopt/types.hpp"

namespace gradopt {

/// One smoothing layer: scale + Monte Carlo budget + inner-solver settings.
struct Layer {
  SmoothingScale scale{1.0};
  int sample_count = 1;
  SolverConfig solver;
};

/// Coarse-to-fine continuation schedule: scales must be strictly decreasing
/// in t (increasing nu), so each layer optimizes a sharper surrogate.
struct LayerSchedule {
  std::vector<Layer> layers;
};

/// Structural checks; returns human-readable findings, empty when valid.
inline std::vector<std::string> validate_schedule(const LayerSchedule& s) {
  std::vector<std::string> issues;
  if (s.layers.empty()) issues.push_back("schedule has no layers");
  for (std::size_t m = 0; m < s.layers.size(); ++m) {
    const Layer& layer = s.layers[m];
    if (layer.sample_count < 1)
      issues.push_back("layer " + std::to_string(m + 1) +
                       ": sample_count must be >= 1");
    if (layer.solver.max_iters < 1)
      issues.push_back("layer " + std::to_string(m + 1) +
                       ": max_iters must be >= 1");
    if (m > 0 && !(layer.scale.t < s.layers[m - 1].scale.t))
      issues.push_back("layer " + std::to_string(m + 1) +
                       ": t=" + std::to_string(layer.scale.t) +
                       " not strictly below the previous layer's t=" +
                       std::to_string(s.layers[m - 1].scale.t) +
                       " (schedule must go coarse to fine)");
  }
  return issues;
}

struct LayerResults {
  std::vector<Trajectory> per_layer;
  Vec final_point;
  double value_at_final = 0.0;
};

/// Multi-layer smoothed SGD: runs each layer's SGD to completion and
/// warm-starts the next layer at the previous final point. The step-size
/// schedule restarts at k=1 in every layer.
///
/// All layers consume the single `rng` stream in order. A one-layer schedule
/// is therefore bit-identical to calling sgd_run directly with the same
/// stream, and splitting a Constant-schedule run into consecutive identical
/// layers does not change the trajectory. (PLDecay layers do differ from one
/// long run, because alpha_k restarts.)
inline LayerResults run_multilayer(const ObjectiveHandle& obj,
                                   const KernelSpec& kernel,
                                   const LayerSchedule& schedule,
                                   const Vec& x0, RngStream& rng) {
  auto issues = validate_schedule(schedule);
  if (!issues.empty()) {
    std::string msg = "run_multilayer: invalid schedule";
    for (const auto& s : issues) msg += "; " + s;
    throw InvalidArgument(msg);
  }

  LayerResults out;
  Vec x = x0;
  for (std::size_t m = 0; m < schedule.layers.size(); ++m) {
    const Layer& layer = schedule.layers[m];
    SmoothedProblem problem(obj, kernel, layer.scale, layer.sample_count);
    try {
      out.per_layer.push_back(sgd_run(problem, layer.solver, x, rng));
    } catch (const NumericalError& e) {
      throw NumericalError(
          "layer " + std::to_string(m + 1) + ": " + e.what(), e.iteration);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("layer " + std::to_string(m + 1) + ": " +
                            e.what());
    }
    x = out.per_layer.back().final_point;
  }
  out.final_point = x;
  out.value_at_final = obj.value(x);
  return out;
}

}  // namespace gradopt
