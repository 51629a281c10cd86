#pragma once

#include <string>
#include <utility>

#include "gradopt/kernels.hpp"
#include "gradopt/objectives.hpp"
#include "gradopt/quadrature.hpp"
#include "gradopt/rng.hpp"
#include "gradopt/types.hpp"

namespace gradopt {

/// A smoothed optimization target: f^t = f * phi_t, estimated by Monte
/// Carlo with `sample_count` kernel draws per gradient query.
struct SmoothedProblem {
  ObjectiveHandle objective;
  KernelSpec kernel;
  SmoothingScale scale;
  int sample_count = 1;

  SmoothedProblem(ObjectiveHandle obj, KernelSpec k, SmoothingScale s,
                  int n_samples)
      : objective(std::move(obj)),
        kernel(std::move(k)),
        scale(s),
        sample_count(n_samples) {
    if (kernel.dim() != objective.dim())
      throw InvalidArgument("SmoothedProblem: kernel dim " +
                            std::to_string(kernel.dim()) +
                            " != objective dim " +
                            std::to_string(objective.dim()));
    if (sample_count < 1)
      throw InvalidArgument("SmoothedProblem: sample_count must be >= 1");
    objective.validate();
  }
};

/// Monte Carlo estimator of grad f^t(x): one shared oracle-noise draw per
/// call, averaged over sample_count kernel perturbations of x. Unbiased for
/// grad f^t(x).
///
/// Draw order is fixed (noise first, then the perturbation points in index
/// order, summation in index order), so a given stream state pins the result
/// bit-for-bit regardless of how callers schedule work around this.
inline Vec mc_smoothed_gradient(const SmoothedProblem& p, const Vec& x,
                                RngStream& rng) {
  require_dim(x, p.objective.dim(), "mc_smoothed_gradient");
  NoiseDraw noise = p.objective.sample_noise(rng);
  std::vector<Vec> points;
  points.reserve(static_cast<std::size_t>(p.sample_count));
  for (int i = 0; i < p.sample_count; ++i)
    points.push_back(p.kernel.sample(p.scale, x, rng));

  Vec acc(x.size(), 0.0);
  for (const Vec& pt : points) {
    Vec g = p.objective.stochastic_gradient(pt, noise);
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += g[j];
  }
  for (double& a : acc) a /= static_cast<double>(p.sample_count);
  return acc;
}

namespace detail {
template <typename F>
double convolve_with_kernel(const KernelSpec& kernel, SmoothingScale scale,
                            const Vec& x, F&& f) {
  double r = kernel.support_radius(scale);
  if (kernel.dim() == 1) {
    return quad::integrate_1d(
        [&](double z) {
          return f(Vec{x[0] - z}) * kernel.density(scale, Vec{z});
        },
        -r, r);
  }
  if (kernel.dim() == 2) {
    return quad::integrate_2d(
        [&](double z1, double z2) {
          return f(Vec{x[0] - z1, x[1] - z2}) *
                 kernel.density(scale, Vec{z1, z2});
        },
        -r, r, -r, r);
  }
  throw Unsupported("smoothing quadrature supports dim <= 2, got " +
                    std::to_string(kernel.dim()));
}
}  // namespace detail

/// f^t(x) by adaptive quadrature over the kernel's effective support
/// (dim <= 2). Absolute accuracy ~1e-8 or better for the built-in
/// objectives; this is the deterministic oracle the MC path is tested
/// against.
inline double smoothed_value_quadrature(const ObjectiveHandle& obj,
                                        const KernelSpec& kernel,
                                        SmoothingScale scale, const Vec& x) {
  require_dim(x, obj.dim(), "smoothed_value_quadrature");
  if (kernel.dim() != obj.dim())
    throw InvalidArgument("smoothed_value_quadrature: kernel/objective dim");
  return detail::convolve_with_kernel(kernel, scale, x,
                                      [&](const Vec& y) { return obj.value(y); });
}

/// grad f^t(x) by quadrature, component-wise convolution of grad f with
/// phi_t (differentiation commutes with the convolution).
inline Vec smoothed_grad_quadrature(const ObjectiveHandle& obj,
                                    const KernelSpec& kernel,
                                    SmoothingScale scale, const Vec& x) {
  require_dim(x, obj.dim(), "smoothed_grad_quadrature");
  if (kernel.dim() != obj.dim())
    throw InvalidArgument("smoothed_grad_quadrature: kernel/objective dim");
  Vec g(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) {
    g[c] = detail::convolve_with_kernel(
        kernel, scale, x, [&](const Vec& y) { return obj.gradient(y)[c]; });
  }
  return g;
}

/// Convenience overloads with a Gaussian kernel of matching dimension.
inline double smoothed_value_quadrature(const ObjectiveHandle& obj,
                                        SmoothingScale scale, const Vec& x) {
  return smoothed_value_quadrature(obj, KernelSpec::gaussian(obj.dim()),
                                   scale, x);
}
inline Vec smoothed_grad_quadrature(const ObjectiveHandle& obj,
                                    SmoothingScale scale, const Vec& x) {
  return smoothed_grad_quadrature(obj, KernelSpec::gaussian(obj.dim()), scale,
                                  x);
}

}  // namespace gradopt
