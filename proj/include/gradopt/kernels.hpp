#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "gradopt/quadrature.hpp"
#include "gradopt/rng.hpp"
#include "gradopt/types.hpp"

namespace gradopt {

/// Smoothing scale. t > 0 is the stored parameter; nu = 1/t is the derived
/// sharpness (t -> 0, nu -> infinity: less smoothing).
struct SmoothingScale {
  double t;

  explicit SmoothingScale(double t_) : t(t_) {
    if (!(t > 0.0) || !std::isfinite(t))
      throw InvalidArgument("SmoothingScale: t must be positive and finite");
  }
  static SmoothingScale from_t(double t) { return SmoothingScale(t); }
  static SmoothingScale from_nu(double nu) {
    if (!(nu > 0.0) || !std::isfinite(nu))
      throw InvalidArgument("SmoothingScale: nu must be positive and finite");
    return SmoothingScale(1.0 / nu);
  }
  double nu() const { return 1.0 / t; }
};

enum class KernelFamily { Gaussian, UniformBox, Custom };

/// User-supplied base kernel (scale 1). `density` need not be normalized;
/// normalization_probe() measures the actual mass. `support_radius` bounds
/// the region the quadrature oracles integrate over, and sampling must stay
/// inside it.
struct CustomKernel {
  std::function<double(const Vec&)> density;
  std::function<Vec(int dim, RngStream&)> sample;
  double support_radius = 0.0;
};

/// Mollifier family phi_t. Every family is realized as a base kernel plus
/// the rescaling phi_t(x) = s^-n * phi(x/s) with a family-specific length
/// scale s(t):
///   Gaussian:   base (4*pi)^{-n/2} exp(-|u|^2/4), s = sqrt(t), which gives
///               the heat kernel (4*pi*t)^{-n/2} exp(-|x|^2/(4t)); note the
///               per-coordinate variance is 2t, not t.
///   UniformBox: indicator of [-1/2, 1/2]^n, s = t.
///   Custom:     user base kernel, s = t.
/// Instances are immutable and safe to share across threads.
class KernelSpec {
 public:
  static KernelSpec gaussian(int dim) {
    return KernelSpec(KernelFamily::Gaussian, dim, std::nullopt);
  }
  static KernelSpec uniform_box(int dim) {
    return KernelSpec(KernelFamily::UniformBox, dim, std::nullopt);
  }
  static KernelSpec custom(int dim, CustomKernel base) {
    if (!base.density || !base.sample)
      throw InvalidArgument("KernelSpec: custom kernel needs density+sampler");
    if (!(base.support_radius > 0.0))
      throw InvalidArgument("KernelSpec: custom support_radius must be > 0");
    return KernelSpec(KernelFamily::Custom, dim, std::move(base));
  }

  /// Parse "gaussian" | "uniform-box" (config surface).
  static KernelSpec from_name(const std::string& name, int dim) {
    if (name == "gaussian") return gaussian(dim);
    if (name == "uniform-box") return uniform_box(dim);
    throw InvalidArgument("KernelSpec: unknown kernel family '" + name + "'");
  }

  KernelFamily family() const { return family_; }
  int dim() const { return dim_; }

  double length_scale(SmoothingScale scale) const {
    return family_ == KernelFamily::Gaussian ? std::sqrt(scale.t) : scale.t;
  }

  /// Base (scale-1) density at u.
  double base_density(const Vec& u) const {
    require_dim(u, dim_, "KernelSpec::base_density");
    switch (family_) {
      case KernelFamily::Gaussian: {
        constexpr double four_pi = 4.0 * 3.14159265358979323846;
        return std::pow(four_pi, -0.5 * dim_) *
               std::exp(-0.25 * squared_norm(u));
      }
      case KernelFamily::UniformBox: {
        for (double ui : u)
          if (ui < -0.5 || ui > 0.5) return 0.0;
        return 1.0;
      }
      case KernelFamily::Custom:
        return custom_->density(u);
    }
    return 0.0;  // unreachable
  }

  /// phi_t(x) = s^-n * base(x/s), s = length_scale(t).
  double density(SmoothingScale scale, const Vec& x) const {
    require_dim(x, dim_, "KernelSpec::density");
    double s = length_scale(scale);
    Vec u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = x[i] / s;
    return std::pow(s, -dim_) * base_density(u);
  }

  /// One draw from phi_t(. - center), i.e. center + s * (base draw).
  /// Consumes the stream deterministically (coordinate order is fixed).
  Vec sample(SmoothingScale scale, const Vec& center, RngStream& rng) const {
    require_dim(center, dim_, "KernelSpec::sample");
    double s = length_scale(scale);
    Vec x(center.size());
    switch (family_) {
      case KernelFamily::Gaussian:
        // s = sqrt(t) and the base has per-coordinate variance 2, so each
        // coordinate is N(center_i, 2t).
        for (std::size_t i = 0; i < x.size(); ++i)
          x[i] = center[i] + s * (std::sqrt(2.0) * rng.normal());
        return x;
      case KernelFamily::UniformBox:
        for (std::size_t i = 0; i < x.size(); ++i)
          x[i] = center[i] + s * rng.uniform(-0.5, 0.5);
        return x;
      case KernelFamily::Custom: {
        Vec u = custom_->sample(dim_, rng);
        require_dim(u, dim_, "KernelSpec::sample (custom sampler)");
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = center[i] + s * u[i];
        return x;
      }
    }
    return x;  // unreachable
  }

  /// Radius (per coordinate, around the center) outside which the scaled
  /// kernel's mass is negligible; the quadrature oracles truncate here.
  /// Gaussian: 8 standard deviations = 8*sqrt(2t), tail mass ~1e-15.
  /// UniformBox / Custom: the exact scaled support.
  double support_radius(SmoothingScale scale) const {
    switch (family_) {
      case KernelFamily::Gaussian:
        return 8.0 * std::sqrt(2.0 * scale.t);
      case KernelFamily::UniformBox:
        return 0.5 * scale.t;
      case KernelFamily::Custom:
        return custom_->support_radius * length_scale(scale);
    }
    return 0.0;  // unreachable
  }

 private:
  KernelSpec(KernelFamily family, int dim, std::optional<CustomKernel> custom)
      : family_(family), dim_(dim), custom_(std::move(custom)) {
    if (dim < 1) throw InvalidArgument("KernelSpec: dim must be >= 1");
  }

  KernelFamily family_;
  int dim_;
  std::optional<CustomKernel> custom_;
};

/// Numerically integrates phi_t over its effective support. A correctly
/// normalized kernel probes to 1 within quadrature error; custom kernels may
/// not, which is the point of probing. budget is a cap on the adaptive
/// refinement work (roughly the max number of integrand evaluations).
/// Supported for dim <= 2 only.
inline double normalization_probe(const KernelSpec& kernel,
                                  SmoothingScale scale,
                                  long budget = 100000) {
  if (budget < 31) throw InvalidArgument("normalization_probe: budget too small");
  double r = kernel.support_radius(scale);
  // 31-point panels double per refinement level.
  int depth = 2;
  while (depth < 12 && (31L << (depth + 1)) <= budget) ++depth;
  if (kernel.dim() == 1) {
    return quad::integrate_1d(
        [&](double z) { return kernel.density(scale, Vec{z}); }, -r, r,
        quad::kDefaultTol, depth);
  }
  if (kernel.dim() == 2) {
    return quad::integrate_2d(
        [&](double z1, double z2) {
          return kernel.density(scale, Vec{z1, z2});
        },
        -r, r, -r, r, quad::kDefaultTol, depth);
  }
  throw Unsupported("normalization_probe: quadrature supports dim <= 2, got " +
                    std::to_string(kernel.dim()));
}

}  // namespace gradopt
