#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gradopt/rng.hpp"
#include "gradopt/types.hpp"

namespace gradopt {

/// Stochastic gradient oracle noise.
///   None:            g = grad f exactly.
///   AdditiveGaussian: g = grad f + xi, E|xi|^2 = sigma^2 (isotropic, so the
///                     per-coordinate variance is sigma^2 / dim).
///   ComponentChoice:  g = 2 * (one of two gradient components, equal odds).
///                     The factor 2 keeps E[g] = grad f when
///                     f = component_0 + component_1.
struct NoiseSpec {
  enum class Kind { None, AdditiveGaussian, ComponentChoice };
  Kind kind = Kind::None;
  double sigma = 0.0;

  static NoiseSpec none() { return {}; }
  static NoiseSpec additive_gaussian(double sigma) {
    if (!(sigma >= 0.0))
      throw InvalidArgument("NoiseSpec: sigma must be >= 0");
    return {Kind::AdditiveGaussian, sigma};
  }
  static NoiseSpec component_choice() { return {Kind::ComponentChoice, 0.0}; }
};

/// One realization of the oracle noise, drawn once per solver iteration and
/// shared across all smoothing samples of that iteration.
struct NoiseDraw {
  Vec shift;        // AdditiveGaussian only
  int branch = -1;  // ComponentChoice only
};

/// A differentiable objective with an optional stochastic oracle, bound to a
/// box domain. Instances are immutable after construction and safe to share
/// across threads.
struct ObjectiveHandle {
  std::string name;
  BoxDomain domain;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  /// Exactly two entries when the objective supports ComponentChoice noise
  /// (a two-term split f = c0 + c1); empty otherwise.
  std::vector<std::function<Vec(const Vec&)>> components;
  NoiseSpec noise;
  /// Set when the objective is known analytically to satisfy the
  /// Polyak-Lojasiewicz inequality 0.5*|grad f|^2 >= mu*(f - f_min).
  std::optional<double> known_pl_mu;

  int dim() const { return domain.dim; }

  void validate() const {
    if (!value || !gradient)
      throw InvalidArgument("ObjectiveHandle: value/gradient required");
    if (noise.kind == NoiseSpec::Kind::ComponentChoice &&
        components.size() != 2)
      throw InvalidArgument(
          "ObjectiveHandle: ComponentChoice noise needs exactly two gradient "
          "components ('" + name + "' has " +
          std::to_string(components.size()) + ")");
  }

  NoiseDraw sample_noise(RngStream& rng) const {
    NoiseDraw draw;
    switch (noise.kind) {
      case NoiseSpec::Kind::None:
        break;
      case NoiseSpec::Kind::AdditiveGaussian: {
        double per_coord = noise.sigma / std::sqrt(double(domain.dim));
        draw.shift.resize(domain.dim);
        for (double& s : draw.shift) s = per_coord * rng.normal();
        break;
      }
      case NoiseSpec::Kind::ComponentChoice:
        draw.branch = rng.uniform01() < 0.5 ? 0 : 1;
        break;
    }
    return draw;
  }

  /// g(x, xi) for a fixed noise realization xi.
  Vec stochastic_gradient(const Vec& x, const NoiseDraw& draw) const {
    switch (noise.kind) {
      case NoiseSpec::Kind::None:
        return gradient(x);
      case NoiseSpec::Kind::AdditiveGaussian: {
        Vec g = gradient(x);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += draw.shift[i];
        return g;
      }
      case NoiseSpec::Kind::ComponentChoice: {
        if (draw.branch < 0 || draw.branch > 1)
          throw InvalidArgument("stochastic_gradient: bad noise draw");
        Vec g = components[static_cast<std::size_t>(draw.branch)](x);
        for (double& gi : g) gi *= 2.0;
        return g;
      }
    }
    return gradient(x);  // unreachable
  }

  /// Convenience: draw a fresh realization and evaluate at x.
  Vec stochastic_gradient(const Vec& x, RngStream& rng) const {
    return stochastic_gradient(x, sample_noise(rng));
  }
};

// ---------------------------------------------------------------------------
// Built-in benchmark objectives.

/// 1-D multimodal benchmark x^2 + 10 x sin x on [-50, 50]. Two symmetric
/// global minimizers near +-4.724; local minima roughly every 2*pi.
inline ObjectiveHandle make_toy1(NoiseSpec noise = NoiseSpec::none()) {
  ObjectiveHandle h;
  h.name = "toy1";
  h.domain = BoxDomain(-50.0, 50.0, 1);
  h.value = [](const Vec& x) {
    require_dim(x, 1, "toy1");
    return x[0] * x[0] + 10.0 * x[0] * std::sin(x[0]);
  };
  h.gradient = [](const Vec& x) {
    require_dim(x, 1, "toy1");
    return Vec{2.0 * x[0] + 10.0 * std::sin(x[0]) +
               10.0 * x[0] * std::cos(x[0])};
  };
  h.noise = noise;
  h.validate();
  return h;
}

namespace detail {
inline constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

inline double rastrigin2(const Vec& x) {
  double s = 20.0;
  for (int i = 0; i < 2; ++i)
    s += x[i] * x[i] - 10.0 * std::cos(kTwoPi * x[i]);
  return s;
}
inline Vec rastrigin2_grad(const Vec& x) {
  Vec g(2);
  for (int i = 0; i < 2; ++i)
    g[i] = 2.0 * x[i] + 10.0 * kTwoPi * std::sin(kTwoPi * x[i]);
  return g;
}
// Himmelblau translated so its (3,2) minimizer sits at the origin.
inline double himmelblau_shifted(const Vec& x) {
  double u = x[0] + 3.0, v = x[1] + 2.0;
  double a = u * u + v - 11.0, b = u + v * v - 7.0;
  return a * a + b * b;
}
inline Vec himmelblau_shifted_grad(const Vec& x) {
  double u = x[0] + 3.0, v = x[1] + 2.0;
  double a = u * u + v - 11.0, b = u + v * v - 7.0;
  return Vec{4.0 * u * a + 2.0 * b, 2.0 * a + 4.0 * v * b};
}
}  // namespace detail

/// 2-D benchmark: Rastrigin plus translated Himmelblau, global minimum 0 at
/// the origin. Supports ComponentChoice noise via the (Rastrigin,
/// Himmelblau) gradient split.
inline ObjectiveHandle make_toy2(NoiseSpec noise = NoiseSpec::none()) {
  ObjectiveHandle h;
  h.name = "toy2";
  h.domain = BoxDomain(-6.0, 6.0, 2);
  h.value = [](const Vec& x) {
    require_dim(x, 2, "toy2");
    return detail::rastrigin2(x) + detail::himmelblau_shifted(x);
  };
  h.gradient = [](const Vec& x) {
    require_dim(x, 2, "toy2");
    Vec g = detail::rastrigin2_grad(x);
    Vec gh = detail::himmelblau_shifted_grad(x);
    g[0] += gh[0];
    g[1] += gh[1];
    return g;
  };
  h.components = {[](const Vec& x) {
                    require_dim(x, 2, "toy2");
                    return detail::rastrigin2_grad(x);
                  },
                  [](const Vec& x) {
                    require_dim(x, 2, "toy2");
                    return detail::himmelblau_shifted_grad(x);
                  }};
  h.noise = noise;
  h.validate();
  return h;
}

/// |x|^2 on [-1, 1]^dim. PL constant 2 (exactly, with equality).
inline ObjectiveHandle make_quadratic(int dim = 1,
                                      NoiseSpec noise = NoiseSpec::none()) {
  ObjectiveHandle h;
  h.name = "quadratic";
  h.domain = BoxDomain(-1.0, 1.0, dim);
  h.value = [dim](const Vec& x) {
    require_dim(x, dim, "quadratic");
    return squared_norm(x);
  };
  h.gradient = [dim](const Vec& x) {
    require_dim(x, dim, "quadratic");
    Vec g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * x[i];
    return g;
  };
  h.known_pl_mu = 2.0;
  h.noise = noise;
  h.validate();
  return h;
}

/// (mu/2)|x|^2 on [-1, 1]^dim: PL inequality holds with constant exactly mu,
/// gradient is mu-Lipschitz, and max |grad|^2 over the box is mu^2 * dim.
inline ObjectiveHandle make_pl_quadratic(double mu, int dim = 1,
                                         NoiseSpec noise = NoiseSpec::none()) {
  if (!(mu > 0.0)) throw InvalidArgument("make_pl_quadratic: mu must be > 0");
  ObjectiveHandle h;
  h.name = "pl-quadratic";
  h.domain = BoxDomain(-1.0, 1.0, dim);
  h.value = [mu, dim](const Vec& x) {
    require_dim(x, dim, "pl-quadratic");
    return 0.5 * mu * squared_norm(x);
  };
  h.gradient = [mu, dim](const Vec& x) {
    require_dim(x, dim, "pl-quadratic");
    Vec g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = mu * x[i];
    return g;
  };
  h.known_pl_mu = mu;
  h.noise = noise;
  h.validate();
  return h;
}

inline ObjectiveHandle make_constant(double c = 0.0, int dim = 1,
                                     NoiseSpec noise = NoiseSpec::none()) {
  ObjectiveHandle h;
  h.name = "const";
  h.domain = BoxDomain(-1.0, 1.0, dim);
  h.value = [c, dim](const Vec& x) {
    require_dim(x, dim, "const");
    return c;
  };
  h.gradient = [dim](const Vec& x) {
    require_dim(x, dim, "const");
    return Vec(x.size(), 0.0);
  };
  h.noise = noise;
  h.validate();
  return h;
}

/// Asymmetric double well (x^2-1)^2 + 0.3 x on [-3, 3]; unique global
/// minimizer near -1.0356.
inline ObjectiveHandle make_double_well(NoiseSpec noise = NoiseSpec::none()) {
  ObjectiveHandle h;
  h.name = "doublewell";
  h.domain = BoxDomain(-3.0, 3.0, 1);
  h.value = [](const Vec& x) {
    require_dim(x, 1, "doublewell");
    double w = x[0] * x[0] - 1.0;
    return w * w + 0.3 * x[0];
  };
  h.gradient = [](const Vec& x) {
    require_dim(x, 1, "doublewell");
    return Vec{4.0 * x[0] * (x[0] * x[0] - 1.0) + 0.3};
  };
  h.noise = noise;
  h.validate();
  return h;
}

// ---------------------------------------------------------------------------
// Registry. Built-ins are pre-registered; callers may add their own
// factories. Not synchronized: register everything before concurrent use.

using ObjectiveFactory = std::function<ObjectiveHandle(NoiseSpec)>;

inline std::map<std::string, ObjectiveFactory>& objective_registry() {
  static std::map<std::string, ObjectiveFactory> reg = {
      {"toy1", [](NoiseSpec n) { return make_toy1(n); }},
      {"toy2", [](NoiseSpec n) { return make_toy2(n); }},
      {"quadratic", [](NoiseSpec n) { return make_quadratic(1, n); }},
      {"const", [](NoiseSpec n) { return make_constant(0.0, 1, n); }},
      {"doublewell", [](NoiseSpec n) { return make_double_well(n); }},
  };
  return reg;
}

inline void register_objective(const std::string& name, ObjectiveFactory f) {
  objective_registry()[name] = std::move(f);
}

inline ObjectiveHandle objective_by_name(
    const std::string& name, NoiseSpec noise = NoiseSpec::none()) {
  auto& reg = objective_registry();
  auto it = reg.find(name);
  if (it == reg.end())
    throw InvalidArgument("unknown objective '" + name + "'");
  return it->second(noise);
}

// ---------------------------------------------------------------------------
// Landscape constants.

/// Grid-estimated smoothness/noise constants. L and M are lower bounds on
/// the true suprema (grid sampling cannot certify a max); downstream bound
/// checks carry slack for that.
struct LandscapeConstants {
  double L = 0.0;         // max measured |grad(x)-grad(y)| / |x-y|
  double M = 0.0;         // max measured |grad(x)|^2
  double sigma_sq = 0.0;  // noise second moment E|g - grad f|^2 (worst x)
  std::optional<double> pl_mu;
  int resolution = 0;
};

/// Scans an axis-aligned grid with `resolution` points per axis over the
/// objective's domain. dim <= 2. For ComponentChoice noise, sigma_sq is the
/// grid max of |c0 - c1|^2, the pointwise noise second moment of the
/// two-component oracle.
inline LandscapeConstants estimate_constants(const ObjectiveHandle& obj,
                                             int resolution) {
  if (resolution < 2)
    throw InvalidArgument("estimate_constants: resolution must be >= 2");
  if (obj.dim() > 2)
    throw Unsupported("estimate_constants: grid scan supports dim <= 2");

  LandscapeConstants out;
  out.resolution = resolution;
  out.pl_mu = obj.known_pl_mu;

  const double lo = obj.domain.lower, hi = obj.domain.upper;
  const double h = (hi - lo) / (resolution - 1);
  auto coord = [&](int i) { return i == resolution - 1 ? hi : lo + i * h; };

  auto component_gap = [&](const Vec& x) {
    if (obj.noise.kind != NoiseSpec::Kind::ComponentChoice) return 0.0;
    return squared_norm(sub(obj.components[0](x), obj.components[1](x)));
  };

  if (obj.dim() == 1) {
    Vec prev;
    for (int i = 0; i < resolution; ++i) {
      Vec x{coord(i)};
      Vec g = obj.gradient(x);
      out.M = std::max(out.M, squared_norm(g));
      out.sigma_sq = std::max(out.sigma_sq, component_gap(x));
      if (i > 0) out.L = std::max(out.L, norm(sub(g, prev)) / h);
      prev = std::move(g);
    }
  } else {
    // Cache one row of gradients at a time; pair each point with its right,
    // upper and diagonal neighbors so sloped directions are sampled too.
    std::vector<Vec> below(resolution);
    for (int j = 0; j < resolution; ++j) {
      std::vector<Vec> row(resolution);
      for (int i = 0; i < resolution; ++i) {
        Vec x{coord(i), coord(j)};
        row[i] = obj.gradient(x);
        out.M = std::max(out.M, squared_norm(row[i]));
        out.sigma_sq = std::max(out.sigma_sq, component_gap(x));
        if (i > 0)
          out.L = std::max(out.L, norm(sub(row[i], row[i - 1])) / h);
        if (j > 0) {
          out.L = std::max(out.L, norm(sub(row[i], below[i])) / h);
          if (i > 0)
            out.L = std::max(out.L, norm(sub(row[i], below[i - 1])) /
                                        (h * std::sqrt(2.0)));
          if (i < resolution - 1)
            out.L = std::max(out.L, norm(sub(row[i], below[i + 1])) /
                                        (h * std::sqrt(2.0)));
        }
      }
      below = std::move(row);
    }
  }

  if (obj.noise.kind == NoiseSpec::Kind::AdditiveGaussian)
    out.sigma_sq = obj.noise.sigma * obj.noise.sigma;
  return out;
}

}  // namespace gradopt
