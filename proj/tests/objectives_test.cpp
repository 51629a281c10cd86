#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gradopt/objectives.hpp"
#include "gradopt/rng.hpp"
#include "gradopt/types.hpp"

namespace {

using gradopt::estimate_constants;
using gradopt::InvalidArgument;
using gradopt::make_constant;
using gradopt::make_double_well;
using gradopt::make_quadratic;
using gradopt::make_toy1;
using gradopt::make_toy2;
using gradopt::NoiseDraw;
using gradopt::NoiseSpec;
using gradopt::objective_by_name;
using gradopt::ObjectiveHandle;
using gradopt::RngStream;
using gradopt::Unsupported;
using gradopt::Vec;

constexpr double kPi = 3.14159265358979323846;

// Central finite differences, the independent gradient oracle.
Vec fd_gradient(const ObjectiveHandle& obj, const Vec& x, double h = 1e-5) {
  Vec g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vec lo = x, hi = x;
    lo[i] -= h;
    hi[i] += h;
    g[i] = (obj.value(hi) - obj.value(lo)) / (2.0 * h);
  }
  return g;
}

// Relative error with an absolute floor so near-zero gradients don't blow up
// the ratio.
double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

// Root of grad by bisection over a sign-changing bracket. An exact zero at
// an endpoint (toy1's gradient vanishes identically at x = 0) is the root.
double bisect_gradient_root(const ObjectiveHandle& obj, double lo, double hi) {
  double flo = obj.gradient(Vec{lo})[0];
  double fhi = obj.gradient(Vec{hi})[0];
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  EXPECT_LT(flo * fhi, 0.0);
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    double fmid = obj.gradient(Vec{mid})[0];
    if ((flo < 0) == (fmid < 0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

TEST(Toy1, PinnedValues) {
  auto f = make_toy1();
  EXPECT_DOUBLE_EQ(f.value(Vec{0.0}), 0.0);
  EXPECT_DOUBLE_EQ(f.gradient(Vec{0.0})[0], 0.0);
  // sin(pi) vanishes, leaving pi^2.
  EXPECT_NEAR(f.value(Vec{kPi}), kPi * kPi, 1e-13);
  EXPECT_NEAR(f.value(Vec{kPi}), 9.8696044, 1e-7);
}

TEST(Toy1, GlobalMinimizersNearPlusMinus4p7) {
  auto f = make_toy1();
  // The gradient changes sign in [4,5]; refine by bisection.
  double xstar = bisect_gradient_root(f, 4.0, 5.0);
  EXPECT_NEAR(xstar, 4.72405728105301756, 1e-12);
  EXPECT_NEAR(f.value(Vec{xstar}), -24.9206397682925117, 1e-12);
  // Symmetry: f is even, so -xstar is the twin minimizer.
  EXPECT_DOUBLE_EQ(f.value(Vec{-xstar}), f.value(Vec{xstar}));

  // Every other critical point in [-50,50] sits strictly higher: scan for
  // gradient sign changes and compare values.
  double fstar = f.value(Vec{xstar});
  const int n = 100000;
  double prev = f.gradient(Vec{-50.0})[0];
  for (int i = 1; i <= n; ++i) {
    double x = -50.0 + 100.0 * i / n;
    double g = f.gradient(Vec{x})[0];
    if (prev < 0.0 != g < 0.0) {
      double crit = bisect_gradient_root(f, x - 100.0 / n, x);
      if (std::abs(std::abs(crit) - xstar) > 1e-6)
        ASSERT_GT(f.value(Vec{crit}), fstar + 1e-9) << "at " << crit;
    }
    prev = g;
  }
}

TEST(Toy2, PinnedValues) {
  auto f = make_toy2();
  EXPECT_DOUBLE_EQ(f.value(Vec{0.0, 0.0}), 0.0);
  // Rastrigin term alone: 20 + (0.25 + 10) + (0 - 10) = 20.25.
  EXPECT_DOUBLE_EQ(gradopt::detail::rastrigin2(Vec{0.5, 0.0}), 20.25);
  // Translated-Himmelblau term at (0.5, 0): a=3.25, b=0.5.
  EXPECT_DOUBLE_EQ(f.value(Vec{0.5, 0.0}), 20.25 + 3.25 * 3.25 + 0.25);
  // The origin is a joint critical point of both terms.
  EXPECT_DOUBLE_EQ(f.gradient(Vec{0.0, 0.0})[0], 0.0);
  EXPECT_DOUBLE_EQ(f.gradient(Vec{0.0, 0.0})[1], 0.0);
}

TEST(Gradients, MatchCentralDifferences) {
  struct Case {
    ObjectiveHandle obj;
    double lo, hi;
  };
  // toy2 probed on [-2,2]^2 where the batch experiment actually runs.
  std::vector<Case> cases = {{make_toy1(), -50.0, 50.0},
                             {make_toy2(), -2.0, 2.0},
                             {make_quadratic(2), -1.0, 1.0},
                             {make_double_well(), -3.0, 3.0}};
  RngStream rng(2024);
  for (auto& c : cases) {
    for (int i = 0; i < 100; ++i) {
      Vec x(std::size_t(c.obj.dim()));
      for (double& xi : x) xi = rng.uniform(c.lo, c.hi);
      Vec an = c.obj.gradient(x);
      Vec fd = fd_gradient(c.obj, x);
      for (std::size_t d = 0; d < x.size(); ++d)
        ASSERT_LT(rel_err(fd[d], an[d]), 1e-6)
            << c.obj.name << " at x[" << d << "]=" << x[d];
    }
  }
}

TEST(StochasticOracle, NoneIsExactlyTheGradient) {
  auto f = make_toy2();
  RngStream rng(3);
  for (int i = 0; i < 20; ++i) {
    Vec x{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    Vec g = f.stochastic_gradient(x, rng);
    Vec an = f.gradient(x);
    EXPECT_DOUBLE_EQ(g[0], an[0]);
    EXPECT_DOUBLE_EQ(g[1], an[1]);
  }
}

TEST(StochasticOracle, ComponentsSumToGradient) {
  auto f = make_toy2(NoiseSpec::component_choice());
  RngStream rng(4);
  for (int i = 0; i < 20; ++i) {
    Vec x{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    Vec c0 = f.components[0](x), c1 = f.components[1](x), an = f.gradient(x);
    EXPECT_DOUBLE_EQ(c0[0] + c1[0], an[0]);
    EXPECT_DOUBLE_EQ(c0[1] + c1[1], an[1]);
  }
}

TEST(StochasticOracle, ComponentChoiceUnbiasedAtPinnedPoint) {
  // At (1,1): grad_R = (2,2), grad_H = (140,88), so the doubled two-point
  // mixture has mean (142,90) = the full gradient.
  auto f = make_toy2(NoiseSpec::component_choice());
  RngStream rng(5);
  Vec x{1.0, 1.0};
  const int n = 100000;
  double m0 = 0.0, m1 = 0.0;
  for (int i = 0; i < n; ++i) {
    Vec g = f.stochastic_gradient(x, rng);
    m0 += g[0];
    m1 += g[1];
  }
  m0 /= n;
  m1 /= n;
  // Per-component values are {4,280} and {4,176}: sd = gap/2.
  double se0 = 0.5 * (280.0 - 4.0) / std::sqrt(double(n));
  double se1 = 0.5 * (176.0 - 4.0) / std::sqrt(double(n));
  EXPECT_NEAR(m0, 142.0, 4.0 * se0);
  EXPECT_NEAR(m1, 90.0, 4.0 * se1);
}

TEST(StochasticOracle, ComponentChoiceBothBranchesAtOrigin) {
  // (0,0) is a critical point of each term separately, so both branches
  // return exactly (0,0): the oracle is deterministic there.
  auto f = make_toy2(NoiseSpec::component_choice());
  for (int branch : {0, 1}) {
    NoiseDraw draw;
    draw.branch = branch;
    Vec g = f.stochastic_gradient(Vec{0.0, 0.0}, draw);
    EXPECT_DOUBLE_EQ(g[0], 0.0);
    EXPECT_DOUBLE_EQ(g[1], 0.0);
  }
}

TEST(StochasticOracle, ComponentChoiceSecondMomentIdentity) {
  // For the doubled mixture, E|g|^2 = |grad_R - grad_H|^2 + |grad f|^2.
  // At (1,1): 138^2 + 86^2 + 142^2 + 90^2 = 54704.
  auto f = make_toy2(NoiseSpec::component_choice());
  RngStream rng(6);
  Vec x{1.0, 1.0};
  const int n = 100000;
  double sumsq = 0.0;
  for (int i = 0; i < n; ++i)
    sumsq += gradopt::squared_norm(f.stochastic_gradient(x, rng));
  double want = 138.0 * 138.0 + 86.0 * 86.0 + 142.0 * 142.0 + 90.0 * 90.0;
  EXPECT_DOUBLE_EQ(want, 54704.0);
  EXPECT_NEAR(sumsq / n, want, 0.02 * want);
}

TEST(StochasticOracle, AdditiveGaussianSecondMoment) {
  // E|g - grad f|^2 = sigma^2 regardless of dimension.
  auto f = make_toy2(NoiseSpec::additive_gaussian(1.5));
  RngStream rng(7);
  Vec x{0.3, -0.4};
  Vec an = f.gradient(x);
  const int n = 200000;
  double sumsq = 0.0;
  for (int i = 0; i < n; ++i)
    sumsq += gradopt::squared_norm(gradopt::sub(f.stochastic_gradient(x, rng), an));
  EXPECT_NEAR(sumsq / n, 2.25, 0.02 * 2.25);
}

TEST(StochasticOracle, ComponentChoiceRequiresASplit) {
  // toy1 has no two-term decomposition registered.
  EXPECT_THROW(make_toy1(NoiseSpec::component_choice()), InvalidArgument);
  EXPECT_THROW(NoiseSpec::additive_gaussian(-1.0), InvalidArgument);
}

TEST(Registry, BuiltinsByName) {
  for (const char* name : {"toy1", "toy2", "quadratic", "const", "doublewell"})
    EXPECT_EQ(objective_by_name(name).name, name);
  EXPECT_THROW(objective_by_name("nope"), InvalidArgument);
  // Noise spec is threaded through the factory.
  auto noisy = objective_by_name("toy2", NoiseSpec::component_choice());
  EXPECT_EQ(noisy.noise.kind, NoiseSpec::Kind::ComponentChoice);
  EXPECT_EQ(noisy.components.size(), 2u);
}

TEST(EstimateConstants, QuadraticExact) {
  // grad = 2x on [-1,1]: M = 4 at the endpoints, slope exactly 2 everywhere.
  auto c = estimate_constants(make_quadratic(), 1001);
  EXPECT_DOUBLE_EQ(c.M, 4.0);
  EXPECT_NEAR(c.L, 2.0, 1e-9);
  EXPECT_EQ(c.resolution, 1001);
  ASSERT_TRUE(c.pl_mu.has_value());
  EXPECT_DOUBLE_EQ(*c.pl_mu, 2.0);
}

TEST(EstimateConstants, ConstantObjectiveIsFlat) {
  auto c = estimate_constants(make_constant(3.0), 101);
  EXPECT_DOUBLE_EQ(c.M, 0.0);
  EXPECT_DOUBLE_EQ(c.L, 0.0);
}

TEST(EstimateConstants, Toy1FrozenGridValues) {
  // Deterministic grid scan at resolution 1e5; pinned so a change in the
  // scan (or the objective) is loud.
  auto c = estimate_constants(make_toy1(), 100000);
  EXPECT_NEAR(c.M, 336236.76802860078, 1e-6);
  EXPECT_NEAR(c.L, 489.86928675014411, 1e-9);
}

TEST(EstimateConstants, ComponentGapBecomesSigmaSq) {
  // For ComponentChoice the pointwise noise second moment is
  // |c0 - c1|^2; the grid max lands at the domain corners.
  auto c = estimate_constants(make_toy2(NoiseSpec::component_choice()), 201);
  auto f = make_toy2(NoiseSpec::component_choice());
  Vec corner{6.0, 6.0};
  double gap = gradopt::squared_norm(
      gradopt::sub(f.components[0](corner), f.components[1](corner)));
  EXPECT_GE(c.sigma_sq, gap * 0.99);
  auto g = estimate_constants(make_toy1(NoiseSpec::additive_gaussian(2.0)), 11);
  EXPECT_DOUBLE_EQ(g.sigma_sq, 4.0);
}

TEST(EstimateConstants, ArgumentErrors) {
  EXPECT_THROW(estimate_constants(make_quadratic(), 1), InvalidArgument);
  EXPECT_THROW(estimate_constants(make_quadratic(3), 11), Unsupported);
}

TEST(DoubleWell, UniqueGlobalMinimizer) {
  auto f = make_double_well();
  // Asymmetric tilt picks the left well.
  double left = bisect_gradient_root(f, -1.5, -0.5);
  EXPECT_NEAR(left, -1.03557871408885374, 1e-12);
  double right = bisect_gradient_root(f, 0.5, 1.5);
  EXPECT_LT(f.value(Vec{left}), f.value(Vec{right}) - 0.1);
}

}  // namespace
