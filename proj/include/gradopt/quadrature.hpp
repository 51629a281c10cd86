#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gradopt/types.hpp"

namespace gradopt::quad {

// Adaptive Gauss-Kronrod. Target absolute accuracy for the smoothing
// oracles is 1e-8; the inner tolerance is driven well below that so the
// oracle error is negligible next to every statistical tolerance in the
// test suite.
inline constexpr double kDefaultTol = 1e-12;

template <typename F>
double integrate_1d(F&& f, double a, double b, double tol = kDefaultTol,
                    int max_depth = 12) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, max_depth, tol);
}

/// Iterated integral over [ax,bx] x [ay,by] (outer x, inner y).
template <typename F>
double integrate_2d(F&& f, double ax, double bx, double ay, double by,
                    double tol = kDefaultTol, int max_depth = 12) {
  auto outer = [&](double x) {
    return integrate_1d([&](double y) { return f(x, y); }, ay, by, tol,
                        max_depth);
  };
  return integrate_1d(outer, ax, bx, tol, max_depth);
}

}  // namespace gradopt::quad
