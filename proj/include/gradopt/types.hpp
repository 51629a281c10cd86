#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gradopt {

using Vec = std::vector<double>;

/// Misuse of the API: dimension mismatches, invalid scales/schedules,
/// out-of-domain starting points, bad configs.
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Request outside an oracle's supported envelope (e.g. quadrature in
/// dimension > 2).
struct Unsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite values produced during iteration; carries the 1-based
/// iteration index at which the problem was detected.
struct NumericalError : std::runtime_error {
  std::size_t iteration;
  NumericalError(const std::string& what, std::size_t iter)
      : std::runtime_error(what), iteration(iter) {}
};

/// Axis-aligned box [lower, upper]^dim used as the feasible set.
struct BoxDomain {
  double lower = 0.0;
  double upper = 0.0;
  int dim = 1;

  BoxDomain() = default;
  BoxDomain(double lo, double hi, int d) : lower(lo), upper(hi), dim(d) {
    if (!(lo < hi)) throw InvalidArgument("BoxDomain: lower must be < upper");
    if (d < 1) throw InvalidArgument("BoxDomain: dim must be >= 1");
  }

  bool contains(const Vec& x) const {
    if (static_cast<int>(x.size()) != dim) return false;
    for (double xi : x)
      if (xi < lower || xi > upper) return false;
    return true;
  }
  double width() const { return upper - lower; }
};

inline void require_dim(const Vec& x, int dim, const char* who) {
  if (static_cast<int>(x.size()) != dim)
    throw InvalidArgument(std::string(who) + ": expected dimension " +
                          std::to_string(dim) + ", got " +
                          std::to_string(x.size()));
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(squared_norm(a)); }

inline Vec sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline double distance(const Vec& a, const Vec& b) { return norm(sub(a, b)); }

inline bool all_finite(const Vec& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace gradopt
