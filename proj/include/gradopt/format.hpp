#pragma once

#include <cstdio>
#include <string>

namespace gradopt {

/// Shortest round-trippable decimal form of a double. All artifact writers
/// use this so that exports are byte-stable across platforms and runs.
inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Compact form for labels and SVG coordinates (not round-trippable).
inline std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace gradopt
