#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace jnb {

/// Significant digits used by machine-readable output (round-trip exact for doubles).
inline constexpr int kMachineDigits = 17;
/// Significant digits used by the pretty printer.
inline constexpr int kPrettyDigits = 6;

/// Formats a double with `digits` significant digits; +inf is written as "inf".
inline std::string format_real(double v, int digits = kMachineDigits) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace jnb
