#pragma once

#include <cstdio>
#include <string>

namespace gdag {

// Reports carry 12 significant digits; CSV round-trips use 17.
inline std::string format_real(double value, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
  return buf;
}

}  // namespace gdag
