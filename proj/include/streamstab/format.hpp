#pragma once

#include <cstdio>
#include <string>

namespace streamstab {

/// printf-style %.<digits>g rendering. 17 digits round-trips any double.
inline std::string format_real(double value, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
  return buf;
}

inline constexpr int kRoundTripDigits = 17;

}  // namespace streamstab
