#pragma once

// Locale-independent numeric formatting shared by CSV and markdown output.

#include <charconv>
#include <cstdio>
#include <string>

namespace riskcal {

// Shortest representation that round-trips through a double.
inline std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

// Fixed decimal places, e.g. format_fixed(0.9765, 3) == "0.977".
inline std::string format_fixed(double value, int places) {
  char buf[48];
  const int n = std::snprintf(buf, sizeof(buf), "%.*f", places, value);
  return std::string(buf, buf + n);
}

}  // namespace riskcal
