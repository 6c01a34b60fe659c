#pragma once

#include <charconv>
#include <string>

namespace rose2 {

/// Shortest round-trip decimal form; always contains a '.' or exponent.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace rose2
