#pragma once

#include <cstdio>
#include <string>

namespace spk2d {

// Fixed 17-significant-digit rendering used for every printed number.
inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace spk2d
