#pragma once

#include <cstdio>
#include <string>

namespace bcdpep {

// Shortest round-trippable decimal rendering used by every text emitter.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace bcdpep
