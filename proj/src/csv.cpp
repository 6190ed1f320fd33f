#include "onebit/csv.hpp"

#include <cstdio>
#include <cstring>

namespace onebit {

std::string format_double(double v) {
  char buf[40];
  // Shortest representation that parses back exactly.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

}  // namespace onebit
