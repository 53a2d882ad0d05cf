#pragma once

#include <algorithm>
#include <cmath>

namespace netent {

// Ceiling that treats values within relative 1e-12 of an integer as that
// integer, so that e.g. 1/(4 * 0.0625 * 2) rounds to 2 and not 3.
inline double ceil_snapped(double x) {
  const double nearest = std::round(x);
  if (std::fabs(x - nearest) <= 1e-12 * std::max(1.0, std::fabs(x))) return nearest;
  return std::ceil(x);
}

}  // namespace netent
