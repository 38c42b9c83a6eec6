#pragma once

#include <algorithm>
#include <cmath>

namespace rempc {

/// Central-difference step: 1e-6 scaled by the magnitude of the variable.
inline double fd_step(double at) { return 1e-6 * std::max(1.0, std::abs(at)); }

}  // namespace rempc
