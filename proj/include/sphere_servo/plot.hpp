#pragma once

#include <string>
#include <vector>

#include "sphere_servo/sim_harness.hpp"

namespace sphere_servo {

/// Oblique projection of the vehicle and target paths with body-axis triads
/// every `triad_count`-th fraction of the run. Altitude (-z) points up.
std::string trajectory_svg(const std::vector<LogRecord>& records, int triad_count = 16);

/// Stacked time series: ||delta1||, delta2, ||delta3||, w_d, rho_hat, r_hat.
std::string error_series_svg(const std::vector<LogRecord>& records);

}  // namespace sphere_servo
