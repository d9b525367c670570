#pragma once

#include <cmath>
#include <numbers>

#include "sdc/error.hpp"

namespace sdc {

/// Inputs of the candidate-search radius rule: focal length [pixel], expected
/// rotational calibration error and inter-scanline angle [degrees].
struct RadiusInputs {
  double focal = 0.0;
  double calib_error_deg = 0.0;
  double scanline_angle_deg = 0.0;
};

/// r* = max(f tan(theta_calib), f tan(theta_scan)): the radius covering the
/// projection displacement of the worst expected calibration error and the
/// pixel distance between two scanlines.
inline double optimal_radius(const RadiusInputs& in) {
  if (!(in.focal > 0.0)) throw DomainError("focal length must be > 0");
  const auto displacement = [&](double deg) {
    if (deg < 0.0 || deg >= 90.0)
      throw DomainError("angle must lie in [0, 90) degrees");
    return in.focal * std::tan(deg * std::numbers::pi / 180.0);
  };
  return std::max(displacement(in.calib_error_deg),
                  displacement(in.scanline_angle_deg));
}

}  // namespace sdc
