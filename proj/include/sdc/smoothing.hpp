#pragma once

#include <array>

#include "sdc/ground.hpp"

namespace sdc {

/// Per-pixel binary diagonal tensor diag(keep_x, keep_y) selecting which
/// gradient components of the smoothing term stay active. A zeroed component
/// marks a detected occlusion boundary in that direction.
struct BadtField {
  Grid<uint8_t> keep_x;
  Grid<uint8_t> keep_y;

  int width() const { return keep_x.width(); }
  int height() const { return keep_x.height(); }
};

/// Derives the tensor from forward differences of depth (meters): a pixel
/// whose horizontal depth jump exceeds `depth_jump` loses its x component,
/// a vertical jump its y component; ground pixels keep the identity tensor.
BadtField derive_badt(const InvDepthMap& inv_depth, const GroundMask& ground,
                      double depth_jump);

struct TgvParams {
  double lambda_a = 1.0;          // weight of |G (grad u - v)|
  double lambda_b = 8.0;          // weight of |grad v|
  double weight_exponent = -2.5;  // data weight w = d^exponent
  double weight_min = 1e-6;       // clamp bounds for w
  double weight_max = 1e6;
  int iterations = 1000;
  double step_primal = 0.0;  // <= 0 selects 1/sqrt(12)
  double step_dual = 0.0;    // <= 0 selects 1/sqrt(12)
  int workers = 0;
};

struct TgvSolution {
  InvDepthMap smoothed;
  Grid<double> u;                    // primal variable at full precision
  std::array<Grid<double>, 2> v;     // relaxation field (x, y components)
};

/// Minimizes the tensor-weighted second-order smoothing energy
///   sum w (u - d)^2 + lambda_a |G (grad u - v)| + lambda_b |grad v|
/// with a first-order primal-dual scheme started from u = input, v = 0.
TgvSolution tgv_smooth_full(const InvDepthMap& inv_depth, const BadtField& badt,
                            const TgvParams& params);

inline InvDepthMap tgv_smooth(const InvDepthMap& inv_depth, const BadtField& badt,
                              const TgvParams& params) {
  return tgv_smooth_full(inv_depth, badt, params).smoothed;
}

}  // namespace sdc
