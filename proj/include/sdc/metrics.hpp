#pragma once

#include <optional>
#include <vector>

#include "sdc/core.hpp"

namespace sdc {

/// Percentage of disparity outliers: pixels whose disparity error is >= the
/// threshold [pixel]. Evaluated where the ground truth is non-empty; an empty
/// estimate at a valid pixel counts as an outlier.
double error_rate(const InvDepthMap& estimate, const InvDepthMap& truth,
                  const StereoGeometry& geometry, double threshold_px = 3.0);

/// Mean absolute depth error [m] over pixels valid in both maps.
double mae(const InvDepthMap& estimate, const InvDepthMap& truth);

/// Mean absolute inverse depth error [1/m] over pixels valid in both maps.
double imae(const InvDepthMap& estimate, const InvDepthMap& truth);

struct RangeBucket {
  double lower_m = 0.0;
  double upper_m = 0.0;
  long count = 0;
  std::optional<double> mae_m;
};

/// Per-range-bucket MAE, with pixels assigned by ground-truth depth. Edges
/// must be strictly increasing; empty buckets report count 0 and no value.
std::vector<RangeBucket> range_bucketed_mae(const InvDepthMap& estimate,
                                            const InvDepthMap& truth,
                                            const std::vector<double>& edges_m);

}  // namespace sdc
