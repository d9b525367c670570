#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sdc/geometry.hpp"
#include "sdc/ssm.hpp"

namespace sdc {

/// Plane n . p = offset with |n| = 1.
struct Plane {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double offset = 0.0;

  double signed_distance(const Eigen::Vector3d& p) const {
    return normal.dot(p) - offset;
  }
};

using GroundMask = Grid<uint8_t>;

struct RansacResult {
  Plane plane;
  std::vector<int> inliers;  // indices into the input cloud
  int best_trial = -1;
};

/// RANSAC plane fit: three random points per trial, the plane with the most
/// points within `inlier_threshold` wins (ties: lowest trial index). Each
/// trial draws from an independent stream derived from `seed`, so results are
/// reproducible and adding trials never invalidates earlier ones.
RansacResult ransac_plane(const PointCloud& points, double inlier_threshold,
                          int iterations, uint64_t seed);

struct GroundMasks {
  GroundMask sparse;      // 1 exactly at pixels hit by inlier projections
  GroundMask propagated;  // sparse mask looked up through the source map
};

/// Builds the sparse ground mask from projected inlier pixels and propagates
/// it through the selection: propagated(x) = sparse(sources(x)).
GroundMasks ground_masks(int width, int height,
                         std::span<const Eigen::Vector2i> ground_pixels,
                         const SourceMap& sources);

}  // namespace sdc
