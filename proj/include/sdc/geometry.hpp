#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sdc/core.hpp"

namespace sdc {

/// 3D points [m] in the sensor frame.
using PointCloud = std::vector<Eigen::Vector3d>;

/// A 3D point projected into image 1. Carries both parameterizations of the
/// point's range: plain inverse depth 1/D and the disparity-normalized value
/// b*f/D used by the rectified warp.
struct ProjectedPoint {
  int x0 = 0;
  int x1 = 0;
  double inv_depth = 0.0;
  double disparity = 0.0;
};

/// Guard added before flooring warped coordinates: disparities that are an
/// integer up to representation error (e.g. f*b*d = 50 * 0.2) must floor as
/// the exact value would.
inline constexpr double kFloorGuard = 1e-9;

/// Warp of an image-1 pixel into image 2 at hypothesized inverse depth d for
/// rectified stereo: (floor(x0 - f*b*d), x1). May land outside image 2; the
/// cost layer penalizes that case.
inline Eigen::Vector2i warp_rectified(const Eigen::Vector2i& x, double d,
                                      const RectifiedStereo& g) {
  if (d < 0.0) throw DomainError("warp_rectified requires d >= 0");
  const double shifted = static_cast<double>(x.x()) - g.focal * g.baseline * d;
  return {static_cast<int>(std::floor(shifted + kFloorGuard)), x.y()};
}

/// Warp under camera motion: back-projects x at depth 1/d, applies the motion
/// (R_C, t_C) and re-projects, flooring both coordinates. Returns nullopt when
/// the moved point falls behind the camera.
std::optional<Eigen::Vector2i> warp_motion(const Eigen::Vector2i& x, double d,
                                           const MotionStereo& g);

/// Projects a point cloud into a W x H image with extrinsics (R, t), keeping
/// points in front of the camera whose projection lands inside the image.
std::vector<ProjectedPoint> project_points(const PointCloud& points,
                                           const CameraIntrinsics& k,
                                           const Eigen::Matrix3d& rotation,
                                           const Eigen::Vector3d& translation,
                                           int width, int height,
                                           const RectifiedStereo& g);

/// Builds a sparse inverse depth map from projections. When several points hit
/// the same pixel the nearest one (largest inverse depth) survives.
InvDepthMap sparse_map_from_projection(const std::vector<ProjectedPoint>& points,
                                       int width, int height);

}  // namespace sdc
