#include "sdc/geometry.hpp"

#include <cmath>

namespace sdc {

std::optional<Eigen::Vector2i> warp_motion(const Eigen::Vector2i& x, double d,
                                           const MotionStereo& g) {
  if (!(d > 0.0)) throw DomainError("warp_motion requires d > 0");
  const CameraIntrinsics& k = g.intrinsics;
  const double z = 1.0 / d;
  const Eigen::Vector3d p1((x.x() - k.cx) / k.fx * z, (x.y() - k.cy) / k.fy * z,
                           z);
  const Eigen::Vector3d moved = k.matrix() * (g.rotation * p1 + g.translation);
  if (moved.z() <= 0.0) return std::nullopt;
  return Eigen::Vector2i(
      static_cast<int>(std::floor(moved.x() / moved.z() + kFloorGuard)),
      static_cast<int>(std::floor(moved.y() / moved.z() + kFloorGuard)));
}

std::vector<ProjectedPoint> project_points(const PointCloud& points,
                                           const CameraIntrinsics& k,
                                           const Eigen::Matrix3d& rotation,
                                           const Eigen::Vector3d& translation,
                                           int width, int height,
                                           const RectifiedStereo& g) {
  std::vector<ProjectedPoint> out;
  out.reserve(points.size());
  const Eigen::Matrix3d km = k.matrix();
  for (const Eigen::Vector3d& p : points) {
    if (!p.allFinite()) throw DomainError("point cloud contains non-finite coordinates");
    const Eigen::Vector3d h = km * (rotation * p + translation);
    const double depth = h.z();
    if (!(depth > 0.0)) continue;
    const double x0 = h.x() / depth;
    const double x1 = h.y() / depth;
    if (x0 < 0.0 || x0 >= static_cast<double>(width) || x1 < 0.0 ||
        x1 >= static_cast<double>(height))
      continue;
    ProjectedPoint pp;
    pp.x0 = static_cast<int>(std::floor(x0));
    pp.x1 = static_cast<int>(std::floor(x1));
    pp.inv_depth = 1.0 / depth;
    pp.disparity = g.baseline * g.focal / depth;
    out.push_back(pp);
  }
  return out;
}

InvDepthMap sparse_map_from_projection(const std::vector<ProjectedPoint>& points,
                                       int width, int height) {
  InvDepthMap map(width, height);
  for (const ProjectedPoint& p : points) {
    const float d = static_cast<float>(p.inv_depth);
    const std::optional<float> prev = map.at(p.x0, p.x1);
    if (!prev || d > *prev) map.set(p.x0, p.x1, d);
  }
  return map;
}

}  // namespace sdc
