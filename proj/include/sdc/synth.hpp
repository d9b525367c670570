#pragma once

#include <vector>

#include "sdc/cost.hpp"
#include "sdc/geometry.hpp"

namespace sdc {

/// Fronto-parallel rectangle at a fixed depth covering the pixel box
/// [x0, x1) x [y0, y1) in image 1.
struct SceneRect {
  double depth_m = 0.0;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

struct ScenePerturbation {
  Eigen::Vector3d rotation_axis = Eigen::Vector3d::UnitY();
  double rotation_deg = 0.0;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  bool is_identity() const {
    return rotation_deg == 0.0 && translation.isZero(0.0);
  }
  Eigen::Matrix3d rotation_matrix() const;
};

/// Piecewise-planar scene description. Camera frame: x right, y down,
/// z forward; the ground is the plane y = ground_height_m.
struct SceneSpec {
  int width = 256;
  int height = 160;
  double focal = 250.0;
  double baseline = 0.12;

  double backdrop_depth_m = 12.0;
  bool ground_enabled = false;
  double ground_height_m = 1.2;
  std::vector<SceneRect> rects;  // sorted nearest-first

  uint32_t texture_seed = 1;
  double texture_amplitude = 0.35;
  int texture_octaves = 3;
  double texture_period_px = 12.0;

  int scanline_count = 64;
  double scanline_span_deg = 30.0;
  ScenePerturbation perturbation;
  double noise_stddev = 0.0;

  CameraIntrinsics intrinsics() const {
    return {focal, focal, width / 2.0, height / 2.0};
  }
  StereoGeometry geometry() const {
    return StereoGeometry::rectified(focal, baseline);
  }
};

struct Scene {
  ImageGrid image1;
  ImageGrid image2;
  InvDepthMap gt_inv_depth;  // dense
  PointCloud gt_points;      // back-projection of every pixel
};

/// Renders the stereo pair, the dense ground truth, and the full-resolution
/// point cloud. Image 2 is built by forward-warping image 1 with the ground
/// truth (nearest surface wins), so the matching cost at the true inverse
/// depth is zero away from occlusions; dis-occluded pixels get independent
/// texture. Deterministic given (spec, seed).
Scene render_scene(const SceneSpec& spec, uint64_t seed);

/// Selects the non-empty pixels on n_lines rows evenly placed between the
/// elevation bounds +-span/2 (clamped to the image) and back-projects them.
PointCloud sample_scanlines(const InvDepthMap& gt, const CameraIntrinsics& k,
                            int n_lines, double span_deg);

/// Applies the perturbation extrinsic to the points and projects them into a
/// sparse, possibly mis-projected map. A zero perturbation reproduces the
/// source depths exactly at every hit pixel.
InvDepthMap perturb_and_project(const PointCloud& points,
                                const CameraIntrinsics& k,
                                const ScenePerturbation& perturbation, int width,
                                int height, const RectifiedStereo& g);

}  // namespace sdc
