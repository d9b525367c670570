#pragma once

#include <vector>

#include "sdc/cost.hpp"
#include "sdc/geometry.hpp"

namespace sdc {

/// Grid search description: per-axis rotation offsets (degrees) and
/// translation offsets (meters) around the initial extrinsics, refined by
/// re-centering a halved-step grid on the best candidate.
struct CalibSearchGrid {
  double rot_half_range_deg = 2.0;
  double rot_step_deg = 0.5;
  double trans_half_range_m = 0.2;
  double trans_step_m = 0.1;
  int refinement_levels = 2;
};

struct CalibOptions {
  bool background_term = true;  // subtract min(L(x,0), trunc) per point
  double trunc_background = 0.5;
  CostParams cost;
  size_t max_points = 2000;  // deterministic subsample cap
  uint64_t subsample_seed = 7;
  bool keep_score_table = false;
  int workers = 0;
};

/// One evaluated candidate. Rotation offsets are intrinsic X-Y-Z rotations
/// applied on the right of the initial rotation; match_cost and
/// background_sum are the two accumulated sums so that
/// score = match_cost - background_sum holds exactly when the background
/// term is enabled (score = match_cost otherwise).
struct CalibCandidate {
  Eigen::Vector3d rot_offset_deg = Eigen::Vector3d::Zero();
  Eigen::Vector3d trans_offset_m = Eigen::Vector3d::Zero();
  double score = 0.0;
  double match_cost = 0.0;
  double background_sum = 0.0;
  long projected_points = 0;
  int level = 0;
};

struct CalibResult {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  Eigen::Vector3d rot_offset_deg = Eigen::Vector3d::Zero();
  Eigen::Vector3d trans_offset_m = Eigen::Vector3d::Zero();
  double score = 0.0;
  long projected_points = 0;
  std::vector<CalibCandidate> table;  // filled when keep_score_table is set
};

/// Composes the candidate rotation from per-axis degree offsets.
Eigen::Matrix3d compose_rotation(const Eigen::Matrix3d& initial,
                                 const Eigen::Vector3d& offsets_deg);

/// Background penalty -min(L(x, 0), trunc): grows when a point projects onto
/// an image location that looks like infinite depth.
double background_cost(const CostContext& context, const Eigen::Vector2i& x,
                       double trunc);

/// Brute-force extrinsic search: every (R, t) candidate projects the cloud
/// and accumulates the matching cost of each projected point (plus the
/// background term), and the lowest-scoring candidate wins (ties: first in
/// grid order). Candidates that project no points are excluded; if none
/// projects a point the scene is degenerate.
CalibResult calibrate(const PointCloud& points, const ImageGrid& img1,
                      const ImageGrid& img2, const RectifiedStereo& geometry,
                      const CameraIntrinsics& k, const Eigen::Matrix3d& r0,
                      const Eigen::Vector3d& t0, const CalibSearchGrid& grid,
                      const CalibOptions& options);

}  // namespace sdc
