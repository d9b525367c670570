#pragma once

#include <optional>

#include "sdc/candidates.hpp"
#include "sdc/radius.hpp"
#include "sdc/smoothing.hpp"
#include "sdc/ssm.hpp"

namespace sdc {

struct PipelineParams {
  double radius = 0.0;  // <= 0 derives the radius from the angles below
  double calib_error_deg = 0.0;
  double scanline_angle_deg = 0.4;
  int min_count = 4;
  double path_cost_const = 0.04;
  CostParams cost;
  SsmParams ssm;
  bool ground_mask = true;
  double ransac_threshold_m = 0.2;
  int ransac_iterations = 100;
  uint64_t ransac_seed = 1;
  double depth_jump_m = 2.0;
  TgvParams tgv;
  bool skip_smoothing = false;
  int workers = 0;
};

struct PipelineResult {
  InvDepthMap selected;   // discrete selection output
  SourceMap sources;      // origin of each selected value
  InvDepthMap completed;  // final smoothed map (== selected when skipped)
  std::optional<GroundMasks> masks;
  std::optional<BadtField> badt;
  double radius_used = 0.0;
  int lbp_iterations = 0;
};

/// Full completion pipeline: candidate assignment, interpolation,
/// correspondence attachment, selection by belief propagation, ground
/// detection, tensor derivation, and variational smoothing.
PipelineResult complete(const ImageGrid& img1, const ImageGrid& img2,
                        const InvDepthMap& sparse, const StereoGeometry& geometry,
                        const CameraIntrinsics& k, const PipelineParams& params);

/// Back-projects every non-empty pixel through the intrinsics at pixel
/// centers; `pixels` (when given) receives the source pixel of each point.
PointCloud back_project(const InvDepthMap& map, const CameraIntrinsics& k,
                        std::vector<Eigen::Vector2i>* pixels = nullptr);

}  // namespace sdc
