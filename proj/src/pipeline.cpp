#include "sdc/pipeline.hpp"

namespace sdc {

PointCloud back_project(const InvDepthMap& map, const CameraIntrinsics& k,
                        std::vector<Eigen::Vector2i>* pixels) {
  if (!k.valid()) throw DomainError("back projection requires valid intrinsics");
  PointCloud points;
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const std::optional<float> d = map.at(x, y);
      if (!d) continue;
      const double z = 1.0 / static_cast<double>(*d);
      points.emplace_back((x + 0.5 - k.cx) / k.fx * z, (y + 0.5 - k.cy) / k.fy * z,
                          z);
      if (pixels) pixels->emplace_back(x, y);
    }
  }
  return points;
}

PipelineResult complete(const ImageGrid& img1, const ImageGrid& img2,
                        const InvDepthMap& sparse, const StereoGeometry& geometry,
                        const CameraIntrinsics& k, const PipelineParams& params) {
  if (img1.width() != sparse.width() || img1.height() != sparse.height() ||
      img2.width() != img1.width() || img2.height() != img1.height())
    throw DimensionError("pipeline inputs differ in size");

  double radius = params.radius;
  if (radius <= 0.0) {
    const double focal =
        geometry.is_rectified() ? geometry.rectified_stereo().focal : k.fx;
    radius = optimal_radius(
        {focal, params.calib_error_deg, params.scanline_angle_deg});
    if (radius <= 0.0)
      throw ConfigError("derived radius is zero; pass an explicit radius");
  }

  CandidateMap candidates = assign_candidates(sparse, radius, params.min_count);
  candidates = ignns_interpolate(candidates, img1, params.path_cost_const);
  const CostContext context(img1, img2, geometry, params.cost);
  candidates = attach_correspondences(candidates, context, params.workers);

  SsmParams ssm = params.ssm;
  ssm.workers = params.workers;
  SsmResult selection = lbp_select(candidates, ssm);

  PipelineResult result{selection.inv_depth, selection.sources,
                        selection.inv_depth, std::nullopt,   std::nullopt,
                        radius,              selection.iterations};
  if (params.skip_smoothing) return result;

  GroundMask ground(sparse.width(), sparse.height(), uint8_t{0});
  if (params.ground_mask) {
    std::vector<Eigen::Vector2i> pixels;
    const PointCloud cloud = back_project(sparse, k, &pixels);
    const RansacResult plane = ransac_plane(cloud, params.ransac_threshold_m,
                                            params.ransac_iterations,
                                            params.ransac_seed);
    std::vector<Eigen::Vector2i> inlier_pixels;
    inlier_pixels.reserve(plane.inliers.size());
    for (int idx : plane.inliers) inlier_pixels.push_back(pixels[static_cast<size_t>(idx)]);
    result.masks = ground_masks(sparse.width(), sparse.height(), inlier_pixels,
                                selection.sources);
    ground = result.masks->propagated;
  }

  result.badt = derive_badt(selection.inv_depth, ground, params.depth_jump_m);
  TgvParams tgv = params.tgv;
  tgv.workers = params.workers;
  result.completed = tgv_smooth(selection.inv_depth, *result.badt, tgv);
  return result;
}

}  // namespace sdc
