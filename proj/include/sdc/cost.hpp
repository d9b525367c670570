#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sdc/core.hpp"
#include "sdc/geometry.hpp"

namespace sdc {

/// Census transform of an image: per pixel, one bit per window neighbor
/// (row-major order, center excluded), set iff the neighbor intensity is
/// strictly below the center. Out-of-image neighbors compare as intensity 0.
class CensusGrid {
 public:
  CensusGrid(int width, int height, int window_radius);

  int width() const { return width_; }
  int height() const { return height_; }
  int window_radius() const { return radius_; }
  int bit_count() const { return bits_; }

  std::span<const uint64_t> at(int x, int y) const {
    return {&words_[(static_cast<size_t>(y) * width_ + x) * words_per_pixel_],
            words_per_pixel_};
  }
  std::span<uint64_t> at(int x, int y) {
    return {&words_[(static_cast<size_t>(y) * width_ + x) * words_per_pixel_],
            words_per_pixel_};
  }

  static int hamming(std::span<const uint64_t> a, std::span<const uint64_t> b);

 private:
  int width_ = 0;
  int height_ = 0;
  int radius_ = 0;
  int bits_ = 0;
  size_t words_per_pixel_ = 0;
  std::vector<uint64_t> words_;
};

CensusGrid census_transform(const ImageGrid& img, int window_radius);

/// Weights and truncation maxima of the matching cost. The census Hamming
/// distance is normalized by the window bit count before truncation so that
/// trunc_census lives on the same [0, ~1] scale as the per-pixel photometric
/// term.
struct CostParams {
  double alpha_census = 1.0;
  double alpha_gradient = 1.0;
  double trunc_photo = 0.5;
  double trunc_census = 0.5;
  double trunc_gradient = 0.5;
  int window_radius = 5;  // 11x11 window

  int window_side() const { return 2 * window_radius + 1; }
  int window_count() const { return window_side() * window_side(); }
  /// Value returned when the warped pixel is unusable; also the upper bound
  /// of the cost for any input.
  double max_total() const {
    return window_count() * trunc_photo + alpha_census * trunc_census +
           alpha_gradient * window_count() * trunc_gradient;
  }
};

/// Matching cost between pixel x of image 1 and an explicit warped location in
/// image 2 (nullopt = unusable warp). Window pixels that fall outside either
/// image contribute their truncation maximum.
double stereo_cost_at(const Eigen::Vector2i& x,
                      const std::optional<Eigen::Vector2i>& warped,
                      const ImageGrid& img1, const ImageGrid& img2,
                      const CensusGrid& census1, const CensusGrid& census2,
                      const GradientField& grad1, const GradientField& grad2,
                      const CostParams& params);

/// Truncated stereo matching cost of hypothesized inverse depth d at pixel x:
/// photometric + census + gradient terms evaluated at the warped location.
double stereo_cost(const Eigen::Vector2i& x, double d, const ImageGrid& img1,
                   const ImageGrid& img2, const CensusGrid& census1,
                   const CensusGrid& census2, const GradientField& grad1,
                   const GradientField& grad2, const StereoGeometry& geometry,
                   const CostParams& params);

/// Bundles the per-image precomputations (census grids, gradients) with the
/// geometry and parameters so callers evaluate costs without rebuilding them.
class CostContext {
 public:
  CostContext(ImageGrid img1, ImageGrid img2, StereoGeometry geometry,
              CostParams params);

  std::optional<Eigen::Vector2i> warp(const Eigen::Vector2i& x, double d) const;
  double cost(const Eigen::Vector2i& x, double d) const;
  double cost_at(const Eigen::Vector2i& x,
                 const std::optional<Eigen::Vector2i>& warped) const;

  const ImageGrid& image1() const { return img1_; }
  const ImageGrid& image2() const { return img2_; }
  const StereoGeometry& geometry() const { return geometry_; }
  const CostParams& params() const { return params_; }

 private:
  ImageGrid img1_;
  ImageGrid img2_;
  StereoGeometry geometry_;
  CostParams params_;
  CensusGrid census1_;
  CensusGrid census2_;
  GradientField grad1_;
  GradientField grad2_;
};

}  // namespace sdc
