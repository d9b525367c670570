#include "sdc/cost.hpp"

#include <bit>
#include <cmath>

namespace sdc {

CensusGrid::CensusGrid(int width, int height, int window_radius)
    : width_(width), height_(height), radius_(window_radius) {
  if (window_radius < 1) throw DomainError("census window radius must be >= 1");
  const int side = 2 * window_radius + 1;
  bits_ = side * side - 1;
  words_per_pixel_ = static_cast<size_t>((bits_ + 63) / 64);
  words_.assign(static_cast<size_t>(width) * height * words_per_pixel_, 0u);
}

int CensusGrid::hamming(std::span<const uint64_t> a, std::span<const uint64_t> b) {
  int dist = 0;
  for (size_t i = 0; i < a.size(); ++i) dist += std::popcount(a[i] ^ b[i]);
  return dist;
}

CensusGrid census_transform(const ImageGrid& img, int window_radius) {
  CensusGrid census(img.width(), img.height(), window_radius);
  const int r = window_radius;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const float center = img(x, y);
      std::span<uint64_t> words = census.at(x, y);
      int bit = 0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx, ny = y + dy;
          const float neighbor = img.contains(nx, ny) ? img(nx, ny) : 0.0f;
          if (neighbor < center)
            words[bit >> 6] |= uint64_t{1} << (bit & 63);
          ++bit;
        }
      }
    }
  }
  return census;
}

double stereo_cost_at(const Eigen::Vector2i& x,
                      const std::optional<Eigen::Vector2i>& warped,
                      const ImageGrid& img1, const ImageGrid& img2,
                      const CensusGrid& census1, const CensusGrid& census2,
                      const GradientField& grad1, const GradientField& grad2,
                      const CostParams& params) {
  if (params.alpha_census < 0.0 || params.alpha_gradient < 0.0 ||
      params.trunc_photo < 0.0 || params.trunc_census < 0.0 ||
      params.trunc_gradient < 0.0)
    throw DomainError("cost weights and truncations must be >= 0");
  if (!img1.contains(x.x(), x.y()))
    throw DomainError("stereo cost pixel outside image 1");
  if (!warped || !img2.contains(warped->x(), warped->y())) return params.max_total();

  const Eigen::Vector2i w = *warped;
  const int r = params.window_radius;
  double photo = 0.0;
  double grad = 0.0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const int x1 = x.x() + dx, y1 = x.y() + dy;
      const int x2 = w.x() + dx, y2 = w.y() + dy;
      if (!img1.contains(x1, y1) || !img2.contains(x2, y2)) {
        photo += params.trunc_photo;
        grad += params.trunc_gradient;
        continue;
      }
      photo += std::min(std::abs(static_cast<double>(img1(x1, y1)) -
                                 static_cast<double>(img2(x2, y2))),
                        params.trunc_photo);
      const double gdx = static_cast<double>(grad1.dx(x1, y1)) -
                         static_cast<double>(grad2.dx(x2, y2));
      const double gdy = static_cast<double>(grad1.dy(x1, y1)) -
                         static_cast<double>(grad2.dy(x2, y2));
      grad += std::min(std::sqrt(gdx * gdx + gdy * gdy), params.trunc_gradient);
    }
  }
  const int ham = CensusGrid::hamming(census1.at(x.x(), x.y()), census2.at(w.x(), w.y()));
  const double census =
      std::min(static_cast<double>(ham) / census1.bit_count(), params.trunc_census);
  return photo + params.alpha_census * census + params.alpha_gradient * grad;
}

double stereo_cost(const Eigen::Vector2i& x, double d, const ImageGrid& img1,
                   const ImageGrid& img2, const CensusGrid& census1,
                   const CensusGrid& census2, const GradientField& grad1,
                   const GradientField& grad2, const StereoGeometry& geometry,
                   const CostParams& params) {
  std::optional<Eigen::Vector2i> warped;
  if (geometry.is_rectified()) {
    warped = warp_rectified(x, d, geometry.rectified_stereo());
  } else if (d > 0.0) {
    warped = warp_motion(x, d, geometry.motion_stereo());
  }  // motion geometry at d == 0: no finite warp target, falls through as absent
  return stereo_cost_at(x, warped, img1, img2, census1, census2, grad1, grad2,
                        params);
}

CostContext::CostContext(ImageGrid img1, ImageGrid img2, StereoGeometry geometry,
                         CostParams params)
    : img1_(std::move(img1)),
      img2_(std::move(img2)),
      geometry_(std::move(geometry)),
      params_(params),
      census1_(census_transform(img1_, params.window_radius)),
      census2_(census_transform(img2_, params.window_radius)),
      grad1_(image_gradient(img1_)),
      grad2_(image_gradient(img2_)) {}

std::optional<Eigen::Vector2i> CostContext::warp(const Eigen::Vector2i& x,
                                                 double d) const {
  if (geometry_.is_rectified())
    return warp_rectified(x, d, geometry_.rectified_stereo());
  if (d > 0.0) return warp_motion(x, d, geometry_.motion_stereo());
  return std::nullopt;
}

double CostContext::cost(const Eigen::Vector2i& x, double d) const {
  return cost_at(x, warp(x, d));
}

double CostContext::cost_at(const Eigen::Vector2i& x,
                            const std::optional<Eigen::Vector2i>& warped) const {
  return stereo_cost_at(x, warped, img1_, img2_, census1_, census2_, grad1_,
                        grad2_, params_);
}

}  // namespace sdc
