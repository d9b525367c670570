#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "sdc/cost.hpp"

namespace sdc {

/// One inverse depth hypothesis at a pixel: the value, the sparse-map pixel it
/// came from, and (once attached) its warped correspondence and matching cost.
struct Candidate {
  float inv_depth = 0.0f;
  int32_t source_index = -1;  // row-major pixel index in image 1
  std::optional<Eigen::Vector2i> warp;
  double unary_cost = 0.0;
};

/// Per-pixel candidate sets. Sets may be aliased between pixels after
/// interpolation (a pixel may share the set of its nearest seed); sets are
/// immutable once stored.
class CandidateMap {
 public:
  using Set = std::shared_ptr<const std::vector<Candidate>>;

  CandidateMap(int width, int height)
      : width_(width), height_(height),
        sets_(static_cast<size_t>(width) * height) {}

  int width() const { return width_; }
  int height() const { return height_; }
  long pixel_count() const { return static_cast<long>(sets_.size()); }

  bool has_candidates(int x, int y) const {
    const Set& s = set(x, y);
    return s && !s->empty();
  }
  const std::vector<Candidate>& at(int x, int y) const {
    static const std::vector<Candidate> kEmpty;
    const Set& s = set(x, y);
    return s ? *s : kEmpty;
  }
  const Set& set(int x, int y) const {
    return sets_[static_cast<size_t>(y) * width_ + x];
  }
  void store(int x, int y, Set s) {
    sets_[static_cast<size_t>(y) * width_ + x] = std::move(s);
  }

  long total_candidates() const {
    long n = 0;
    for (const Set& s : sets_)
      if (s) n += static_cast<long>(s->size());
    return n;
  }

 private:
  int width_;
  int height_;
  std::vector<Set> sets_;
};

/// Gathers, for every pixel, the non-empty sparse values whose source pixel
/// lies strictly closer than `radius`; sets with fewer than `min_count`
/// members are emptied.
CandidateMap assign_candidates(const InvDepthMap& sparse, double radius,
                               int min_count);

/// Image-guided nearest-neighbor interpolation: every empty-set pixel adopts
/// the set of the non-empty pixel reachable with the smallest accumulated
/// path cost sum(|grad I1|^2 + path_cost_const) over 4-connected paths.
/// Throws NoDataError when every set is empty.
CandidateMap ignns_interpolate(const CandidateMap& map, const ImageGrid& img1,
                               double path_cost_const);

/// Which of the candidates sharing one warp survives pruning.
enum class PruneRule {
  kNearestSource,      // smallest source-pixel distance to the owning pixel
  kSmallestDisparity,  // warp nearest to the owning pixel (largest depth)
};

/// Attaches the warped correspondence and matching cost to every candidate,
/// then prunes candidates that share a warp down to one survivor.
CandidateMap attach_correspondences(const CandidateMap& map,
                                    const CostContext& context, int workers = 0,
                                    PruneRule rule = PruneRule::kNearestSource);

inline CandidateMap attach_correspondences(const CandidateMap& map,
                                           const ImageGrid& img1,
                                           const ImageGrid& img2,
                                           const StereoGeometry& geometry,
                                           const CostParams& params,
                                           int workers = 0,
                                           PruneRule rule = PruneRule::kNearestSource) {
  return attach_correspondences(map, CostContext(img1, img2, geometry, params),
                                workers, rule);
}

}  // namespace sdc
