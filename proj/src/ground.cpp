#include "sdc/ground.hpp"

#include <cmath>

namespace sdc {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Small deterministic generator; avoids implementation-defined distribution
/// behavior so trial streams are stable across standard libraries.
struct TrialRng {
  uint64_t state;
  explicit TrialRng(uint64_t s) : state(s) {}
  uint64_t next() {
    state = splitmix64(state);
    return state;
  }
  size_t below(size_t n) { return static_cast<size_t>(next() % n); }
};

}  // namespace

RansacResult ransac_plane(const PointCloud& points, double inlier_threshold,
                          int iterations, uint64_t seed) {
  if (points.size() < 3)
    throw DegenerateInputError("plane RANSAC requires at least 3 points");
  if (!(inlier_threshold >= 0.0)) throw DomainError("inlier threshold must be >= 0");
  if (iterations < 1) throw DomainError("iterations must be >= 1");

  struct Trial {
    bool valid = false;
    Plane plane;
    long inlier_count = 0;
  };
  std::vector<Trial> trials(static_cast<size_t>(iterations));

  for (int t = 0; t < iterations; ++t) {
    TrialRng rng(splitmix64(seed) ^ splitmix64(static_cast<uint64_t>(t) + 1));
    size_t ia = rng.below(points.size());
    size_t ib = ia, ic = ia;
    for (int attempt = 0; attempt < 64 && ib == ia; ++attempt)
      ib = rng.below(points.size());
    for (int attempt = 0; attempt < 64 && (ic == ia || ic == ib); ++attempt)
      ic = rng.below(points.size());
    if (ib == ia || ic == ia || ic == ib) continue;

    const Eigen::Vector3d n =
        (points[ib] - points[ia]).cross(points[ic] - points[ia]);
    const double len = n.norm();
    if (len < 1e-12) continue;  // collinear sample

    Trial& trial = trials[static_cast<size_t>(t)];
    trial.plane.normal = n / len;
    trial.plane.offset = trial.plane.normal.dot(points[ia]);
    for (const Eigen::Vector3d& p : points)
      if (std::abs(trial.plane.signed_distance(p)) <= inlier_threshold)
        ++trial.inlier_count;
    trial.valid = true;
  }

  int best = -1;
  for (int t = 0; t < iterations; ++t) {
    if (!trials[static_cast<size_t>(t)].valid) continue;
    if (best < 0 || trials[static_cast<size_t>(t)].inlier_count >
                        trials[static_cast<size_t>(best)].inlier_count)
      best = t;
  }
  if (best < 0)
    throw DegenerateInputError("every RANSAC sample was degenerate");

  RansacResult result;
  result.plane = trials[static_cast<size_t>(best)].plane;
  result.best_trial = best;
  for (size_t i = 0; i < points.size(); ++i)
    if (std::abs(result.plane.signed_distance(points[i])) <= inlier_threshold)
      result.inliers.push_back(static_cast<int>(i));
  return result;
}

GroundMasks ground_masks(int width, int height,
                         std::span<const Eigen::Vector2i> ground_pixels,
                         const SourceMap& sources) {
  if (sources.width() != width || sources.height() != height)
    throw DimensionError("source map size differs from mask size");
  GroundMasks masks{GroundMask(width, height, uint8_t{0}),
                    GroundMask(width, height, uint8_t{0})};
  for (const Eigen::Vector2i& p : ground_pixels) {
    if (!masks.sparse.contains(p.x(), p.y()))
      throw DomainError("ground pixel outside image bounds");
    masks.sparse(p.x(), p.y()) = 1;
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int32_t i = sources.index(x, y);
      if (i < 0) throw DomainError("source map undefined at a pixel");
      masks.propagated(x, y) = masks.sparse(i % width, i / width);
    }
  }
  return masks;
}

}  // namespace sdc
