#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sdc/ground.hpp"

using namespace sdc;

namespace {

PointCloud plane_with_outliers(int inliers, int outliers, uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> xy(-10.0, 10.0);
  std::uniform_real_distribution<double> any(-20.0, 20.0);
  PointCloud cloud;
  for (int i = 0; i < inliers; ++i) cloud.emplace_back(xy(rng), xy(rng), 5.0);
  for (int i = 0; i < outliers; ++i)
    cloud.emplace_back(any(rng), any(rng), 8.0 + std::abs(any(rng)));
  return cloud;
}

}  // namespace

TEST_CASE("recovers a synthetic plane among outliers") {
  const PointCloud cloud = plane_with_outliers(200, 20, 5);
  const RansacResult r = ransac_plane(cloud, 0.2, 100, 42);
  CHECK(std::abs(std::abs(r.plane.normal.z()) - 1.0) < 1e-6);
  CHECK(std::abs(std::abs(r.plane.offset) - 5.0) < 0.05);
  CHECK(r.inliers.size() >= 200);
  // Inlier recall: every one of the 200 constructed inliers is recovered.
  int recovered = 0;
  for (int idx : r.inliers)
    if (idx < 200) ++recovered;
  CHECK(recovered == 200);
}

TEST_CASE("residual split matches the threshold") {
  const PointCloud cloud = plane_with_outliers(120, 40, 7);
  const double threshold = 0.2;
  const RansacResult r = ransac_plane(cloud, threshold, 100, 9);
  std::vector<char> is_inlier(cloud.size(), 0);
  for (int idx : r.inliers) is_inlier[static_cast<size_t>(idx)] = 1;
  for (size_t i = 0; i < cloud.size(); ++i) {
    const double residual = std::abs(r.plane.signed_distance(cloud[i]));
    if (is_inlier[i])
      CHECK(residual <= threshold);
    else
      CHECK(residual > threshold);
  }
}

TEST_CASE("three exact points fit their own plane") {
  PointCloud cloud{{0.0, 0.0, 1.0}, {1.0, 0.0, 1.0}, {0.0, 1.0, 1.0}};
  const RansacResult r = ransac_plane(cloud, 0.05, 20, 3);
  CHECK(r.inliers.size() == 3);
}

TEST_CASE("degenerate inputs are rejected") {
  CHECK_THROWS_AS(ransac_plane({{0, 0, 0}, {1, 1, 1}}, 0.1, 10, 1),
                  DegenerateInputError);
  // Strictly collinear cloud: every 3-sample is degenerate.
  PointCloud line;
  for (int i = 0; i < 10; ++i) line.emplace_back(i, 2.0 * i, -i);
  CHECK_THROWS_AS(ransac_plane(line, 0.1, 50, 1), DegenerateInputError);
}

TEST_CASE("more iterations never lose inliers, for a fixed seed") {
  const PointCloud cloud = plane_with_outliers(80, 60, 11);
  size_t prev = 0;
  for (int iters : {1, 2, 5, 10, 25, 50, 100, 200}) {
    const RansacResult r = ransac_plane(cloud, 0.2, iters, 77);
    CHECK(r.inliers.size() >= prev);
    prev = r.inliers.size();
  }
}

TEST_CASE("deterministic for a fixed seed") {
  const PointCloud cloud = plane_with_outliers(100, 30, 13);
  const RansacResult a = ransac_plane(cloud, 0.2, 100, 5);
  const RansacResult b = ransac_plane(cloud, 0.2, 100, 5);
  CHECK(a.best_trial == b.best_trial);
  CHECK(a.inliers == b.inliers);
  CHECK(a.plane.normal == b.plane.normal);
}

namespace {

SourceMap identity_sources(int w, int h) {
  SourceMap s(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) s.set(x, y, y * w + x);
  return s;
}

}  // namespace

TEST_CASE("masks from no inliers are all zero") {
  const GroundMasks m = ground_masks(6, 4, {}, identity_sources(6, 4));
  CHECK((m.sparse.array() == 0).all());
  CHECK((m.propagated.array() == 0).all());
}

TEST_CASE("identity sources copy the sparse mask") {
  std::vector<Eigen::Vector2i> pixels{{1, 1}, {4, 2}, {0, 3}};
  const GroundMasks m = ground_masks(6, 4, pixels, identity_sources(6, 4));
  CHECK(m.sparse == m.propagated);
  long bits = 0;
  for (long i = 0; i < m.sparse.size(); ++i) bits += m.sparse.at_index(i);
  CHECK(bits == 3);
}

TEST_CASE("propagation follows the source map pointwise") {
  // One ground pixel; three pixels select it as their source.
  SourceMap sources = identity_sources(5, 5);
  const int y0 = 2 * 5 + 2;
  sources.set(0, 0, y0);
  sources.set(4, 4, y0);
  sources.set(1, 3, y0);
  std::vector<Eigen::Vector2i> pixels{{2, 2}};
  const GroundMasks m = ground_masks(5, 5, pixels, sources);
  long bits = 0;
  for (long i = 0; i < m.propagated.size(); ++i) bits += m.propagated.at_index(i);
  CHECK(bits == 4);  // the pixel itself plus the three that point at it
  CHECK(m.propagated(0, 0) == 1);
  CHECK(m.propagated(4, 4) == 1);
  CHECK(m.propagated(1, 3) == 1);
  CHECK(m.propagated(2, 2) == 1);
  // Pointwise property at every pixel.
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) {
      const int32_t s = sources.index(x, y);
      CHECK(m.propagated(x, y) == m.sparse(s % 5, s / 5));
    }
}
