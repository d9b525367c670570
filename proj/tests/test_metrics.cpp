#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sdc/metrics.hpp"

using namespace sdc;

namespace {

// f*b = 100: disparity [px] is 100 * inverse depth.
const StereoGeometry kGeom = StereoGeometry::rectified(100.0, 1.0);

InvDepthMap from_disparities(const std::vector<double>& disp, int w, int h) {
  InvDepthMap m(w, h);
  for (int i = 0; i < w * h; ++i)
    m.set(i % w, i / w, static_cast<float>(disp[static_cast<size_t>(i)] / 100.0));
  return m;
}

InvDepthMap from_depths(const std::vector<double>& depths, int w, int h) {
  InvDepthMap m(w, h);
  for (int i = 0; i < w * h; ++i)
    m.set(i % w, i / w, static_cast<float>(1.0 / depths[static_cast<size_t>(i)]));
  return m;
}

}  // namespace

TEST_CASE("perfect estimates have zero error everywhere") {
  const InvDepthMap gt = from_depths({2, 4, 8, 16}, 2, 2);
  CHECK(error_rate(gt, gt, kGeom) == 0.0);
  CHECK(mae(gt, gt) == 0.0);
  CHECK(imae(gt, gt) == 0.0);
}

TEST_CASE("hand-counted disparity outliers") {
  const InvDepthMap gt = from_disparities({10, 10, 10, 10}, 4, 1);
  const InvDepthMap est = from_disparities({10, 12, 14, 10}, 4, 1);
  CHECK(error_rate(est, gt, kGeom) == doctest::Approx(25.0));
}

TEST_CASE("uniform five-pixel offset is a full outlier rate") {
  const InvDepthMap gt = from_disparities({8, 12, 20, 40, 6, 9}, 3, 2);
  std::vector<double> off{13, 17, 25, 45, 11, 14};
  const InvDepthMap est = from_disparities(off, 3, 2);
  CHECK(error_rate(est, gt, kGeom) == doctest::Approx(100.0));
}

TEST_CASE("empty estimate pixels count as outliers") {
  const InvDepthMap gt = from_disparities({10, 10}, 2, 1);
  InvDepthMap est(2, 1);
  est.set(0, 0, 0.1f);
  CHECK(error_rate(est, gt, kGeom) == doctest::Approx(50.0));
}

TEST_CASE("hand-computed depth MAE") {
  const InvDepthMap gt = from_depths({1, 4}, 2, 1);
  const InvDepthMap est = from_depths({2, 4}, 2, 1);
  CHECK(mae(est, gt) == doctest::Approx(0.5));
}

TEST_CASE("hand-computed inverse MAE") {
  InvDepthMap gt(2, 1), est(2, 1);
  gt.set(0, 0, 1.0f);
  gt.set(1, 0, 0.25f);
  est.set(0, 0, 0.5f);
  est.set(1, 0, 0.25f);
  CHECK(imae(est, gt) == doctest::Approx(0.25));
}

TEST_CASE("metrics only use pixels valid in the ground truth") {
  InvDepthMap gt(3, 1), est(3, 1);
  gt.set(0, 0, 0.5f);
  est.set(0, 0, 0.5f);
  est.set(1, 0, 0.1f);  // no ground truth here; ignored
  CHECK(mae(est, gt) == 0.0);
  CHECK(error_rate(est, gt, kGeom) == 0.0);
}

TEST_CASE("no valid pixels is an error") {
  const InvDepthMap empty(3, 3);
  const InvDepthMap est = from_depths(std::vector<double>(9, 2.0), 3, 3);
  CHECK_THROWS_AS(mae(est, empty), NoDataError);
  CHECK_THROWS_AS(imae(est, empty), NoDataError);
  CHECK_THROWS_AS(error_rate(est, empty, kGeom), NoDataError);
  CHECK_THROWS_AS(mae(est, from_depths({1, 1, 1, 1}, 2, 2)), DimensionError);
}

TEST_CASE("a single bucket reproduces the plain MAE") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> depth(1.0, 60.0);
  std::vector<double> gt_d(24), est_d(24);
  for (size_t i = 0; i < 24; ++i) {
    gt_d[i] = depth(rng);
    est_d[i] = depth(rng);
  }
  const InvDepthMap gt = from_depths(gt_d, 6, 4);
  const InvDepthMap est = from_depths(est_d, 6, 4);
  const auto buckets = range_bucketed_mae(est, gt, {0.0, 100.0});
  REQUIRE(buckets.size() == 1);
  CHECK(buckets[0].count == 24);
  CHECK(*buckets[0].mae_m == doctest::Approx(mae(est, gt)));
}

TEST_CASE("pixels land in their own depth bucket") {
  const InvDepthMap gt = from_depths({5.0, 50.0}, 2, 1);
  const InvDepthMap est = from_depths({6.0, 52.0}, 2, 1);
  const auto buckets = range_bucketed_mae(est, gt, {0.0, 40.0, 80.0});
  REQUIRE(buckets.size() == 2);
  CHECK(buckets[0].count == 1);
  CHECK(*buckets[0].mae_m == doctest::Approx(1.0));
  CHECK(buckets[1].count == 1);
  CHECK(*buckets[1].mae_m == doctest::Approx(2.0));
  const auto sparse = range_bucketed_mae(est, gt, {100.0, 200.0});
  CHECK(sparse[0].count == 0);
  CHECK(!sparse[0].mae_m.has_value());
}

TEST_CASE("disparity rounding error grows with the square of the depth") {
  // A rounding baseline: true disparity rounded to integer pixels, converted
  // back to depth. Its bucketed MAE follows depth^2/(f b) while an estimator
  // that keeps the true values is exact.
  const double fb = 100.0;
  std::mt19937 rng(17);
  const int w = 64, h = 16;
  InvDepthMap gt(w, h), rounded(w, h);
  std::uniform_real_distribution<double> depth(5.0, 80.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double z = depth(rng);
      gt.set(x, y, static_cast<float>(1.0 / z));
      const double disp = std::max(1.0, std::round(fb / z));
      rounded.set(x, y, static_cast<float>(disp / fb));
    }
  }
  const auto buckets = range_bucketed_mae(rounded, gt, {5.0, 20.0, 40.0, 80.0});
  REQUIRE(buckets.size() == 3);
  // Expected MAE of a +-0.5 px uniform quantization error is about
  // 0.25 * depth^2 / (f b) at the bucket center.
  for (const RangeBucket& b : buckets) {
    REQUIRE(b.mae_m.has_value());
    const double center = 0.5 * (b.lower_m + b.upper_m);
    const double law = 0.25 * center * center / fb;
    CHECK(*b.mae_m > 0.2 * law);
    CHECK(*b.mae_m < 5.0 * law);
  }
  // And it grows steeply with range.
  CHECK(*buckets[2].mae_m > 4.0 * *buckets[0].mae_m);
}

TEST_CASE("metrics are invariant under joint pixel permutation") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> depth(1.0, 50.0);
  std::vector<double> gt_d(30), est_d(30);
  for (size_t i = 0; i < 30; ++i) {
    gt_d[i] = depth(rng);
    est_d[i] = depth(rng);
  }
  std::vector<size_t> perm(30);
  for (size_t i = 0; i < 30; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> gt_p(30), est_p(30);
  for (size_t i = 0; i < 30; ++i) {
    gt_p[i] = gt_d[perm[i]];
    est_p[i] = est_d[perm[i]];
  }
  const InvDepthMap gt = from_depths(gt_d, 6, 5), est = from_depths(est_d, 6, 5);
  const InvDepthMap gtp = from_depths(gt_p, 6, 5), estp = from_depths(est_p, 6, 5);
  CHECK(mae(est, gt) == doctest::Approx(mae(estp, gtp)).epsilon(1e-12));
  CHECK(imae(est, gt) == doctest::Approx(imae(estp, gtp)).epsilon(1e-12));
  CHECK(error_rate(est, gt, kGeom) == error_rate(estp, gtp, kGeom));
}
