#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sdc/cost.hpp"
#include "support/oracles.hpp"

using namespace sdc;

TEST_CASE("census of a constant image is all zero") {
  // Interior pixels see only equal neighbors. Border pixels of a nonzero
  // constant image compare against out-of-image intensity 0, so only the
  // zero image is bit-free everywhere.
  const ImageGrid img(9, 7, 0.4f);
  const CensusGrid census = census_transform(img, 2);
  CHECK(census.bit_count() == 24);
  for (int y = 2; y < 5; ++y)
    for (int x = 2; x < 7; ++x)
      for (uint64_t wword : census.at(x, y)) CHECK(wword == 0u);

  const CensusGrid zero = census_transform(ImageGrid(9, 7, 0.0f), 2);
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 9; ++x)
      for (uint64_t wword : zero.at(x, y)) CHECK(wword == 0u);
}

TEST_CASE("census bits of a 3x3 ramp patch") {
  Grid<float> g(3, 3, 0.0f);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) g(x, y) = static_cast<float>(y * 3 + x + 1) / 9.0f;
  const CensusGrid census = census_transform(ImageGrid(std::move(g)), 1);
  // Neighbors of the center in row-major order: 1,2,3,4,6,7,8,9 vs center 5.
  const std::span<const uint64_t> bits = census.at(1, 1);
  CHECK(bits[0] == 0b00001111u);
}

TEST_CASE("census self distance is zero everywhere") {
  const ImageGrid img = oracle::random_image(20, 15, 99);
  const CensusGrid census = census_transform(img, 3);
  for (int y = 0; y < 15; ++y)
    for (int x = 0; x < 20; ++x)
      CHECK(CensusGrid::hamming(census.at(x, y), census.at(x, y)) == 0);
}

namespace {

CostContext make_context(const ImageGrid& a, const ImageGrid& b, double f,
                         double baseline, const CostParams& p) {
  return CostContext(a, b, StereoGeometry::rectified(f, baseline), p);
}

}  // namespace

TEST_CASE("identical images at zero inverse depth cost nothing") {
  const ImageGrid img = oracle::random_image(32, 24, 4);
  CostParams p;
  p.window_radius = 3;
  const CostContext ctx = make_context(img, img, 100.0, 0.5, p);
  for (int x = 10; x < 22; ++x) CHECK(ctx.cost({x, 12}, 0.0) == 0.0);
}

TEST_CASE("an exact shifted correspondence costs nothing") {
  const int w = 48, h = 20, shift = 10;
  const ImageGrid base = oracle::random_image(w + shift, h, 8);
  Grid<float> left(w, h, 0.0f), right(w, h, 0.0f);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      left(x, y) = base(x, y);           // I1
      right(x, y) = base(x + shift, y);  // I2 = I1 shifted left by `shift`
    }
  CostParams p;
  p.window_radius = 3;
  // f*b*d = shift exactly at d = 0.2.
  const CostContext ctx = make_context(ImageGrid(std::move(left)),
                                       ImageGrid(std::move(right)), 100.0, 0.5, p);
  for (int x = shift + 5; x < w - 5; ++x) {
    for (int y = 5; y < h - 5; ++y) CHECK(ctx.cost({x, y}, 0.2) == 0.0);
  }
}

TEST_CASE("matches the straightforward triple-loop evaluation") {
  const ImageGrid img1 = oracle::random_image(32, 32, 21);
  const ImageGrid img2 = oracle::random_image(32, 32, 22);
  CostParams p;
  p.window_radius = 5;
  const StereoGeometry g = StereoGeometry::rectified(64.0, 0.5);
  const CostContext ctx(img1, img2, g, p);

  const int xs[5] = {6, 11, 16, 24, 29};
  const double ds[3] = {0.0, 0.13, 0.31};
  for (int x : xs) {
    for (double d : ds) {
      const double mine = ctx.cost({x, 16}, d);
      const double ref = oracle::naive_stereo_cost(x, 16, d, img1, img2, g, p);
      // Gradients are stored as floats, so the reference (all-double) sums
      // can differ by a few float ulps per window pixel.
      CHECK(mine == doctest::Approx(ref).epsilon(1e-6));
    }
  }
}

TEST_CASE("the free function and the context agree") {
  const ImageGrid img1 = oracle::random_image(28, 28, 31);
  const ImageGrid img2 = oracle::random_image(28, 28, 32);
  CostParams p;
  p.window_radius = 2;
  const StereoGeometry g = StereoGeometry::rectified(40.0, 0.5);
  const CensusGrid c1 = census_transform(img1, p.window_radius);
  const CensusGrid c2 = census_transform(img2, p.window_radius);
  const GradientField g1 = image_gradient(img1);
  const GradientField g2 = image_gradient(img2);
  const CostContext ctx(img1, img2, g, p);
  std::mt19937 rng(33);
  std::uniform_int_distribution<int> coord(0, 27);
  std::uniform_real_distribution<double> depth(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector2i x(coord(rng), coord(rng));
    const double d = depth(rng);
    CHECK(stereo_cost(x, d, img1, img2, c1, c2, g1, g2, g, p) == ctx.cost(x, d));
  }
}

TEST_CASE("cost is bounded by the truncation maximum") {
  const ImageGrid img1 = oracle::random_image(30, 30, 41);
  const ImageGrid img2 = oracle::random_image(30, 30, 42);
  CostParams p;
  p.window_radius = 2;
  p.alpha_gradient = 1.7;  // the bound must scale with the weights
  const CostContext ctx = make_context(img1, img2, 50.0, 0.4, p);
  std::mt19937 rng(43);
  std::uniform_int_distribution<int> coord(0, 29);
  std::uniform_real_distribution<double> depth(0.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    const double c = ctx.cost({coord(rng), coord(rng)}, depth(rng));
    CHECK(c >= 0.0);
    CHECK(c <= p.max_total() + 1e-12);
  }
  // A warp far outside image 2 saturates at the maximum.
  CHECK(ctx.cost({0, 0}, 100.0) == p.max_total());
}

TEST_CASE("raising a truncation limit never lowers the cost") {
  const ImageGrid img1 = oracle::random_image(26, 26, 51);
  const ImageGrid img2 = oracle::random_image(26, 26, 52);
  std::mt19937 rng(53);
  std::uniform_int_distribution<int> coord(4, 21);
  std::uniform_real_distribution<double> depth(0.0, 0.5);
  CostParams lo;
  lo.window_radius = 2;
  lo.trunc_photo = 0.3;
  lo.trunc_census = 0.3;
  lo.trunc_gradient = 0.3;
  for (int which = 0; which < 3; ++which) {
    CostParams hi = lo;
    if (which == 0) hi.trunc_photo = 0.6;
    if (which == 1) hi.trunc_census = 0.6;
    if (which == 2) hi.trunc_gradient = 0.6;
    const CostContext a = make_context(img1, img2, 60.0, 0.5, lo);
    const CostContext b = make_context(img1, img2, 60.0, 0.5, hi);
    for (int i = 0; i < 200; ++i) {
      const Eigen::Vector2i x(coord(rng), coord(rng));
      const double d = depth(rng);
      CHECK(b.cost(x, d) >= a.cost(x, d) - 1e-12);
    }
  }
}
