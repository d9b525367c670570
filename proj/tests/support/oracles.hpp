#pragma once

// Independent reference implementations used as test oracles. These
// deliberately re-derive every quantity with plain loops and their own
// conventions so they share no code with the library paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "sdc/candidates.hpp"
#include "sdc/cost.hpp"
#include "sdc/smoothing.hpp"
#include "sdc/ssm.hpp"

namespace oracle {

// --- Naive stereo matching cost (photometric + census + gradient, truncated
// --- sums over the window), straight from the definitions.

inline double intensity_or_zero(const sdc::ImageGrid& img, int x, int y) {
  return img.contains(x, y) ? img(x, y) : 0.0;
}

inline std::vector<int> census_bits(const sdc::ImageGrid& img, int x, int y,
                                    int radius) {
  std::vector<int> bits;
  const double center = img(x, y);
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx == 0 && dy == 0) continue;
      bits.push_back(intensity_or_zero(img, x + dx, y + dy) < center ? 1 : 0);
    }
  return bits;
}

inline std::optional<std::pair<int, int>> naive_warp(
    int x0, int x1, double d, const sdc::StereoGeometry& g) {
  if (g.is_rectified()) {
    const auto& r = g.rectified_stereo();
    return std::make_pair(
        static_cast<int>(std::floor(x0 - r.focal * r.baseline * d)), x1);
  }
  if (!(d > 0.0)) return std::nullopt;
  const auto& m = g.motion_stereo();
  const double fx = m.intrinsics.fx, fy = m.intrinsics.fy;
  const double cx = m.intrinsics.cx, cy = m.intrinsics.cy;
  // Back-project at depth 1/d using explicit scalar arithmetic.
  const double z = 1.0 / d;
  const double px = (x0 - cx) / fx * z;
  const double py = (x1 - cy) / fy * z;
  double q[3];
  for (int r = 0; r < 3; ++r)
    q[r] = m.rotation(r, 0) * px + m.rotation(r, 1) * py + m.rotation(r, 2) * z +
           m.translation(r);
  if (q[2] <= 0.0) return std::nullopt;
  return std::make_pair(
      static_cast<int>(std::floor((fx * q[0] + cx * q[2]) / q[2])),
      static_cast<int>(std::floor((fy * q[1] + cy * q[2]) / q[2])));
}

inline std::pair<double, double> naive_gradient(const sdc::ImageGrid& img, int x,
                                                int y) {
  const double gx = x + 1 < img.width() ? img(x + 1, y) - img(x, y) : 0.0;
  const double gy = y + 1 < img.height() ? img(x, y + 1) - img(x, y) : 0.0;
  return {gx, gy};
}

inline double naive_stereo_cost(int x0, int x1, double d,
                                const sdc::ImageGrid& img1,
                                const sdc::ImageGrid& img2,
                                const sdc::StereoGeometry& g,
                                const sdc::CostParams& p) {
  const int side = 2 * p.window_radius + 1;
  const int count = side * side;
  const double full = count * p.trunc_photo + p.alpha_census * p.trunc_census +
                      p.alpha_gradient * count * p.trunc_gradient;
  const auto warped = naive_warp(x0, x1, d, g);
  if (!warped || !img2.contains(warped->first, warped->second)) return full;

  double photo = 0.0, grad = 0.0;
  for (int dy = -p.window_radius; dy <= p.window_radius; ++dy) {
    for (int dx = -p.window_radius; dx <= p.window_radius; ++dx) {
      const int ax = x0 + dx, ay = x1 + dy;
      const int bx = warped->first + dx, by = warped->second + dy;
      if (!img1.contains(ax, ay) || !img2.contains(bx, by)) {
        photo += p.trunc_photo;
        grad += p.trunc_gradient;
        continue;
      }
      photo += std::min(std::abs(static_cast<double>(img1(ax, ay)) - img2(bx, by)),
                        p.trunc_photo);
      const auto [g1x, g1y] = naive_gradient(img1, ax, ay);
      const auto [g2x, g2y] = naive_gradient(img2, bx, by);
      grad += std::min(std::hypot(g1x - g2x, g1y - g2y), p.trunc_gradient);
    }
  }
  const std::vector<int> c1 = census_bits(img1, x0, x1, p.window_radius);
  const std::vector<int> c2 =
      census_bits(img2, warped->first, warped->second, p.window_radius);
  int ham = 0;
  for (size_t i = 0; i < c1.size(); ++i) ham += c1[i] != c2[i];
  const double census =
      std::min(static_cast<double>(ham) / static_cast<double>(c1.size()),
               p.trunc_census);
  return photo + p.alpha_census * census + p.alpha_gradient * grad;
}

// --- MRF energy of a labeling over a candidate map (truncated-linear
// --- pairwise on right/down edges) and its exhaustive minimization.

inline double ssm_energy(const sdc::CandidateMap& map,
                         const std::vector<int>& labels, double lambda,
                         double trunc) {
  const int w = map.width(), h = map.height();
  double e = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto& set = map.at(x, y);
      const sdc::Candidate& c = set[static_cast<size_t>(labels[y * w + x])];
      e += c.unary_cost;
      if (x + 1 < w) {
        const auto& right = map.at(x + 1, y);
        const double other =
            right[static_cast<size_t>(labels[y * w + x + 1])].inv_depth;
        e += lambda * std::min(std::abs(static_cast<double>(c.inv_depth) - other),
                               trunc);
      }
      if (y + 1 < h) {
        const auto& down = map.at(x, y + 1);
        const double other =
            down[static_cast<size_t>(labels[(y + 1) * w + x])].inv_depth;
        e += lambda * std::min(std::abs(static_cast<double>(c.inv_depth) - other),
                               trunc);
      }
    }
  }
  return e;
}

inline std::pair<std::vector<int>, double> ssm_enumerate(
    const sdc::CandidateMap& map, double lambda, double trunc) {
  const int w = map.width(), h = map.height();
  const int n = w * h;
  std::vector<int> counts(static_cast<size_t>(n));
  long total = 1;
  for (int i = 0; i < n; ++i) {
    counts[static_cast<size_t>(i)] = static_cast<int>(map.at(i % w, i / w).size());
    total *= counts[static_cast<size_t>(i)];
  }
  std::vector<int> labels(static_cast<size_t>(n), 0), best;
  double best_energy = std::numeric_limits<double>::infinity();
  for (long code = 0; code < total; ++code) {
    long rest = code;
    for (int i = 0; i < n; ++i) {
      labels[static_cast<size_t>(i)] = static_cast<int>(rest % counts[static_cast<size_t>(i)]);
      rest /= counts[static_cast<size_t>(i)];
    }
    const double e = ssm_energy(map, labels, lambda, trunc);
    if (e < best_energy) {
      best_energy = e;
      best = labels;
    }
  }
  return {best, best_energy};
}

// --- Direct evaluation of the tensor-weighted second-order energy.

inline double tgv_energy(const sdc::Grid<double>& u,
                         const sdc::Grid<double>& v0,
                         const sdc::Grid<double>& v1,
                         const sdc::InvDepthMap& data, const sdc::BadtField& badt,
                         const sdc::TgvParams& p) {
  const int w = u.width(), h = u.height();
  double e = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double d = *data.at(x, y);
      const double wgt =
          std::clamp(std::pow(d, p.weight_exponent), p.weight_min, p.weight_max);
      const double r = u(x, y) - d;
      e += wgt * r * r;

      const double ux = x + 1 < w ? u(x + 1, y) - u(x, y) : 0.0;
      const double uy = y + 1 < h ? u(x, y + 1) - u(x, y) : 0.0;
      const double ax = badt.keep_x(x, y) ? ux - v0(x, y) : 0.0;
      const double ay = badt.keep_y(x, y) ? uy - v1(x, y) : 0.0;
      e += p.lambda_a * std::hypot(ax, ay);

      const double j00 = x + 1 < w ? v0(x + 1, y) - v0(x, y) : 0.0;
      const double j01 = y + 1 < h ? v0(x, y + 1) - v0(x, y) : 0.0;
      const double j10 = x + 1 < w ? v1(x + 1, y) - v1(x, y) : 0.0;
      const double j11 = y + 1 < h ? v1(x, y + 1) - v1(x, y) : 0.0;
      e += p.lambda_b * std::sqrt(j00 * j00 + j01 * j01 + j10 * j10 + j11 * j11);
    }
  }
  return e;
}

inline double tgv_energy_of_input(const sdc::InvDepthMap& data,
                                  const sdc::BadtField& badt,
                                  const sdc::TgvParams& p) {
  const int w = data.width(), h = data.height();
  sdc::Grid<double> u(w, h, 0.0), zero0(w, h, 0.0), zero1(w, h, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) u(x, y) = *data.at(x, y);
  return tgv_energy(u, zero0, zero1, data, badt, p);
}

// --- Misc helpers.

inline sdc::ImageGrid random_image(int w, int h, uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> dist(0.0f, 1.0f);
  sdc::Grid<float> g(w, h, 0.0f);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) g(x, y) = dist(rng);
  return sdc::ImageGrid(std::move(g));
}

}  // namespace oracle
