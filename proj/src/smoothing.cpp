#include "sdc/smoothing.hpp"

#include <cmath>

#include "sdc/parallel.hpp"

namespace sdc {

BadtField derive_badt(const InvDepthMap& inv_depth, const GroundMask& ground,
                      double depth_jump) {
  const int w = inv_depth.width();
  const int h = inv_depth.height();
  if (!inv_depth.is_dense())
    throw DomainError("B-ADT derivation requires a dense inverse depth map");
  if (ground.width() != w || ground.height() != h)
    throw DimensionError("ground mask size differs from depth map");

  BadtField badt{Grid<uint8_t>(w, h, uint8_t{1}), Grid<uint8_t>(w, h, uint8_t{1})};
  const auto depth = [&](int x, int y) {
    return 1.0 / static_cast<double>(*inv_depth.at(x, y));
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (ground(x, y)) continue;  // identity tensor on the ground
      const double d0 = depth(x, y);
      if (x + 1 < w && std::abs(depth(x + 1, y) - d0) > depth_jump)
        badt.keep_x(x, y) = 0;
      if (y + 1 < h && std::abs(depth(x, y + 1) - d0) > depth_jump)
        badt.keep_y(x, y) = 0;
    }
  }
  return badt;
}

namespace {

constexpr double kDefaultStep = 0.28867513459481287;  // 1/sqrt(12)

struct Fields {
  int w, h;
  Grid<double> u, ubar;
  Grid<double> v0, v1, vb0, vb1;
  Grid<double> px, py;
  Grid<double> q00, q01, q10, q11;
  Grid<double> weight, data;
  Grid<double> gx, gy;  // tensor components as doubles

  Fields(int width, int height)
      : w(width), h(height),
        u(width, height, 0.0), ubar(width, height, 0.0),
        v0(width, height, 0.0), v1(width, height, 0.0),
        vb0(width, height, 0.0), vb1(width, height, 0.0),
        px(width, height, 0.0), py(width, height, 0.0),
        q00(width, height, 0.0), q01(width, height, 0.0),
        q10(width, height, 0.0), q11(width, height, 0.0),
        weight(width, height, 0.0), data(width, height, 0.0),
        gx(width, height, 0.0), gy(width, height, 0.0) {}

  // Forward difference, zero on the far border.
  double dxf(const Grid<double>& f, int x, int y) const {
    return x + 1 < w ? f(x + 1, y) - f(x, y) : 0.0;
  }
  double dyf(const Grid<double>& f, int x, int y) const {
    return y + 1 < h ? f(x, y + 1) - f(x, y) : 0.0;
  }
  // Adjoint of the forward difference: (grad^T p)(x) = p(x-1) - p(x) with the
  // border conventions matching dxf/dyf exactly.
  double dxt(const Grid<double>& f, int x, int y) const {
    double r = 0.0;
    if (x >= 1) r += f(x - 1, y);
    if (x + 1 < w) r -= f(x, y);
    return r;
  }
  double dyt(const Grid<double>& f, int x, int y) const {
    double r = 0.0;
    if (y >= 1) r += f(x, y - 1);
    if (y + 1 < h) r -= f(x, y);
    return r;
  }
};

}  // namespace

TgvSolution tgv_smooth_full(const InvDepthMap& inv_depth, const BadtField& badt,
                            const TgvParams& params) {
  const int w = inv_depth.width();
  const int h = inv_depth.height();
  if (!inv_depth.is_dense())
    throw DomainError("smoothing requires a dense inverse depth map");
  if (badt.width() != w || badt.height() != h)
    throw DimensionError("tensor field size differs from depth map");

  if (params.lambda_a < 0.0 || params.lambda_b < 0.0 || params.iterations < 0 ||
      !(params.weight_min > 0.0) || !(params.weight_max >= params.weight_min))
    throw DomainError("invalid smoothing parameters");
  // Step sizes must satisfy the product bound of the primal-dual scheme with
  // the operator norm bound L^2 = 12.
  const double sigma0 = params.step_dual > 0.0 ? params.step_dual : kDefaultStep;
  const double tau0 = params.step_primal > 0.0 ? params.step_primal : kDefaultStep;
  if (sigma0 * tau0 > 1.0 / 12.0 + 1e-12)
    throw DomainError("primal-dual step sizes violate the stability bound");

  Fields f(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double d = static_cast<double>(*inv_depth.at(x, y));
      if (!(d > 0.0)) throw DomainError("inverse depth must be > 0 for smoothing");
      f.data(x, y) = d;
      f.u(x, y) = d;
      f.ubar(x, y) = d;
      f.weight(x, y) = std::clamp(std::pow(d, params.weight_exponent),
                                  params.weight_min, params.weight_max);
      f.gx(x, y) = badt.keep_x(x, y) ? 1.0 : 0.0;
      f.gy(x, y) = badt.keep_y(x, y) ? 1.0 : 0.0;
    }
  }

  const double sigma = sigma0;
  const double tau = tau0;
  const long n = static_cast<long>(w) * h;

  for (int it = 0; it < params.iterations; ++it) {
    // Dual ascent on p (first-order term) and q (second-order term).
    parallel_for(n, params.workers, [&](long i) {
      const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
      const double ax = f.gx(x, y) * (f.dxf(f.ubar, x, y) - f.vb0(x, y));
      const double ay = f.gy(x, y) * (f.dyf(f.ubar, x, y) - f.vb1(x, y));
      double npx = f.px(x, y) + sigma * ax;
      double npy = f.py(x, y) + sigma * ay;
      const double pn = std::sqrt(npx * npx + npy * npy);
      if (pn > params.lambda_a) {
        const double s = params.lambda_a / pn;
        npx *= s;
        npy *= s;
      }
      f.px(x, y) = npx;
      f.py(x, y) = npy;

      double n00 = f.q00(x, y) + sigma * f.dxf(f.vb0, x, y);
      double n01 = f.q01(x, y) + sigma * f.dyf(f.vb0, x, y);
      double n10 = f.q10(x, y) + sigma * f.dxf(f.vb1, x, y);
      double n11 = f.q11(x, y) + sigma * f.dyf(f.vb1, x, y);
      const double qn = std::sqrt(n00 * n00 + n01 * n01 + n10 * n10 + n11 * n11);
      if (qn > params.lambda_b) {
        const double s = params.lambda_b / qn;
        n00 *= s;
        n01 *= s;
        n10 *= s;
        n11 *= s;
      }
      f.q00(x, y) = n00;
      f.q01(x, y) = n01;
      f.q10(x, y) = n10;
      f.q11(x, y) = n11;
    });

    // Primal descent on u (with the quadratic data prox) and v, plus the
    // overrelaxation step.
    parallel_for(n, params.workers, [&](long i) {
      const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
      // grad^T applied to the tensor-scaled p. gx/gy are pointwise diagonal
      // factors, so (G p) components are gx*px and gy*py.
      double ktu = 0.0;
      if (x >= 1) ktu += f.gx(x - 1, y) * f.px(x - 1, y);
      if (x + 1 < w) ktu -= f.gx(x, y) * f.px(x, y);
      if (y >= 1) ktu += f.gy(x, y - 1) * f.py(x, y - 1);
      if (y + 1 < h) ktu -= f.gy(x, y) * f.py(x, y);

      // Prox of w (u - d)^2, written so that u == d is an exact fixed point.
      const double wgt = f.weight(x, y);
      const double utilde = f.u(x, y) - tau * ktu;
      const double gain = 2.0 * tau * wgt / (1.0 + 2.0 * tau * wgt);
      const double unew = utilde + gain * (f.data(x, y) - utilde);
      f.ubar(x, y) = 2.0 * unew - f.u(x, y);
      f.u(x, y) = unew;

      const double v0new =
          f.v0(x, y) + tau * (f.gx(x, y) * f.px(x, y) - f.dxt(f.q00, x, y) -
                              f.dyt(f.q01, x, y));
      const double v1new =
          f.v1(x, y) + tau * (f.gy(x, y) * f.py(x, y) - f.dxt(f.q10, x, y) -
                              f.dyt(f.q11, x, y));
      f.vb0(x, y) = 2.0 * v0new - f.v0(x, y);
      f.vb1(x, y) = 2.0 * v1new - f.v1(x, y);
      f.v0(x, y) = v0new;
      f.v1(x, y) = v1new;
    });
  }

  InvDepthMap out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out.set(x, y, static_cast<float>(std::max(f.u(x, y), 1e-9)));
  return TgvSolution{std::move(out), std::move(f.u), {std::move(f.v0), std::move(f.v1)}};
}

}  // namespace sdc
