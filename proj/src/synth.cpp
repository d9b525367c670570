#include "sdc/synth.hpp"

#include <cmath>
#include <numbers>

namespace sdc {

namespace {

uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double hash_unit(uint64_t a, uint64_t b, uint64_t c) {
  const uint64_t h = mix64(a ^ mix64(b ^ mix64(c)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

/// Seeded band-limited value noise in [0, 1]: bilinear lattice interpolation
/// summed over octaves.
double value_noise(double px, double py, uint64_t stream, int octaves,
                   double period) {
  double sum = 0.0;
  double amp = 1.0;
  double total = 0.0;
  double freq = 1.0 / period;
  for (int o = 0; o < octaves; ++o) {
    const double fx = px * freq, fy = py * freq;
    const auto ix = static_cast<int64_t>(std::floor(fx));
    const auto iy = static_cast<int64_t>(std::floor(fy));
    const double tx = smoothstep(fx - static_cast<double>(ix));
    const double ty = smoothstep(fy - static_cast<double>(iy));
    const uint64_t os = stream ^ (static_cast<uint64_t>(o + 1) << 56);
    const double v00 = hash_unit(static_cast<uint64_t>(ix), static_cast<uint64_t>(iy), os);
    const double v10 = hash_unit(static_cast<uint64_t>(ix + 1), static_cast<uint64_t>(iy), os);
    const double v01 = hash_unit(static_cast<uint64_t>(ix), static_cast<uint64_t>(iy + 1), os);
    const double v11 = hash_unit(static_cast<uint64_t>(ix + 1), static_cast<uint64_t>(iy + 1), os);
    const double v = (v00 * (1 - tx) + v10 * tx) * (1 - ty) +
                     (v01 * (1 - tx) + v11 * tx) * ty;
    sum += amp * v;
    total += amp;
    amp *= 0.55;
    freq *= 2.0;
  }
  return sum / total;
}

double gaussian(uint64_t a, uint64_t b, uint64_t stream) {
  // Box-Muller on deterministic uniforms.
  const double u1 = std::max(hash_unit(a, b, stream), 1e-12);
  const double u2 = hash_unit(a, b, stream ^ 0x5bf0a8b1ull);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

void validate(const SceneSpec& spec) {
  if (spec.width < 2 || spec.height < 2)
    throw ConfigError("scene image must be at least 2x2");
  if (!(spec.focal > 0.0) || !(spec.baseline > 0.0))
    throw ConfigError("scene requires focal > 0 and baseline > 0");
  if (!(spec.backdrop_depth_m > 0.0))
    throw ConfigError("backdrop depth must be > 0");
  if (spec.ground_enabled && !(spec.ground_height_m > 0.0))
    throw ConfigError("ground height must be > 0");
  double prev = 0.0;
  for (const SceneRect& r : spec.rects) {
    if (!(r.depth_m > 0.0)) throw ConfigError("rectangle depth must be > 0");
    if (r.depth_m < prev)
      throw ConfigError("rectangles must be sorted nearest-first");
    prev = r.depth_m;
    if (r.x0 < 0 || r.y0 < 0 || r.x1 > spec.width || r.y1 > spec.height ||
        r.x0 >= r.x1 || r.y0 >= r.y1)
      throw ConfigError("rectangle outside image bounds");
  }
}

}  // namespace

Eigen::Matrix3d ScenePerturbation::rotation_matrix() const {
  if (rotation_deg == 0.0) return Eigen::Matrix3d::Identity();
  const double norm = rotation_axis.norm();
  if (norm < 1e-12) throw DomainError("perturbation axis must be nonzero");
  return Eigen::AngleAxisd(rotation_deg * std::numbers::pi / 180.0,
                           rotation_axis / norm)
      .toRotationMatrix();
}

Scene render_scene(const SceneSpec& spec, uint64_t seed) {
  validate(spec);
  const int w = spec.width, h = spec.height;
  const CameraIntrinsics k = spec.intrinsics();

  // Nearest surface per pixel; ids: 0 backdrop, 1 ground, 2+i rectangles.
  Grid<double> depth(w, h, spec.backdrop_depth_m);
  Grid<int32_t> surface(w, h, int32_t{0});
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (spec.ground_enabled) {
        // Pixel-center ray; back-projected ground samples then lie exactly
        // on the plane y = ground_height.
        const double dir_y = (y + 0.5 - k.cy) / k.fy;
        if (dir_y > 1e-9) {
          const double z = spec.ground_height_m / dir_y;
          if (z > 0.0 && z < depth(x, y)) {
            depth(x, y) = z;
            surface(x, y) = 1;
          }
        }
      }
      for (size_t i = 0; i < spec.rects.size(); ++i) {
        const SceneRect& r = spec.rects[i];
        if (x >= r.x0 && x < r.x1 && y >= r.y0 && y < r.y1 &&
            r.depth_m < depth(x, y)) {
          depth(x, y) = r.depth_m;
          surface(x, y) = static_cast<int32_t>(i) + 2;
        }
      }
    }
  }

  // Image 1: per-surface texture streams keep census windows discriminative
  // across boundaries.
  const auto texture = [&](double px, double py, int32_t id, uint64_t stream) {
    const double n = value_noise(px, py, stream ^ mix64(static_cast<uint64_t>(id) + 17),
                                 spec.texture_octaves, spec.texture_period_px);
    const double v = 0.5 + spec.texture_amplitude * (n - 0.5);
    return std::clamp(v, 0.0, 1.0);
  };
  const uint64_t stream1 = mix64(seed ^ (static_cast<uint64_t>(spec.texture_seed) << 32));
  Grid<float> img1(w, h, 0.0f);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img1(x, y) = static_cast<float>(texture(x, y, surface(x, y), stream1));

  // Image 2 by forward warping with a z-buffer; dis-occluded pixels receive
  // an independent stream.
  const double fb = spec.focal * spec.baseline;
  Grid<double> zbuf(w, h, std::numeric_limits<double>::infinity());
  Grid<float> img2(w, h, 0.0f);
  Grid<uint8_t> filled(w, h, uint8_t{0});
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double z = depth(x, y);
      // Warp with the stored (float) inverse depth so the splat column is
      // bit-identical to warp_rectified applied to the map value.
      const double d = static_cast<double>(static_cast<float>(1.0 / z));
      const int x2 = static_cast<int>(std::floor(x - fb * d + kFloorGuard));
      if (x2 < 0 || x2 >= w) continue;
      if (z < zbuf(x2, y)) {
        zbuf(x2, y) = z;
        img2(x2, y) = img1(x, y);
        filled(x2, y) = 1;
      }
    }
  }
  const uint64_t occl_stream = mix64(stream1 ^ 0xa5a5a5a5ull);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (!filled(x, y))
        img2(x, y) = static_cast<float>(texture(x, y, -1, occl_stream));

  if (spec.noise_stddev > 0.0) {
    const uint64_t n1 = mix64(seed ^ 0x1111ull), n2 = mix64(seed ^ 0x2222ull);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        img1(x, y) = static_cast<float>(std::clamp(
            img1(x, y) + spec.noise_stddev * gaussian(x, y, n1), 0.0, 1.0));
        img2(x, y) = static_cast<float>(std::clamp(
            img2(x, y) + spec.noise_stddev * gaussian(x, y, n2), 0.0, 1.0));
      }
    }
  }

  InvDepthMap gt(w, h);
  PointCloud points;
  points.reserve(static_cast<size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double z = depth(x, y);
      gt.set(x, y, static_cast<float>(1.0 / z));
      // Pixel centers: re-projection lands strictly inside the pixel, so a
      // zero-perturbation round trip reproduces the map exactly.
      points.emplace_back((x + 0.5 - k.cx) / k.fx * z, (y + 0.5 - k.cy) / k.fy * z, z);
    }
  }
  return Scene{ImageGrid(std::move(img1)), ImageGrid(std::move(img2)),
               std::move(gt), std::move(points)};
}

PointCloud sample_scanlines(const InvDepthMap& gt, const CameraIntrinsics& k,
                            int n_lines, double span_deg) {
  if (n_lines < 1) throw DomainError("scanline count must be >= 1");
  if (!(span_deg >= 0.0) || span_deg >= 180.0)
    throw DomainError("scan span must lie in [0, 180) degrees");
  const double half = span_deg / 2.0 * std::numbers::pi / 180.0;
  const double v_lo = std::clamp(k.cy - k.fy * std::tan(half), 0.0,
                                 static_cast<double>(gt.height() - 1));
  const double v_hi = std::clamp(k.cy + k.fy * std::tan(half), 0.0,
                                 static_cast<double>(gt.height() - 1));

  std::vector<int> rows;
  for (int i = 0; i < n_lines; ++i) {
    const double t = n_lines == 1 ? 0.5 : static_cast<double>(i) / (n_lines - 1);
    const int row = static_cast<int>(std::lround(v_lo + t * (v_hi - v_lo)));
    if (rows.empty() || rows.back() != row) rows.push_back(row);
  }

  PointCloud out;
  for (int row : rows) {
    for (int x = 0; x < gt.width(); ++x) {
      const std::optional<float> d = gt.at(x, row);
      if (!d) continue;
      const double z = 1.0 / static_cast<double>(*d);
      out.emplace_back((x + 0.5 - k.cx) / k.fx * z, (row + 0.5 - k.cy) / k.fy * z, z);
    }
  }
  return out;
}

InvDepthMap perturb_and_project(const PointCloud& points,
                                const CameraIntrinsics& k,
                                const ScenePerturbation& perturbation, int width,
                                int height, const RectifiedStereo& g) {
  if (std::abs(perturbation.rotation_deg) >= 90.0)
    throw DomainError("perturbation angle must be below 90 degrees");
  const Eigen::Matrix3d r = perturbation.rotation_matrix();
  const std::vector<ProjectedPoint> projected =
      project_points(points, k, r, perturbation.translation, width, height, g);
  return sparse_map_from_projection(projected, width, height);
}

}  // namespace sdc
