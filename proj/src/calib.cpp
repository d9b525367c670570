#include "sdc/calib.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "sdc/parallel.hpp"

namespace sdc {

namespace {

uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

PointCloud subsample(const PointCloud& points, size_t cap, uint64_t seed) {
  if (points.size() <= cap) return points;
  // Partial Fisher-Yates over an index vector, deterministic in the seed.
  std::vector<size_t> idx(points.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  uint64_t state = mix64(seed);
  for (size_t i = 0; i < cap; ++i) {
    state = mix64(state);
    const size_t j = i + static_cast<size_t>(state % (idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  PointCloud out;
  out.reserve(cap);
  for (size_t i = 0; i < cap; ++i) out.push_back(points[idx[i]]);
  return out;
}

std::vector<double> axis_offsets(double half_range, double step) {
  if (!(step > 0.0)) throw DomainError("grid step must be > 0");
  const int k = static_cast<int>(std::floor(half_range / step + 1e-9));
  std::vector<double> offsets;
  for (int i = -k; i <= k; ++i) offsets.push_back(i * step);
  return offsets;
}

/// Cost planes per integer disparity shift. For rectified geometry the warp
/// of an integer pixel is x + floor(-f*b*d) in the same row, so the matching
/// cost of any (pixel, d) pair is a lookup into the plane of its shift.
class ShiftCostTable {
 public:
  ShiftCostTable(const CostContext& context, int width, int height)
      : context_(context), width_(width), height_(height) {}

  const Grid<double>& plane(int shift) {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = planes_.find(shift);
      if (it != planes_.end()) return *it->second;
    }
    auto built = std::make_shared<Grid<double>>(width_, height_, 0.0);
    for (int y = 0; y < height_; ++y)
      for (int x = 0; x < width_; ++x)
        (*built)(x, y) =
            context_.cost_at({x, y}, Eigen::Vector2i{x + shift, y});
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, inserted] = planes_.emplace(shift, std::move(built));
    return *it->second;
  }

 private:
  const CostContext& context_;
  int width_;
  int height_;
  std::mutex mutex_;
  std::map<int, std::shared_ptr<Grid<double>>> planes_;
};

}  // namespace

Eigen::Matrix3d compose_rotation(const Eigen::Matrix3d& initial,
                                 const Eigen::Vector3d& offsets_deg) {
  const double to_rad = std::numbers::pi / 180.0;
  return initial *
         (Eigen::AngleAxisd(offsets_deg.x() * to_rad, Eigen::Vector3d::UnitX()) *
          Eigen::AngleAxisd(offsets_deg.y() * to_rad, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(offsets_deg.z() * to_rad, Eigen::Vector3d::UnitZ()))
             .toRotationMatrix();
}

double background_cost(const CostContext& context, const Eigen::Vector2i& x,
                       double trunc) {
  return -std::min(context.cost(x, 0.0), trunc);
}

CalibResult calibrate(const PointCloud& points, const ImageGrid& img1,
                      const ImageGrid& img2, const RectifiedStereo& geometry,
                      const CameraIntrinsics& k, const Eigen::Matrix3d& r0,
                      const Eigen::Vector3d& t0, const CalibSearchGrid& grid,
                      const CalibOptions& options) {
  if (points.empty()) throw NoDataError("calibration requires a nonempty cloud");
  if (grid.refinement_levels < 0) throw DomainError("refinement levels must be >= 0");

  const PointCloud cloud =
      subsample(points, options.max_points, options.subsample_seed);
  const CostContext context(img1, img2,
                            StereoGeometry::rectified(geometry.focal,
                                                      geometry.baseline),
                            options.cost);
  const int w = img1.width(), hh = img1.height();
  ShiftCostTable table(context, w, hh);
  const double fb = geometry.focal * geometry.baseline;

  struct Eval {
    double match = 0.0;
    double background = 0.0;
    long projected = 0;
  };
  const auto evaluate = [&](const Eigen::Vector3d& rot_deg,
                            const Eigen::Vector3d& trans) {
    const Eigen::Matrix3d r = compose_rotation(r0, rot_deg);
    const std::vector<ProjectedPoint> proj =
        project_points(cloud, k, r, t0 + trans, w, hh, geometry);
    Eval e;
    e.projected = static_cast<long>(proj.size());
    for (const ProjectedPoint& p : proj) {
      const int shift = static_cast<int>(std::floor(-fb * p.inv_depth + kFloorGuard));
      e.match += table.plane(shift)(p.x0, p.x1);
      e.background += std::min(table.plane(0)(p.x0, p.x1),
                               options.trunc_background);
    }
    return e;
  };

  CalibResult result;
  Eigen::Vector3d center_rot = Eigen::Vector3d::Zero();
  Eigen::Vector3d center_trans = Eigen::Vector3d::Zero();
  double rot_half = grid.rot_half_range_deg;
  double rot_step = grid.rot_step_deg;
  double trans_half = grid.trans_half_range_m;
  double trans_step = grid.trans_step_m;
  bool found_any = false;

  for (int level = 0; level <= grid.refinement_levels; ++level) {
    const std::vector<double> rot_off = axis_offsets(rot_half, rot_step);
    const std::vector<double> trans_off = axis_offsets(trans_half, trans_step);
    const long nr = static_cast<long>(rot_off.size());
    const long nt = static_cast<long>(trans_off.size());
    const long total = nr * nr * nr * nt * nt * nt;

    std::vector<CalibCandidate> evaluated(static_cast<size_t>(total));
    parallel_for(total, options.workers, [&](long i) {
      long rest = i;
      const long tz = rest % nt; rest /= nt;
      const long ty = rest % nt; rest /= nt;
      const long tx = rest % nt; rest /= nt;
      const long rz = rest % nr; rest /= nr;
      const long ry = rest % nr; rest /= nr;
      const long rx = rest;
      CalibCandidate c;
      c.level = level;
      c.rot_offset_deg = center_rot + Eigen::Vector3d(rot_off[rx], rot_off[ry],
                                                      rot_off[rz]);
      c.trans_offset_m = center_trans + Eigen::Vector3d(trans_off[tx], trans_off[ty],
                                                        trans_off[tz]);
      const Eval e = evaluate(c.rot_offset_deg, c.trans_offset_m);
      c.match_cost = e.match;
      c.background_sum = e.background;
      c.projected_points = e.projected;
      c.score = e.projected == 0
                    ? std::numeric_limits<double>::infinity()
                    : (options.background_term ? e.match - e.background : e.match);
      evaluated[static_cast<size_t>(i)] = c;
    });

    long best = -1;
    for (long i = 0; i < total; ++i) {
      if (evaluated[static_cast<size_t>(i)].projected_points == 0) continue;
      if (best < 0 || evaluated[static_cast<size_t>(i)].score <
                          evaluated[static_cast<size_t>(best)].score)
        best = i;
    }
    if (options.keep_score_table)
      result.table.insert(result.table.end(), evaluated.begin(), evaluated.end());
    if (best < 0) {
      if (level == 0)
        throw DegenerateInputError("no candidate projects any point into the image");
      break;
    }
    found_any = true;

    const CalibCandidate& winner = evaluated[static_cast<size_t>(best)];
    center_rot = winner.rot_offset_deg;
    center_trans = winner.trans_offset_m;
    result.rot_offset_deg = winner.rot_offset_deg;
    result.trans_offset_m = winner.trans_offset_m;
    result.score = winner.score;
    result.projected_points = winner.projected_points;

    // Next level: re-center a finer grid (one previous step each way).
    rot_half = rot_step;
    rot_step = rot_step / 2.0;
    trans_half = trans_step;
    trans_step = trans_step / 2.0;
  }
  if (!found_any)
    throw DegenerateInputError("no candidate projects any point into the image");

  result.rotation = compose_rotation(r0, result.rot_offset_deg);
  result.translation = t0 + result.trans_offset_m;
  return result;
}

}  // namespace sdc
