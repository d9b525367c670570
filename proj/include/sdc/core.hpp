#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <variant>

#include <Eigen/Dense>

#include "sdc/error.hpp"

namespace sdc {

/// Dense row-major 2D container addressed as (x, y) = (column, row).
template <class T>
class Grid {
 public:
  using Array = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Grid() = default;
  Grid(int width, int height, T value = T{}) {
    if (width <= 0 || height <= 0)
      throw DimensionError("grid dimensions must be positive");
    data_ = Array::Constant(height, width, value);
  }
  explicit Grid(Array data) : data_(std::move(data)) {
    if (data_.rows() <= 0 || data_.cols() <= 0)
      throw DimensionError("grid dimensions must be positive");
  }

  int width() const { return static_cast<int>(data_.cols()); }
  int height() const { return static_cast<int>(data_.rows()); }
  long size() const { return data_.size(); }

  T operator()(int x, int y) const { return data_(y, x); }
  T& operator()(int x, int y) { return data_(y, x); }
  T at_index(long i) const { return data_.data()[i]; }
  T& at_index(long i) { return data_.data()[i]; }

  bool contains(int x, int y) const {
    return x >= 0 && x < width() && y >= 0 && y < height();
  }
  bool same_size_as(int w, int h) const { return width() == w && height() == h; }

  const Array& array() const { return data_; }
  Array& array() { return data_; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.data_.rows() == b.data_.rows() && a.data_.cols() == b.data_.cols() &&
           (a.data_ == b.data_).all();
  }

 private:
  Array data_;
};

/// Grayscale image with intensities normalized to [0, 1].
class ImageGrid {
 public:
  ImageGrid(int width, int height, float value = 0.0f) : grid_(width, height, value) {
    check(value);
  }
  explicit ImageGrid(Grid<float> g) : grid_(std::move(g)) {
    for (long i = 0; i < grid_.size(); ++i) check(grid_.at_index(i));
  }

  int width() const { return grid_.width(); }
  int height() const { return grid_.height(); }
  float operator()(int x, int y) const { return grid_(x, y); }
  bool contains(int x, int y) const { return grid_.contains(x, y); }
  const Grid<float>& grid() const { return grid_; }

  void set(int x, int y, float v) {
    check(v);
    grid_(x, y) = v;
  }

  friend bool operator==(const ImageGrid& a, const ImageGrid& b) {
    return a.grid_ == b.grid_;
  }

 private:
  static void check(float v) {
    if (!(v >= 0.0f && v <= 1.0f))
      throw DomainError("image intensity outside [0,1]");
  }
  Grid<float> grid_;
};

/// Inverse depth map [1/m] with an explicit per-pixel empty marker. Non-empty
/// values are strictly positive; the marker is a separate validity bit, never
/// an in-band sentinel value.
class InvDepthMap {
 public:
  InvDepthMap(int width, int height)
      : values_(width, height, 0.0f), valid_(width, height, uint8_t{0}) {}

  /// Builds a dense map from a grid of strictly positive inverse depths.
  static InvDepthMap dense(const Grid<float>& values) {
    InvDepthMap m(values.width(), values.height());
    for (int y = 0; y < values.height(); ++y)
      for (int x = 0; x < values.width(); ++x) m.set(x, y, values(x, y));
    return m;
  }

  int width() const { return values_.width(); }
  int height() const { return values_.height(); }
  bool contains(int x, int y) const { return values_.contains(x, y); }

  std::optional<float> at(int x, int y) const {
    if (!valid_(x, y)) return std::nullopt;
    return values_(x, y);
  }
  bool empty_at(int x, int y) const { return valid_(x, y) == 0; }

  void set(int x, int y, float inv_depth) {
    if (!(inv_depth > 0.0f) || !std::isfinite(inv_depth))
      throw DomainError("inverse depth must be finite and > 0");
    values_(x, y) = inv_depth;
    valid_(x, y) = 1;
  }
  void clear(int x, int y) {
    values_(x, y) = 0.0f;
    valid_(x, y) = 0;
  }

  long valid_count() const {
    long n = 0;
    for (long i = 0; i < valid_.size(); ++i) n += valid_.at_index(i);
    return n;
  }
  bool is_dense() const { return valid_count() == valid_.size(); }

  const Grid<float>& values() const { return values_; }
  const Grid<uint8_t>& validity() const { return valid_; }

  friend bool operator==(const InvDepthMap& a, const InvDepthMap& b) {
    if (!(a.valid_ == b.valid_)) return false;
    for (long i = 0; i < a.values_.size(); ++i)
      if (a.valid_.at_index(i) && a.values_.at_index(i) != b.values_.at_index(i))
        return false;
    return true;
  }

 private:
  Grid<float> values_;
  Grid<uint8_t> valid_;
};

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  Eigen::Matrix3d matrix() const {
    Eigen::Matrix3d k;
    k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
    return k;
  }
  bool valid() const { return fx > 0.0 && fy > 0.0; }
};

/// Rectified binocular stereo relation: focal length [pixel], baseline [m].
struct RectifiedStereo {
  double focal = 0.0;
  double baseline = 0.0;
};

/// Motion stereo relation: intrinsics plus the camera motion (R_C, t_C).
struct MotionStereo {
  CameraIntrinsics intrinsics;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

/// Camera relation between the two input images.
class StereoGeometry {
 public:
  static StereoGeometry rectified(double focal, double baseline) {
    if (!(focal > 0.0) || !(baseline > 0.0))
      throw DomainError("rectified stereo requires focal > 0 and baseline > 0");
    return StereoGeometry(RectifiedStereo{focal, baseline});
  }

  static StereoGeometry motion(const CameraIntrinsics& k, const Eigen::Matrix3d& r,
                               const Eigen::Vector3d& t) {
    if (!k.valid()) throw DomainError("motion stereo requires fx > 0 and fy > 0");
    const double ortho = (r * r.transpose() - Eigen::Matrix3d::Identity())
                             .cwiseAbs()
                             .maxCoeff();
    if (ortho >= 1e-9 || r.determinant() < 0.0)
      throw DomainError("motion rotation is not a proper rotation matrix");
    return StereoGeometry(MotionStereo{k, r, t});
  }

  bool is_rectified() const { return std::holds_alternative<RectifiedStereo>(v_); }
  bool is_motion() const { return std::holds_alternative<MotionStereo>(v_); }

  const RectifiedStereo& rectified_stereo() const {
    if (!is_rectified())
      throw GeometryError("operation requires rectified stereo geometry");
    return std::get<RectifiedStereo>(v_);
  }
  const MotionStereo& motion_stereo() const {
    if (!is_motion()) throw GeometryError("operation requires motion stereo geometry");
    return std::get<MotionStereo>(v_);
  }

 private:
  explicit StereoGeometry(RectifiedStereo r) : v_(r) {}
  explicit StereoGeometry(MotionStereo m) : v_(std::move(m)) {}
  std::variant<RectifiedStereo, MotionStereo> v_;
};

/// Per-pixel forward-difference image gradient [intensity/pixel]. The x
/// component is zero on the last column, the y component on the last row.
struct GradientField {
  Grid<float> dx;
  Grid<float> dy;

  int width() const { return dx.width(); }
  int height() const { return dx.height(); }
  Eigen::Vector2f at(int x, int y) const { return {dx(x, y), dy(x, y)}; }
  double squared_norm(int x, int y) const {
    const double gx = dx(x, y), gy = dy(x, y);
    return gx * gx + gy * gy;
  }
};

/// Inverse depth [1/m] to depth [m].
inline double inv_depth_to_depth(double d) {
  if (!(d > 0.0)) throw DomainError("inverse depth must be > 0");
  return 1.0 / d;
}

/// Inverse depth [1/m] to disparity [pixel] for rectified stereo.
inline double inv_depth_to_disparity(double d, const StereoGeometry& g) {
  const RectifiedStereo& r = g.rectified_stereo();
  if (d < 0.0) throw DomainError("inverse depth must be >= 0");
  return r.focal * r.baseline * d;
}

GradientField image_gradient(const ImageGrid& img);

}  // namespace sdc
