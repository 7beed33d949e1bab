#pragma once

// Domain types shared by every module: depth maps (organized point clouds),
// pinhole intrinsics, normal maps and their spherical decomposition.
//
// Pixel convention: u runs along image columns, v along image rows.
//   u = (col - ox) / fx,  v = (row - oy) / fy
// A pixel with depth d backprojects to (u*d, v*d, d) in camera coordinates.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dnorm/error.hpp"

namespace dnorm {

using Vec3 = Eigen::Vector3d;

struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double ox = 0.0;
  double oy = 0.0;

  /// Throws InvalidInputError unless fx, fy > 0 and all four are finite.
  void validate() const;

  bool operator==(const CameraIntrinsics&) const = default;
};

/// Normalized image coordinates of a pixel.
struct PixelRay {
  double u = 0.0;
  double v = 0.0;
};

struct PixelCoord {
  int row = 0;
  int col = 0;
};

/// Sub-pixel image position, as produced by projection.
struct ImagePoint {
  double row = 0.0;
  double col = 0.0;
};

inline PixelRay pixel_ray(double row, double col, const CameraIntrinsics& K) {
  return {(col - K.ox) / K.fx, (row - K.oy) / K.fy};
}

/// Throws InvalidInputError for d <= 0 or non-finite d.
Vec3 backproject(PixelCoord pixel, double depth, const CameraIntrinsics& K);

/// Inverse of backproject. Throws InvalidInputError for z <= 0.
ImagePoint project(const Vec3& point, const CameraIntrinsics& K);

struct StencilParams {
  int alpha = 1;

  void validate() const;
};

/// Row-major grid of booleans. As a ValidityMask, true means "keep".
class PixelMask {
 public:
  PixelMask() = default;
  PixelMask(int rows, int cols, bool fill = false);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  bool at(int row, int col) const { return bits_[index(row, col)] != 0; }
  void set(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }
  void set(int row, int col, bool value) { set(index(row, col), value); }

  std::size_t count() const noexcept;
  std::span<const std::uint8_t> bytes() const noexcept { return bits_; }

  bool operator==(const PixelMask&) const = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(col);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

using ValidityMask = PixelMask;

/// Metric depth along the optical axis, one sample per pixel.
///
/// Samples that are zero, negative or non-finite are invalid and are stored as
/// exactly 0.0, so `valid(i)` is equivalent to `data()[i] > 0`.
class DepthMap {
 public:
  DepthMap() = default;
  DepthMap(int rows, int cols, std::vector<double> depth);

  static DepthMap filled(int rows, int cols, double depth);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator[](std::size_t i) const { return data_[i]; }
  double at(int row, int col) const {
    return data_[static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
                 static_cast<std::size_t>(col)];
  }
  bool valid(std::size_t i) const { return data_[i] > 0.0; }
  bool valid(int row, int col) const { return at(row, col) > 0.0; }

  std::span<const double> data() const noexcept { return data_; }
  std::size_t valid_count() const noexcept;

  bool operator==(const DepthMap&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Per-pixel 3-vector field with validity flags.
///
/// `normalized` promises unit length at every valid pixel; `oriented` promises
/// n . p <= 0 where p is the backprojected surface point (camera-facing).
class NormalMap {
 public:
  NormalMap() = default;
  NormalMap(int rows, int cols);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return vectors_.size(); }

  const Vec3& operator[](std::size_t i) const { return vectors_[i]; }
  const Vec3& at(int row, int col) const { return vectors_[index(row, col)]; }
  bool valid(std::size_t i) const { return valid_[i] != 0; }
  bool valid(int row, int col) const { return valid_[index(row, col)] != 0; }

  void set(std::size_t i, const Vec3& n) {
    vectors_[i] = n;
    valid_[i] = 1;
  }
  void invalidate(std::size_t i) {
    vectors_[i].setZero();
    valid_[i] = 0;
  }

  // Direct access for kernels that fill the map in one pass.
  std::span<Vec3> vectors() noexcept { return vectors_; }
  std::span<const Vec3> vectors() const noexcept { return vectors_; }
  std::span<std::uint8_t> valid_flags() noexcept { return valid_; }
  std::span<const std::uint8_t> valid_flags() const noexcept { return valid_; }

  std::size_t valid_count() const noexcept;

  bool normalized = false;
  bool oriented = false;

  bool operator==(const NormalMap&) const = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(col);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<Vec3> vectors_;
  std::vector<std::uint8_t> valid_;
};

/// (r, theta, phi) decomposition of a NormalMap. theta in [0, pi], phi in (-pi, pi].
struct SphericalMap {
  int rows = 0;
  int cols = 0;
  std::vector<double> r;
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<std::uint8_t> valid;
  /// Copied from the source map; magnitude-based masking refuses unit input.
  bool source_normalized = false;

  std::size_t size() const noexcept { return r.size(); }
};

struct Spherical {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

/// Full-quadrant conversion. phi is 0 when n_x = n_y = 0.
Spherical to_spherical(const Vec3& n);
Vec3 to_cartesian(const Spherical& s);

/// Per-pixel spherical decomposition. Zero-length vectors become invalid.
SphericalMap to_spherical(const NormalMap& normals);

/// Unit-normalizes every valid vector and flips it to face the camera.
/// Zero-length or non-finite vectors and pixels without valid depth become invalid.
NormalMap normalize_orient(const NormalMap& normals, const DepthMap& depth,
                           const CameraIntrinsics& K);

template <typename A, typename B>
bool same_shape(const A& a, const B& b) {
  return a.rows() == b.rows() && a.cols() == b.cols();
}

/// Throws ShapeMismatchError naming `what` when the shapes differ.
void require_same_shape(int rows_a, int cols_a, int rows_b, int cols_b, const char* what);

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* what) {
  require_same_shape(a.rows(), a.cols(), b.rows(), b.cols(), what);
}

}  // namespace dnorm
