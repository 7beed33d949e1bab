#include "dnorm/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace dnorm {

namespace {

void check_dims(int rows, int cols) {
  if (rows < 0 || cols < 0) {
    throw InvalidInputError("negative grid dimensions " + std::to_string(rows) + "x" +
                            std::to_string(cols));
  }
}

std::size_t cell_count(int rows, int cols) {
  check_dims(rows, cols);
  return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
}

}  // namespace

void CameraIntrinsics::validate() const {
  if (!std::isfinite(fx) || !std::isfinite(fy) || fx <= 0.0 || fy <= 0.0) {
    throw InvalidInputError("focal lengths must be finite and positive");
  }
  if (!std::isfinite(ox) || !std::isfinite(oy)) {
    throw InvalidInputError("optical center must be finite");
  }
}

void StencilParams::validate() const {
  if (alpha < 1) {
    throw InvalidInputError("stencil offset alpha must be >= 1, got " + std::to_string(alpha));
  }
}

Vec3 backproject(PixelCoord pixel, double depth, const CameraIntrinsics& K) {
  if (!std::isfinite(depth) || depth <= 0.0) {
    throw InvalidInputError("cannot backproject non-positive or non-finite depth");
  }
  const PixelRay ray = pixel_ray(pixel.row, pixel.col, K);
  return {ray.u * depth, ray.v * depth, depth};
}

ImagePoint project(const Vec3& point, const CameraIntrinsics& K) {
  if (!(point.z() > 0.0) || !point.allFinite()) {
    throw InvalidInputError("cannot project a point at or behind the camera");
  }
  return {point.y() / point.z() * K.fy + K.oy, point.x() / point.z() * K.fx + K.ox};
}

PixelMask::PixelMask(int rows, int cols, bool fill)
    : rows_(rows), cols_(cols), bits_(cell_count(rows, cols), fill ? 1 : 0) {}

std::size_t PixelMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

DepthMap::DepthMap(int rows, int cols, std::vector<double> depth)
    : rows_(rows), cols_(cols), data_(std::move(depth)) {
  if (data_.size() != cell_count(rows, cols)) {
    throw InvalidInputError("depth payload has " + std::to_string(data_.size()) +
                            " samples, expected " + std::to_string(rows) + "x" +
                            std::to_string(cols));
  }
  for (double& d : data_) {
    if (!(d > 0.0) || !std::isfinite(d)) d = 0.0;
  }
}

DepthMap DepthMap::filled(int rows, int cols, double depth) {
  return DepthMap(rows, cols, std::vector<double>(cell_count(rows, cols), depth));
}

std::size_t DepthMap::valid_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(data_.begin(), data_.end(), [](double d) { return d > 0.0; }));
}

NormalMap::NormalMap(int rows, int cols)
    : rows_(rows),
      cols_(cols),
      vectors_(cell_count(rows, cols), Vec3::Zero()),
      valid_(cell_count(rows, cols), 0) {}

std::size_t NormalMap::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{1}));
}

void require_same_shape(int rows_a, int cols_a, int rows_b, int cols_b, const char* what) {
  if (rows_a != rows_b || cols_a != cols_b) {
    throw ShapeMismatchError(std::string(what) + ": shape " + std::to_string(rows_a) + "x" +
                             std::to_string(cols_a) + " vs " + std::to_string(rows_b) + "x" +
                             std::to_string(cols_b));
  }
}

Spherical to_spherical(const Vec3& n) {
  const double planar = std::hypot(n.x(), n.y());
  Spherical s;
  s.r = n.norm();
  s.theta = std::atan2(planar, n.z());
  if (planar == 0.0) {
    s.phi = 0.0;
  } else {
    s.phi = std::atan2(n.y(), n.x());
    if (s.phi <= -std::numbers::pi) s.phi = std::numbers::pi;
  }
  return s;
}

Vec3 to_cartesian(const Spherical& s) {
  const double st = std::sin(s.theta);
  return {s.r * st * std::cos(s.phi), s.r * st * std::sin(s.phi), s.r * std::cos(s.theta)};
}

SphericalMap to_spherical(const NormalMap& normals) {
  SphericalMap out;
  out.rows = normals.rows();
  out.cols = normals.cols();
  out.source_normalized = normals.normalized;
  const std::size_t n = normals.size();
  out.r.assign(n, 0.0);
  out.theta.assign(n, 0.0);
  out.phi.assign(n, 0.0);
  out.valid.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!normals.valid(i)) continue;
    const Vec3& v = normals[i];
    if (!v.allFinite()) continue;
    const Spherical s = to_spherical(v);
    if (!(s.r > 0.0)) continue;
    out.r[i] = s.r;
    out.theta[i] = s.theta;
    out.phi[i] = s.phi;
    out.valid[i] = 1;
  }
  return out;
}

NormalMap normalize_orient(const NormalMap& normals, const DepthMap& depth,
                           const CameraIntrinsics& K) {
  require_same_shape(normals, depth, "normalize_orient");
  K.validate();
  NormalMap out(normals.rows(), normals.cols());
  for (int row = 0; row < normals.rows(); ++row) {
    for (int col = 0; col < normals.cols(); ++col) {
      const std::size_t i =
          static_cast<std::size_t>(row) * static_cast<std::size_t>(normals.cols()) +
          static_cast<std::size_t>(col);
      if (!normals.valid(i) || !depth.valid(i)) continue;
      const Vec3& v = normals[i];
      const double len = v.norm();
      if (!(len > 0.0) || !std::isfinite(len)) continue;
      Vec3 unit = len == 1.0 ? v : Vec3(v / len);
      const Vec3 p = backproject({row, col}, depth[i], K);
      if (unit.dot(p) > 0.0) unit = -unit;
      out.set(i, unit);
    }
  }
  out.normalized = true;
  out.oriented = true;
  return out;
}

}  // namespace dnorm
