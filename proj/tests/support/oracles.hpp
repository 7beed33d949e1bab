#pragma once

// Test-only reference computations. Nothing here calls into the estimator
// kernels; points are built straight from the pinhole model so the checks stay
// independent of the closed forms they verify.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "dnorm/core.hpp"
#include "dnorm/estimators.hpp"

namespace dnorm::testing {

/// Pinhole backprojection written out from scratch: x = (col - ox) d / fx.
inline Vec3 pinhole_point(double row, double col, double depth, const CameraIntrinsics& K) {
  return {(col - K.ox) * depth / K.fx, (row - K.oy) * depth / K.fy, depth};
}

/// Extended-precision vector used by the reference computations, so oracle
/// rounding stays well below the tolerances the double kernels are held to.
using RefVec3 = Eigen::Matrix<long double, 3, 1>;

inline RefVec3 pinhole_point_ref(double row, double col, double depth, const CameraIntrinsics& K) {
  const long double d = depth;
  return {(static_cast<long double>(col) - K.ox) * d / K.fx,
          (static_cast<long double>(row) - K.oy) * d / K.fy, d};
}

inline Vec3 to_double(const RefVec3& v) { return v.cast<double>(); }

/// A five-point stencil expressed as explicit 3D points, plus what the
/// estimators need to evaluate the same stencil.
struct StencilSample {
  CameraIntrinsics K;
  int alpha = 1;
  int row = 0;
  int col = 0;
  double d[6] = {};  // d[1..5]
  RefVec3 p[6];      // p[1..5]

  Stencil5 stencil() const {
    const PixelRay ray = pixel_ray(row, col, K);
    return {d[1], d[2], d[3], d[4], d[5], ray.u, ray.v};
  }
};

/// Random intrinsics, pixel, offset and depths in [0.3, 10] m.
class StencilGenerator {
 public:
  explicit StencilGenerator(std::uint64_t seed) : rng_(seed) {}

  StencilSample next() {
    std::uniform_real_distribution<double> focal(300.0, 1500.0);
    std::uniform_real_distribution<double> center_x(250.0, 390.0);
    std::uniform_real_distribution<double> center_y(200.0, 380.0);
    std::uniform_real_distribution<double> depth(0.3, 10.0);
    std::uniform_int_distribution<int> alpha(1, 4);

    StencilSample s;
    s.K = {focal(rng_), focal(rng_), center_x(rng_), center_y(rng_)};
    s.alpha = alpha(rng_);
    s.row = std::uniform_int_distribution<int>(s.alpha, 575 - s.alpha)(rng_);
    s.col = std::uniform_int_distribution<int>(s.alpha, 639 - s.alpha)(rng_);
    for (int k = 1; k <= 5; ++k) s.d[k] = depth(rng_);

    const double r = s.row;
    const double c = s.col;
    const double a = s.alpha;
    s.p[1] = pinhole_point_ref(r, c, s.d[1], s.K);
    s.p[2] = pinhole_point_ref(r, c + a, s.d[2], s.K);
    s.p[3] = pinhole_point_ref(r + a, c, s.d[3], s.K);
    s.p[4] = pinhole_point_ref(r, c - a, s.d[4], s.K);
    s.p[5] = pinhole_point_ref(r - a, c, s.d[5], s.K);
    return s;
  }

 private:
  std::mt19937_64 rng_;
};

/// 0.25 (s12 x s13 + s13 x s14 + s14 x s15 + s15 x s12), each term computed
/// separately.
inline RefVec3 four_cross_average(const StencilSample& s) {
  const RefVec3 s12 = s.p[2] - s.p[1];
  const RefVec3 s13 = s.p[3] - s.p[1];
  const RefVec3 s14 = s.p[4] - s.p[1];
  const RefVec3 s15 = s.p[5] - s.p[1];
  const RefVec3 n23 = s12.cross(s13);
  const RefVec3 n34 = s13.cross(s14);
  const RefVec3 n45 = s14.cross(s15);
  const RefVec3 n52 = s15.cross(s12);
  return 0.25L * (n23 + n34 + n45 + n52);
}

/// 0.25 (s24 x s35) from the explicit points.
inline RefVec3 collapsed_cross(const StencilSample& s) {
  return 0.25L * (s.p[4] - s.p[2]).cross(s.p[5] - s.p[3]);
}

/// s12 x s13 from the explicit points.
inline RefVec3 single_pair_cross(const StencilSample& s) {
  return (s.p[2] - s.p[1]).cross(s.p[3] - s.p[1]);
}

inline double relative_error(const Vec3& got, const RefVec3& want) {
  return static_cast<double>((got.cast<long double>() - want).norm() / want.norm());
}

inline double relative_error(const RefVec3& got, const RefVec3& want) {
  return static_cast<double>((got - want).norm() / want.norm());
}

inline double relative_error(const Vec3& got, const Vec3& want) {
  return (got - want).norm() / want.norm();
}

/// Angle between unit-or-not vectors, insensitive to acos precision loss.
inline double angle(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

/// Pixels whose whole (2 radius + 1)^2 neighborhood is valid in `normals`.
inline PixelMask erode_valid(const NormalMap& normals, int radius) {
  PixelMask out(normals.rows(), normals.cols());
  for (int r = radius; r + radius < normals.rows(); ++r) {
    for (int c = radius; c + radius < normals.cols(); ++c) {
      bool all = true;
      for (int dr = -radius; dr <= radius && all; ++dr) {
        for (int dc = -radius; dc <= radius && all; ++dc) all = normals.valid(r + dr, c + dc);
      }
      out.set(r, c, all);
    }
  }
  return out;
}

/// Fractional ranks (ties share their mean rank).
inline std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mean_rank;
    i = j + 1;
  }
  return rank;
}

/// Spearman rank correlation.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const std::vector<double> rx = ranks(x);
  const std::vector<double> ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Mean angle between `est` and `gt` over pixels valid in both and selected by
/// `where` (all pixels when null). Orient `est` first; signs matter.
inline double mean_angular_error(const NormalMap& est, const NormalMap& gt,
                                 const PixelMask* where = nullptr) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    if (!est.valid(i) || !gt.valid(i)) continue;
    if (where && !(*where)[i]) continue;
    sum += angle(est[i], gt[i]);
    ++n;
  }
  return n == 0 ? NAN : sum / static_cast<double>(n);
}

}  // namespace dnorm::testing
