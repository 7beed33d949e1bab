#pragma once

// Normal estimators over organized depth maps.
//
// Stencil layout around the query pixel 1 at (row, col), offset alpha:
//
//              5 (row - alpha, col)
//   4 (row, col - alpha)   1   2 (row, col + alpha)
//              3 (row + alpha, col)
//
// Neighbor 2 lies along +u and neighbor 3 along +v. With that assignment the
// closed forms below equal the cross products of backprojected tangent vectors
// exactly (no per-component sign fix-ups):
//   single pair:     n = s12 x s13
//   multi direction: n = 0.25 (s12 x s13 + s13 x s14 + s14 x s15 + s15 x s12)
//                      = 0.25 (s24 x s35)
// where s_ij = P_j - P_i. Raw outputs point away from the camera; use
// normalize_orient() after any magnitude-based masking.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dnorm/core.hpp"

namespace dnorm {

/// Depths of a five-point cross stencil plus the ray of its center pixel.
struct Stencil5 {
  double d1 = 0.0;  // query pixel
  double d2 = 0.0;  // +alpha along u
  double d3 = 0.0;  // +alpha along v
  double d4 = 0.0;  // -alpha along u
  double d5 = 0.0;  // -alpha along v
  double u1 = 0.0;
  double v1 = 0.0;

  bool all_valid() const noexcept {
    return d1 > 0.0 && d2 > 0.0 && d3 > 0.0 && d4 > 0.0 && d5 > 0.0;
  }
};

/// s24 = P4 - P2 and s35 = P5 - P3.
struct TangentPair {
  Vec3 s24;
  Vec3 s35;
};

struct MultiScaleParams {
  std::vector<int> alphas{1, 2, 3};

  void validate() const;
};

/// Execution knobs shared by the full-map estimators. Results do not depend
/// on `threads`.
struct ExecOptions {
  unsigned threads = 1;
};

/// Samples the stencil at `pixel`; nullopt if any sample is outside the image
/// or invalid.
std::optional<Stencil5> gather_stencil(const DepthMap& depth, const CameraIntrinsics& K,
                                       PixelCoord pixel, int alpha);

TangentPair tangent_pair(const Stencil5& s, const CameraIntrinsics& K, int alpha);

/// Closed-form single-pair normal (s12 x s13). Uses d1, d2, d3 only.
inline Vec3 single_pair_normal(const Stencil5& s, const CameraIntrinsics& K, int alpha) {
  const double a = static_cast<double>(alpha);
  const double nx = -(a / K.fy) * s.d3 * (s.d2 - s.d1);
  const double ny = -(a / K.fx) * s.d2 * (s.d3 - s.d1);
  const double nz = (a / K.fx) * s.v1 * s.d2 * (s.d3 - s.d1) +
                    (a / K.fy) * s.u1 * s.d3 * (s.d2 - s.d1) +
                    (a * a / (K.fx * K.fy)) * s.d2 * s.d3;
  return {nx, ny, nz};
}

/// Closed-form multi-direction normal, 0.25 (s24 x s35). d1 is not used.
inline Vec3 multi_direction_normal(const Stencil5& s, const CameraIntrinsics& K, int alpha) {
  const double a = static_cast<double>(alpha);
  const double sum24 = s.d2 + s.d4;
  const double sum35 = s.d3 + s.d5;
  const double nx = -(a / (4.0 * K.fy)) * sum35 * (s.d2 - s.d4);
  const double ny = -(a / (4.0 * K.fx)) * sum24 * (s.d3 - s.d5);
  const double nz = -s.u1 * nx - s.v1 * ny + (a * a / (4.0 * K.fx * K.fy)) * sum24 * sum35;
  return {nx, ny, nz};
}

// Each full-map estimator also has an overload writing into `out`, which is
// reshaped if needed and fully overwritten.

/// Raw single-pair normals. Pixels whose stencil leaves the image or touches
/// an invalid sample are invalid.
NormalMap estimate_single_pair(const DepthMap& depth, const CameraIntrinsics& K,
                               StencilParams params, ExecOptions exec = {});
void estimate_single_pair(const DepthMap& depth, const CameraIntrinsics& K, StencilParams params,
                          NormalMap& out, ExecOptions exec = {});

/// Componentwise mean of single-pair maps over several offsets. A pixel is
/// valid only if it is estimable at every offset.
NormalMap estimate_multi_scale(const DepthMap& depth, const CameraIntrinsics& K,
                               const MultiScaleParams& params, ExecOptions exec = {});
void estimate_multi_scale(const DepthMap& depth, const CameraIntrinsics& K,
                          const MultiScaleParams& params, NormalMap& out, ExecOptions exec = {});

/// Raw multi-direction normals, one closed-form evaluation per pixel.
NormalMap estimate_multi_direction(const DepthMap& depth, const CameraIntrinsics& K,
                                   StencilParams params, ExecOptions exec = {});
void estimate_multi_direction(const DepthMap& depth, const CameraIntrinsics& K,
                              StencilParams params, NormalMap& out, ExecOptions exec = {});

/// Same quantity as estimate_multi_direction, computed the long way: backproject
/// the five points and average the four pairwise cross products. Reference
/// implementation for equivalence and speed comparisons.
NormalMap estimate_four_cross(const DepthMap& depth, const CameraIntrinsics& K,
                              StencilParams params, ExecOptions exec = {});
void estimate_four_cross(const DepthMap& depth, const CameraIntrinsics& K, StencilParams params,
                         NormalMap& out, ExecOptions exec = {});

/// Plane fit over a window x window neighborhood (smallest-eigenvalue
/// eigenvector of the centered scatter matrix). Output is unit and
/// camera-facing. Windows that touch invalid samples or the border, and
/// degenerate windows (repeated smallest eigenvalue), are invalid.
NormalMap estimate_plane_pca(const DepthMap& depth, const CameraIntrinsics& K, int window = 5,
                             ExecOptions exec = {});
void estimate_plane_pca(const DepthMap& depth, const CameraIntrinsics& K, int window,
                        NormalMap& out, ExecOptions exec = {});

/// Unit normal of the least-squares plane through `points`, or nullopt when the
/// smallest eigenvalue of the scatter matrix is not unique. Sign is arbitrary.
std::optional<Vec3> fit_plane_normal(std::span<const Vec3> points);

enum class Method { kMultiDirection, kSinglePair, kMultiScale, kPlanePca, kFourCross };

const char* method_name(Method m) noexcept;
/// Inverse of method_name. Throws InvalidInputError for unknown names.
Method parse_method(std::string_view name);

struct EstimatorConfig {
  Method method = Method::kMultiDirection;
  StencilParams stencil{};
  MultiScaleParams scales{};
  int window = 5;
};

NormalMap estimate(const DepthMap& depth, const CameraIntrinsics& K, const EstimatorConfig& cfg,
                   ExecOptions exec = {});
/// In-place form: reuses `out`'s storage when its shape already matches, so
/// repeated calls do not allocate.
void estimate(const DepthMap& depth, const CameraIntrinsics& K, const EstimatorConfig& cfg,
              NormalMap& out, ExecOptions exec = {});

}  // namespace dnorm
