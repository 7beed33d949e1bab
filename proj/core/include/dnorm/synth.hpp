#pragma once

// Analytic depth scenes with exact ground-truth normals.
//
// Depth is perspective depth (z along the optical axis), so a pixel ray is
// w = (u, v, 1) and the hit point is d * w.

#include <cstdint>
#include <string_view>
#include <variant>

#include "dnorm/core.hpp"

namespace dnorm {

struct FrontoPlane {
  double depth = 1.0;
};

/// Points X with normal . X = distance.
struct TiltedPlane {
  Vec3 normal{0.0, 0.0, 1.0};
  double distance = 1.0;
};

struct Sphere {
  Vec3 center{0.0, 0.0, 2.0};
  double radius = 0.5;
};

/// Columns < edge_col lie on a fronto-parallel plane at near_depth, the rest at
/// far_depth.
struct StepEdge {
  double near_depth = 1.0;
  double far_depth = 1.5;
  int edge_col = 0;
};

using SceneGeometry = std::variant<FrontoPlane, TiltedPlane, Sphere, StepEdge>;

struct SceneSpec {
  SceneGeometry geometry = FrontoPlane{};
  int rows = 576;
  int cols = 640;
  CameraIntrinsics intrinsics{500.0, 500.0, 319.5, 287.5};
  double noise_sigma = 0.0;  // meters
  std::uint64_t seed = 0;

  /// Throws InvalidInputError for degenerate or invisible geometry.
  void validate() const;
};

struct GroundTruthScene {
  DepthMap depth;
  NormalMap normals;  // unit, camera-facing
  /// true where the pixel's alpha-stencil straddles a depth jump.
  PixelMask discontinuity;
};

/// Rays that miss the geometry give invalid pixels. Noise is applied to depth
/// only; normals and the discontinuity mask describe the noise-free scene.
GroundTruthScene render(const SceneSpec& spec, StencilParams stencil);

/// Adds i.i.d. N(0, sigma^2) to every valid depth. The sample at pixel i is a
/// pure function of (seed, i). Samples pushed to <= 0 become invalid.
DepthMap perturb(const DepthMap& depth, double sigma, std::uint64_t seed);

/// Standard normal deviate derived from (seed, counter).
double gaussian_sample(std::uint64_t seed, std::uint64_t counter);

const char* scene_kind_name(const SceneGeometry& g) noexcept;

}  // namespace dnorm
