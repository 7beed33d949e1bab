#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dnorm/core.hpp"

namespace dnorm {

/// Per-pixel angle in radians, display range [0, 2pi].
struct AngleImage {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;

  std::size_t size() const noexcept { return values.size(); }
};

struct AnglePair {
  AngleImage theta;
  AngleImage phi;
};

/// I_theta and I_phi images. theta stays in [0, pi]; negative phi is shifted
/// by 2pi. Angles do not depend on vector length.
AnglePair angle_images(const NormalMap& normals);

/// Mean squared circular difference over jointly valid pixels.
/// Throws ShapeMismatchError or UndefinedMetricError.
double mse(const AngleImage& a, const AngleImage& b);

struct ErrorReport {
  double mse_theta = 0.0;
  double mse_phi = 0.0;
  double mean_angular_error = 0.0;  // radians
  std::size_t pixel_count = 0;

  bool operator==(const ErrorReport&) const = default;
};

/// Full comparison over pixels valid in both maps.
ErrorReport compare(const NormalMap& estimate, const NormalMap& ground_truth);

/// Angle between two non-zero vectors, in [0, pi].
double angle_between(const Vec3& a, const Vec3& b);

/// "mse_theta=<v> mse_phi=<v> mean_angular_error=<v> pixel_count=<n>", values in
/// shortest round-trip decimal form.
std::string to_key_values(const ErrorReport& report);

/// Parses the fields produced by to_key_values out of a whitespace-separated
/// key=value row. Unknown keys are ignored; missing keys throw.
ErrorReport parse_error_report(std::string_view row);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace dnorm
