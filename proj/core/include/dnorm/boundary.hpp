#pragma once

// Removal of erroneous normals at depth discontinuities.
//
// A raw (un-normalized) normal's length grows with the lengths of the tangent
// vectors it was built from, and a tangent vector that spans a depth jump is
// long. Thresholding the spherical magnitude r therefore isolates boundary
// pixels. The mask must be computed before normalization.

#include <string_view>

#include "dnorm/core.hpp"

namespace dnorm {

enum class MaskStrategy {
  kAbsolute,     // threshold is an r value
  kPercentile,   // threshold in (0, 100): keep r <= that percentile of r
  kRobustSigma,  // threshold is k: keep r <= median + k * 1.4826 * MAD
};

struct BoundaryMaskParams {
  MaskStrategy strategy = MaskStrategy::kRobustSigma;
  double threshold = 5.0;

  /// Throws InvalidInputError when threshold is outside the strategy's range.
  void validate() const;
};

/// Scale factor turning a median absolute deviation into a Gaussian sigma.
inline constexpr double kMadToSigma = 1.4826;

const char* strategy_name(MaskStrategy s) noexcept;
MaskStrategy parse_strategy(std::string_view name);
/// Default threshold for each strategy: 5 sigma, 99.9th percentile, +inf.
double default_threshold(MaskStrategy s) noexcept;

/// The r value above which pixels are removed, for the valid pixels of `sph`.
/// Throws NormalizedInputError or EmptyValidSetError.
double resolve_threshold(const SphericalMap& sph, const BoundaryMaskParams& params);

/// keep = valid && r <= resolved threshold.
ValidityMask compute_r_mask(const SphericalMap& sph, const BoundaryMaskParams& params);

/// Output valid = input valid && keep; removed vectors are zeroed.
NormalMap apply_mask(const NormalMap& normals, const ValidityMask& mask);

}  // namespace dnorm
