#include "dnorm/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace dnorm {

namespace {

// Median of a non-empty buffer; reorders it. Even counts average the two
// middle elements.
double median_inplace(std::vector<double>& values) {
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return lower + (upper - lower) / 2.0;
}

}  // namespace

void BoundaryMaskParams::validate() const {
  switch (strategy) {
    case MaskStrategy::kAbsolute:
      if (std::isnan(threshold) || threshold < 0.0) {
        throw InvalidInputError("absolute r threshold must be >= 0");
      }
      return;
    case MaskStrategy::kPercentile:
      if (!(threshold > 0.0 && threshold < 100.0)) {
        throw InvalidInputError("percentile threshold must lie in (0, 100)");
      }
      return;
    case MaskStrategy::kRobustSigma:
      if (!std::isfinite(threshold) || threshold < 0.0) {
        throw InvalidInputError("robust-sigma multiplier must be finite and >= 0");
      }
      return;
  }
}

const char* strategy_name(MaskStrategy s) noexcept {
  switch (s) {
    case MaskStrategy::kAbsolute:
      return "absolute";
    case MaskStrategy::kPercentile:
      return "percentile";
    case MaskStrategy::kRobustSigma:
      return "robust-sigma";
  }
  return "unknown";
}

MaskStrategy parse_strategy(std::string_view name) {
  for (MaskStrategy s :
       {MaskStrategy::kAbsolute, MaskStrategy::kPercentile, MaskStrategy::kRobustSigma}) {
    if (name == strategy_name(s)) return s;
  }
  throw InvalidInputError("unknown mask strategy '" + std::string(name) + "'");
}

double default_threshold(MaskStrategy s) noexcept {
  switch (s) {
    case MaskStrategy::kAbsolute:
      return std::numeric_limits<double>::infinity();
    case MaskStrategy::kPercentile:
      return 99.9;
    case MaskStrategy::kRobustSigma:
      return 5.0;
  }
  return 0.0;
}

double resolve_threshold(const SphericalMap& sph, const BoundaryMaskParams& params) {
  params.validate();
  if (sph.source_normalized) {
    throw NormalizedInputError("r-mask needs raw normals; the source map is unit-normalized");
  }
  std::vector<double> r;
  r.reserve(sph.size());
  for (std::size_t i = 0; i < sph.size(); ++i) {
    if (sph.valid[i]) r.push_back(sph.r[i]);
  }
  if (r.empty()) throw EmptyValidSetError("r-mask: no valid pixels");

  switch (params.strategy) {
    case MaskStrategy::kAbsolute:
      return params.threshold;
    case MaskStrategy::kPercentile: {
      // Nearest-rank percentile.
      const double rank = std::ceil(params.threshold / 100.0 * static_cast<double>(r.size()));
      const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(rank), 1, r.size()) - 1;
      std::nth_element(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(k), r.end());
      return r[k];
    }
    case MaskStrategy::kRobustSigma: {
      const double med = median_inplace(r);
      for (double& x : r) x = std::abs(x - med);
      const double mad = median_inplace(r);
      return med + params.threshold * kMadToSigma * mad;
    }
  }
  return params.threshold;
}

ValidityMask compute_r_mask(const SphericalMap& sph, const BoundaryMaskParams& params) {
  const double limit = resolve_threshold(sph, params);
  ValidityMask keep(sph.rows, sph.cols);
  for (std::size_t i = 0; i < sph.size(); ++i) {
    keep.set(i, sph.valid[i] != 0 && sph.r[i] <= limit);
  }
  return keep;
}

NormalMap apply_mask(const NormalMap& normals, const ValidityMask& mask) {
  require_same_shape(normals, mask, "apply_mask");
  NormalMap out = normals;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!mask[i]) out.invalidate(i);
  }
  return out;
}

}  // namespace dnorm
