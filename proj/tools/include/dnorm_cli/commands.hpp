#pragma once

#include <iosfwd>

#include "dnorm_cli/config.hpp"

namespace dnorm::cli {

// Each command writes its machine-readable summary to `out` and returns the
// process exit status. Library errors propagate as exceptions.

/// Writes normals_raw.raw64, normals.raw64, normals.ppm, theta.pgm, phi.pgm and,
/// for stencil methods with masking enabled, mask.pbm and mask.raw64.
int cmd_estimate(const RunConfig& cfg, std::ostream& out);

/// One `method=<name> mse_theta=...` row per method; also written to
/// cfg.output when set.
int cmd_evaluate(const RunConfig& cfg, std::ostream& out);

/// Kernel timings: a header row, one row per method, then a summary row.
int cmd_benchmark(const RunConfig& cfg, std::ostream& out);

/// Writes depth.<ext>, normals_gt.raw64, normals_gt.ppm, discontinuity.pbm,
/// discontinuity.raw64, intrinsics.txt and estimate.cfg.
int cmd_synth(const RunConfig& cfg, std::ostream& out);

/// Full command line: parses, layers the config, dispatches. Errors become a
/// single `dnorm: error: ...` line on `err` and a nonzero status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dnorm::cli
