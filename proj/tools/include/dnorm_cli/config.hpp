#pragma once

// Run configuration for the command-line tool. Values are layered: explicit
// flags override the config file, which overrides built-in defaults. Config
// files use the key-value text format; keys are the long flag names with '-'
// replaced by '_', and relative paths resolve against the file's directory.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dnorm/boundary.hpp"
#include "dnorm/estimators.hpp"
#include "dnorm/io.hpp"
#include "dnorm/synth.hpp"

namespace dnorm::cli {

enum class Subcommand { kEstimate, kEvaluate, kBenchmark, kSynth };

const char* subcommand_name(Subcommand s) noexcept;

using Settings = std::map<std::string, std::string, std::less<>>;

struct RunConfig {
  Subcommand command = Subcommand::kEstimate;

  std::filesystem::path input;  // depth map
  std::optional<DepthFormat> input_format;
  std::filesystem::path intrinsics;
  std::optional<double> depth_scale;  // overrides the intrinsics file
  std::filesystem::path output;       // directory

  std::vector<Method> methods;  // estimate uses the first
  int alpha = 2;
  MultiScaleParams scales;
  int window = 5;
  std::optional<BoundaryMaskParams> mask;  // nullopt: no masking

  // evaluate
  std::string ground_truth;  // normals file, or "plane-pca"
  std::filesystem::path estimate;

  // benchmark
  int repetitions = 200;
  int warmup = 10;

  // synth
  SceneSpec scene;
  DepthFormat output_format = DepthFormat::kRaw64;

  unsigned threads = 1;
};

/// Keys accepted in config files and flag layers.
const std::vector<std::string>& known_keys();

/// Reads a config file. Unknown keys raise ParseError; path-valued entries are
/// made relative to the file's directory.
Settings read_config_file(const std::filesystem::path& path);

/// Merges `flags` over `file` and fills in defaults for `command`. Throws
/// InvalidInputError when a required value is missing or out of range.
RunConfig resolve_config(Subcommand command, const Settings& flags, const Settings& file);

}  // namespace dnorm::cli
