#include <CLI11.hpp>

#include <ostream>
#include <string>

#include "dnorm_cli/commands.hpp"

namespace dnorm::cli {

namespace {

// Records explicitly given flags under their config-file key.
class FlagLayer {
 public:
  explicit FlagLayer(Settings& flags) : flags_(flags) {}

  void option(CLI::App* app, const std::string& key, const std::string& names,
              const std::string& help) {
    app->add_option_function<std::string>(
        names, [this, key](const std::string& v) { flags_[key] = v; }, help);
  }

  void flag(CLI::App* app, const std::string& key, const std::string& names,
            const std::string& help) {
    app->add_flag_function(
        names, [this, key](std::int64_t) { flags_[key] = "true"; }, help);
  }

 private:
  Settings& flags_;
};

void add_common(FlagLayer& f, CLI::App* app) {
  f.option(app, "threads", "--threads", "Worker threads, 0 = all cores (default 0)");
  f.flag(app, "single_thread", "--single-thread", "Run the kernels on one thread");
}

void add_depth_input(FlagLayer& f, CLI::App* app) {
  f.option(app, "input", "-i,--input", "Depth map (pgm16, raw64 or csv)");
  f.option(app, "format", "--format", "Depth format; inferred from the extension when omitted");
  f.option(app, "intrinsics", "-K,--intrinsics", "Intrinsics key-value file (fx, fy, ox, oy)");
  f.option(app, "depth_scale", "--depth-scale", "Meters per pgm16 unit (default from intrinsics)");
}

void add_estimator(FlagLayer& f, CLI::App* app) {
  f.option(app, "alpha", "--alpha", "Stencil offset in pixels (default 2)");
  f.option(app, "scales", "--scales", "Multi-scale offsets, comma-separated (default 1,2,3)");
  f.option(app, "window", "--window", "Plane-PCA window size, odd (default 5)");
  f.option(app, "mask_strategy", "--mask-strategy",
           "robust-sigma, percentile, absolute or none (default robust-sigma)");
  f.option(app, "mask_threshold", "--mask-threshold",
           "k for robust-sigma (5), percentile (99.9) or r value (inf)");
}

void add_scene(FlagLayer& f, CLI::App* app) {
  f.option(app, "scene", "--scene", "fronto-plane, tilted-plane, sphere or step-edge");
  f.option(app, "rows", "--rows", "Image rows (default 576)");
  f.option(app, "cols", "--cols", "Image columns (default 640)");
  f.option(app, "fx", "--fx", "Focal length along columns (default 500)");
  f.option(app, "fy", "--fy", "Focal length along rows (default 500)");
  f.option(app, "ox", "--ox", "Principal point column (default image center)");
  f.option(app, "oy", "--oy", "Principal point row (default image center)");
  f.option(app, "depth", "--depth", "Fronto-plane depth in meters (default 2)");
  f.option(app, "normal", "--normal", "Tilted-plane normal x,y,z (default 0.2,-0.3,1)");
  f.option(app, "distance", "--distance", "Tilted-plane offset: normal . X = distance (default 2)");
  f.option(app, "center", "--center", "Sphere center x,y,z (default 0,0,2)");
  f.option(app, "radius", "--radius", "Sphere radius (default 0.5)");
  f.option(app, "near", "--near", "Step-edge near depth (default 1)");
  f.option(app, "far", "--far", "Step-edge far depth (default 1.5)");
  f.option(app, "edge_col", "--edge-col", "Step-edge first far column (default cols/2)");
  f.option(app, "noise", "--noise", "Gaussian depth noise sigma in meters");
  f.option(app, "seed", "--seed", "Noise seed");
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Surface normals from organized depth maps", "dnorm"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  Settings flags;
  FlagLayer layer(flags);
  std::string config_path;

  auto* estimate = app.add_subcommand("estimate", "Estimate, mask and export normals");
  auto* evaluate = app.add_subcommand("evaluate", "Compare estimators against ground truth");
  auto* benchmark = app.add_subcommand("benchmark", "Time the estimator kernels");
  auto* synth = app.add_subcommand("synth", "Render an analytic scene with ground truth");

  for (CLI::App* sub : {estimate, evaluate, benchmark, synth}) {
    sub->add_option("-c,--config", config_path, "Key-value config file; flags override it");
    add_common(layer, sub);
  }

  add_depth_input(layer, estimate);
  add_estimator(layer, estimate);
  layer.option(estimate, "method", "-m,--method",
               "multi-direction, single-pair, multi-scale, plane-pca or four-cross");
  layer.option(estimate, "output", "-o,--output", "Output directory");

  add_depth_input(layer, evaluate);
  add_estimator(layer, evaluate);
  layer.option(evaluate, "methods", "--methods",
               "Comma-separated methods (default multi-direction,single-pair,multi-scale)");
  layer.option(evaluate, "ground_truth", "-g,--ground-truth",
               "Ground-truth normals (raw64) or 'plane-pca'");
  layer.option(evaluate, "estimate", "--estimate", "Evaluate this precomputed normals file instead");
  layer.option(evaluate, "output", "-o,--output", "Also write the report to this file");

  add_depth_input(layer, benchmark);
  add_estimator(layer, benchmark);
  add_scene(layer, benchmark);
  layer.option(benchmark, "methods", "--methods",
               "Comma-separated methods (default: all five)");
  layer.option(benchmark, "repetitions", "-r,--repetitions", "Timed runs per method (default 200)");
  layer.option(benchmark, "warmup", "--warmup", "Untimed runs per method, >= 10 (default 10)");

  add_scene(layer, synth);
  layer.option(synth, "alpha", "--alpha", "Stencil offset for the discontinuity mask (default 1)");
  layer.option(synth, "intrinsics", "-K,--intrinsics", "Take intrinsics from this file");
  layer.option(synth, "output_format", "--output-format", "Depth format: raw64, pgm16 or csv");
  layer.option(synth, "output", "-o,--output", "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "dnorm: error: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    Subcommand command = Subcommand::kEstimate;
    if (evaluate->parsed()) command = Subcommand::kEvaluate;
    if (benchmark->parsed()) command = Subcommand::kBenchmark;
    if (synth->parsed()) command = Subcommand::kSynth;

    const Settings file = config_path.empty() ? Settings{} : read_config_file(config_path);
    const RunConfig cfg = resolve_config(command, flags, file);
    switch (command) {
      case Subcommand::kEstimate:
        return cmd_estimate(cfg, out);
      case Subcommand::kEvaluate:
        return cmd_evaluate(cfg, out);
      case Subcommand::kBenchmark:
        return cmd_benchmark(cfg, out);
      case Subcommand::kSynth:
        return cmd_synth(cfg, out);
    }
  } catch (const std::exception& e) {
    err << "dnorm: error: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 1;
}

}  // namespace dnorm::cli
