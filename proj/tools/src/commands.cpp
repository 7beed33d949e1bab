#include "dnorm_cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dnorm/metrics.hpp"

namespace dnorm::cli {

namespace fs = std::filesystem;

namespace {

struct LoadedDepth {
  DepthMap depth;
  CameraIntrinsics K;
};

LoadedDepth load_depth(const RunConfig& cfg) {
  const IntrinsicsFile intr = read_intrinsics(cfg.intrinsics);
  intr.intrinsics.validate();
  const DepthFormat format = cfg.input_format.value_or(infer_depth_format(cfg.input));
  const double scale = cfg.depth_scale.value_or(intr.depth_scale);
  return {read_depth(cfg.input, format, scale), intr.intrinsics};
}

EstimatorConfig estimator_config(const RunConfig& cfg, Method m) {
  EstimatorConfig ec;
  ec.method = m;
  ec.stencil = {cfg.alpha};
  ec.scales = cfg.scales;
  ec.window = cfg.window;
  return ec;
}

bool has_raw_magnitude(Method m) { return m != Method::kPlanePca; }

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

const char* depth_extension(DepthFormat f) {
  switch (f) {
    case DepthFormat::kPgm16:
      return "pgm";
    case DepthFormat::kCsv:
      return "csv";
    case DepthFormat::kRaw64:
      return "raw64";
  }
  return "raw64";
}

// Raw estimate -> optional r-mask -> unit, camera-facing normals.
struct Pipeline {
  NormalMap raw;
  std::optional<ValidityMask> keep;
  double threshold = 0.0;
  NormalMap final_normals;
};

Pipeline run_pipeline(const RunConfig& cfg, Method m, const DepthMap& depth,
                      const CameraIntrinsics& K) {
  Pipeline p;
  p.raw = estimate(depth, K, estimator_config(cfg, m), ExecOptions{cfg.threads});
  NormalMap kept = p.raw;
  if (cfg.mask && has_raw_magnitude(m)) {
    const SphericalMap sph = to_spherical(p.raw);
    p.threshold = resolve_threshold(sph, *cfg.mask);
    p.keep = compute_r_mask(sph, *cfg.mask);
    kept = apply_mask(p.raw, *p.keep);
  }
  p.final_normals = normalize_orient(kept, depth, K);
  return p;
}

}  // namespace

int cmd_estimate(const RunConfig& cfg, std::ostream& out) {
  const LoadedDepth in = load_depth(cfg);
  const Method m = cfg.methods.front();
  const Pipeline p = run_pipeline(cfg, m, in.depth, in.K);

  fs::create_directories(cfg.output);
  write_normals(p.raw, cfg.output / "normals_raw.raw64", NormalsMode::kRaw);
  write_normals(p.final_normals, cfg.output / "normals.raw64", NormalsMode::kRaw);
  write_normals(p.final_normals, cfg.output / "normals.ppm", NormalsMode::kColor);
  const AnglePair angles = angle_images(p.final_normals);
  write_angle_image(angles.theta, cfg.output / "theta.pgm");
  write_angle_image(angles.phi, cfg.output / "phi.pgm");
  if (p.keep) {
    write_mask_pbm(*p.keep, cfg.output / "mask.pbm");
    write_mask_raw(*p.keep, cfg.output / "mask.raw64");
  }

  const std::size_t valid_raw = p.raw.valid_count();
  const std::size_t valid = p.final_normals.valid_count();
  out << "method=" << method_name(m);
  if (m == Method::kPlanePca) {
    out << " window=" << cfg.window;
  } else if (m == Method::kMultiScale) {
    out << " scales=";
    for (std::size_t i = 0; i < cfg.scales.alphas.size(); ++i) {
      out << (i ? "," : "") << cfg.scales.alphas[i];
    }
  } else {
    out << " alpha=" << cfg.alpha;
  }
  out << " pixels=" << in.depth.size() << " valid_depth=" << in.depth.valid_count()
      << " valid_raw=" << valid_raw << " valid=" << valid << " removed=" << (valid_raw - valid);
  if (p.keep) {
    out << " mask=" << strategy_name(cfg.mask->strategy)
        << " threshold=" << format_double(p.threshold);
  } else {
    out << " mask=none";
  }
  out << "\n";
  return 0;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  const bool pca_truth = cfg.ground_truth == "plane-pca";
  std::optional<LoadedDepth> in;
  if (cfg.estimate.empty() || pca_truth) in = load_depth(cfg);

  const NormalMap truth = pca_truth ? estimate_plane_pca(in->depth, in->K, cfg.window,
                                                         ExecOptions{cfg.threads})
                                    : read_normals_raw(cfg.ground_truth);

  std::ostringstream rows;
  if (!cfg.estimate.empty()) {
    const NormalMap est = read_normals_raw(cfg.estimate);
    require_same_shape(est, truth, "estimate vs ground truth");
    rows << "method=precomputed " << to_key_values(compare(est, truth)) << "\n";
  } else {
    require_same_shape(in->depth, truth, "depth vs ground truth");
    for (Method m : cfg.methods) {
      const Pipeline p = run_pipeline(cfg, m, in->depth, in->K);
      rows << "method=" << method_name(m) << " " << to_key_values(compare(p.final_normals, truth))
           << "\n";
    }
  }
  out << rows.str();
  if (!cfg.output.empty()) write_file(cfg.output, rows.str());
  return 0;
}

int cmd_benchmark(const RunConfig& cfg, std::ostream& out) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();

  DepthMap depth;
  CameraIntrinsics K;
  std::string source = "synthetic";
  std::optional<double> io_ms;
  if (!cfg.input.empty()) {
    const auto t0 = Clock::now();
    LoadedDepth in = load_depth(cfg);
    io_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    depth = std::move(in.depth);
    K = in.K;
    source = cfg.input.string();
  } else {
    depth = render(cfg.scene, {cfg.alpha}).depth;
    K = cfg.scene.intrinsics;
  }

  out << "benchmark rows=" << depth.rows() << " cols=" << depth.cols()
      << " threads=" << cfg.threads << " repetitions=" << cfg.repetitions
      << " warmup=" << cfg.warmup << " alpha=" << cfg.alpha << " window=" << cfg.window
      << " source=" << source;
  if (io_ms) out << " io_read_ms=" << fixed(*io_ms, 3);
  out << "\n";

  const double pixels = static_cast<double>(depth.size());
  std::map<Method, double> mean_ms;
  for (Method m : cfg.methods) {
    const EstimatorConfig ec = estimator_config(cfg, m);
    const ExecOptions exec{cfg.threads};
    NormalMap result(depth.rows(), depth.cols());
    for (int i = 0; i < cfg.warmup; ++i) estimate(depth, K, ec, result, exec);

    double total_ms = 0.0;
    double best_ms = 0.0;
    for (int i = 0; i < cfg.repetitions; ++i) {
      const auto t0 = Clock::now();
      estimate(depth, K, ec, result, exec);
      const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      total_ms += ms;
      best_ms = i == 0 ? ms : std::min(best_ms, ms);
    }
    const double mean = total_ms / cfg.repetitions;
    mean_ms[m] = mean;
    out << "method=" << method_name(m) << " mean_ms=" << fixed(mean, 4)
        << " min_ms=" << fixed(best_ms, 4) << " ns_per_pixel=" << fixed(mean * 1e6 / pixels, 3)
        << " fps=" << fixed(1000.0 / mean, 1) << " valid=" << result.valid_count() << "\n";
  }

  out << "summary";
  const auto ratio = [&](const char* key, Method a, Method b) {
    if (mean_ms.contains(a) && mean_ms.contains(b)) {
      out << " " << key << "=" << fixed(mean_ms[a] / mean_ms[b], 3);
    }
  };
  ratio("plane_pca_over_multi_direction", Method::kPlanePca, Method::kMultiDirection);
  ratio("multi_direction_over_single_pair", Method::kMultiDirection, Method::kSinglePair);
  ratio("multi_direction_over_four_cross", Method::kMultiDirection, Method::kFourCross);
  out << " total_s="
      << fixed(std::chrono::duration<double>(Clock::now() - started).count(), 2) << "\n";
  return 0;
}

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  const GroundTruthScene scene = render(cfg.scene, {cfg.alpha});
  fs::create_directories(cfg.output);

  const std::string depth_name = std::string("depth.") + depth_extension(cfg.output_format);
  write_depth(scene.depth, cfg.output / depth_name, cfg.output_format);
  write_normals(scene.normals, cfg.output / "normals_gt.raw64", NormalsMode::kRaw);
  write_normals(scene.normals, cfg.output / "normals_gt.ppm", NormalsMode::kColor);
  write_mask_pbm(scene.discontinuity, cfg.output / "discontinuity.pbm");
  write_mask_raw(scene.discontinuity, cfg.output / "discontinuity.raw64");
  write_intrinsics({cfg.scene.intrinsics, kDefaultDepthScale}, cfg.output / "intrinsics.txt");
  write_file(cfg.output / "estimate.cfg",
             "# written by dnorm synth; paths are relative to this file\n"
             "input = " + depth_name + "\n"
             "intrinsics = intrinsics.txt\n"
             "ground_truth = normals_gt.raw64\n"
             "alpha = " + std::to_string(cfg.alpha) + "\n");

  out << "scene=" << scene_kind_name(cfg.scene.geometry) << " rows=" << cfg.scene.rows
      << " cols=" << cfg.scene.cols << " valid=" << scene.depth.valid_count()
      << " discontinuity=" << scene.discontinuity.count()
      << " noise=" << format_double(cfg.scene.noise_sigma) << " seed=" << cfg.scene.seed
      << " alpha=" << cfg.alpha << "\n";
  return 0;
}

}  // namespace dnorm::cli
