// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dnorm/boundary.hpp"
#include "dnorm/estimators.hpp"
#include "dnorm/io.hpp"
#include "dnorm/kvtext.hpp"
#include "dnorm/metrics.hpp"
#include "dnorm/synth.hpp"
#include "dnorm_cli/commands.hpp"
#include "support/oracles.hpp"

namespace {

using namespace dnorm;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr int kStencils = 100'000;
constexpr std::uint64_t kStencilSeed = 20240607;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SceneSpec tilted_plane(double noise = 0.0, std::uint64_t seed = 0) {
  SceneSpec s;
  s.geometry = TiltedPlane{Vec3(0.2, -0.3, 1.0), 2.0};
  s.noise_sigma = noise;
  s.seed = seed;
  return s;
}

NormalMap oriented(const NormalMap& raw, const GroundTruthScene& scene, const SceneSpec& spec) {
  return normalize_orient(raw, scene.depth, spec.intrinsics);
}

// 1
Outcome four_cross_identity() {
  const auto t0 = Clock::now();
  testing::StencilGenerator gen(kStencilSeed);
  double worst = 0.0;
  for (int i = 0; i < kStencils; ++i) {
    const auto s = gen.next();
    worst = std::max(worst, testing::relative_error(testing::four_cross_average(s),
                                                    testing::collapsed_cross(s)));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-12 && t < 5.0, "stencils=" + std::to_string(kStencils) +
                                         " max_rel_err=" + num(worst) + " time_s=" + num(t)};
}

// 2
Outcome closed_form_fidelity() {
  testing::StencilGenerator gen(kStencilSeed);
  double worst_md = 0.0;
  double worst_sp = 0.0;
  for (int i = 0; i < kStencils; ++i) {
    const auto s = gen.next();
    const Stencil5 st = s.stencil();
    worst_md = std::max(worst_md, testing::relative_error(multi_direction_normal(st, s.K, s.alpha),
                                                          testing::collapsed_cross(s)));
    worst_sp = std::max(worst_sp, testing::relative_error(single_pair_normal(st, s.K, s.alpha),
                                                          testing::single_pair_cross(s)));
  }
  return {worst_md <= 1e-12 && worst_sp <= 1e-12,
          "stencils=" + std::to_string(kStencils) + " multi_direction_max_rel_err=" + num(worst_md) +
              " single_pair_max_rel_err=" + num(worst_sp)};
}

// 3
Outcome planar_exactness() {
  const SceneSpec spec = tilted_plane();
  bool pass = true;
  std::string detail;
  for (int alpha : {1, 2}) {
    const GroundTruthScene scene = render(spec, {alpha});
    for (Method m : {Method::kMultiDirection, Method::kSinglePair, Method::kMultiScale,
                     Method::kPlanePca}) {
      EstimatorConfig cfg;
      cfg.method = m;
      cfg.stencil = {alpha};
      const NormalMap n = oriented(estimate(scene.depth, spec.intrinsics, cfg), scene, spec);
      const double err = testing::mean_angular_error(n, scene.normals);
      pass = pass && err < 1e-6;
      detail += std::string(detail.empty() ? "" : " ") + method_name(m) + "@" +
                std::to_string(alpha) + "=" + num(err);
    }
  }
  return {pass, "mean_rad " + detail};
}

// 4
Outcome sphere_accuracy() {
  SceneSpec spec;
  spec.geometry = Sphere{};
  const GroundTruthScene scene = render(spec, {1});
  const NormalMap n =
      oriented(estimate_multi_direction(scene.depth, spec.intrinsics, {1}), scene, spec);
  const PixelMask interior = testing::erode_valid(scene.normals, 5);
  const double err = testing::mean_angular_error(n, scene.normals, &interior);
  const double deg = err * 180.0 / std::numbers::pi;
  return {interior.count() > 0 && deg < 1.0,
          "interior_pixels=" + std::to_string(interior.count()) + " mean_deg=" + num(deg)};
}

// 5
Outcome noise_ordering() {
  const SceneSpec spec = tilted_plane(0.002, 7);
  bool pass = true;
  std::string detail;
  for (int alpha : {1, 2}) {
    const GroundTruthScene scene = render(spec, {alpha});
    const ErrorReport md = compare(
        oriented(estimate_multi_direction(scene.depth, spec.intrinsics, {alpha}), scene, spec),
        scene.normals);
    const ErrorReport sp = compare(
        oriented(estimate_single_pair(scene.depth, spec.intrinsics, {alpha}), scene, spec),
        scene.normals);
    pass = pass && md.mse_theta <= sp.mse_theta && md.mse_phi <= sp.mse_phi;
    const std::string a = "@" + std::to_string(alpha);
    detail += std::string(detail.empty() ? "" : " ") + "theta" + a + "=" + num(md.mse_theta) +
              "/" + num(sp.mse_theta) + " phi" + a + "=" + num(md.mse_phi) + "/" +
              num(sp.mse_phi);
  }
  return {pass, "multi_direction/single_pair " + detail};
}

// Timings from the shipped benchmark command, run once and shared by 6 and 7.
struct BenchmarkRun {
  bool ok = false;
  std::map<std::string, KeyValues> methods;
  KeyValues summary;
  std::string error;
};

const BenchmarkRun& benchmark_run() {
  static const BenchmarkRun run = [] {
    BenchmarkRun r;
    const char* argv[] = {"dnorm", "benchmark", "--single-thread"};
    std::ostringstream out, err;
    if (cli::run(3, argv, out, err) != 0) {
      r.error = err.str();
      return r;
    }
    std::istringstream lines(out.str());
    std::string line;
    while (std::getline(lines, line)) {
      if (line.rfind("method=", 0) == 0) {
        KeyValues kv = parse_key_value_row(line);
        r.methods.emplace(kv.get_string("method"), std::move(kv));
      } else if (line.rfind("summary ", 0) == 0) {
        r.summary = parse_key_value_row(line.substr(8));
      }
    }
    r.ok = true;
    return r;
  }();
  return run;
}

double mean_ms(const BenchmarkRun& run, const char* method) {
  return run.methods.at(method).get_double("mean_ms");
}

// 6
Outcome four_cross_equivalence() {
  double worst = 0.0;
  bool same_validity = true;
  const SceneSpec plane = tilted_plane(0.002, 3);
  SceneSpec sphere;
  sphere.geometry = Sphere{};
  sphere.noise_sigma = 0.001;
  sphere.seed = 4;
  for (const SceneSpec& spec : {plane, sphere}) {
    for (int alpha : {1, 2}) {
      const DepthMap depth = render(spec, {alpha}).depth;
      const NormalMap fast = estimate_multi_direction(depth, spec.intrinsics, {alpha});
      const NormalMap slow = estimate_four_cross(depth, spec.intrinsics, {alpha});
      for (std::size_t i = 0; i < fast.size(); ++i) {
        same_validity = same_validity && fast.valid(i) == slow.valid(i);
        if (fast.valid(i) && slow.valid(i)) {
          worst = std::max(worst, testing::relative_error(fast[i], slow[i]));
        }
      }
    }
  }
  const BenchmarkRun& run = benchmark_run();
  if (!run.ok) return {false, "benchmark failed: " + run.error};
  const double ratio = mean_ms(run, "multi-direction") / mean_ms(run, "four-cross");
  return {same_validity && worst <= 1e-12 && ratio <= 0.5,
          "max_rel_err=" + num(worst) + " same_validity=" + (same_validity ? "yes" : "no") +
              " time_ratio=" + num(ratio)};
}

// 7
Outcome runtime_ratios() {
  const BenchmarkRun& run = benchmark_run();
  if (!run.ok) return {false, "benchmark failed: " + run.error};
  const double md = mean_ms(run, "multi-direction");
  const double pca_ratio = mean_ms(run, "plane-pca") / md;
  const double sp_ratio = md / mean_ms(run, "single-pair");
  const double fps = run.methods.at("multi-direction").get_double("fps");
  const double total = run.summary.get_double("total_s");
  return {pca_ratio >= 50.0 && sp_ratio <= 1.5 && fps >= 30.0 && total < 600.0,
          "pca_over_md=" + num(pca_ratio) + " md_over_sp=" + num(sp_ratio) +
              " md_fps=" + num(fps) + " md_mean_ms=" + num(md) + " total_s=" + num(total)};
}

// 8
Outcome boundary_mask() {
  const BoundaryMaskParams params{MaskStrategy::kRobustSigma,
                                  default_threshold(MaskStrategy::kRobustSigma)};
  double worst_recall = 1.0;
  double worst_false = 0.0;
  SceneSpec step;
  step.geometry = StepEdge{1.0, 1.5, 320};
  const SceneSpec plane = tilted_plane();
  for (int alpha : {1, 2}) {
    const GroundTruthScene scene = render(step, {alpha});
    const NormalMap raw = estimate_multi_direction(scene.depth, step.intrinsics, {alpha});
    const NormalMap kept = apply_mask(raw, compute_r_mask(to_spherical(raw), params));
    std::size_t straddling = 0, removed = 0;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (!scene.discontinuity[i]) continue;
      ++straddling;
      if (!kept.valid(i)) ++removed;
    }
    worst_recall = std::min(worst_recall, static_cast<double>(removed) /
                                              static_cast<double>(std::max<std::size_t>(1, straddling)));

    const DepthMap smooth = render(plane, {alpha}).depth;
    const NormalMap praw = estimate_multi_direction(smooth, plane.intrinsics, {alpha});
    const NormalMap pkept = apply_mask(praw, compute_r_mask(to_spherical(praw), params));
    worst_false = std::max(worst_false, 1.0 - static_cast<double>(pkept.valid_count()) /
                                                  static_cast<double>(praw.valid_count()));
  }
  return {worst_recall >= 0.95 && worst_false <= 0.01,
          "min_recall=" + num(worst_recall) + " max_false_removal=" + num(worst_false)};
}

// 9
bool bit_equal(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

Outcome io_round_trips() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> dim(1, 64);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> log_depth(-12.0, 12.0);
  std::normal_distribution<double> gauss;
  int depth_ok = 0, normals_ok = 0, masks_ok = 0;

  for (int t = 0; t < 100; ++t) {
    const int rows = dim(rng);
    const int cols = dim(rng);
    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);

    std::vector<double> d(n);
    for (double& v : d) v = unit(rng) < 0.1 ? 0.0 : std::exp(log_depth(rng));
    const DepthMap depth(rows, cols, std::move(d));
    const DepthMap depth_back = decode_depth(encode_depth(depth, DepthFormat::kRaw64),
                                             DepthFormat::kRaw64);
    bool same = depth_back.rows() == rows && depth_back.cols() == cols;
    for (std::size_t i = 0; same && i < n; ++i) same = bit_equal(depth[i], depth_back[i]);
    depth_ok += same;

    NormalMap normals(rows, cols);
    for (std::size_t i = 0; i < n; ++i) {
      if (unit(rng) < 0.8) normals.set(i, Vec3(gauss(rng), gauss(rng), gauss(rng)) * unit(rng));
    }
    normals.normalized = unit(rng) < 0.5;
    normals.oriented = unit(rng) < 0.5;
    const NormalMap normals_back = decode_normals_raw(encode_normals_raw(normals));
    same = normals_back.rows() == rows && normals_back.cols() == cols &&
           normals_back.normalized == normals.normalized &&
           normals_back.oriented == normals.oriented;
    for (std::size_t i = 0; same && i < n; ++i) {
      same = normals_back.valid(i) == normals.valid(i);
      for (int k = 0; same && k < 3; ++k) same = bit_equal(normals[i][k], normals_back[i][k]);
    }
    normals_ok += same;

    PixelMask mask(rows, cols);
    for (std::size_t i = 0; i < n; ++i) mask.set(i, unit(rng) < 0.5);
    masks_ok += decode_mask_raw(encode_mask_raw(mask)) == mask;
  }

  // Angle images of a real normal field, through a file and back.
  SceneSpec spec;
  spec.geometry = Sphere{};
  spec.noise_sigma = 0.001;
  spec.seed = 5;
  const GroundTruthScene scene = render(spec, {1});
  const AnglePair angles =
      angle_images(oriented(estimate_multi_direction(scene.depth, spec.intrinsics, {1}), scene, spec));
  const fs::path dir = fs::temp_directory_path() / ("dnorm_acceptance_io_" + std::to_string(rng()));
  fs::create_directories(dir);
  double worst = 0.0;
  for (const AngleImage* img : {&angles.theta, &angles.phi}) {
    write_angle_image(*img, dir / "angle.pgm");
    const AngleImage back = read_angle_image(dir / "angle.pgm");
    for (std::size_t i = 0; i < img->size(); ++i) {
      if (img->valid[i]) worst = std::max(worst, std::abs(back.values[i] - img->values[i]));
    }
  }
  fs::remove_all(dir);

  return {depth_ok == 100 && normals_ok == 100 && masks_ok == 100 &&
              worst <= std::numbers::pi / 255.0,
          "depth=" + std::to_string(depth_ok) + "/100 normals=" + std::to_string(normals_ok) +
              "/100 masks=" + std::to_string(masks_ok) + "/100 angle_max_err=" + num(worst) +
              " bound=" + num(std::numbers::pi / 255.0)};
}

// 10
int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dnorm");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (rc != 0) std::cerr << err.str();
  return rc;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files[entry.path().filename().string()] = read_file(entry.path());
  }
  return files;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() /
                        ("dnorm_acceptance_cli_" + std::to_string(std::random_device{}()));
  fs::create_directories(root);
  const auto run_all = [&](const std::string& tag, const std::vector<std::string>& threading) {
    const fs::path dir = root / tag;
    std::vector<std::string> synth = {"synth", "--scene", "sphere", "--noise", "0.002",
                                      "--seed", "11", "-o", (dir / "scene").string()};
    synth.insert(synth.end(), threading.begin(), threading.end());
    if (cli(synth) != 0) return false;
    for (const char* m : {"multi-direction", "single-pair", "multi-scale", "four-cross",
                          "plane-pca"}) {
      std::vector<std::string> est = {"estimate", "-c", (dir / "scene" / "estimate.cfg").string(),
                                      "-m", m, "-o", (dir / m).string()};
      est.insert(est.end(), threading.begin(), threading.end());
      if (cli(est) != 0) return false;
    }
    return true;
  };

  bool ran = run_all("single_a", {"--single-thread"}) && run_all("single_b", {"--single-thread"}) &&
             run_all("multi", {"--threads", "4"});
  std::size_t files = 0;
  bool repeat_same = ran;
  bool threads_same = ran;
  if (ran) {
    for (const auto& entry : fs::directory_iterator(root / "single_a")) {
      const std::string sub = entry.path().filename().string();
      const auto a = snapshot(root / "single_a" / sub);
      files += a.size();
      repeat_same = repeat_same && a == snapshot(root / "single_b" / sub);
      threads_same = threads_same && a == snapshot(root / "multi" / sub);
    }
  }
  fs::remove_all(root);
  return {ran && files > 0 && repeat_same && threads_same,
          "files=" + std::to_string(files) + " repeat_identical=" + (repeat_same ? "yes" : "no") +
              " threads_identical=" + (threads_same ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"four-cross average equals collapsed cross product", four_cross_identity},
      {"closed forms equal explicit cross products", closed_form_fidelity},
      {"planar exactness", planar_exactness},
      {"sphere interior accuracy", sphere_accuracy},
      {"noise robustness ordering", noise_ordering},
      {"multi-direction equals four-cross, at half the cost", four_cross_equivalence},
      {"runtime ratios and throughput", runtime_ratios},
      {"boundary mask recall and false removal", boundary_mask},
      {"raw64 round trips and angle quantization", io_round_trips},
      {"CLI determinism across runs and thread counts", determinism},
  };

  int failed = 0;
  int id = 0;
  for (const auto& [name, check] : criteria) {
    ++id;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
