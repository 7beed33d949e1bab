#include "dnorm_cli/config.hpp"

#include <algorithm>
#include <thread>

#include "dnorm/kvtext.hpp"

namespace dnorm::cli {

namespace {

constexpr const char* kPlanePcaTruth = "plane-pca";

bool is_path_key(std::string_view key) {
  return key == "input" || key == "intrinsics" || key == "output" || key == "estimate" ||
         key == "ground_truth";
}

class Layered {
 public:
  Layered(const Settings& flags, const Settings& file) : flags_(flags), file_(file) {}

  std::optional<std::string> get(std::string_view key) const {
    if (auto it = flags_.find(key); it != flags_.end()) return it->second;
    if (auto it = file_.find(key); it != file_.end()) return it->second;
    return std::nullopt;
  }

  std::string str(std::string_view key, std::string fallback) const {
    return get(key).value_or(std::move(fallback));
  }

  double real(std::string_view key, double fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    const auto d = parse_double(*v);
    if (!d) throw InvalidInputError(std::string(key) + " must be a number, got '" + *v + "'");
    return *d;
  }

  long long integer(std::string_view key, long long fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    const auto i = parse_int(*v);
    if (!i) throw InvalidInputError(std::string(key) + " must be an integer, got '" + *v + "'");
    return *i;
  }

  int small_int(std::string_view key, int fallback) const {
    const long long v = integer(key, fallback);
    if (v < -1'000'000'000 || v > 1'000'000'000) {
      throw InvalidInputError(std::string(key) + " is out of range");
    }
    return static_cast<int>(v);
  }

  bool flag(std::string_view key) const {
    const auto v = get(key);
    if (!v) return false;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw InvalidInputError(std::string(key) + " must be true or false, got '" + *v + "'");
  }

  std::vector<std::string> list(std::string_view key, std::vector<std::string> fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = v->find(',', start);
      std::string item = v->substr(start, comma == std::string::npos ? std::string::npos
                                                                      : comma - start);
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t") + 1);
      if (item.empty()) throw InvalidInputError(std::string(key) + " has an empty list item");
      out.push_back(std::move(item));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  }

  Vec3 vec3(std::string_view key, const Vec3& fallback) const {
    if (!get(key)) return fallback;
    const auto items = list(key, {});
    if (items.size() != 3) throw InvalidInputError(std::string(key) + " needs three values x,y,z");
    Vec3 out;
    for (int k = 0; k < 3; ++k) {
      const auto d = parse_double(items[static_cast<std::size_t>(k)]);
      if (!d) throw InvalidInputError(std::string(key) + " has a non-numeric component");
      out[k] = *d;
    }
    return out;
  }

 private:
  const Settings& flags_;
  const Settings& file_;
};

std::filesystem::path require_path(const Layered& s, std::string_view key, Subcommand cmd) {
  const auto v = s.get(key);
  if (!v || v->empty()) {
    std::string flag(key);
    std::replace(flag.begin(), flag.end(), '_', '-');
    throw InvalidInputError(std::string(subcommand_name(cmd)) + " needs --" + flag);
  }
  return *v;
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const std::string& n : names) {
    const Method m = parse_method(n);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  return out;
}

SceneGeometry parse_geometry(const Layered& s, int cols) {
  const std::string kind = s.str("scene", "tilted-plane");
  if (kind == "fronto-plane") return FrontoPlane{s.real("depth", 2.0)};
  if (kind == "tilted-plane") {
    return TiltedPlane{s.vec3("normal", Vec3(0.2, -0.3, 1.0)), s.real("distance", 2.0)};
  }
  if (kind == "sphere") return Sphere{s.vec3("center", Vec3(0.0, 0.0, 2.0)), s.real("radius", 0.5)};
  if (kind == "step-edge") {
    return StepEdge{s.real("near", 1.0), s.real("far", 1.5), s.small_int("edge_col", cols / 2)};
  }
  throw InvalidInputError("unknown scene '" + kind +
                          "' (expected fronto-plane, tilted-plane, sphere or step-edge)");
}

}  // namespace

const char* subcommand_name(Subcommand s) noexcept {
  switch (s) {
    case Subcommand::kEstimate:
      return "estimate";
    case Subcommand::kEvaluate:
      return "evaluate";
    case Subcommand::kBenchmark:
      return "benchmark";
    case Subcommand::kSynth:
      return "synth";
  }
  return "unknown";
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "input",     "format",        "intrinsics",     "depth_scale", "output",   "method",
      "methods",   "alpha",         "scales",         "window",      "mask_strategy",
      "mask_threshold", "ground_truth", "estimate",   "repetitions", "warmup",   "rows",
      "cols",      "fx",            "fy",             "ox",          "oy",       "scene",
      "depth",     "normal",        "distance",       "center",      "radius",   "near",
      "far",       "edge_col",      "noise",          "seed",        "output_format",
      "threads",   "single_thread",
  };
  return keys;
}

Settings read_config_file(const std::filesystem::path& path) {
  const KeyValues kv = parse_key_value_text(read_file(path));
  const std::filesystem::path base = path.parent_path();
  Settings out;
  for (const auto& [key, value] : kv.entries()) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw InvalidInputError("unknown key '" + key + "' in config file '" + path.string() + "'");
    }
    std::string v = value;
    if (is_path_key(key) && !(key == "ground_truth" && v == kPlanePcaTruth)) {
      const std::filesystem::path p(v);
      if (p.is_relative()) v = (base / p).lexically_normal().string();
    }
    out.emplace(key, std::move(v));
  }
  return out;
}

RunConfig resolve_config(Subcommand command, const Settings& flags, const Settings& file) {
  const Layered s(flags, file);
  RunConfig cfg;
  cfg.command = command;

  if (const auto f = s.get("format")) cfg.input_format = parse_depth_format(*f);
  if (s.get("depth_scale")) cfg.depth_scale = s.real("depth_scale", kDefaultDepthScale);
  if (const auto p = s.get("input")) cfg.input = *p;
  if (const auto p = s.get("intrinsics")) cfg.intrinsics = *p;
  if (const auto p = s.get("output")) cfg.output = *p;

  cfg.alpha = s.small_int("alpha", command == Subcommand::kSynth ? 1 : 2);
  StencilParams{cfg.alpha}.validate();
  {
    std::vector<int> alphas;
    for (const std::string& a : s.list("scales", {"1", "2", "3"})) {
      const auto v = parse_int(a);
      if (!v || *v < 1 || *v > 1'000'000) throw InvalidInputError("scales must be positive integers");
      alphas.push_back(static_cast<int>(*v));
    }
    cfg.scales.alphas = std::move(alphas);
    cfg.scales.validate();
  }
  cfg.window = s.small_int("window", 5);
  if (cfg.window < 3 || cfg.window % 2 == 0) {
    throw InvalidInputError("window must be odd and >= 3");
  }

  const std::string strategy = s.str("mask_strategy", "robust-sigma");
  if (strategy != "none") {
    BoundaryMaskParams mask;
    mask.strategy = parse_strategy(strategy);
    mask.threshold = s.real("mask_threshold", default_threshold(mask.strategy));
    mask.validate();
    cfg.mask = mask;
  }

  switch (command) {
    case Subcommand::kEstimate:
      cfg.methods = parse_methods({s.str("method", "multi-direction")});
      break;
    case Subcommand::kEvaluate:
      cfg.methods = parse_methods(s.list("methods", {"multi-direction", "single-pair", "multi-scale"}));
      break;
    case Subcommand::kBenchmark:
      cfg.methods = parse_methods(s.list(
          "methods", {"multi-direction", "single-pair", "multi-scale", "four-cross", "plane-pca"}));
      break;
    case Subcommand::kSynth:
      break;
  }

  cfg.repetitions = s.small_int("repetitions", 200);
  if (cfg.repetitions < 1) throw InvalidInputError("repetitions must be >= 1");
  cfg.warmup = s.small_int("warmup", 10);
  if (cfg.warmup < 10) throw InvalidInputError("warmup must be >= 10");

  const long long threads = s.integer("threads", 0);
  if (threads < 0 || threads > 1024) throw InvalidInputError("threads must lie in [0, 1024]");
  cfg.threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                             : static_cast<unsigned>(threads);
  if (s.flag("single_thread")) cfg.threads = 1;

  // Scene description, used by synth and by benchmark when no input is given.
  SceneSpec& scene = cfg.scene;
  scene.rows = s.small_int("rows", 576);
  scene.cols = s.small_int("cols", 640);
  if (scene.rows < 1 || scene.cols < 1 || scene.rows > 65535 || scene.cols > 65535) {
    throw InvalidInputError("rows and cols must lie in [1, 65535]");
  }
  if (command == Subcommand::kSynth && !cfg.intrinsics.empty()) {
    scene.intrinsics = read_intrinsics(cfg.intrinsics).intrinsics;
  } else {
    scene.intrinsics = {s.real("fx", 500.0), s.real("fy", 500.0),
                        s.real("ox", (scene.cols - 1) / 2.0), s.real("oy", (scene.rows - 1) / 2.0)};
  }
  scene.geometry = parse_geometry(s, scene.cols);
  scene.noise_sigma = s.real("noise", command == Subcommand::kBenchmark ? 0.002 : 0.0);
  {
    const long long seed = s.integer("seed", command == Subcommand::kBenchmark ? 1 : 0);
    if (seed < 0) throw InvalidInputError("seed must be >= 0");
    scene.seed = static_cast<std::uint64_t>(seed);
  }
  if (const auto f = s.get("output_format")) cfg.output_format = parse_depth_format(*f);

  if (const auto g = s.get("ground_truth")) cfg.ground_truth = *g;
  if (const auto e = s.get("estimate")) cfg.estimate = *e;

  switch (command) {
    case Subcommand::kEstimate:
      require_path(s, "input", command);
      require_path(s, "intrinsics", command);
      require_path(s, "output", command);
      break;
    case Subcommand::kEvaluate:
      require_path(s, "ground_truth", command);
      if (cfg.estimate.empty() || cfg.ground_truth == kPlanePcaTruth) {
        require_path(s, "input", command);
        require_path(s, "intrinsics", command);
      }
      break;
    case Subcommand::kBenchmark:
      if (!cfg.input.empty()) require_path(s, "intrinsics", command);
      break;
    case Subcommand::kSynth:
      require_path(s, "output", command);
      scene.validate();
      break;
  }
  return cfg;
}

}  // namespace dnorm::cli
