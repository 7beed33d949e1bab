#include "dnorm/synth.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace dnorm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in (0, 1].
double unit_open_low(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

struct Hit {
  double depth = 0.0;  // 0 for a miss
  Vec3 normal = Vec3::Zero();
};

struct RenderVisitor {
  Vec3 ray;
  int col;

  Hit operator()(const FrontoPlane& g) const { return {g.depth, Vec3(0.0, 0.0, -1.0)}; }

  Hit operator()(const TiltedPlane& g) const {
    const Vec3 n = g.normal.normalized();
    const double denom = n.dot(ray);
    if (!(denom > 0.0)) return {};
    const double d = g.distance / denom;
    if (!finite_positive(d)) return {};
    return {d, -n};
  }

  Hit operator()(const Sphere& g) const {
    const double ww = ray.squaredNorm();
    const double b = ray.dot(g.center);
    const double c = g.center.squaredNorm() - g.radius * g.radius;
    const double disc = b * b - ww * c;
    if (disc < 0.0 || b <= 0.0) return {};
    // Near root of ww t^2 - 2 b t + c = 0, in the cancellation-free form.
    const double t = c / (b + std::sqrt(disc));
    if (!finite_positive(t)) return {};
    Vec3 n = (t * ray - g.center) / g.radius;
    if (n.dot(t * ray) > 0.0) n = -n;
    return {t, n.normalized()};
  }

  Hit operator()(const StepEdge& g) const {
    return {col < g.edge_col ? g.near_depth : g.far_depth, Vec3(0.0, 0.0, -1.0)};
  }
};

struct ValidateVisitor {
  const SceneSpec& spec;

  void operator()(const FrontoPlane& g) const {
    if (!finite_positive(g.depth)) throw InvalidInputError("fronto-plane depth must be > 0");
  }
  void operator()(const TiltedPlane& g) const {
    if (!g.normal.allFinite() || !(g.normal.norm() > 0.0)) {
      throw InvalidInputError("tilted-plane normal must be finite and non-zero");
    }
    if (!finite_positive(g.distance)) {
      throw InvalidInputError("tilted-plane distance must be > 0");
    }
  }
  void operator()(const Sphere& g) const {
    if (!finite_positive(g.radius)) throw InvalidInputError("sphere radius must be > 0");
    if (!g.center.allFinite() || g.center.norm() <= g.radius) {
      throw InvalidInputError("camera must lie outside the sphere");
    }
    if (!(g.center.z() > 0.0)) throw InvalidInputError("sphere center must lie in front of the camera");
  }
  void operator()(const StepEdge& g) const {
    if (!finite_positive(g.near_depth) || !finite_positive(g.far_depth)) {
      throw InvalidInputError("step-edge depths must be > 0");
    }
    if (!(g.near_depth < g.far_depth)) {
      throw InvalidInputError("step-edge near depth must be smaller than far depth");
    }
    if (g.edge_col <= 0 || g.edge_col >= spec.cols) {
      throw InvalidInputError("step-edge column must lie strictly inside the image");
    }
  }
};

}  // namespace

void SceneSpec::validate() const {
  if (rows < 1 || cols < 1) throw InvalidInputError("scene must have at least one pixel");
  intrinsics.validate();
  if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) {
    throw InvalidInputError("noise sigma must be finite and >= 0");
  }
  std::visit(ValidateVisitor{*this}, geometry);
}

double gaussian_sample(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t key = splitmix64(seed);
  const double u1 = unit_open_low(splitmix64(key ^ (2 * counter)));
  const double u2 = unit_open_low(splitmix64(key ^ (2 * counter + 1)));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

DepthMap perturb(const DepthMap& depth, double sigma, std::uint64_t seed) {
  if (!std::isfinite(sigma) || sigma < 0.0) {
    throw InvalidInputError("noise sigma must be finite and >= 0");
  }
  if (sigma == 0.0) return depth;
  std::vector<double> out(depth.data().begin(), depth.data().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] > 0.0) out[i] += sigma * gaussian_sample(seed, i);
  }
  return DepthMap(depth.rows(), depth.cols(), std::move(out));
}

GroundTruthScene render(const SceneSpec& spec, StencilParams stencil) {
  spec.validate();
  stencil.validate();
  const std::size_t n = static_cast<std::size_t>(spec.rows) * static_cast<std::size_t>(spec.cols);
  std::vector<double> depth(n, 0.0);
  NormalMap normals(spec.rows, spec.cols);
  normals.normalized = true;
  normals.oriented = true;

  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      const PixelRay ray = pixel_ray(r, c, spec.intrinsics);
      const Hit hit = std::visit(RenderVisitor{Vec3(ray.u, ray.v, 1.0), c}, spec.geometry);
      if (!finite_positive(hit.depth)) continue;
      const std::size_t i = static_cast<std::size_t>(r) * static_cast<std::size_t>(spec.cols) +
                            static_cast<std::size_t>(c);
      depth[i] = hit.depth;
      normals.set(i, hit.normal);
    }
  }

  PixelMask jumps(spec.rows, spec.cols);
  if (const auto* step = std::get_if<StepEdge>(&spec.geometry)) {
    for (int r = 0; r < spec.rows; ++r) {
      for (int c = step->edge_col - stencil.alpha; c < step->edge_col + stencil.alpha; ++c) {
        if (c >= 0 && c < spec.cols) jumps.set(r, c, true);
      }
    }
  }

  DepthMap clean(spec.rows, spec.cols, std::move(depth));
  if (clean.valid_count() == 0) throw InvalidInputError("scene geometry is not visible");
  return {perturb(clean, spec.noise_sigma, spec.seed), std::move(normals), std::move(jumps)};
}

const char* scene_kind_name(const SceneGeometry& g) noexcept {
  struct Namer {
    const char* operator()(const FrontoPlane&) const { return "fronto-plane"; }
    const char* operator()(const TiltedPlane&) const { return "tilted-plane"; }
    const char* operator()(const Sphere&) const { return "sphere"; }
    const char* operator()(const StepEdge&) const { return "step-edge"; }
  };
  return std::visit(Namer{}, g);
}

}  // namespace dnorm
