#include "dnorm/estimators.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

#include "parallel.hpp"

namespace dnorm {

namespace {

// Relative gap below which the two smallest scatter eigenvalues count as equal.
constexpr double kEigenTieTolerance = 1e-10;

struct RayTable {
  std::vector<double> u;  // per column
  std::vector<double> v;  // per row
};

RayTable make_rays(int rows, int cols, const CameraIntrinsics& K) {
  RayTable t;
  t.u.resize(static_cast<std::size_t>(cols));
  t.v.resize(static_cast<std::size_t>(rows));
  for (int c = 0; c < cols; ++c) t.u[static_cast<std::size_t>(c)] = pixel_ray(0, c, K).u;
  for (int r = 0; r < rows; ++r) t.v[static_cast<std::size_t>(r)] = pixel_ray(r, 0, K).v;
  return t;
}

void check_inputs(const DepthMap& depth, const CameraIntrinsics& K, int alpha) {
  K.validate();
  StencilParams{alpha}.validate();
  (void)depth;
}

// Reshapes `out` to rows x cols unless it already matches, and clears the
// normalized/oriented promises. Contents are left for the caller to overwrite.
void prepare_output(NormalMap& out, int rows, int cols) {
  if (out.rows() != rows || out.cols() != cols) out = NormalMap(rows, cols);
  out.normalized = false;
  out.oriented = false;
}

void clear_rows(NormalMap& out, int row_begin, int row_end) {
  const std::size_t stride = static_cast<std::size_t>(out.cols());
  for (int r = std::max(row_begin, 0); r < std::min(row_end, out.rows()); ++r) {
    const std::size_t base = static_cast<std::size_t>(r) * stride;
    std::fill_n(out.vectors().begin() + static_cast<std::ptrdiff_t>(base), stride, Vec3::Zero());
    std::fill_n(out.valid_flags().begin() + static_cast<std::ptrdiff_t>(base), stride,
                std::uint8_t{0});
  }
}

// Shared driver for the three-row cross stencils. `kernel` is called for each
// interior pixel with pointers to rows r - alpha, r, r + alpha and must return
// the raw normal; validity of all five samples is decided here. Every pixel of
// `out` is written exactly once.
template <typename Kernel>
void run_cross_stencil(const DepthMap& depth, int alpha, unsigned threads, NormalMap& out,
                       Kernel kernel) {
  const int rows = depth.rows();
  const int cols = depth.cols();
  prepare_output(out, rows, cols);
  if (rows <= 2 * alpha || cols <= 2 * alpha) {
    clear_rows(out, 0, rows);
    return;
  }
  clear_rows(out, 0, alpha);
  clear_rows(out, rows - alpha, rows);

  const double* data = depth.data().data();
  Vec3* vectors = out.vectors().data();
  std::uint8_t* valid = out.valid_flags().data();
  const std::size_t stride = static_cast<std::size_t>(cols);
  const std::size_t a = static_cast<std::size_t>(alpha);

  detail::for_row_blocks(alpha, rows - alpha, threads, [&](int row_begin, int row_end) {
    for (int r = row_begin; r < row_end; ++r) {
      const std::size_t base = static_cast<std::size_t>(r) * stride;
      const double* above = data + base - a * stride;
      const double* mid = data + base;
      const double* below = data + base + a * stride;
      for (std::size_t c = 0; c < a; ++c) {
        vectors[base + c].setZero();
        valid[base + c] = 0;
        vectors[base + stride - 1 - c].setZero();
        valid[base + stride - 1 - c] = 0;
      }
      for (std::size_t c = a; c + a < stride; ++c) {
        const bool ok = (mid[c] > 0.0) & (mid[c + a] > 0.0) & (mid[c - a] > 0.0) &
                        (below[c] > 0.0) & (above[c] > 0.0);
        if (ok) {
          vectors[base + c] = kernel(r, c, above, mid, below);
          valid[base + c] = 1;
        } else {
          vectors[base + c].setZero();
          valid[base + c] = 0;
        }
      }
    }
  });
}

}  // namespace

void MultiScaleParams::validate() const {
  if (alphas.empty()) throw InvalidInputError("multi-scale needs at least one offset");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    StencilParams{alphas[i]}.validate();
    for (std::size_t j = 0; j < i; ++j) {
      if (alphas[j] == alphas[i]) {
        throw InvalidInputError("multi-scale offsets must be distinct, " +
                                std::to_string(alphas[i]) + " repeats");
      }
    }
  }
}

std::optional<Stencil5> gather_stencil(const DepthMap& depth, const CameraIntrinsics& K,
                                       PixelCoord p, int alpha) {
  if (p.row - alpha < 0 || p.col - alpha < 0 || p.row + alpha >= depth.rows() ||
      p.col + alpha >= depth.cols()) {
    return std::nullopt;
  }
  const PixelRay ray = pixel_ray(p.row, p.col, K);
  Stencil5 s{
      .d1 = depth.at(p.row, p.col),
      .d2 = depth.at(p.row, p.col + alpha),
      .d3 = depth.at(p.row + alpha, p.col),
      .d4 = depth.at(p.row, p.col - alpha),
      .d5 = depth.at(p.row - alpha, p.col),
      .u1 = ray.u,
      .v1 = ray.v,
  };
  if (!s.all_valid()) return std::nullopt;
  return s;
}

TangentPair tangent_pair(const Stencil5& s, const CameraIntrinsics& K, int alpha) {
  const double du = alpha / K.fx;
  const double dv = alpha / K.fy;
  const double u2 = s.u1 + du;
  const double u4 = s.u1 - du;
  const double v3 = s.v1 + dv;
  const double v5 = s.v1 - dv;
  return {
      Vec3(u4 * s.d4 - u2 * s.d2, s.v1 * s.d4 - s.v1 * s.d2, s.d4 - s.d2),
      Vec3(s.u1 * s.d5 - s.u1 * s.d3, v5 * s.d5 - v3 * s.d3, s.d5 - s.d3),
  };
}

void estimate_single_pair(const DepthMap& depth, const CameraIntrinsics& K, StencilParams params,
                          NormalMap& out, ExecOptions exec) {
  check_inputs(depth, K, params.alpha);
  const RayTable rays = make_rays(depth.rows(), depth.cols(), K);
  const double a = static_cast<double>(params.alpha);
  const std::size_t off = static_cast<std::size_t>(params.alpha);
  const double kx = a / K.fy;
  const double ky = a / K.fx;
  const double kz = a * a / (K.fx * K.fy);

  run_cross_stencil(
      depth, params.alpha, exec.threads, out,
      [&](int r, std::size_t c, const double*, const double* mid, const double* below) {
        const double d1 = mid[c];
        const double d2 = mid[c + off];
        const double d3 = below[c];
        const double u1 = rays.u[c];
        const double v1 = rays.v[static_cast<std::size_t>(r)];
        const double nx = -kx * d3 * (d2 - d1);
        const double ny = -ky * d2 * (d3 - d1);
        const double nz = ky * v1 * d2 * (d3 - d1) + kx * u1 * d3 * (d2 - d1) + kz * d2 * d3;
        return Vec3(nx, ny, nz);
      });
}

void estimate_multi_scale(const DepthMap& depth, const CameraIntrinsics& K,
                          const MultiScaleParams& params, NormalMap& out, ExecOptions exec) {
  params.validate();
  estimate_single_pair(depth, K, StencilParams{params.alphas.front()}, out, exec);
  NormalMap scale;
  for (std::size_t k = 1; k < params.alphas.size(); ++k) {
    estimate_single_pair(depth, K, StencilParams{params.alphas[k]}, scale, exec);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out.vectors()[i] += scale[i];
      out.valid_flags()[i] &= scale.valid_flags()[i];
    }
  }
  const double inv = 1.0 / static_cast<double>(params.alphas.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.valid(i)) {
      out.vectors()[i] *= inv;
    } else {
      out.invalidate(i);
    }
  }
}

void estimate_multi_direction(const DepthMap& depth, const CameraIntrinsics& K,
                              StencilParams params, NormalMap& out, ExecOptions exec) {
  check_inputs(depth, K, params.alpha);
  const RayTable rays = make_rays(depth.rows(), depth.cols(), K);
  const double a = static_cast<double>(params.alpha);
  const std::size_t off = static_cast<std::size_t>(params.alpha);
  const double kx = -(a / (4.0 * K.fy));
  const double ky = -(a / (4.0 * K.fx));
  const double kz = a * a / (4.0 * K.fx * K.fy);

  run_cross_stencil(
      depth, params.alpha, exec.threads, out,
      [&](int r, std::size_t c, const double* above, const double* mid, const double* below) {
        const double d2 = mid[c + off];
        const double d4 = mid[c - off];
        const double d3 = below[c];
        const double d5 = above[c];
        const double sum24 = d2 + d4;
        const double sum35 = d3 + d5;
        const double nx = kx * sum35 * (d2 - d4);
        const double ny = ky * sum24 * (d3 - d5);
        const double nz =
            -rays.u[c] * nx - rays.v[static_cast<std::size_t>(r)] * ny + kz * sum24 * sum35;
        return Vec3(nx, ny, nz);
      });
}

void estimate_four_cross(const DepthMap& depth, const CameraIntrinsics& K, StencilParams params,
                         NormalMap& out, ExecOptions exec) {
  check_inputs(depth, K, params.alpha);
  const RayTable rays = make_rays(depth.rows(), depth.cols(), K);
  const std::size_t off = static_cast<std::size_t>(params.alpha);

  run_cross_stencil(
      depth, params.alpha, exec.threads, out,
      [&](int r, std::size_t c, const double* above, const double* mid, const double* below) {
        const std::size_t row = static_cast<std::size_t>(r);
        const auto point = [](double u, double v, double d) { return Vec3(u * d, v * d, d); };
        const Vec3 p1 = point(rays.u[c], rays.v[row], mid[c]);
        const Vec3 p2 = point(rays.u[c + off], rays.v[row], mid[c + off]);
        const Vec3 p3 = point(rays.u[c], rays.v[row + off], below[c]);
        const Vec3 p4 = point(rays.u[c - off], rays.v[row], mid[c - off]);
        const Vec3 p5 = point(rays.u[c], rays.v[row - off], above[c]);
        const Vec3 s12 = p2 - p1;
        const Vec3 s13 = p3 - p1;
        const Vec3 s14 = p4 - p1;
        const Vec3 s15 = p5 - p1;
        return Vec3(0.25 * (s12.cross(s13) + s13.cross(s14) + s14.cross(s15) + s15.cross(s12)));
      });
}

std::optional<Vec3> fit_plane_normal(std::span<const Vec3> points) {
  if (points.size() < 3) return std::nullopt;
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (const Vec3& p : points) {
    const Vec3 q = p - mean;
    scatter.noalias() += q * q.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(scatter);
  if (solver.info() != Eigen::Success) return std::nullopt;
  const Vec3& ev = solver.eigenvalues();  // ascending
  if (!(ev(2) > 0.0) || ev(1) - ev(0) <= kEigenTieTolerance * ev(2)) return std::nullopt;
  return Vec3(solver.eigenvectors().col(0).normalized());
}

void estimate_plane_pca(const DepthMap& depth, const CameraIntrinsics& K, int window,
                        NormalMap& out, ExecOptions exec) {
  K.validate();
  if (window < 3 || window % 2 == 0) {
    throw InvalidInputError("plane-PCA window must be odd and >= 3, got " +
                            std::to_string(window));
  }
  const int rows = depth.rows();
  const int cols = depth.cols();
  const int half = window / 2;
  prepare_output(out, rows, cols);
  clear_rows(out, 0, rows);
  out.normalized = true;
  out.oriented = true;
  if (rows < window || cols < window) return;

  const RayTable rays = make_rays(rows, cols, K);
  std::vector<Vec3> cloud(depth.size());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                            static_cast<std::size_t>(c);
      const double d = depth[i];
      cloud[i] = Vec3(rays.u[static_cast<std::size_t>(c)] * d,
                      rays.v[static_cast<std::size_t>(r)] * d, d);
    }
  }

  detail::for_row_blocks(half, rows - half, exec.threads, [&](int row_begin, int row_end) {
    std::vector<Vec3> neighborhood;
    neighborhood.reserve(static_cast<std::size_t>(window * window));
    for (int r = row_begin; r < row_end; ++r) {
      for (int c = half; c < cols - half; ++c) {
        neighborhood.clear();
        bool ok = true;
        for (int dr = -half; dr <= half && ok; ++dr) {
          for (int dc = -half; dc <= half; ++dc) {
            const std::size_t j = static_cast<std::size_t>(r + dr) * static_cast<std::size_t>(cols) +
                                  static_cast<std::size_t>(c + dc);
            if (!depth.valid(j)) {
              ok = false;
              break;
            }
            neighborhood.push_back(cloud[j]);
          }
        }
        if (!ok) continue;
        std::optional<Vec3> n = fit_plane_normal(neighborhood);
        if (!n) continue;
        const std::size_t i =
            static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c);
        if (n->dot(cloud[i]) > 0.0) *n = -*n;
        out.set(i, *n);
      }
    }
  });
}

const char* method_name(Method m) noexcept {
  switch (m) {
    case Method::kMultiDirection:
      return "multi-direction";
    case Method::kSinglePair:
      return "single-pair";
    case Method::kMultiScale:
      return "multi-scale";
    case Method::kPlanePca:
      return "plane-pca";
    case Method::kFourCross:
      return "four-cross";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kMultiDirection, Method::kSinglePair, Method::kMultiScale,
                   Method::kPlanePca, Method::kFourCross}) {
    if (name == method_name(m)) return m;
  }
  throw InvalidInputError("unknown method '" + std::string(name) + "'");
}

void estimate(const DepthMap& depth, const CameraIntrinsics& K, const EstimatorConfig& cfg,
              NormalMap& out, ExecOptions exec) {
  switch (cfg.method) {
    case Method::kMultiDirection:
      return estimate_multi_direction(depth, K, cfg.stencil, out, exec);
    case Method::kSinglePair:
      return estimate_single_pair(depth, K, cfg.stencil, out, exec);
    case Method::kMultiScale:
      return estimate_multi_scale(depth, K, cfg.scales, out, exec);
    case Method::kPlanePca:
      return estimate_plane_pca(depth, K, cfg.window, out, exec);
    case Method::kFourCross:
      return estimate_four_cross(depth, K, cfg.stencil, out, exec);
  }
  throw InvalidInputError("unhandled estimator method");
}

NormalMap estimate(const DepthMap& depth, const CameraIntrinsics& K, const EstimatorConfig& cfg,
                   ExecOptions exec) {
  NormalMap out;
  estimate(depth, K, cfg, out, exec);
  return out;
}

NormalMap estimate_single_pair(const DepthMap& depth, const CameraIntrinsics& K,
                               StencilParams params, ExecOptions exec) {
  NormalMap out;
  estimate_single_pair(depth, K, params, out, exec);
  return out;
}

NormalMap estimate_multi_scale(const DepthMap& depth, const CameraIntrinsics& K,
                               const MultiScaleParams& params, ExecOptions exec) {
  NormalMap out;
  estimate_multi_scale(depth, K, params, out, exec);
  return out;
}

NormalMap estimate_multi_direction(const DepthMap& depth, const CameraIntrinsics& K,
                                   StencilParams params, ExecOptions exec) {
  NormalMap out;
  estimate_multi_direction(depth, K, params, out, exec);
  return out;
}

NormalMap estimate_four_cross(const DepthMap& depth, const CameraIntrinsics& K,
                              StencilParams params, ExecOptions exec) {
  NormalMap out;
  estimate_four_cross(depth, K, params, out, exec);
  return out;
}

NormalMap estimate_plane_pca(const DepthMap& depth, const CameraIntrinsics& K, int window,
                             ExecOptions exec) {
  NormalMap out;
  estimate_plane_pca(depth, K, window, out, exec);
  return out;
}

}  // namespace dnorm
