#include "dnorm/metrics.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "dnorm/kvtext.hpp"

namespace dnorm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Neumaier-compensated running sum; reductions run in index order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double circular_difference(double a, double b) {
  double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

AngleImage blank_image(const NormalMap& n) {
  AngleImage img;
  img.rows = n.rows();
  img.cols = n.cols();
  img.values.assign(n.size(), 0.0);
  img.valid.assign(n.size(), 0);
  return img;
}

}  // namespace

AnglePair angle_images(const NormalMap& normals) {
  const SphericalMap sph = to_spherical(normals);
  AnglePair out{blank_image(normals), blank_image(normals)};
  for (std::size_t i = 0; i < sph.size(); ++i) {
    if (!sph.valid[i]) continue;
    out.theta.values[i] = sph.theta[i];
    out.phi.values[i] = sph.phi[i] < 0.0 ? sph.phi[i] + kTwoPi : sph.phi[i];
    out.theta.valid[i] = 1;
    out.phi.valid[i] = 1;
  }
  return out;
}

double mse(const AngleImage& a, const AngleImage& b) {
  require_same_shape(a.rows, a.cols, b.rows, b.cols, "mse");
  CompensatedSum sum;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a.valid[i] || !b.valid[i]) continue;
    const double d = circular_difference(a.values[i], b.values[i]);
    sum.add(d * d);
    ++count;
  }
  if (count == 0) throw UndefinedMetricError("mse: no jointly valid pixels");
  return sum.value() / static_cast<double>(count);
}

double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

ErrorReport compare(const NormalMap& estimate, const NormalMap& ground_truth) {
  require_same_shape(estimate, ground_truth, "compare");
  const AnglePair est = angle_images(estimate);
  const AnglePair gt = angle_images(ground_truth);

  ErrorReport report;
  report.mse_theta = mse(est.theta, gt.theta);
  report.mse_phi = mse(est.phi, gt.phi);

  CompensatedSum angular;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    if (!est.theta.valid[i] || !gt.theta.valid[i]) continue;
    angular.add(angle_between(estimate[i], ground_truth[i]));
    ++report.pixel_count;
  }
  report.mean_angular_error = angular.value() / static_cast<double>(report.pixel_count);
  return report;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string to_key_values(const ErrorReport& report) {
  std::ostringstream os;
  os << "mse_theta=" << format_double(report.mse_theta)
     << " mse_phi=" << format_double(report.mse_phi)
     << " mean_angular_error=" << format_double(report.mean_angular_error)
     << " pixel_count=" << report.pixel_count;
  return os.str();
}

ErrorReport parse_error_report(std::string_view row) {
  const KeyValues kv = parse_key_value_row(row);
  ErrorReport report;
  report.mse_theta = kv.get_double("mse_theta");
  report.mse_phi = kv.get_double("mse_phi");
  report.mean_angular_error = kv.get_double("mean_angular_error");
  report.pixel_count = kv.get_size("pixel_count");
  return report;
}

}  // namespace dnorm
