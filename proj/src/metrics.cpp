#include "vqf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace vqf::metrics {

double quat_error_angle(const Quaternion& q_est, const Quaternion& q_ref) {
  const Quaternion e = q_est * inverse(q_ref);
  return rad2deg(2.0 * std::acos(std::min(1.0, std::abs(e.w))));
}

SwingTwist swing_twist(const Quaternion& e) {
  const double n = std::hypot(e.w, e.z);
  if (n < 1e-15) {
    // 180 deg about a horizontal axis: the twist is undefined, pick identity.
    return {e, Quaternion::identity()};
  }
  const Quaternion twist{e.w / n, 0.0, 0.0, e.z / n};
  return {e * inverse(twist), twist};
}

HeadingInclination heading_inclination_split(const Quaternion& q_est, const Quaternion& q_ref) {
  const Quaternion e = q_est * inverse(q_ref);
  HeadingInclination out;
  out.heading = std::abs(rad2deg(wrap_to_pi(2.0 * std::atan2(e.z, e.w))));
  out.inclination = rad2deg(2.0 * std::acos(std::min(1.0, std::hypot(e.w, e.z))));
  return out;
}

double rmse_over_mask(std::span<const double> angles, std::span<const std::uint8_t> mask) {
  if (angles.size() != mask.size()) {
    throw std::invalid_argument("angles and mask must have equal length");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (mask[i]) {
      sum += angles[i] * angles[i];
      ++count;
    }
  }
  if (count == 0) {
    throw std::invalid_argument("mask selects no samples");
  }
  return std::sqrt(sum / static_cast<double>(count));
}

double bias_residual_rms(std::span<const Vec3> b_est, std::span<const Vec3> b_true) {
  if (b_est.size() != b_true.size()) {
    throw std::invalid_argument("bias series must have equal length");
  }
  if (b_est.empty()) {
    return 0.0;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < b_est.size(); ++i) {
    const Vec3 d = b_est[i] - b_true[i];
    sum += dot(d, d);
  }
  return rad2deg(std::sqrt(sum / static_cast<double>(b_est.size())));
}

ErrorReport evaluate(std::span<const Quaternion> q_est, std::span<const Quaternion> q_ref,
                     std::span<const std::uint8_t> motion_mask, std::span<const Vec3> b_est,
                     std::span<const Vec3> b_true) {
  const std::size_t n = q_est.size();
  if (q_ref.size() != n || motion_mask.size() != n) {
    throw std::invalid_argument("estimate, reference and mask must have equal length");
  }
  std::vector<double> total(n), heading(n), incl(n);
  ErrorReport report;
  for (std::size_t i = 0; i < n; ++i) {
    total[i] = quat_error_angle(q_est[i], q_ref[i]);
    const auto split = heading_inclination_split(q_est[i], q_ref[i]);
    heading[i] = split.heading;
    incl[i] = split.inclination;
    if (motion_mask[i]) {
      ++report.motion_samples;
    } else {
      ++report.rest_samples;
    }
  }
  report.orientation_rmse = rmse_over_mask(total, motion_mask);
  report.inclination_rmse = rmse_over_mask(incl, motion_mask);
  report.heading_rmse = rmse_over_mask(heading, motion_mask);
  if (!b_est.empty() || !b_true.empty()) {
    report.bias_residual_rms = bias_residual_rms(b_est, b_true);
  }
  return report;
}

std::string to_key_value(const ErrorReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "orientation_rmse = %.9g\ninclination_rmse = %.9g\nheading_rmse = %.9g\nbias_residual_rms = %.9g\n"
                "motion_samples = %zu\nrest_samples = %zu\n",
                r.orientation_rmse, r.inclination_rmse, r.heading_rmse, r.bias_residual_rms, r.motion_samples,
                r.rest_samples);
  return buf;
}

}  // namespace vqf::metrics
