#pragma once

// Orientation error metrics. Angles are returned in degrees, bias residuals
// in deg/s.

#include <cstdint>
#include <span>
#include <string>

#include "vqf/quat.hpp"

namespace vqf::metrics {

// Total rotation angle of q_est * q_ref^-1, in [0, 180].
double quat_error_angle(const Quaternion& q_est, const Quaternion& q_ref);

// Swing-twist factorization of an earth-frame rotation e about global z:
// e = swing * twist with twist a pure z rotation and swing about a
// horizontal axis.
struct SwingTwist {
  Quaternion swing;
  Quaternion twist;
};
SwingTwist swing_twist(const Quaternion& e);

struct HeadingInclination {
  double heading = 0.0;      // deg, [0, 180]
  double inclination = 0.0;  // deg, [0, 180]
};

// Heading and inclination parts of the error e = q_est * q_ref^-1.
HeadingInclination heading_inclination_split(const Quaternion& q_est, const Quaternion& q_ref);

// RMS of the entries selected by `mask`. Throws std::invalid_argument on
// length mismatch or an empty selection.
double rmse_over_mask(std::span<const double> angles, std::span<const std::uint8_t> mask);

// RMS over time of |b_est - b_true|, converted from rad/s to deg/s. Throws on
// length mismatch.
double bias_residual_rms(std::span<const Vec3> b_est, std::span<const Vec3> b_true);

struct ErrorReport {
  double orientation_rmse = 0.0;  // deg
  double inclination_rmse = 0.0;  // deg
  double heading_rmse = 0.0;      // deg
  double bias_residual_rms = 0.0; // deg/s
  std::size_t motion_samples = 0;
  std::size_t rest_samples = 0;
};

// Errors of an estimate series against ground truth over the samples where
// motion_mask is set. Bias residual uses all samples (if given).
ErrorReport evaluate(std::span<const Quaternion> q_est, std::span<const Quaternion> q_ref,
                     std::span<const std::uint8_t> motion_mask, std::span<const Vec3> b_est = {},
                     std::span<const Vec3> b_true = {});

std::string to_key_value(const ErrorReport& report);

}  // namespace vqf::metrics
