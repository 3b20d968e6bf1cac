#pragma once

// Acausal variant for recorded data. The real-time filter runs forward and
// on time-reversed data (negated gyroscope); bias estimates are merged by
// inverse-covariance weighting, accelerations are low-pass filtered with
// zero phase, and the heading filter is run forward and then backward.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vqf/params.hpp"
#include "vqf/quat.hpp"

namespace vqf {

struct OfflineResult {
  std::vector<Quaternion> q6;
  std::vector<Quaternion> q9;
  std::vector<double> delta;
  std::vector<Vec3> bias;
  std::vector<double> bias_sigma;  // Gershgorin bound of the merged covariance
  std::vector<std::uint8_t> rest;  // rest detected by both passes
  std::vector<std::uint8_t> mag_disturbed;
};

struct ReversedInputs {
  std::vector<Vec3> gyr;
  std::vector<Vec3> acc;
  std::vector<Vec3> mag;
};

// Time-reversed copies; the gyroscope is negated, acc and mag only reversed.
ReversedInputs reverse_run_transform(std::span<const Vec3> gyr, std::span<const Vec3> acc,
                                     std::span<const Vec3> mag = {});

// Inverse-covariance merge of the forward estimate b1 and the backward
// estimate b2 (which estimates the negated bias):
//   (P1^-1 + P2^-1)^-1 (P1^-1 b1 - P2^-1 b2)
// Covariances get a floor of eps * I before inversion. If `merged_cov` is
// given it receives (P1^-1 + P2^-1)^-1.
Vec3 merge_bias(const Vec3& b1, const Mat3& p1, const Vec3& b2, const Mat3& p2, double eps = 1e-12,
                Mat3* merged_cov = nullptr);

// Heading offset smoothing: a forward pass of the heading filter over the
// magnetometer headings (missing entries skip the update), then a backward
// pass over the forward result. `disturbed` gates both passes through the
// rejection timer when mag_dist_rejection is enabled.
std::vector<double> smooth_heading(std::span<const std::optional<double>> delta_mag,
                                   std::span<const std::uint8_t> disturbed, double ts, const VqfParams& params = {});

enum class Execution { serial, parallel };

// `mag` may be empty. Throws std::invalid_argument on length mismatch, fewer
// than two samples, non-finite input, or invalid parameters. With
// Execution::parallel the two real-time passes run concurrently; the result
// is identical to Execution::serial.
OfflineResult offline_vqf(std::span<const Vec3> gyr, std::span<const Vec3> acc, std::span<const Vec3> mag, double ts,
                          const VqfParams& params = {}, Execution exec = Execution::parallel);

}  // namespace vqf
