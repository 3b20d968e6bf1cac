#pragma once

// Full real-time filter: the basic filter extended by rest detection,
// gyroscope bias estimation and magnetic disturbance rejection, each of which
// can be switched off independently. With everything off the output is
// bit-identical to BasicVqf.
//
// Per sample:
//   1. rest detection on the raw gyroscope/accelerometer sample
//   2. strapdown with gyr - bias (bias from the end of the previous step)
//   3. inclination correction
//   4. bias Kalman step (rest or motion update) using the corrected 6D
//      estimate and this step's filtered acceleration
//   5. magnetic disturbance step and gated heading correction
// Bias and 6D outputs never depend on magnetometer data.

#include <optional>
#include <span>
#include <vector>

#include "vqf/basic.hpp"
#include "vqf/bias.hpp"
#include "vqf/magdist.hpp"
#include "vqf/params.hpp"
#include "vqf/quat.hpp"

namespace vqf {

struct EstimateRecord {
  Quaternion q6;
  Quaternion q9;
  double delta = 0.0;       // rad
  Vec3 bias;                // rad/s
  double bias_sigma = 0.0;  // rad/s
  bool rest = false;
  bool mag_disturbed = false;
  // Set when the input sample contained non-finite values and was ignored;
  // the remaining fields repeat the previous record.
  bool skipped = false;
};

struct BiasEstimate {
  Vec3 bias;     // rad/s
  double sigma;  // rad/s
};

class Vqf {
 public:
  // Throws std::invalid_argument for ts <= 0 or invalid parameters.
  explicit Vqf(double ts, const VqfParams& params = {});

  EstimateRecord update(const Vec3& gyr, const Vec3& acc, const std::optional<Vec3>& mag = std::nullopt);

  // Sequential update over whole arrays. `mag` may be empty. Throws
  // std::invalid_argument on length mismatch.
  std::vector<EstimateRecord> update_batch(std::span<const Vec3> gyr, std::span<const Vec3> acc,
                                           std::span<const Vec3> mag = {});

  // Seeds the Kalman filter with P = sigma^2 I. Throws std::invalid_argument
  // if any component exceeds bias_clip or sigma is negative.
  void set_bias(const Vec3& bias, double sigma);
  BiasEstimate get_bias() const;
  const Mat3& bias_covariance() const { return bias_.covariance(); }

  void set_mag_reference(double norm, double dip) { mag_dist_.set_reference(norm, dip); }

  Quaternion quat_6d() const { return basic_.quat_6d(); }
  Quaternion quat_9d() const { return basic_.quat_9d(); }

  const BasicVqf& basic() const { return basic_; }
  const RestDetector& rest_detector() const { return rest_; }
  const MagDistDetector& mag_detector() const { return mag_dist_; }
  const BiasEstimator& bias_estimator() const { return bias_; }
  const VqfParams& params() const { return params_; }
  double ts() const { return ts_; }

 private:
  EstimateRecord make_record() const;

  double ts_;
  VqfParams params_;
  BasicVqf basic_;
  RestDetector rest_;
  BiasEstimator bias_;
  MagDistDetector mag_dist_;
  EstimateRecord last_;
};

}  // namespace vqf
