#pragma once

// Gyroscope bias estimation: rest detection and a 3-state Kalman filter that
// switches between a rest measurement (filtered gyroscope) and a motion
// measurement derived from the inclination correction.

#include <optional>

#include "vqf/lowpass.hpp"
#include "vqf/params.hpp"
#include "vqf/quat.hpp"

namespace vqf {

struct BiasKfParams {
  double v = 0.0;         // system noise per step, (rad/s)^2
  double w_motion = 0.0;  // (rad/s)^2
  double w_rest = 0.0;    // (rad/s)^2
  double p0 = 0.0;        // initial variance, (rad/s)^2
};

// Noise parametrization from the intuitive sigma/forgetting-time values:
//   v = sigma_motion^2 * ts / t_forget
//   w = sigma^4 / v + sigma^2
BiasKfParams bias_kf_params(double ts, const VqfParams& params = {});

// Gershgorin upper bound on the worst-direction standard deviation:
// sqrt of the largest absolute row sum of P.
double bias_sigma(const Mat3& p);

class RestDetector {
 public:
  RestDetector() = default;
  RestDetector(double ts, const VqfParams& params);

  // Returns true once both deviation norms have stayed below their
  // thresholds for rest_min_time. A filtered gyroscope component above
  // bias_clip also breaks rest, since no bias could explain it.
  bool step(const Vec3& gyr, const Vec3& acc);

  bool at_rest() const { return rest_; }
  double rest_time() const { return rest_samples_ * ts_; }
  const Vec3& gyr_lp() const { return gyr_lp_; }
  const Vec3& acc_lp() const { return acc_lp_; }
  void reset();

 private:
  double ts_ = 0.0;
  double th_gyr_ = 0.0;
  double th_acc_ = 0.0;
  double clip_ = 0.0;
  long min_samples_ = 0;
  Vec3LowPass gyr_filter_;
  Vec3LowPass acc_filter_;
  Vec3 gyr_lp_;
  Vec3 acc_lp_;
  long rest_samples_ = 0;
  bool rest_ = false;
};

// Kalman filter for a constant bias with random-walk drift.
class BiasKalman {
 public:
  BiasKalman() = default;
  BiasKalman(const BiasKfParams& kf, double clip);

  // P <- P + v I
  void predict();

  // Measurement update with y = C b + noise, W = diag(w). The innovation
  // y - C b is clipped component-wise before applying the gain, the estimate
  // afterwards. Returns false (state untouched) if the innovation covariance
  // is numerically singular.
  bool correct(const Vec3& y, const Mat3& c, const Vec3& w);

  const Vec3& bias() const { return bias_; }
  const Mat3& covariance() const { return p_; }
  double sigma() const { return bias_sigma(p_); }
  const BiasKfParams& params() const { return kf_; }
  double clip() const { return clip_; }

  void set_state(const Vec3& bias, const Mat3& p);

 private:
  BiasKfParams kf_;
  double clip_ = 0.0;
  Vec3 bias_;
  Mat3 p_;
};

// Full bias estimation step including the low-pass filters of R and R*b
// needed by the motion measurement.
class BiasEstimator {
 public:
  BiasEstimator() = default;
  BiasEstimator(double ts, const VqfParams& params);

  enum class Mode { none, rest, motion };

  // quat6: current 6D estimate (sensor -> inclination-corrected frame).
  // acc_earth: normalized filtered acceleration in that frame before this
  //   step's correction (nullopt if the accelerometer update was skipped).
  // gyr_lp: rest detector's filtered gyroscope.
  // Returns the update that was applied.
  Mode step(const Quaternion& quat6, const std::optional<Vec3>& acc_earth, const Vec3& gyr_lp, bool at_rest);

  const BiasKalman& kalman() const { return kf_; }
  BiasKalman& kalman() { return kf_; }
  const Vec3& bias() const { return kf_.bias(); }
  const Mat3& covariance() const { return kf_.covariance(); }
  double sigma() const { return kf_.sigma(); }
  bool last_update_singular() const { return singular_; }

 private:
  double ts_ = 0.0;
  bool motion_enabled_ = true;
  bool rest_enabled_ = true;
  double w_vertical_ = 0.0;
  BiasKalman kf_;
  LowPassBank<9> r_lp_;
  LowPassBank<2> rb_lp_;
  bool singular_ = false;
};

}  // namespace vqf
