#pragma once

// Magnetic disturbance detection, new-field acceptance and rejection.
//
// The field is characterized by its norm and dip angle in the
// inclination-corrected frame; both are heading-invariant. A sample is
// undisturbed if it is within mag_norm_th (relative) and mag_dip_th of the
// reference. Timers are kept as sample counts so that thresholds expressed
// in seconds are hit on exact sample boundaries.

#include "vqf/lowpass.hpp"
#include "vqf/params.hpp"
#include "vqf/quat.hpp"

namespace vqf {

struct NormDip {
  double norm = 0.0;  // field units
  double dip = 0.0;   // rad, positive when the field points downwards
};

// Norm of `mag` and dip angle -asin(z / n) of the field rotated by quat6.
// Callers must ensure |mag| > 0.
NormDip dip_and_norm(const Vec3& mag, const Quaternion& quat6);

// Rejection timer: full rejection for up to mag_max_rejection_time of
// disturbance, then reduced gain; recovers at mag_rejection_factor times the
// accrual rate while undisturbed.
class MagRejection {
 public:
  MagRejection() = default;
  MagRejection(double ts, const VqfParams& params);

  // Returns the gain scale for this step: 0, 1/mag_rejection_factor, or 1.
  double step(bool disturbed);

  double reject_time() const { return static_cast<double>(reject_ticks_) / ticks_per_sample_ * ts_; }

 private:
  double ts_ = 0.0;
  long ticks_per_sample_ = 1;
  long decay_ticks_ = 2;
  long max_ticks_ = 0;
  long reject_ticks_ = 0;
  double reduced_scale_ = 0.5;
};

class MagDistDetector {
 public:
  MagDistDetector() = default;
  MagDistDetector(double ts, const VqfParams& params);

  struct Result {
    bool disturbed = false;
    double gain_scale = 1.0;
  };

  // One detection/acceptance/rejection step. gyr_norm drives the candidate
  // timer (only counted while moving). A zero field leaves the state untouched.
  Result step(const Vec3& mag, const Quaternion& quat6, double gyr_norm);

  // Throws std::invalid_argument if norm <= 0.
  void set_reference(double norm, double dip);

  bool disturbed() const { return disturbed_; }
  bool reference_initialized() const { return ref_initialized_; }
  NormDip reference() const { return ref_; }
  NormDip candidate() const { return cand_; }
  NormDip current() const { return current_; }
  double undisturbed_time() const { return undist_samples_ * ts_; }
  double candidate_time() const { return cand_samples_ * ts_; }
  double reject_time() const { return rejection_.reject_time(); }

 private:
  bool close_to(const NormDip& ref) const;

  double ts_ = 0.0;
  double k_ref_ = 0.0;
  double norm_th_ = 0.1;
  double dip_th_ = 0.0;
  double new_min_gyr_ = 0.0;
  long min_undist_samples_ = 0;
  long new_samples_ = 0;

  LowPassBank<2> lp_;
  NormDip current_;
  NormDip ref_;
  NormDip cand_;
  bool ref_initialized_ = false;
  bool disturbed_ = false;
  long undist_samples_ = 0;
  long cand_samples_ = 0;
  MagRejection rejection_;
};

}  // namespace vqf
