#pragma once

// Basic orientation filter: gyroscope strapdown integration, inclination
// correction from accelerations low-pass filtered in the almost-inertial
// frame, and heading correction through a scalar offset.
//
// The state is kept in three decoupled parts:
//   q_si   sensor -> almost-inertial frame (pure strapdown)
//   q_ie   almost-inertial -> inclination-corrected frame
//   delta  heading offset about global z
// 6D estimate: q_ie * q_si. 9D estimate: heading(delta) * q_ie * q_si.
// Magnetometer data only ever touches delta.

#include <optional>

#include "vqf/lowpass.hpp"
#include "vqf/quat.hpp"

namespace vqf {

// First-order exponential filter on the heading offset. The first
// ceil(1/k_mag) accepted updates use at least the gain 1, 1/2, 1/3, ... so
// the initial measurements are averaged.
class HeadingFilter {
 public:
  HeadingFilter() = default;
  HeadingFilter(double tau_mag, double ts);

  // `scale` multiplies k_mag; scale <= 0 leaves the state untouched.
  void update(double delta_mag, double scale = 1.0);

  double delta() const { return delta_; }
  void set_delta(double delta) { delta_ = wrap_to_pi(delta); }
  double k_mag() const { return k_mag_; }
  int update_count() const { return updates_; }
  int init_updates() const { return init_updates_; }

 private:
  double k_mag_ = 0.0;
  int init_updates_ = 0;
  int updates_ = 0;
  double delta_ = 0.0;
};

// Inclination correction quaternion that rotates the normalized vector `a`
// onto +z along the shortest path. Near a_z = -1 the scalar part is clamped to
// 1e-6; exactly upside down (no horizontal component) a 180 deg turn about x
// is used.
Quaternion inclination_correction(const Vec3& a);

class BasicVqf {
 public:
  BasicVqf(double ts, double tau_acc = 3.0, double tau_mag = 9.0);

  // Strapdown integration. Returns false (state unchanged) for non-finite input.
  bool update_gyr(const Vec3& gyr);

  // Inclination correction. Returns the normalized, filtered acceleration in
  // the inclination-corrected frame as seen before this step's correction,
  // or nullopt if the sample was skipped (zero norm or non-finite).
  std::optional<Vec3> update_acc(const Vec3& acc);

  // Heading correction with gain k_mag * gain_scale. Returns false if the
  // sample carried no usable horizontal field.
  bool update_mag(const Vec3& mag, double gain_scale = 1.0);

  struct Estimates {
    Quaternion q6;
    Quaternion q9;
  };
  // gyr -> acc -> mag (if given), then both estimates.
  Estimates update(const Vec3& gyr, const Vec3& acc, const std::optional<Vec3>& mag = std::nullopt);

  Quaternion quat_6d() const { return q_ie_ * q_si_; }
  Quaternion quat_9d() const { return from_heading(heading_.delta()) * quat_6d(); }

  const Quaternion& strapdown_quat() const { return q_si_; }
  const Quaternion& inclination_quat() const { return q_ie_; }
  double delta() const { return heading_.delta(); }
  const Vec3& last_acc_lp() const { return last_acc_lp_; }
  double ts() const { return ts_; }
  const HeadingFilter& heading_filter() const { return heading_; }

  void set_strapdown_quat(const Quaternion& q) { q_si_ = normalized(q); }
  void set_inclination_quat(const Quaternion& q) { q_ie_ = normalized(q); }
  void set_delta(double delta) { heading_.set_delta(delta); }

 private:
  double ts_;
  Quaternion q_si_;
  Quaternion q_ie_;
  Vec3LowPass acc_lp_;
  Vec3 last_acc_lp_;
  HeadingFilter heading_;
};

}  // namespace vqf
