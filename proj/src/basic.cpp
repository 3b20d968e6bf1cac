#include "vqf/basic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vqf {

HeadingFilter::HeadingFilter(double tau_mag, double ts)
    : k_mag_(exp_gain(tau_mag, ts)), init_updates_(static_cast<int>(std::ceil(1.0 / k_mag_))) {}

void HeadingFilter::update(double delta_mag, double scale) {
  if (!(scale > 0.0)) {
    return;
  }
  ++updates_;
  double k = k_mag_ * scale;
  if (updates_ <= init_updates_) {
    k = std::max(k, 1.0 / updates_);
  }
  delta_ = wrap_to_pi(delta_ + k * wrap_to_pi(delta_mag - delta_));
}

Quaternion inclination_correction(const Vec3& a) {
  constexpr double kMinW = 1e-6;
  double qw = std::sqrt(std::max(0.0, (a.z + 1.0) / 2.0));
  if (qw >= kMinW) {
    return normalized(Quaternion{qw, a.y / (2.0 * qw), -a.x / (2.0 * qw), 0.0});
  }
  if (std::hypot(a.x, a.y) < 1e-12) {
    return {0.0, 1.0, 0.0, 0.0};
  }
  qw = kMinW;
  return normalized(Quaternion{qw, a.y / (2.0 * qw), -a.x / (2.0 * qw), 0.0});
}

BasicVqf::BasicVqf(double ts, double tau_acc, double tau_mag)
    : ts_(ts), acc_lp_(tau_acc, ts), heading_(tau_mag, ts) {
  if (!(ts > 0.0)) {
    throw std::invalid_argument("sampling time must be positive");
  }
}

bool BasicVqf::update_gyr(const Vec3& gyr) {
  if (!is_finite(gyr)) {
    return false;
  }
  const double rate = norm(gyr);
  q_si_ = normalized(q_si_ * from_angle_axis(ts_ * rate, gyr));
  return true;
}

std::optional<Vec3> BasicVqf::update_acc(const Vec3& acc) {
  if (!is_finite(acc) || norm(acc) == 0.0) {
    return std::nullopt;
  }
  last_acc_lp_ = acc_lp_.step(rotate(q_si_, acc));
  const Vec3 acc_earth = normalized(rotate(q_ie_, last_acc_lp_));
  q_ie_ = normalized(inclination_correction(acc_earth) * q_ie_);
  return acc_earth;
}

bool BasicVqf::update_mag(const Vec3& mag, double gain_scale) {
  if (!is_finite(mag) || norm(mag) == 0.0) {
    return false;
  }
  const Vec3 m = rotate(quat_6d(), mag);
  if (std::hypot(m.x, m.y) < 1e-12) {
    return false;
  }
  heading_.update(std::atan2(m.x, m.y), gain_scale);
  return true;
}

BasicVqf::Estimates BasicVqf::update(const Vec3& gyr, const Vec3& acc, const std::optional<Vec3>& mag) {
  update_gyr(gyr);
  update_acc(acc);
  if (mag) {
    update_mag(*mag);
  }
  return {quat_6d(), quat_9d()};
}

}  // namespace vqf
