#include "vqf/magdist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vqf {

namespace {

constexpr long kTicksPerSample = 1000;

long samples_for(double seconds, double ts) { return std::lround(std::ceil(seconds / ts - 1e-9)); }

}  // namespace

NormDip dip_and_norm(const Vec3& mag, const Quaternion& quat6) {
  const double n = norm(mag);
  const Vec3 m = rotate(quat6, mag);
  return {n, -std::asin(std::clamp(m.z / n, -1.0, 1.0))};
}

MagRejection::MagRejection(double ts, const VqfParams& params)
    : ts_(ts),
      ticks_per_sample_(kTicksPerSample),
      decay_ticks_(std::lround(params.mag_rejection_factor * kTicksPerSample)),
      max_ticks_(samples_for(params.mag_max_rejection_time, ts) * kTicksPerSample),
      reduced_scale_(1.0 / params.mag_rejection_factor) {}

double MagRejection::step(bool disturbed) {
  if (disturbed) {
    if (reject_ticks_ < max_ticks_) {
      reject_ticks_ += ticks_per_sample_;
      return 0.0;
    }
    return reduced_scale_;
  }
  reject_ticks_ = std::max(reject_ticks_ - decay_ticks_, 0L);
  return 1.0;
}

MagDistDetector::MagDistDetector(double ts, const VqfParams& params)
    : ts_(ts),
      k_ref_(exp_gain(params.mag_ref_tau, ts)),
      norm_th_(params.mag_norm_th),
      dip_th_(deg2rad(params.mag_dip_th)),
      new_min_gyr_(deg2rad(params.mag_new_min_gyr)),
      min_undist_samples_(samples_for(params.mag_min_undisturbed_time, ts)),
      new_samples_(samples_for(params.mag_new_time, ts)),
      lp_(params.mag_current_tau, ts),
      rejection_(ts, params) {}

void MagDistDetector::set_reference(double norm, double dip) {
  if (!(norm > 0.0) || !std::isfinite(norm) || !std::isfinite(dip)) {
    throw std::invalid_argument("magnetic reference norm must be positive");
  }
  ref_ = {norm, dip};
  ref_initialized_ = true;
}

bool MagDistDetector::close_to(const NormDip& ref) const {
  return std::abs(current_.norm - ref.norm) < norm_th_ * ref.norm && std::abs(current_.dip - ref.dip) < dip_th_;
}

MagDistDetector::Result MagDistDetector::step(const Vec3& mag, const Quaternion& quat6, double gyr_norm) {
  if (!is_finite(mag) || norm(mag) == 0.0) {
    return {disturbed_, disturbed_ ? 0.0 : 1.0};
  }
  const NormDip raw = dip_and_norm(mag, quat6);
  const auto filtered = lp_.step({raw.norm, raw.dip});
  current_ = {filtered[0], filtered[1]};

  // Cold start: the first fully filtered value becomes the provisional reference.
  if (!ref_initialized_) {
    if (!lp_.initialized()) {
      return {false, 1.0};
    }
    ref_ = current_;
    ref_initialized_ = true;
  }
  if (cand_.norm == 0.0) {
    cand_ = current_;
  }

  // detection
  if (close_to(ref_)) {
    ++undist_samples_;
    if (undist_samples_ >= min_undist_samples_) {
      disturbed_ = false;
      ref_.norm += k_ref_ * (current_.norm - ref_.norm);
      ref_.dip += k_ref_ * (current_.dip - ref_.dip);
    }
  } else {
    undist_samples_ = 0;
    disturbed_ = true;
  }

  // acceptance of a new homogeneous field
  if (close_to(cand_)) {
    if (gyr_norm >= new_min_gyr_) {
      ++cand_samples_;
    }
    cand_.norm += k_ref_ * (current_.norm - cand_.norm);
    cand_.dip += k_ref_ * (current_.dip - cand_.dip);
    if (disturbed_ && cand_samples_ >= new_samples_) {
      ref_ = cand_;
      disturbed_ = false;
      undist_samples_ = min_undist_samples_;
    }
  } else {
    cand_samples_ = 0;
    cand_ = current_;
  }

  // rejection
  const double scale = rejection_.step(disturbed_);
  return {disturbed_, scale};
}

}  // namespace vqf
