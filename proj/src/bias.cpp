#include "vqf/bias.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vqf {

namespace {

Vec3 clipped(const Vec3& v, double limit) {
  return {std::clamp(v.x, -limit, limit), std::clamp(v.y, -limit, limit), std::clamp(v.z, -limit, limit)};
}

}  // namespace

BiasKfParams bias_kf_params(double ts, const VqfParams& params) {
  if (!(ts > 0.0)) {
    throw std::invalid_argument("sampling time must be positive");
  }
  const double s_motion = deg2rad(params.bias_sigma_motion);
  const double s_rest = deg2rad(params.bias_sigma_rest);
  const double s_init = deg2rad(params.bias_sigma_init);

  BiasKfParams out;
  out.v = s_motion * s_motion * ts / params.bias_forgetting_time;
  out.w_motion = s_motion * s_motion * s_motion * s_motion / out.v + s_motion * s_motion;
  out.w_rest = s_rest * s_rest * s_rest * s_rest / out.v + s_rest * s_rest;
  out.p0 = s_init * s_init;
  return out;
}

double bias_sigma(const Mat3& p) {
  double max_row = 0.0;
  for (int r = 0; r < 3; ++r) {
    max_row = std::max(max_row, std::abs(p(r, 0)) + std::abs(p(r, 1)) + std::abs(p(r, 2)));
  }
  return std::sqrt(max_row);
}

RestDetector::RestDetector(double ts, const VqfParams& params)
    : ts_(ts),
      th_gyr_(deg2rad(params.rest_th_gyr)),
      th_acc_(params.rest_th_acc),
      clip_(deg2rad(params.bias_clip)),
      min_samples_(std::max(1L, std::lround(std::ceil(params.rest_min_time / ts - 1e-9)))),
      gyr_filter_(params.rest_filter_tau, ts),
      acc_filter_(params.rest_filter_tau, ts) {}

void RestDetector::reset() {
  gyr_filter_.reset();
  acc_filter_.reset();
  gyr_lp_ = {};
  acc_lp_ = {};
  rest_samples_ = 0;
  rest_ = false;
}

bool RestDetector::step(const Vec3& gyr, const Vec3& acc) {
  if (!is_finite(gyr) || !is_finite(acc)) {
    rest_samples_ = 0;
    rest_ = false;
    return false;
  }
  gyr_lp_ = gyr_filter_.step(gyr);
  acc_lp_ = acc_filter_.step(acc);

  const bool gyr_quiet = norm(gyr - gyr_lp_) < th_gyr_;
  const bool acc_quiet = norm(acc - acc_lp_) < th_acc_;
  const bool plausible_bias =
      std::abs(gyr_lp_.x) <= clip_ && std::abs(gyr_lp_.y) <= clip_ && std::abs(gyr_lp_.z) <= clip_;

  if (gyr_quiet && acc_quiet && plausible_bias) {
    ++rest_samples_;
  } else {
    rest_samples_ = 0;
  }
  rest_ = rest_samples_ >= min_samples_;
  return rest_;
}

BiasKalman::BiasKalman(const BiasKfParams& kf, double clip)
    : kf_(kf), clip_(clip), p_(Mat3::diag(kf.p0, kf.p0, kf.p0)) {}

void BiasKalman::predict() {
  p_(0, 0) += kf_.v;
  p_(1, 1) += kf_.v;
  p_(2, 2) += kf_.v;
}

bool BiasKalman::correct(const Vec3& y, const Mat3& c, const Vec3& w) {
  const Vec3 innovation = clipped(y - c * bias_, clip_);

  const Mat3 pct = p_ * transpose(c);
  const Mat3 s = Mat3::diag(w.x, w.y, w.z) + c * pct;
  Mat3 s_inv;
  // Scale-aware singularity test: |det S| against the product of its diagonal.
  const double scale = std::abs(s(0, 0) * s(1, 1) * s(2, 2));
  if (!invert(s, s_inv, 1e-14 * scale) || !std::isfinite(s_inv(0, 0))) {
    return false;
  }
  const Mat3 k = pct * s_inv;
  bias_ = clipped(bias_ + k * innovation, clip_);
  p_ = p_ - k * (c * p_);
  p_ = 0.5 * (p_ + transpose(p_));
  return true;
}

void BiasKalman::set_state(const Vec3& bias, const Mat3& p) {
  bias_ = bias;
  p_ = p;
}

BiasEstimator::BiasEstimator(double ts, const VqfParams& params)
    : ts_(ts),
      motion_enabled_(params.motion_bias_est),
      rest_enabled_(params.rest_bias_est),
      kf_(bias_kf_params(ts, params), deg2rad(params.bias_clip)),
      r_lp_(params.tau_acc, ts),
      rb_lp_(params.tau_acc, ts) {
  w_vertical_ = kf_.params().w_motion / params.bias_vertical_forgetting_factor;
}

BiasEstimator::Mode BiasEstimator::step(const Quaternion& quat6, const std::optional<Vec3>& acc_earth,
                                        const Vec3& gyr_lp, bool at_rest) {
  singular_ = false;
  Mat3 r_lp;
  Vec3 rb_lp;
  if (motion_enabled_) {
    const Mat3 r = to_rotation_matrix(quat6);
    const Vec3 rb = r * kf_.bias();
    r_lp.m = r_lp_.step(r.m);
    const auto f = rb_lp_.step({rb.x, rb.y});
    rb_lp = {f[0], f[1], 0.0};
  }

  kf_.predict();

  Mode mode = Mode::none;
  if (at_rest && rest_enabled_) {
    const double w = kf_.params().w_rest;
    singular_ = !kf_.correct(gyr_lp, Mat3::identity(), {w, w, w});
    mode = Mode::rest;
  } else if (motion_enabled_ && acc_earth) {
    const double inv_ts = 1.0 / ts_;
    const Vec3 y{-acc_earth->y * inv_ts + rb_lp.x, acc_earth->x * inv_ts + rb_lp.y, 0.0};
    const double w = kf_.params().w_motion;
    singular_ = !kf_.correct(y, r_lp, {w, w, w_vertical_});
    mode = Mode::motion;
  }
  return singular_ ? Mode::none : mode;
}

}  // namespace vqf
