#include "vqf/vqf.hpp"

#include <cmath>
#include <stdexcept>

namespace vqf {

namespace {

const VqfParams& checked(double ts, const VqfParams& params) {
  if (!(ts > 0.0) || !std::isfinite(ts)) {
    throw std::invalid_argument("sampling time must be positive");
  }
  validate(params);
  return params;
}

}  // namespace

Vqf::Vqf(double ts, const VqfParams& params)
    : ts_(ts),
      params_(checked(ts, params)),
      basic_(ts, params.tau_acc, params.tau_mag),
      rest_(ts, params),
      bias_(ts, params),
      mag_dist_(ts, params) {
  last_ = make_record();
}

EstimateRecord Vqf::make_record() const {
  EstimateRecord rec;
  rec.q6 = basic_.quat_6d();
  rec.q9 = basic_.quat_9d();
  rec.delta = basic_.delta();
  rec.bias = bias_.bias();
  rec.bias_sigma = bias_.sigma();
  rec.rest = rest_.at_rest();
  rec.mag_disturbed = params_.mag_dist_rejection && mag_dist_.disturbed();
  return rec;
}

EstimateRecord Vqf::update(const Vec3& gyr, const Vec3& acc, const std::optional<Vec3>& mag) {
  if (!is_finite(gyr) || !is_finite(acc) || (mag && !is_finite(*mag))) {
    EstimateRecord rec = last_;
    rec.skipped = true;
    return rec;
  }

  const bool bias_est = params_.motion_bias_est || params_.rest_bias_est;
  if (params_.rest_bias_est || params_.mag_dist_rejection) {
    rest_.step(gyr, acc);
  }

  basic_.update_gyr(bias_est ? gyr - bias_.bias() : gyr);
  const std::optional<Vec3> acc_earth = basic_.update_acc(acc);

  if (bias_est) {
    bias_.step(basic_.quat_6d(), acc_earth, rest_.gyr_lp(), rest_.at_rest());
  }

  if (mag) {
    double scale = 1.0;
    if (params_.mag_dist_rejection) {
      scale = mag_dist_.step(*mag, basic_.quat_6d(), norm(rest_.gyr_lp())).gain_scale;
    }
    basic_.update_mag(*mag, scale);
  }

  last_ = make_record();
  return last_;
}

std::vector<EstimateRecord> Vqf::update_batch(std::span<const Vec3> gyr, std::span<const Vec3> acc,
                                              std::span<const Vec3> mag) {
  if (gyr.size() != acc.size() || (!mag.empty() && mag.size() != gyr.size())) {
    throw std::invalid_argument("gyr, acc and mag arrays must have equal length");
  }
  std::vector<EstimateRecord> out;
  out.reserve(gyr.size());
  for (std::size_t i = 0; i < gyr.size(); ++i) {
    out.push_back(mag.empty() ? update(gyr[i], acc[i]) : update(gyr[i], acc[i], mag[i]));
  }
  return out;
}

void Vqf::set_bias(const Vec3& bias, double sigma) {
  const double clip = deg2rad(params_.bias_clip);
  if (!is_finite(bias) || std::abs(bias.x) > clip || std::abs(bias.y) > clip || std::abs(bias.z) > clip) {
    throw std::invalid_argument("bias exceeds bias_clip");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("bias sigma must be non-negative");
  }
  const double p = sigma * sigma;
  bias_.kalman().set_state(bias, Mat3::diag(p, p, p));
  last_ = make_record();
}

BiasEstimate Vqf::get_bias() const { return {bias_.bias(), bias_.sigma()}; }

}  // namespace vqf
