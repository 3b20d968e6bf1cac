#include "vqf/offline.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include "vqf/basic.hpp"
#include "vqf/bias.hpp"
#include "vqf/lowpass.hpp"
#include "vqf/magdist.hpp"
#include "vqf/vqf.hpp"

namespace vqf {

namespace {

struct PassRecord {
  std::vector<Vec3> bias;
  std::vector<Mat3> cov;
  std::vector<std::uint8_t> disturbed;
  std::vector<std::uint8_t> rest;
};

PassRecord run_pass(std::span<const Vec3> gyr, std::span<const Vec3> acc, std::span<const Vec3> mag, double ts,
                    const VqfParams& params) {
  Vqf filter(ts, params);
  PassRecord out;
  const std::size_t n = gyr.size();
  out.bias.reserve(n);
  out.cov.reserve(n);
  out.disturbed.reserve(n);
  out.rest.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const EstimateRecord rec = mag.empty() ? filter.update(gyr[i], acc[i]) : filter.update(gyr[i], acc[i], mag[i]);
    out.bias.push_back(rec.bias);
    out.cov.push_back(filter.bias_covariance());
    out.disturbed.push_back(rec.mag_disturbed ? 1 : 0);
    out.rest.push_back(rec.rest ? 1 : 0);
  }
  return out;
}

bool all_finite(std::span<const Vec3> v) {
  for (const auto& x : v) {
    if (!is_finite(x)) return false;
  }
  return true;
}

}  // namespace

ReversedInputs reverse_run_transform(std::span<const Vec3> gyr, std::span<const Vec3> acc, std::span<const Vec3> mag) {
  ReversedInputs out;
  out.gyr.assign(gyr.rbegin(), gyr.rend());
  for (auto& g : out.gyr) g = -g;
  out.acc.assign(acc.rbegin(), acc.rend());
  out.mag.assign(mag.rbegin(), mag.rend());
  return out;
}

Vec3 merge_bias(const Vec3& b1, const Mat3& p1, const Vec3& b2, const Mat3& p2, double eps, Mat3* merged_cov) {
  const Mat3 floor = Mat3::diag(eps, eps, eps);
  Mat3 p1_inv, p2_inv, sum_inv;
  if (!invert(p1 + floor, p1_inv) || !invert(p2 + floor, p2_inv) || !invert(p1_inv + p2_inv, sum_inv)) {
    if (merged_cov) *merged_cov = p1;
    return b1;
  }
  if (merged_cov) *merged_cov = sum_inv;
  return sum_inv * (p1_inv * b1 - p2_inv * b2);
}

std::vector<double> smooth_heading(std::span<const std::optional<double>> delta_mag,
                                   std::span<const std::uint8_t> disturbed, double ts, const VqfParams& params) {
  const std::size_t n = delta_mag.size();
  if (disturbed.size() != n) {
    throw std::invalid_argument("heading and disturbance series must have equal length");
  }
  std::vector<double> delta_fwd(n);
  HeadingFilter heading(params.tau_mag, ts);
  MagRejection rejection(ts, params);
  for (std::size_t k = 0; k < n; ++k) {
    const double scale = params.mag_dist_rejection ? rejection.step(disturbed[k] != 0) : 1.0;
    if (delta_mag[k]) heading.update(*delta_mag[k], scale);
    delta_fwd[k] = heading.delta();
  }

  std::vector<double> out(n);
  HeadingFilter heading_bwd(params.tau_mag, ts);
  MagRejection rejection_bwd(ts, params);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = n - 1 - i;
    const double scale = params.mag_dist_rejection ? rejection_bwd.step(disturbed[k] != 0) : 1.0;
    heading_bwd.update(delta_fwd[k], scale);
    out[k] = heading_bwd.delta();
  }
  return out;
}

OfflineResult offline_vqf(std::span<const Vec3> gyr, std::span<const Vec3> acc, std::span<const Vec3> mag, double ts,
                          const VqfParams& params, Execution exec) {
  const std::size_t n = gyr.size();
  if (acc.size() != n || (!mag.empty() && mag.size() != n)) {
    throw std::invalid_argument("gyr, acc and mag arrays must have equal length");
  }
  if (n < 2) {
    throw std::invalid_argument("offline estimation needs at least two samples");
  }
  if (!all_finite(gyr) || !all_finite(acc) || !all_finite(mag)) {
    throw std::invalid_argument("offline estimation requires finite input");
  }
  if (!(ts > 0.0)) {
    throw std::invalid_argument("sampling time must be positive");
  }
  validate(params);

  const ReversedInputs rev = reverse_run_transform(gyr, acc, mag);
  PassRecord fwd, bwd;
#pragma omp parallel sections if (exec == Execution::parallel)
  {
#pragma omp section
    fwd = run_pass(gyr, acc, mag, ts, params);
#pragma omp section
    bwd = run_pass(rev.gyr, rev.acc, rev.mag, ts, params);
  }

  OfflineResult out;
  out.q6.resize(n);
  out.q9.resize(n);
  out.delta.resize(n);
  out.bias.resize(n);
  out.bias_sigma.resize(n);
  out.rest.resize(n);
  out.mag_disturbed.resize(n);

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t kb = n - 1 - k;
    out.mag_disturbed[k] = fwd.disturbed[k] && bwd.disturbed[kb];
    out.rest[k] = fwd.rest[k] && bwd.rest[kb];
    Mat3 cov;
    out.bias[k] = merge_bias(fwd.bias[k], fwd.cov[k], bwd.bias[kb], bwd.cov[kb], 1e-12, &cov);
    out.bias_sigma[k] = bias_sigma(cov);
  }

  // strapdown with merged bias, accelerations into the almost-inertial frame
  std::vector<Quaternion> q_si(n);
  std::vector<double> ax(n), ay(n), az(n);
  Quaternion q;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3 w = gyr[k] - out.bias[k];
    q = normalized(q * from_angle_axis(ts * norm(w), w));
    q_si[k] = q;
    const Vec3 a = rotate(q, acc[k]);
    ax[k] = a.x;
    ay[k] = a.y;
    az[k] = a.z;
  }
  const auto fx = filtfilt(ax, params.tau_acc, ts);
  const auto fy = filtfilt(ay, params.tau_acc, ts);
  const auto fz = filtfilt(az, params.tau_acc, ts);

  // inclination correction sweep
  Quaternion q_ie;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3 a_lp{fx[k], fy[k], fz[k]};
    if (norm(a_lp) > 0.0) {
      const Vec3 a_earth = normalized(rotate(q_ie, a_lp));
      q_ie = normalized(inclination_correction(a_earth) * q_ie);
    }
    out.q6[k] = q_ie * q_si[k];
  }

  // heading: forward pass on the magnetometer headings, then backward over the result
  if (!mag.empty()) {
    std::vector<std::optional<double>> delta_mag(n);
    for (std::size_t k = 0; k < n; ++k) {
      if (norm(mag[k]) == 0.0) continue;
      const Vec3 m = rotate(out.q6[k], mag[k]);
      if (std::hypot(m.x, m.y) >= 1e-12) {
        delta_mag[k] = std::atan2(m.x, m.y);
      }
    }

    out.delta = smooth_heading(delta_mag, out.mag_disturbed, ts, params);
  }

  for (std::size_t k = 0; k < n; ++k) {
    out.q9[k] = from_heading(out.delta[k]) * out.q6[k];
  }
  return out;
}

}  // namespace vqf
