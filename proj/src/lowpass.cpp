#include "vqf/lowpass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace vqf {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(name) + " must be positive and finite");
  }
}

// One mean-initialized pass over `in`, forward or reversed.
void single_pass(std::span<const double> in, std::span<double> out, const LpfDesign& design, bool reversed) {
  LpfState state;
  const std::size_t n = in.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = reversed ? n - 1 - k : k;
    out[i] = lpf_step(state, design, in[i]);
  }
}

}  // namespace

double time_constant_to_cutoff(double tau) {
  require_positive(tau, "tau");
  return std::numbers::sqrt2 / (2.0 * std::numbers::pi * tau);
}

ButterCoeffs butter2_coeffs(double tau, double ts) {
  require_positive(ts, "ts");
  const double fc = time_constant_to_cutoff(tau);
  if (fc >= 0.5 / ts) {
    throw std::invalid_argument("cutoff frequency for tau=" + std::to_string(tau) +
                                " is at or above the Nyquist frequency");
  }
  const double c = std::tan(std::numbers::pi * fc * ts);
  const double d = c * c + std::numbers::sqrt2 * c + 1.0;
  ButterCoeffs out;
  out.b0 = c * c / d;
  out.b1 = 2.0 * out.b0;
  out.b2 = out.b0;
  out.a1 = 2.0 * (c * c - 1.0) / d;
  out.a2 = (1.0 - std::numbers::sqrt2 * c + c * c) / d;
  return out;
}

LpfDesign design_lowpass(double tau, double ts) {
  LpfDesign design;
  design.coeffs = butter2_coeffs(tau, ts);
  design.init_samples = std::max(1, static_cast<int>(std::ceil(tau / ts - 1e-9)));
  return design;
}

double exp_gain(double tau, double ts) {
  require_positive(tau, "tau");
  require_positive(ts, "ts");
  return 1.0 - std::exp(-ts / tau);
}

void lpf_set_steady_state(LpfState& state, const ButterCoeffs& c, double value) {
  state.reg[0] = value * (1.0 - c.b0);
  state.reg[1] = value * (c.b2 - c.a2);
  state.initialized = true;
  state.init_sum = 0.0;
  state.init_count = 0;
}

double lpf_step(LpfState& state, const LpfDesign& design, double x) {
  if (!std::isfinite(x)) {
    state = LpfState{};
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (!state.initialized) {
    state.init_sum += x;
    ++state.init_count;
    const double mean = state.init_sum / state.init_count;
    if (state.init_count >= design.init_samples) {
      lpf_set_steady_state(state, design.coeffs, mean);
    }
    return mean;
  }
  const ButterCoeffs& c = design.coeffs;
  const double y = c.b0 * x + state.reg[0];
  state.reg[0] = c.b1 * x - c.a1 * y + state.reg[1];
  state.reg[1] = c.b2 * x - c.a2 * y;
  return y;
}

std::vector<double> filtfilt(std::span<const double> signal, double tau, double ts) {
  const LpfDesign design = design_lowpass(tau, ts);
  const std::size_t n = signal.size();
  std::vector<double> fwd(n), fwd_bwd(n), bwd(n), bwd_fwd(n);
  single_pass(signal, fwd, design, false);
  single_pass(fwd, fwd_bwd, design, true);
  single_pass(signal, bwd, design, true);
  single_pass(bwd, bwd_fwd, design, false);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = 0.5 * (fwd_bwd[i] + bwd_fwd[i]);
  }
  return out;
}

}  // namespace vqf
