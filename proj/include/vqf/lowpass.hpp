#pragma once

// Second-order Butterworth low-pass filtering parametrized by a time
// constant tau, plus the first-order exponential gain used for heading.
//
// tau maps to the cutoff frequency f_c = sqrt(2) / (2 pi tau), which puts the
// step response at roughly 0.5 for t = tau and within 5% of the final value
// for t = 3 tau.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "vqf/quat.hpp"

namespace vqf {

// Direct-form II transposed biquad, a0 normalized to 1.
struct ButterCoeffs {
  double b0 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
};

struct LpfDesign {
  ButterCoeffs coeffs;
  // Number of samples averaged before the IIR takes over (covers tau seconds).
  int init_samples = 1;
};

struct LpfState {
  std::array<double, 2> reg{0.0, 0.0};
  double init_sum = 0.0;
  int init_count = 0;
  bool initialized = false;
};

// Throws std::invalid_argument when tau <= 0.
double time_constant_to_cutoff(double tau);

// Bilinear transform with prewarping. Throws std::invalid_argument for
// non-positive tau/ts or a cutoff at or above the Nyquist frequency.
ButterCoeffs butter2_coeffs(double tau, double ts);

LpfDesign design_lowpass(double tau, double ts);

// 1 - exp(-ts/tau). Throws std::invalid_argument for non-positive tau/ts.
double exp_gain(double tau, double ts);

// One filter step. While the initialization window is open, the running
// arithmetic mean is returned; when it closes, the delay registers are set so
// that the filter sits in steady state at that mean. A non-finite input
// returns NaN and puts the channel back into initialization.
double lpf_step(LpfState& state, const LpfDesign& design, double x);

void lpf_set_steady_state(LpfState& state, const ButterCoeffs& coeffs, double value);

// Zero-phase forward-backward filtering. Both pass orders (forward then
// backward, backward then forward) are computed with mean initialization at
// the respective start and averaged, which makes the result exactly
// symmetric under time reversal.
std::vector<double> filtfilt(std::span<const double> signal, double tau, double ts);

// N channels sharing one design.
template <std::size_t N>
class LowPassBank {
 public:
  LowPassBank() = default;
  LowPassBank(double tau, double ts) : design_(design_lowpass(tau, ts)) {}

  std::array<double, N> step(const std::array<double, N>& x) {
    std::array<double, N> y;
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = lpf_step(state_[i], design_, x[i]);
    }
    return y;
  }

  void reset() { state_ = {}; }
  bool initialized() const { return state_[0].initialized; }
  const LpfDesign& design() const { return design_; }

 private:
  LpfDesign design_;
  std::array<LpfState, N> state_{};
};

class Vec3LowPass {
 public:
  Vec3LowPass() = default;
  Vec3LowPass(double tau, double ts) : bank_(tau, ts) {}

  Vec3 step(const Vec3& v) {
    const auto y = bank_.step({v.x, v.y, v.z});
    return {y[0], y[1], y[2]};
  }
  void reset() { bank_.reset(); }
  bool initialized() const { return bank_.initialized(); }

 private:
  LowPassBank<3> bank_;
};

}  // namespace vqf
