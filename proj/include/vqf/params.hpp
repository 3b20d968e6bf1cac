#pragma once

// Tuning parameters of the full filter. Values are stored in the units
// listed next to each field (degrees and deg/s where noted); conversion to
// SI happens when the filter derives its internal coefficients.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vqf {

struct VqfParams {
  double tau_acc = 3.0;  // s
  double tau_mag = 9.0;  // s

  bool motion_bias_est = true;
  bool rest_bias_est = true;
  bool mag_dist_rejection = true;

  double bias_sigma_init = 0.5;                     // deg/s
  double bias_forgetting_time = 100.0;              // s
  double bias_clip = 2.0;                           // deg/s
  double bias_sigma_motion = 0.1;                   // deg/s
  double bias_vertical_forgetting_factor = 0.0001;  // relative
  double bias_sigma_rest = 0.03;                    // deg/s

  double rest_min_time = 1.5;    // s
  double rest_filter_tau = 0.5;  // s
  double rest_th_gyr = 2.0;      // deg/s
  double rest_th_acc = 0.5;      // m/s^2

  double mag_current_tau = 0.05;          // s
  double mag_ref_tau = 20.0;              // s
  double mag_norm_th = 0.1;               // relative
  double mag_dip_th = 10.0;               // deg
  double mag_new_time = 20.0;             // s
  double mag_new_min_gyr = 20.0;          // deg/s
  double mag_min_undisturbed_time = 0.5;  // s
  double mag_max_rejection_time = 60.0;   // s
  double mag_rejection_factor = 2.0;      // relative

  friend bool operator==(const VqfParams&, const VqfParams&) = default;

  // All extensions off: the filter reduces to the basic variant.
  static VqfParams basic() {
    VqfParams p;
    p.motion_bias_est = false;
    p.rest_bias_est = false;
    p.mag_dist_rejection = false;
    return p;
  }
};

// Name/member table used for serialization and CLI flags.
struct ParamField {
  std::string_view name;
  std::variant<double VqfParams::*, bool VqfParams::*> member;
};

const std::vector<ParamField>& param_fields();

// Throws std::invalid_argument naming the first offending field.
void validate(const VqfParams& params);

// Flat "key = value" lines, one per field, in declaration order.
std::string to_key_value(const VqfParams& params);

// Parses "key = value" lines (blank lines and '#' comments allowed) on top of
// `base`. Throws std::invalid_argument on unknown keys or malformed values.
VqfParams parse_key_value(std::string_view text, const VqfParams& base = {});

// Sets one field from its textual value; returns false for unknown names.
bool set_param(VqfParams& params, std::string_view name, std::string_view value);

}  // namespace vqf
