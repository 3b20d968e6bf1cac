#include "vqf/params.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace vqf {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_bool(std::string_view s, bool& out) {
  if (s == "true" || s == "1" || s == "on" || s == "yes") {
    out = true;
    return true;
  }
  if (s == "false" || s == "0" || s == "off" || s == "no") {
    out = false;
    return true;
  }
  return false;
}

bool parse_double(std::string_view s, double& out) {
  const std::string buf(s);
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return !buf.empty() && end == buf.c_str() + buf.size();
}

}  // namespace

const std::vector<ParamField>& param_fields() {
  static const std::vector<ParamField> fields = {
      {"tau_acc", &VqfParams::tau_acc},
      {"tau_mag", &VqfParams::tau_mag},
      {"motion_bias_est", &VqfParams::motion_bias_est},
      {"rest_bias_est", &VqfParams::rest_bias_est},
      {"mag_dist_rejection", &VqfParams::mag_dist_rejection},
      {"bias_sigma_init", &VqfParams::bias_sigma_init},
      {"bias_forgetting_time", &VqfParams::bias_forgetting_time},
      {"bias_clip", &VqfParams::bias_clip},
      {"bias_sigma_motion", &VqfParams::bias_sigma_motion},
      {"bias_vertical_forgetting_factor", &VqfParams::bias_vertical_forgetting_factor},
      {"bias_sigma_rest", &VqfParams::bias_sigma_rest},
      {"rest_min_time", &VqfParams::rest_min_time},
      {"rest_filter_tau", &VqfParams::rest_filter_tau},
      {"rest_th_gyr", &VqfParams::rest_th_gyr},
      {"rest_th_acc", &VqfParams::rest_th_acc},
      {"mag_current_tau", &VqfParams::mag_current_tau},
      {"mag_ref_tau", &VqfParams::mag_ref_tau},
      {"mag_norm_th", &VqfParams::mag_norm_th},
      {"mag_dip_th", &VqfParams::mag_dip_th},
      {"mag_new_time", &VqfParams::mag_new_time},
      {"mag_new_min_gyr", &VqfParams::mag_new_min_gyr},
      {"mag_min_undisturbed_time", &VqfParams::mag_min_undisturbed_time},
      {"mag_max_rejection_time", &VqfParams::mag_max_rejection_time},
      {"mag_rejection_factor", &VqfParams::mag_rejection_factor},
  };
  return fields;
}

void validate(const VqfParams& params) {
  for (const auto& field : param_fields()) {
    if (const auto* member = std::get_if<double VqfParams::*>(&field.member)) {
      const double value = params.**member;
      if (!(value > 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument("parameter " + std::string(field.name) + " must be positive and finite");
      }
    }
  }
  if (params.mag_rejection_factor < 1.0) {
    throw std::invalid_argument("parameter mag_rejection_factor must be >= 1");
  }
}

std::string to_key_value(const VqfParams& params) {
  std::ostringstream out;
  for (const auto& field : param_fields()) {
    out << field.name << " = ";
    if (const auto* member = std::get_if<double VqfParams::*>(&field.member)) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", params.**member);
      out << buf;
    } else {
      out << (params.*std::get<bool VqfParams::*>(field.member) ? "true" : "false");
    }
    out << '\n';
  }
  return out.str();
}

bool set_param(VqfParams& params, std::string_view name, std::string_view value) {
  for (const auto& field : param_fields()) {
    if (field.name != name) {
      continue;
    }
    if (const auto* member = std::get_if<double VqfParams::*>(&field.member)) {
      double v = 0.0;
      if (!parse_double(value, v)) {
        throw std::invalid_argument("invalid number for " + std::string(name) + ": '" + std::string(value) + "'");
      }
      params.**member = v;
    } else {
      bool b = false;
      if (!parse_bool(value, b)) {
        throw std::invalid_argument("invalid boolean for " + std::string(name) + ": '" + std::string(value) + "'");
      }
      params.*std::get<bool VqfParams::*>(field.member) = b;
    }
    return true;
  }
  return false;
}

VqfParams parse_key_value(std::string_view text, const VqfParams& base) {
  VqfParams params = base;
  int line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!set_param(params, key, value)) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown parameter '" + std::string(key) + "'");
    }
  }
  return params;
}

}  // namespace vqf
