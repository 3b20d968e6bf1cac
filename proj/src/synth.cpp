#include "vqf/synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

namespace vqf::synth {

namespace {

constexpr int kSubsteps = 16;

Vec3 rotation_vector(const Quaternion& q_in) {
  const Quaternion q = q_in.w < 0.0 ? Quaternion{-q_in.w, -q_in.x, -q_in.y, -q_in.z} : q_in;
  const Vec3 v{q.x, q.y, q.z};
  const double s = norm(v);
  if (s == 0.0) {
    return {};
  }
  return (2.0 * std::atan2(s, q.w) / s) * v;
}

// Shepperd's method; independent of the filter code on purpose.
Quaternion from_rotation_matrix(const Mat3& r) {
  const double tr = r(0, 0) + r(1, 1) + r(2, 2);
  Quaternion q;
  if (tr > 0.0) {
    const double s = 2.0 * std::sqrt(tr + 1.0);
    q = {0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s, (r(1, 0) - r(0, 1)) / s};
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
    q = {(r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s};
  } else if (r(1, 1) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
    q = {(r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s};
  } else {
    const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
    q = {(r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s};
  }
  return normalized(q);
}

class SegmentClock {
 public:
  explicit SegmentClock(const std::vector<Segment>& segments) : segments_(segments) {
    double t = 0.0;
    for (const auto& s : segments) {
      starts_.push_back(t);
      t += s.duration;
    }
  }

  // Segment index and local time for absolute time t (clamped to the last segment).
  std::pair<std::size_t, double> locate(double t) const {
    auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
    const std::size_t idx = it == starts_.begin() ? 0 : static_cast<std::size_t>(it - starts_.begin()) - 1;
    return {idx, t - starts_[idx]};
  }

  Vec3 omega(double t) const {
    const auto [idx, local] = locate(t);
    return segments_[idx].omega.eval(local);
  }
  Vec3 lin_acc(double t) const {
    const auto [idx, local] = locate(t);
    return segments_[idx].lin_acc.eval(local);
  }
  bool rest(double t) const { return segments_[locate(t).first].is_rest(); }

 private:
  const std::vector<Segment>& segments_;
  std::vector<double> starts_;
};

Vec3 vec_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw std::invalid_argument(std::string(what) + " must be an array of 3 numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Profile profile_from_json(const nlohmann::json& j) {
  Profile p;
  if (j.is_array()) {
    p.offset = vec_from_json(j, "profile");
    return p;
  }
  if (j.contains("amplitude")) p.amplitude = vec_from_json(j["amplitude"], "amplitude");
  if (j.contains("frequency")) p.frequency = vec_from_json(j["frequency"], "frequency");
  if (j.contains("phase")) p.phase = vec_from_json(j["phase"], "phase");
  if (j.contains("offset")) p.offset = vec_from_json(j["offset"], "offset");
  return p;
}

void append_row(std::string& out, std::initializer_list<double> values, const char* fmt) {
  char buf[40];
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    first = false;
    std::snprintf(buf, sizeof buf, fmt, v);
    out += buf;
  }
  out += '\n';
}

}  // namespace

Vec3 Profile::eval(double t) const {
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    out[i] = amplitude[i] * std::sin(2.0 * std::numbers::pi * frequency[i] * t + phase[i]) + offset[i];
  }
  return out;
}

double TrajectorySpec::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

Vec3 world_field(double norm, double dip) { return {0.0, norm * std::cos(dip), -norm * std::sin(dip)}; }

std::vector<Vec3> Dataset::gyr() const {
  std::vector<Vec3> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.gyr);
  return out;
}

std::vector<Vec3> Dataset::acc() const {
  std::vector<Vec3> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.acc);
  return out;
}

std::vector<Vec3> Dataset::mag() const {
  std::vector<Vec3> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.mag);
  return out;
}

Dataset generate(const TrajectorySpec& spec, double ts, std::size_t n) {
  if (!(ts > 0.0)) {
    throw std::invalid_argument("sampling time must be positive");
  }
  if (n == 0 || spec.segments.empty()) {
    throw std::invalid_argument("trajectory needs at least one segment and one sample");
  }
  for (const auto& s : spec.segments) {
    if (!(s.duration > 0.0)) {
      throw std::invalid_argument("segment durations must be positive");
    }
  }
  for (const auto& d : spec.disturbances) {
    if (!(d.duration > 0.0)) {
      throw std::invalid_argument("disturbance durations must be positive");
    }
  }
  if (static_cast<double>(n) * ts > spec.total_duration() * (1.0 + 1e-9)) {
    throw std::invalid_argument("requested samples exceed the trajectory duration");
  }
  if (spec.sigma_gyr < 0.0 || spec.sigma_acc < 0.0 || spec.sigma_mag < 0.0 || !(spec.mag_norm > 0.0)) {
    throw std::invalid_argument("noise levels must be non-negative and the field norm positive");
  }

  const SegmentClock clock(spec.segments);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto noise = [&](double sigma) {
    const double a = gauss(rng), b = gauss(rng), c = gauss(rng);
    return Vec3{sigma * a, sigma * b, sigma * c};
  };

  const Vec3 field = world_field(spec.mag_norm, spec.mag_dip);
  const double h = ts / kSubsteps;

  Dataset data;
  data.ts = ts;
  data.samples.reserve(n);
  Quaternion q = normalized(spec.initial_orientation);
  for (std::size_t i = 0; i < n; ++i) {
    const double t0 = static_cast<double>(i) * ts;
    const double t1 = static_cast<double>(i + 1) * ts;
    const Quaternion q_prev = q;
    bool rotated = false;
    for (int s = 0; s < kSubsteps; ++s) {
      const Vec3 w = clock.omega(t0 + (s + 0.5) * h);
      if (w == Vec3{}) continue;
      q = normalized(q * from_angle_axis(h * norm(w), w));
      rotated = true;
    }
    const Vec3 gyr_true = rotated ? (1.0 / ts) * rotation_vector(conjugate(q_prev) * q) : Vec3{};

    Vec3 b_field = field;
    bool disturbed = false;
    for (const auto& d : spec.disturbances) {
      if (t1 >= d.start && t1 < d.start + d.duration) {
        b_field = b_field + d.delta;
        disturbed = true;
      }
    }
    const Quaternion world_to_sensor = conjugate(q);

    ImuSample sample;
    sample.gyr = gyr_true + spec.gyro_bias + noise(spec.sigma_gyr);
    sample.acc = rotate(world_to_sensor, Vec3{0.0, 0.0, kGravity} + clock.lin_acc(t1)) + noise(spec.sigma_acc);
    sample.mag = rotate(world_to_sensor, b_field) + noise(spec.sigma_mag);
    data.samples.push_back(sample);

    data.truth.quat.push_back(q);
    data.truth.rest.push_back(clock.rest(0.5 * (t0 + t1)) ? 1 : 0);
    data.truth.mag_disturbed.push_back(disturbed ? 1 : 0);
    data.truth.bias.push_back(spec.gyro_bias);
  }
  return data;
}

Dataset generate(const TrajectorySpec& spec, double ts) {
  if (!(ts > 0.0)) {
    throw std::invalid_argument("sampling time must be positive");
  }
  const auto n = static_cast<std::size_t>(std::floor(spec.total_duration() / ts + 1e-9));
  return generate(spec, ts, n);
}

Quaternion static_pose_oracle(const Vec3& acc, const Vec3& mag) {
  const double na = norm(acc), nm = norm(mag);
  if (na == 0.0 || nm == 0.0) {
    throw std::invalid_argument("acc and mag must be non-zero");
  }
  const Vec3 up = (1.0 / na) * acc;
  const Vec3 east_raw = cross(mag, up);
  const double ne = norm(east_raw);
  if (ne < 1e-9 * nm) {
    throw std::invalid_argument("acc and mag are collinear");
  }
  const Vec3 east = (1.0 / ne) * east_raw;
  const Vec3 north = cross(up, east);
  const Mat3 r{{east.x, east.y, east.z, north.x, north.y, north.z, up.x, up.y, up.z}};
  return from_rotation_matrix(r);
}

TrajectorySpec spec_from_json(const std::string& text) {
  TrajectorySpec spec;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.contains("segments") || !j["segments"].is_array() || j["segments"].empty()) {
      throw std::invalid_argument("spec needs a non-empty 'segments' array");
    }
    for (const auto& js : j["segments"]) {
      Segment seg;
      seg.duration = js.at("duration").get<double>();
      if (!(seg.duration > 0.0)) {
        throw std::invalid_argument("segment durations must be positive");
      }
      if (js.contains("omega")) seg.omega = profile_from_json(js["omega"]);
      if (js.contains("lin_acc")) seg.lin_acc = profile_from_json(js["lin_acc"]);
      spec.segments.push_back(seg);
    }
    if (j.contains("initial_orientation")) {
      const auto& q = j["initial_orientation"];
      if (!q.is_array() || q.size() != 4) {
        throw std::invalid_argument("initial_orientation must be [w, x, y, z]");
      }
      spec.initial_orientation = normalized(Quaternion{q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                                                       q[3].get<double>()});
    }
    if (j.contains("gyro_bias")) spec.gyro_bias = vec_from_json(j["gyro_bias"], "gyro_bias");
    if (j.contains("noise")) {
      const auto& jn = j["noise"];
      spec.sigma_gyr = jn.value("gyr", 0.0);
      spec.sigma_acc = jn.value("acc", 0.0);
      spec.sigma_mag = jn.value("mag", 0.0);
    }
    if (j.contains("mag_field")) {
      spec.mag_norm = j["mag_field"].value("norm", spec.mag_norm);
      spec.mag_dip = deg2rad(j["mag_field"].value("dip_deg", rad2deg(spec.mag_dip)));
    }
    if (j.contains("disturbances")) {
      for (const auto& jd : j["disturbances"]) {
        Disturbance d;
        d.start = jd.at("start").get<double>();
        d.duration = jd.at("duration").get<double>();
        d.delta = vec_from_json(jd.at("delta"), "delta");
        if (!(d.duration > 0.0)) {
          throw std::invalid_argument("disturbance durations must be positive");
        }
        spec.disturbances.push_back(d);
      }
    }
    spec.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("invalid trajectory spec: ") + e.what());
  }
  if (spec.sigma_gyr < 0.0 || spec.sigma_acc < 0.0 || spec.sigma_mag < 0.0 || !(spec.mag_norm > 0.0)) {
    throw std::invalid_argument("noise levels must be non-negative and the field norm positive");
  }
  return spec;
}

std::string imu_csv(const Dataset& data, bool with_mag) {
  std::string out = with_mag ? "t,gyr_x,gyr_y,gyr_z,acc_x,acc_y,acc_z,mag_x,mag_y,mag_z\n"
                             : "t,gyr_x,gyr_y,gyr_z,acc_x,acc_y,acc_z\n";
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const auto& s = data.samples[i];
    const double t = static_cast<double>(i + 1) * data.ts;
    if (with_mag) {
      append_row(out, {t, s.gyr.x, s.gyr.y, s.gyr.z, s.acc.x, s.acc.y, s.acc.z, s.mag.x, s.mag.y, s.mag.z}, "%.17g");
    } else {
      append_row(out, {t, s.gyr.x, s.gyr.y, s.gyr.z, s.acc.x, s.acc.y, s.acc.z}, "%.17g");
    }
  }
  return out;
}

std::string truth_csv(const Dataset& data) {
  std::string out = "t,q_w,q_x,q_y,q_z,rest,mag_dist,bias_x,bias_y,bias_z\n";
  const auto& tr = data.truth;
  for (std::size_t i = 0; i < tr.quat.size(); ++i) {
    const auto& q = tr.quat[i];
    const auto& b = tr.bias[i];
    append_row(out,
               {static_cast<double>(i + 1) * data.ts, q.w, q.x, q.y, q.z, static_cast<double>(tr.rest[i]),
                static_cast<double>(tr.mag_disturbed[i]), b.x, b.y, b.z},
               "%.17g");
  }
  return out;
}

}  // namespace vqf::synth
