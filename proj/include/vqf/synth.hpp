#pragma once

// Synthetic IMU data with ground truth, used as the test bed for the filters.
//
// Frames: the world frame is ENU (x east, y north, z up). The true
// orientation maps sensor coordinates to world coordinates. Sample i covers
// the interval [i ts, (i+1) ts]; its gyroscope value is the exact mean rate
// of that interval (the rotation vector of the true increment divided by
// ts) and acc/mag/truth refer to the end of the interval.

#include <cstdint>
#include <string>
#include <vector>

#include "vqf/quat.hpp"

namespace vqf::synth {

inline constexpr double kGravity = 9.81;

// Per-axis a * sin(2 pi f t + phase) + offset, t relative to segment start.
struct Profile {
  Vec3 amplitude;
  Vec3 frequency;  // Hz
  Vec3 phase;      // rad
  Vec3 offset;

  bool is_zero() const { return amplitude == Vec3{} && offset == Vec3{}; }
  Vec3 eval(double t) const;
};

struct Segment {
  double duration = 0.0;  // s
  Profile omega;          // sensor-frame angular rate, rad/s
  Profile lin_acc;        // world-frame linear acceleration, m/s^2
  bool is_rest() const { return omega.is_zero() && lin_acc.is_zero(); }
};

struct Disturbance {
  double start = 0.0;     // s
  double duration = 0.0;  // s
  Vec3 delta;             // world-frame field offset
};

struct TrajectorySpec {
  std::vector<Segment> segments;
  Quaternion initial_orientation;
  Vec3 gyro_bias;          // rad/s
  double sigma_gyr = 0.0;  // rad/s
  double sigma_acc = 0.0;  // m/s^2
  double sigma_mag = 0.0;  // field units
  double mag_norm = 50.0;
  double mag_dip = deg2rad(68.0);  // rad, field points downwards
  std::vector<Disturbance> disturbances;
  std::uint64_t seed = 0;

  double total_duration() const;
};

struct ImuSample {
  Vec3 gyr;
  Vec3 acc;
  Vec3 mag;
};

struct GroundTruth {
  std::vector<Quaternion> quat;  // sensor -> world
  std::vector<std::uint8_t> rest;
  std::vector<std::uint8_t> mag_disturbed;
  std::vector<Vec3> bias;
};

struct Dataset {
  double ts = 0.0;
  std::vector<ImuSample> samples;
  GroundTruth truth;

  std::vector<Vec3> gyr() const;
  std::vector<Vec3> acc() const;
  std::vector<Vec3> mag() const;
};

// Undisturbed world field [0, n cos(dip), -n sin(dip)].
Vec3 world_field(double norm, double dip);

// Throws std::invalid_argument for non-positive ts, n == 0, non-positive
// segment durations, or if n * ts exceeds the total segment duration.
Dataset generate(const TrajectorySpec& spec, double ts, std::size_t n);

// Uses floor(total_duration / ts) samples.
Dataset generate(const TrajectorySpec& spec, double ts);

// TRIAD-style orientation (sensor -> world) mapping the measured
// acceleration onto +z and the horizontal field onto +y. Throws
// std::invalid_argument for zero or collinear inputs.
Quaternion static_pose_oracle(const Vec3& acc, const Vec3& mag);

// JSON trajectory description; throws std::invalid_argument on bad input.
TrajectorySpec spec_from_json(const std::string& text);

// CSV writers matching the CLI formats.
std::string imu_csv(const Dataset& data, bool with_mag = true);
std::string truth_csv(const Dataset& data);

}  // namespace vqf::synth
