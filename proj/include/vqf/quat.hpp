#pragma once

// Quaternion and 3x3 primitives used by the filters.
//
// Conventions: quaternions are stored [w, x, y, z] and follow the Hamilton
// product. A unit quaternion q rotates a vector v (treated as the pure
// quaternion [0, v]) via q * v * q^-1. A quaternion named q_AB maps
// coordinates from frame A into frame B.

#include <array>
#include <cmath>
#include <numbers>

namespace vqf {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  friend constexpr Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr Vec3 operator*(const Vec3& a, double s) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

inline constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline bool is_finite(const Vec3& v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

// Returns v unchanged when its norm is zero.
inline Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  return n > 0.0 ? (1.0 / n) * v : v;
}

struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static constexpr Quaternion identity() { return {}; }

  // Same rotation, other hemisphere.
  friend constexpr Quaternion operator-(const Quaternion& q) { return {-q.w, -q.x, -q.y, -q.z}; }
  friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;
};

// Hamilton product.
inline constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline constexpr Quaternion conjugate(const Quaternion& q) { return {q.w, -q.x, -q.y, -q.z}; }

// Inverse of a unit quaternion.
inline constexpr Quaternion inverse(const Quaternion& q) { return conjugate(q); }

inline double norm(const Quaternion& q) { return std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z); }

inline Quaternion normalized(const Quaternion& q) {
  const double n = norm(q);
  if (n == 0.0) {
    return Quaternion::identity();
  }
  const double s = 1.0 / n;
  return {q.w * s, q.x * s, q.y * s, q.z * s};
}

inline bool is_finite(const Quaternion& q) {
  return std::isfinite(q.w) && std::isfinite(q.x) && std::isfinite(q.y) && std::isfinite(q.z);
}

// Rotation by `angle` radians about `axis`. A zero axis yields the identity,
// which is what integrating an exactly-zero angular rate should produce.
inline Quaternion from_angle_axis(double angle, const Vec3& axis) {
  const double n = norm(axis);
  if (angle == 0.0 || n == 0.0) {
    return Quaternion::identity();
  }
  const double s = std::sin(0.5 * angle) / n;
  return {std::cos(0.5 * angle), s * axis.x, s * axis.y, s * axis.z};
}

// Rotation about the global z axis.
inline Quaternion from_heading(double angle) { return {std::cos(0.5 * angle), 0.0, 0.0, std::sin(0.5 * angle)}; }

// q * [0, v] * q^-1, expanded.
inline constexpr Vec3 rotate(const Quaternion& q, const Vec3& v) {
  const double tx = 2.0 * (q.y * v.z - q.z * v.y);
  const double ty = 2.0 * (q.z * v.x - q.x * v.z);
  const double tz = 2.0 * (q.x * v.y - q.y * v.x);
  return {v.x + q.w * tx + q.y * tz - q.z * ty,
          v.y + q.w * ty + q.z * tx - q.x * tz,
          v.z + q.w * tz + q.x * ty - q.y * tx};
}

// Equality up to the double cover (q and -q are the same rotation).
inline bool same_rotation(const Quaternion& a, const Quaternion& b, double tol) {
  const double d = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
  const Quaternion c = d < 0.0 ? Quaternion{-b.w, -b.x, -b.y, -b.z} : b;
  return std::abs(a.w - c.w) <= tol && std::abs(a.x - c.x) <= tol && std::abs(a.y - c.y) <= tol &&
         std::abs(a.z - c.z) <= tol;
}

// Maps any finite angle into [-pi, pi]. Uses the IEEE remainder, so the
// result is exact and wrap_to_pi(wrap_to_pi(x)) == wrap_to_pi(x). Odd
// multiples of pi resolve by the round-half-to-even rule of std::remainder.
inline double wrap_to_pi(double angle) { return std::remainder(angle, 2.0 * std::numbers::pi); }

struct Mat3 {
  std::array<double, 9> m{};  // row-major

  static constexpr Mat3 identity() { return {{1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0}}; }
  static constexpr Mat3 diag(double a, double b, double c) { return {{a, 0.0, 0.0, 0.0, b, 0.0, 0.0, 0.0, c}}; }

  constexpr double& operator()(int r, int c) { return m[3 * r + c]; }
  constexpr double operator()(int r, int c) const { return m[3 * r + c]; }

  friend constexpr bool operator==(const Mat3&, const Mat3&) = default;
};

inline constexpr Vec3 operator*(const Mat3& a, const Vec3& v) {
  return {a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z,
          a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z,
          a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z};
}

inline constexpr Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      out(r, c) = a(r, 0) * b(0, c) + a(r, 1) * b(1, c) + a(r, 2) * b(2, c);
    }
  }
  return out;
}

inline constexpr Mat3 operator+(const Mat3& a, const Mat3& b) {
  Mat3 out;
  for (int i = 0; i < 9; ++i) out.m[i] = a.m[i] + b.m[i];
  return out;
}

inline constexpr Mat3 operator-(const Mat3& a, const Mat3& b) {
  Mat3 out;
  for (int i = 0; i < 9; ++i) out.m[i] = a.m[i] - b.m[i];
  return out;
}

inline constexpr Mat3 operator*(double s, const Mat3& a) {
  Mat3 out;
  for (int i = 0; i < 9; ++i) out.m[i] = s * a.m[i];
  return out;
}

inline constexpr Mat3 transpose(const Mat3& a) {
  return {{a(0, 0), a(1, 0), a(2, 0), a(0, 1), a(1, 1), a(2, 1), a(0, 2), a(1, 2), a(2, 2)}};
}

inline constexpr double determinant(const Mat3& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

// Adjugate-based inverse. Returns false (and leaves `out` untouched) when
// |det| is not larger than `min_abs_det`.
inline bool invert(const Mat3& a, Mat3& out, double min_abs_det = 0.0) {
  const double det = determinant(a);
  if (!(std::abs(det) > min_abs_det)) {
    return false;
  }
  const double s = 1.0 / det;
  out = {{s * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)), s * (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)),
          s * (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)), s * (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)),
          s * (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)), s * (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)),
          s * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)), s * (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)),
          s * (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0))}};
  return true;
}

inline Mat3 to_rotation_matrix(const Quaternion& q) {
  const double ww = q.w * q.w, xx = q.x * q.x, yy = q.y * q.y, zz = q.z * q.z;
  const double wx = q.w * q.x, wy = q.w * q.y, wz = q.w * q.z;
  const double xy = q.x * q.y, xz = q.x * q.z, yz = q.y * q.z;
  return {{ww + xx - yy - zz, 2.0 * (xy - wz), 2.0 * (xz + wy),
           2.0 * (xy + wz), ww - xx + yy - zz, 2.0 * (yz - wx),
           2.0 * (xz - wy), 2.0 * (yz + wx), ww - xx - yy + zz}};
}

inline constexpr double deg2rad(double deg) { return deg * (std::numbers::pi / 180.0); }
inline constexpr double rad2deg(double rad) { return rad * (180.0 / std::numbers::pi); }

}  // namespace vqf
