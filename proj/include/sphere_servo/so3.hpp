#pragma once

#include <Eigen/Dense>

namespace sphere_servo {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kUnitTolerance = 1e-9;
inline constexpr double kRoundTripTolerance = 1e-12;

/// Element of S^2. Construction normalizes; the norm invariant holds to 1e-9.
class UnitVector3 {
 public:
  /// Normalizes `v`. Throws kInvalidArgument for a zero or non-finite vector.
  explicit UnitVector3(const Vec3& v);
  UnitVector3(double x, double y, double z) : UnitVector3(Vec3(x, y, z)) {}

  static UnitVector3 e1() { return UnitVector3(Vec3::UnitX(), Trusted{}); }
  static UnitVector3 e2() { return UnitVector3(Vec3::UnitY(), Trusted{}); }
  static UnitVector3 e3() { return UnitVector3(Vec3::UnitZ(), Trusted{}); }

  const Vec3& vec() const { return v_; }
  operator const Vec3&() const { return v_; }  // NOLINT(google-explicit-constructor)
  double operator[](int i) const { return v_[i]; }
  double dot(const Vec3& other) const { return v_.dot(other); }
  UnitVector3 operator-() const { return UnitVector3(-v_, Trusted{}); }

 private:
  struct Trusted {};
  UnitVector3(const Vec3& v, Trusted) : v_(v) {}
  Vec3 v_;
};

/// Element of SO(3), stored as a body-to-inertial rotation matrix.
class Rotation3 {
 public:
  Rotation3() : m_(Mat3::Identity()) {}
  /// Validates orthonormality and det = +1 within kUnitTolerance.
  explicit Rotation3(const Mat3& m);

  static Rotation3 identity() { return Rotation3(); }
  /// Wraps a matrix without validation. Caller guarantees the invariants.
  static Rotation3 unchecked(const Mat3& m) {
    Rotation3 r;
    r.m_ = m;
    return r;
  }

  const Mat3& matrix() const { return m_; }
  Rotation3 transpose() const { return unchecked(m_.transpose()); }
  Rotation3 operator*(const Rotation3& other) const { return unchecked(m_ * other.m_); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  UnitVector3 operator*(const UnitVector3& v) const { return UnitVector3(m_ * v.vec()); }

  /// Body z-axis expressed in the inertial frame (R e3).
  Vec3 z_axis() const { return m_.col(2); }

 private:
  Mat3 m_;
};

bool is_rotation(const Mat3& m, double tol = kUnitTolerance);

/// skew(v) y = v x y.
Mat3 skew(const Vec3& v);

/// Inverse of skew. Throws kNotSkewSymmetric if ||M + M^T|| exceeds `tol`.
Vec3 unskew(const Mat3& m, double tol = kUnitTolerance);

/// Pi_y x = (I - y y^T) x.
Vec3 project_orthogonal(const UnitVector3& y, const Vec3& x);
Mat3 projector(const UnitVector3& y);

/// Right-handed rotation by `angle` about `axis`.
Rotation3 rodrigues(double angle, const UnitVector3& axis);

/// Nearest rotation in the Frobenius sense (orthogonal polar factor).
/// Throws kDegenerateMatrix if det(m) <= 0.
Rotation3 renormalize(const Mat3& m);

}  // namespace sphere_servo
