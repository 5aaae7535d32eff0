#include "sphere_servo/so3.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "sphere_servo/error.hpp"

namespace sphere_servo {

UnitVector3::UnitVector3(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::kInvalidArgument, "cannot normalize a zero or non-finite vector");
  }
  v_ = v / n;
}

Rotation3::Rotation3(const Mat3& m) : m_(m) {
  if (!is_rotation(m)) {
    throw Error(ErrorCode::kInvalidArgument, "matrix is not a proper rotation");
  }
}

bool is_rotation(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  const double ortho = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(m.determinant() - 1.0) <= tol;
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

Vec3 unskew(const Mat3& m, double tol) {
  if ((m + m.transpose()).norm() > tol) {
    throw Error(ErrorCode::kNotSkewSymmetric, "matrix has a symmetric part");
  }
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

Mat3 projector(const UnitVector3& y) {
  return Mat3::Identity() - y.vec() * y.vec().transpose();
}

Vec3 project_orthogonal(const UnitVector3& y, const Vec3& x) {
  return x - y.vec() * y.dot(x);
}

Rotation3 rodrigues(double angle, const UnitVector3& axis) {
  const Mat3 s = skew(axis);
  return Rotation3::unchecked(Mat3::Identity() + std::sin(angle) * s +
                              (1.0 - std::cos(angle)) * s * s);
}

Rotation3 renormalize(const Mat3& m) {
  if (!m.allFinite() || !(m.determinant() > 0.0)) {
    throw Error(ErrorCode::kDegenerateMatrix, "determinant is not positive");
  }
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Rotation3::unchecked(svd.matrixU() * svd.matrixV().transpose());
}

}  // namespace sphere_servo
