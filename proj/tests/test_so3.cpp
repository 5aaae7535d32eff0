#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "sphere_servo/error.hpp"
#include "sphere_servo/so3.hpp"
#include "test_support.hpp"

namespace sphere_servo {
namespace {

using testing::expect_code;
using testing::Sampler;

TEST(UnitVector3, NormalizesOnConstruction) {
  const UnitVector3 u(3.0, 0.0, 4.0);
  EXPECT_NEAR(u.vec().norm(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(u[0], 0.6);
  EXPECT_DOUBLE_EQ(u[2], 0.8);
}

TEST(UnitVector3, RejectsZeroAndNonFinite) {
  expect_code(ErrorCode::kInvalidArgument, [] { UnitVector3(Vec3::Zero()); });
  expect_code(ErrorCode::kInvalidArgument, [] { UnitVector3(Vec3(NAN, 0, 0)); });
  expect_code(ErrorCode::kInvalidArgument, [] { UnitVector3(Vec3(INFINITY, 1, 0)); });
}

TEST(UnitVector3, RandomNormsWithinTolerance) {
  Sampler s(11);
  for (int i = 0; i < 1000; ++i) {
    const UnitVector3 u(s.vector(std::pow(10.0, s.uniform(-6, 6))));
    EXPECT_NEAR(u.vec().norm(), 1.0, kUnitTolerance);
  }
}

TEST(Skew, ZeroVectorGivesZeroMatrix) { EXPECT_TRUE(skew(Vec3::Zero()).isZero(0.0)); }

TEST(Skew, RightHandRule) { EXPECT_TRUE((skew(Vec3::UnitZ()) * Vec3::UnitX()).isApprox(Vec3::UnitY())); }

TEST(Skew, SelfCrossProductVanishes) {
  const Vec3 v(1, 2, 3);
  EXPECT_TRUE((skew(v) * v).isZero(0.0));
}

TEST(Skew, MatchesCrossProductAndIsExactlyAntisymmetric) {
  Sampler s(12);
  for (int i = 0; i < 500; ++i) {
    const Vec3 v = s.vector(5.0);
    const Vec3 y = s.vector(5.0);
    EXPECT_LE((skew(v) * y - v.cross(y)).norm(), 1e-13);
    EXPECT_TRUE((skew(v) + skew(v).transpose()).isZero(0.0));
  }
}

TEST(Unskew, RoundTrip) {
  EXPECT_EQ(unskew(skew(Vec3(1, 2, 3))), Vec3(1, 2, 3));
  EXPECT_EQ(unskew(Mat3::Zero()), Vec3::Zero());
  Sampler s(13);
  for (int i = 0; i < 500; ++i) {
    const Vec3 v = s.vector(3.0);
    EXPECT_LE((unskew(skew(v)) - v).norm(), kRoundTripTolerance);
  }
}

TEST(Unskew, RejectsSymmetricPart) {
  expect_code(ErrorCode::kNotSkewSymmetric, [] { unskew(Mat3::Identity()); });
  Mat3 m = skew(Vec3(1, 2, 3));
  m(0, 1) += 1e-6;
  expect_code(ErrorCode::kNotSkewSymmetric, [&] { unskew(m); });
  m = skew(Vec3(1, 2, 3));
  m(0, 1) += 1e-11;
  EXPECT_NO_THROW(unskew(m));
}

TEST(ProjectOrthogonal, Examples) {
  EXPECT_TRUE(project_orthogonal(UnitVector3::e1(), Vec3::UnitX()).isZero(0.0));
  EXPECT_EQ(project_orthogonal(UnitVector3::e1(), Vec3::UnitY()), Vec3::UnitY());
  EXPECT_EQ(project_orthogonal(UnitVector3::e3(), Vec3(1, 1, 1)), Vec3(1, 1, 0));
}

TEST(ProjectOrthogonal, OrthogonalIdempotentAndSpectrum) {
  Sampler s(14);
  for (int i = 0; i < 300; ++i) {
    const UnitVector3 y = s.unit();
    const Vec3 x = s.vector(4.0);
    const Vec3 p = project_orthogonal(y, x);
    EXPECT_NEAR(p.dot(y.vec()), 0.0, 1e-12);
    EXPECT_LE((project_orthogonal(y, p) - p).norm(), 1e-12);
    EXPECT_LE((projector(y) * x - p).norm(), 1e-12);

    Eigen::SelfAdjointEigenSolver<Mat3> eig(projector(y));
    EXPECT_NEAR(eig.eigenvalues()(0), 0.0, 1e-12);
    EXPECT_NEAR(eig.eigenvalues()(1), 1.0, 1e-12);
    EXPECT_NEAR(eig.eigenvalues()(2), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(eig.eigenvectors().col(0).dot(y.vec())), 1.0, 1e-12);
  }
}

TEST(Rodrigues, Examples) {
  EXPECT_TRUE(rodrigues(0.0, UnitVector3(1, 2, 3)).matrix().isApprox(Mat3::Identity()));
  EXPECT_LE((rodrigues(std::numbers::pi / 2, UnitVector3::e3()) * Vec3::UnitX() - Vec3::UnitY()).norm(),
            1e-15);
  const UnitVector3 a(1, 1, 0);
  const Mat3 product = rodrigues(0.3, a).matrix() * rodrigues(-0.3, a).matrix();
  EXPECT_LE((product - Mat3::Identity()).norm(), 1e-15);
}

TEST(Rodrigues, AgreesWithAngleAxisAndIsARotation) {
  Sampler s(15);
  for (int i = 0; i < 1000; ++i) {
    const double angle = s.uniform(-2 * M_PI, 2 * M_PI);
    const UnitVector3 axis = s.unit();
    const Mat3 r = rodrigues(angle, axis).matrix();
    EXPECT_TRUE(is_rotation(r));
    const Mat3 oracle = Eigen::AngleAxisd(angle, axis.vec()).toRotationMatrix();
    EXPECT_LE((r - oracle).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((r * axis.vec() - axis.vec()).norm(), 1e-14);
  }
}

TEST(Rotation3, CheckedConstructorValidates) {
  EXPECT_NO_THROW(Rotation3(Mat3::Identity()));
  expect_code(ErrorCode::kInvalidArgument, [] { Rotation3(1.01 * Mat3::Identity()); });
  expect_code(ErrorCode::kInvalidArgument, [] { Rotation3(Vec3(1, 1, -1).asDiagonal().toDenseMatrix()); });
}

// Independent oracle for the polar factor: M (M^T M)^{-1/2} via the symmetric
// eigendecomposition instead of an SVD.
Mat3 polar_oracle(const Mat3& m) {
  Eigen::SelfAdjointEigenSolver<Mat3> eig(m.transpose() * m);
  const Mat3 inv_sqrt = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                        eig.eigenvectors().transpose();
  return m * inv_sqrt;
}

TEST(Renormalize, Examples) {
  EXPECT_TRUE(renormalize(Mat3::Identity()).matrix().isApprox(Mat3::Identity(), 1e-15));
  EXPECT_LE((renormalize(1.001 * Mat3::Identity()).matrix() - Mat3::Identity()).norm(), 1e-15);
}

TEST(Renormalize, RepairsOneEulerStepDrift) {
  const Mat3 r0 = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  const Vec3 omega(0.3, -2.0, 1.1);
  const Mat3 drifted = r0 + 0.01 * r0 * skew(omega);
  ASSERT_FALSE(is_rotation(drifted));
  const Mat3 fixed = renormalize(drifted).matrix();
  EXPECT_LE((fixed.transpose() * fixed - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(fixed.determinant(), 1.0, 1e-12);
}

TEST(Renormalize, MatchesPolarFactorNearSO3) {
  Sampler s(16);
  for (int i = 0; i < 300; ++i) {
    Mat3 noise;
    for (int k = 0; k < 9; ++k) noise(k / 3, k % 3) = s.normal(0.02);
    const Mat3 m = s.rotation() + noise;
    const Mat3 got = renormalize(m).matrix();
    EXPECT_TRUE(is_rotation(got));
    EXPECT_LE((got - polar_oracle(m)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Renormalize, RejectsNonPositiveDeterminant) {
  expect_code(ErrorCode::kDegenerateMatrix, [] { renormalize(Mat3::Zero()); });
  expect_code(ErrorCode::kDegenerateMatrix, [] { renormalize(-Mat3::Identity()); });
  Mat3 nan = Mat3::Identity();
  nan(1, 1) = NAN;
  expect_code(ErrorCode::kDegenerateMatrix, [&] { renormalize(nan); });
}

}  // namespace
}  // namespace sphere_servo
