// Copyright 2026 The Multilift Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Primitives on SO(3) and the unit sphere: hat/vee maps, exponential and
// logarithm, validated rotation / unit-vector value types, and the attitude
// error functions used by the controller.

#pragma once

#include <Eigen/Dense>

#include "multilift/errors.hpp"

namespace multilift {

inline constexpr double kRotationTolerance = 1e-9;
inline constexpr double kUnitNormTolerance = 1e-9;
inline constexpr double kSkewTolerance = 1e-9;

// hat(a) * y == a x y for all y; hat(a) is skew-symmetric.
inline Eigen::Matrix3d hat(const Eigen::Vector3d& a) {
  Eigen::Matrix3d s;
  s << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
      -a.y(), a.x(), 0.0;
  return s;
}

// Inverse of hat without any skewness check. Prefer vee() at API boundaries.
inline Eigen::Vector3d vee_unchecked(const Eigen::Matrix3d& s) {
  return {s(2, 1), s(0, 2), s(1, 0)};
}

// Inverse of hat. Throws ValidationError if ||S + S^T|| >= 1e-9.
Eigen::Vector3d vee(const Eigen::Matrix3d& s);

// Rodrigues formula with a series fallback for small angles; exact on SO(3)
// for any rotation-vector magnitude.
Eigen::Matrix3d exp_so3(const Eigen::Vector3d& a);

// Rotation vector of r. The branch with angle in [0, pi] is returned; near pi
// the axis is recovered from r + I for accuracy.
Eigen::Vector3d log_so3(const Eigen::Matrix3d& r);

// Nearest rotation matrix in the Frobenius sense (polar factor via SVD).
// Used to repair integrator drift.
Eigen::Matrix3d project_to_so3(const Eigen::Matrix3d& m);

// Truncated inverse of the differential of exp on so(3):
//   dexpinv_u(v) = v - 1/2 u x v + c(||u||) u x (u x v),
// with the exact cotangent coefficient. Used by the Lie-group RK4 step.
Eigen::Vector3d dexpinv(const Eigen::Vector3d& u, const Eigen::Vector3d& v);

// A 3x3 matrix validated to be orthogonal with determinant +1.
class Rotation {
 public:
  Rotation() : m_(Eigen::Matrix3d::Identity()) {}

  // Throws ValidationError unless R^T R = I and det R = 1 within 1e-9.
  static Rotation from_matrix(const Eigen::Matrix3d& m);

  // Repairs an almost-rotation (e.g. after integration) by polar projection.
  static Rotation projected(const Eigen::Matrix3d& m) { return Rotation(project_to_so3(m), 0); }

  static Rotation about_axis(const Eigen::Vector3d& axis_angle) { return Rotation(exp_so3(axis_angle), 0); }

  // No validation; for products of already-valid rotations on hot paths.
  static Rotation trusted(const Eigen::Matrix3d& m) { return Rotation(m, 0); }

  const Eigen::Matrix3d& matrix() const { return m_; }

  static double orthogonality_defect(const Eigen::Matrix3d& m);

 private:
  Rotation(const Eigen::Matrix3d& m, int) : m_(m) {}
  Eigen::Matrix3d m_;
};

// A 3-vector validated to have unit norm.
class UnitVector {
 public:
  UnitVector() : v_(Eigen::Vector3d::UnitZ()) {}

  // Throws ValidationError unless | ||v|| - 1 | < 1e-9.
  static UnitVector from_vector(const Eigen::Vector3d& v);

  // Normalizes v; throws if ||v|| is numerically zero.
  static UnitVector normalized(const Eigen::Vector3d& v);

  const Eigen::Vector3d& vector() const { return v_; }

 private:
  explicit UnitVector(const Eigen::Vector3d& v) : v_(v) {}
  Eigen::Vector3d v_;
};

struct AttitudeError {
  double psi = 0.0;             // 1/2 tr(I - Rc^T R), in [0, 2]
  Eigen::Vector3d vector;       // 1/2 (Rc^T R - R^T Rc)^vee
};

// Configuration error Psi and error vector e_R between an attitude and a
// commanded attitude. ||vector||^2 == psi * (2 - psi).
AttitudeError attitude_error(const Rotation& r, const Rotation& rc);

// e_Omega = Omega - R^T Rc Omega_c: rate error expressed in the body frame.
Eigen::Vector3d angular_velocity_error(const Rotation& r, const Rotation& rc,
                                       const Eigen::Vector3d& omega,
                                       const Eigen::Vector3d& omega_c);

}  // namespace multilift
