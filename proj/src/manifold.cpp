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

#include "multilift/manifold.hpp"

#include <algorithm>
#include <cmath>

namespace multilift {

Eigen::Vector3d vee(const Eigen::Matrix3d& s) {
  if ((s + s.transpose()).norm() >= kSkewTolerance) {
    throw ValidationError("vee: input is not skew-symmetric");
  }
  return vee_unchecked(s);
}

Eigen::Matrix3d exp_so3(const Eigen::Vector3d& a) {
  const double theta2 = a.squaredNorm();
  double c1, c2;  // sin(t)/t and (1-cos(t))/t^2
  if (theta2 < 1e-16) {
    c1 = 1.0 - theta2 / 6.0;
    c2 = 0.5 - theta2 / 24.0;
  } else {
    const double theta = std::sqrt(theta2);
    c1 = std::sin(theta) / theta;
    c2 = (1.0 - std::cos(theta)) / theta2;
  }
  const Eigen::Matrix3d ah = hat(a);
  return Eigen::Matrix3d::Identity() + c1 * ah + c2 * ah * ah;
}

Eigen::Vector3d log_so3(const Eigen::Matrix3d& r) {
  const Eigen::Vector3d w = vee_unchecked(r - r.transpose()) / 2.0;  // sin(theta) * axis
  const double s = w.norm();
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double theta = std::atan2(s, c);
  if (s > 1e-6) {
    return (theta / s) * w;
  }
  if (c > 0.0) {
    return w;  // theta ~ 0, relative error O(theta^2)
  }
  // theta ~ pi: sin(theta)*axis vanishes; recover the axis from r + I.
  const Eigen::Matrix3d b = r + Eigen::Matrix3d::Identity();
  int k = 0;
  b.diagonal().maxCoeff(&k);
  Eigen::Vector3d axis = b.col(k).normalized();
  if (axis.dot(w) < 0.0) axis = -axis;
  return theta * axis;
}

Eigen::Matrix3d project_to_so3(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return r;
}

Eigen::Vector3d dexpinv(const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
  const double theta2 = u.squaredNorm();
  double c;  // coefficient of u x (u x v)
  if (theta2 < 1e-8) {
    c = 1.0 / 12.0 + theta2 / 720.0;
  } else {
    const double theta = std::sqrt(theta2);
    c = (1.0 - 0.5 * theta / std::tan(0.5 * theta)) / theta2;
  }
  const Eigen::Vector3d uxv = u.cross(v);
  return v - 0.5 * uxv + c * u.cross(uxv);
}

double Rotation::orthogonality_defect(const Eigen::Matrix3d& m) {
  return (m.transpose() * m - Eigen::Matrix3d::Identity()).norm();
}

Rotation Rotation::from_matrix(const Eigen::Matrix3d& m) {
  if (orthogonality_defect(m) >= kRotationTolerance) {
    throw ValidationError("Rotation: matrix is not orthogonal within tolerance");
  }
  if (std::abs(m.determinant() - 1.0) >= kRotationTolerance) {
    throw ValidationError("Rotation: determinant differs from +1");
  }
  return Rotation(m, 0);
}

UnitVector UnitVector::from_vector(const Eigen::Vector3d& v) {
  if (std::abs(v.norm() - 1.0) >= kUnitNormTolerance) {
    throw ValidationError("UnitVector: vector norm differs from 1");
  }
  return UnitVector(v);
}

UnitVector UnitVector::normalized(const Eigen::Vector3d& v) {
  const double n = v.norm();
  if (n < 1e-12) {
    throw ValidationError("UnitVector: cannot normalize a zero vector");
  }
  return UnitVector(v / n);
}

AttitudeError attitude_error(const Rotation& r, const Rotation& rc) {
  const Eigen::Matrix3d a = rc.matrix().transpose() * r.matrix();
  AttitudeError e;
  e.psi = std::max(0.0, 0.5 * (3.0 - a.trace()));
  e.vector = vee_unchecked(a - a.transpose()) / 2.0;
  return e;
}

Eigen::Vector3d angular_velocity_error(const Rotation& r, const Rotation& rc,
                                       const Eigen::Vector3d& omega,
                                       const Eigen::Vector3d& omega_c) {
  return omega - r.matrix().transpose() * rc.matrix() * omega_c;
}

}  // namespace multilift
