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

// Finite-difference Euler-Lagrange reference for the coupled dynamics.
//
// The Lagrangian is evaluated per body (payload, every link joint mass, every
// quadrotor) from chain kinematics in a local exponential chart around the
// query state, and the Euler-Lagrange equations are differenced numerically:
//
//   M(theta) thetadd = dL/dtheta - (dp/dtheta) thetadot + F_generalized,
//   p = dL/dthetadot.
//
// Nothing here touches the assembled block equations, so this module serves
// as an independent oracle for `dynamics` and supplies the reduced-coordinate
// mass matrix used to cross-check `linearization`.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "multilift/model.hpp"

namespace multilift {
namespace oracle {

struct CoupledAccelerations {
  Eigen::Vector3d payload_linear = Eigen::Vector3d::Zero();
  Eigen::Vector3d payload_angular = Eigen::Vector3d::Zero();
  std::vector<std::vector<Eigen::Vector3d>> link_angular;
};

// Deterministic orthonormal basis (t1, t2) of the tangent plane at q, chosen
// so that q = e3 yields exactly (e1, e2).
std::pair<Eigen::Vector3d, Eigen::Vector3d> tangent_basis(const Eigen::Vector3d& q);

// Reference accelerations at `state` under the given applied forces (thrust
// vectors plus translational disturbances, one per quadrotor).
CoupledAccelerations reference_accelerations(const FullState& state,
                                             const SystemParams& params,
                                             const std::vector<Eigen::Vector3d>& applied_force,
                                             const std::vector<Eigen::Vector3d>& force_disturbance);

// Chart mass matrix d^2 L / dthetadot^2 at `state`, dimension 6 + 2L with
// per-link rows in the tangent_basis ordering. At the hanging equilibrium this
// coincides with the reduced-coordinate mass matrix of the linearized model.
Eigen::MatrixXd chart_mass_matrix(const FullState& state, const SystemParams& params);

}  // namespace oracle
}  // namespace multilift
