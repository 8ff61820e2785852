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

// Linearized model about the hanging equilibrium and its finite-difference
// validation.
//
// Reduced coordinates x in R^{6+2L}: payload position deviation, payload
// attitude exponential coordinates, and the in-plane link deviations C^T xi
// with C = [e1, e2]. The model is  mass * xdd + stiffness * x = input * du
// with a symmetric positive definite mass matrix (each link row carries its
// length so the blocks are the energy Hessian).

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "multilift/dynamics.hpp"
#include "multilift/model.hpp"

namespace multilift {
namespace linearization {

enum class LoadShare {
  kUniform,        // every quadrotor carries m0/n
  kStaticBalance,  // least-squares force/torque balance (asymmetric rigs)
};

// Per-quadrotor payload mass share at the hanging equilibrium, in kg.
std::vector<double> equilibrium_load_share(const SystemParams& params, LoadShare mode);

// Equilibrium thrust vector of quadrotor i: -(M_iT + share_i) g e3.
Eigen::Vector3d equilibrium_force(const SystemParams& params, const DerivedMasses& masses,
                                  double share, int i);

struct LinearModel {
  Eigen::MatrixXd mass;       // D x D, SPD
  Eigen::MatrixXd stiffness;  // D x D, block diagonal
  Eigen::MatrixXd input;      // D x 3n, top rows [I3 ... I3]
  int dim = 0;
  int input_dim = 0;
};

LinearModel build_linear_model(const SystemParams& params, const DerivedMasses& masses,
                               LoadShare share = LoadShare::kUniform);

// Central-difference validation blocks: the mass matrix from the per-body
// kinetic-energy Hessian, then stiffness = -mass * d(accel)/dx and
// input = mass * d(accel)/du from differences of the nonlinear right-hand
// side. h must lie in [1e-7, 1e-3].
LinearModel finite_difference_linearize(const SystemParams& params,
                                        const DerivedMasses& masses, double h = 1e-5);

struct ClosedLoopModel {
  Eigen::MatrixXd dynamics;   // 2D x 2D: [0 I; -M^-1(G+B Kx)  -M^-1 B Kxd]
  Eigen::MatrixXd input_map;  // 2D x D: [0; M^-1]
};

// Throws NumericalError if the mass matrix is not invertible.
ClosedLoopModel build_closed_loop(const LinearModel& lm, const Eigen::MatrixXd& position_gain,
                                  const Eigen::MatrixXd& velocity_gain);

// Dimension of the controllable subspace of the first-order form, computed by
// a block-Krylov basis with rank-revealing orthogonalization.
int controllability_rank(const LinearModel& lm);

// Reduced deviation coordinates of a full state about the equilibrium at
// x0_desired (exact maps: log on SO(3), in-plane link components e3 x q).
struct ReducedState {
  Eigen::VectorXd position;  // x
  Eigen::VectorXd velocity;  // xdot (exact time derivative of x)
};
ReducedState deviation_coordinates(const FullState& state, const SystemParams& params,
                                   const Eigen::Vector3d& x0_desired);

// Full state realizing given reduced coordinates (zero velocity unless given);
// quadrotor attitudes identity. Used by the finite-difference validation.
FullState state_from_reduced(const Eigen::VectorXd& position, const SystemParams& params,
                             const Eigen::Vector3d& x0_desired);

}  // namespace linearization
}  // namespace multilift
