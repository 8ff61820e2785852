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

// Assembly and solution of the coupled equations of motion.
//
// The translational, payload-rotational and link dynamics form one linear
// system  inertia * a = forcing  in the stacked accelerations
// a = [v0_dot; Omega0_dot; qdd_00; qdd_01; ...]. Quadrotor attitude dynamics
// are decoupled (Euler equations per vehicle) and handled in full_rhs.
//
// assemble_eom is the OpenMP kernel (parallel over cables); the serial
// reference assemble_eom_reference produces bitwise-identical output and is
// kept for testing and benchmarking. All cross-cable reductions are serial in
// both paths, so results do not depend on the thread count.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "multilift/model.hpp"

namespace multilift {
namespace dynamics {

struct EomSystem {
  Eigen::MatrixXd inertia;  // velocity_dof x velocity_dof
  Eigen::VectorXd forcing;  // velocity_dof
};

struct QuadInput {
  double thrust = 0.0;                              // f_i, N, along -R_i e3
  Eigen::Vector3d moment = Eigen::Vector3d::Zero(); // M_i, N m, body frame
};

// Time derivative of every state component. Rotational states carry the body
// rate driving them (Rdot = R * hat(rate)) plus its derivative.
struct StateDerivative {
  Eigen::Vector3d payload_position_rate = Eigen::Vector3d::Zero();
  Eigen::Vector3d payload_velocity_rate = Eigen::Vector3d::Zero();
  Eigen::Vector3d payload_body_rate = Eigen::Vector3d::Zero();
  Eigen::Vector3d payload_body_rate_dot = Eigen::Vector3d::Zero();
  std::vector<std::vector<Eigen::Vector3d>> link_rates;      // omega_ij (spatial)
  std::vector<std::vector<Eigen::Vector3d>> link_rate_dots;  // omegadot_ij
  std::vector<Eigen::Vector3d> quad_body_rates;
  std::vector<Eigen::Vector3d> quad_body_rate_dots;
};

// Core assembly with explicit applied force vectors per quadrotor (the thrust
// vector -f_i R_i e3, or a fictitious force for the simplified model).
// applied_force and force_disturbance must each have quad_count entries.
void assemble_eom(const FullState& state, const SystemParams& params,
                  const DerivedMasses& masses,
                  const std::vector<Eigen::Vector3d>& applied_force,
                  const std::vector<Eigen::Vector3d>& force_disturbance,
                  EomSystem& out);

EomSystem assemble_eom(const FullState& state, const SystemParams& params,
                       const DerivedMasses& masses,
                       const std::vector<Eigen::Vector3d>& applied_force,
                       const std::vector<Eigen::Vector3d>& force_disturbance);

// Thrust/moment form used by the closed-loop simulation.
EomSystem assemble_eom(const FullState& state, const SystemParams& params,
                       const DerivedMasses& masses,
                       const std::vector<QuadInput>& inputs,
                       const DisturbanceSpec& disturbances);

// Serial reference implementation; bitwise-identical to assemble_eom.
void assemble_eom_reference(const FullState& state, const SystemParams& params,
                            const DerivedMasses& masses,
                            const std::vector<Eigen::Vector3d>& applied_force,
                            const std::vector<Eigen::Vector3d>& force_disturbance,
                            EomSystem& out);

// Solves inertia * a = forcing by partially pivoted LU. Throws NumericalError
// if the estimated condition number exceeds 1e12 (singular configuration).
Eigen::VectorXd solve_accelerations(const EomSystem& eom);

// Full continuous-time right-hand side: linear system solve for the coupled
// accelerations plus the per-quadrotor Euler equations
// Omegadot_i = J_i^{-1} (M_i + Delta_R_i - Omega_i x J_i Omega_i).
StateDerivative full_rhs(const FullState& state, const SystemParams& params,
                         const DerivedMasses& masses,
                         const std::vector<QuadInput>& inputs,
                         const DisturbanceSpec& disturbances);

// Same coupled dynamics driven by fictitious per-quadrotor force vectors; the
// quadrotor attitudes are left untouched (simplified model of the gain
// design). Used by the finite-difference linearization.
StateDerivative simplified_rhs(const FullState& state, const SystemParams& params,
                               const DerivedMasses& masses,
                               const std::vector<Eigen::Vector3d>& applied_force);

}  // namespace dynamics
}  // namespace multilift
