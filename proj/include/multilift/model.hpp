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

// System parameters, derived mass constants, state containers, kinematic
// reconstruction of body positions/velocities, and system energies.
//
// Conventions (SI units throughout):
//   * e3 of the inertial frame points down, along gravity. The gravity force
//     on a mass m is +m*g*e3; altitude above ground is -x[2].
//   * Cable i carries links j = 0..n_i-1; link 0 is adjacent to the
//     quadrotor, link n_i-1 reaches the payload attachment. The direction
//     q_ij points from the quadrotor side toward the payload, so the
//     quadrotor sits at x0 + R0*rho_i - sum_j l_ij q_ij.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "multilift/manifold.hpp"

namespace multilift {

using AngularVelocity = Eigen::Vector3d;

struct LinkParams {
  double mass = 0.0;    // kg
  double length = 0.0;  // m
};

struct QuadrotorParams {
  double mass = 0.0;                                      // kg
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Identity();  // kg m^2, SPD
  Eigen::Vector3d attachment = Eigen::Vector3d::Zero();   // m, in payload frame
  std::vector<LinkParams> links;                          // quadrotor side first
};

struct SystemParams {
  double payload_mass = 0.0;                                      // kg
  Eigen::Matrix3d payload_inertia = Eigen::Matrix3d::Identity();  // kg m^2, SPD
  std::vector<QuadrotorParams> quadrotors;
  double gravity = 9.81;  // m/s^2

  int quad_count() const { return static_cast<int>(quadrotors.size()); }
  int link_count(int i) const { return static_cast<int>(quadrotors[i].links.size()); }
  int total_links() const;

  // Throws ValidationError on non-positive masses/lengths, non-SPD inertias,
  // or an empty quadrotor/link list.
  void validate() const;
};

// Index bookkeeping for the stacked velocity vector
// [v0; Omega0; qdd_{0,0..}; qdd_{1,0..}; ...].
struct Layout {
  explicit Layout(const SystemParams& params);

  int quad_count = 0;
  std::vector<int> links_per_cable;
  std::vector<int> cable_offset;  // index of cable i's first link, in link units
  int total_links = 0;
  int velocity_dof = 0;  // 6 + 3 * total_links
  int reduced_dof = 0;   // 6 + 2 * total_links (linearized model)

  int link_block(int i, int j) const { return 6 + 3 * (cable_offset[i] + j); }
  int reduced_block(int i, int j) const { return 6 + 2 * (cable_offset[i] + j); }
};

// Mass constants appearing throughout the equations of motion.
struct DerivedMasses {
  double total_mass = 0.0;                              // payload + all chains
  std::vector<double> chain_mass;                       // quadrotor i + its links
  std::vector<std::vector<double>> upper_chain_mass;    // [i][j]: quadrotor i + links above link j
  Eigen::Matrix3d effective_payload_inertia = Eigen::Matrix3d::Zero();
};

DerivedMasses derive_masses(const SystemParams& params);

// Full configuration and velocity of the system.
struct FullState {
  Eigen::Vector3d payload_position = Eigen::Vector3d::Zero();
  Eigen::Vector3d payload_velocity = Eigen::Vector3d::Zero();
  Rotation payload_attitude;
  AngularVelocity payload_angular_velocity = Eigen::Vector3d::Zero();

  struct Cable {
    std::vector<UnitVector> directions;             // q_ij
    std::vector<AngularVelocity> angular_rates;     // omega_ij, with q . omega = 0
  };
  std::vector<Cable> cables;

  std::vector<Rotation> quad_attitudes;
  std::vector<AngularVelocity> quad_angular_rates;

  // All links vertical, every attitude identity, zero velocities.
  static FullState hanging_equilibrium(const SystemParams& params);

  // Throws ValidationError if sizes disagree with params or |q . omega| >= 1e-9.
  void validate(const SystemParams& params) const;
};

// Constant external disturbances per quadrotor.
struct DisturbanceSpec {
  std::vector<Eigen::Vector3d> force;   // Delta_x_i, N; empty means zero
  std::vector<Eigen::Vector3d> moment;  // Delta_R_i, N m; empty means zero
  double force_bound = 0.0;             // delta: ||Delta_x||_inf <= delta

  bool empty() const { return force.empty() && moment.empty(); }
  Eigen::Vector3d force_on(int i) const {
    return force.empty() ? Eigen::Vector3d::Zero() : force[i];
  }
  Eigen::Vector3d moment_on(int i) const {
    return moment.empty() ? Eigen::Vector3d::Zero() : moment[i];
  }
  void validate(const SystemParams& params) const;
};

// Payload attachment point of cable i: x0 + R0 * rho_i.
Eigen::Vector3d attachment_point(const FullState& state, const SystemParams& params, int i);

// Position of quadrotor i reconstructed from the payload pose and its chain.
Eigen::Vector3d quadrotor_position(const FullState& state, const SystemParams& params, int i);

// Payload-side endpoint of link j in cable i (the chain joint carrying the
// link's mass). For j == n_i - 1 this is the payload attachment point.
Eigen::Vector3d link_position(const FullState& state, const SystemParams& params, int i, int j);

Eigen::Vector3d quadrotor_velocity(const FullState& state, const SystemParams& params, int i);
Eigen::Vector3d link_velocity(const FullState& state, const SystemParams& params, int i, int j);

struct Energy {
  double kinetic = 0.0;    // J
  double potential = 0.0;  // J
  double total() const { return kinetic + potential; }
};

// Grouped-form energies of the whole system. The potential uses the downward
// e3 convention, so it decreases as the payload descends.
Energy total_energy(const FullState& state, const SystemParams& params);

// Total linear momentum summed body by body (payload, links, quadrotors).
Eigen::Vector3d total_linear_momentum(const FullState& state, const SystemParams& params);

}  // namespace multilift
