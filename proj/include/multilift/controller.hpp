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

// Full-model geometric controller: fictitious force with saturated integral,
// desired attitude extraction with finite-differenced feedforward, thrust
// projection and the attitude tracking moment with its integral term.

#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "multilift/dynamics.hpp"
#include "multilift/gains.hpp"
#include "multilift/model.hpp"

namespace multilift {
namespace controller {

// Elementwise clamp to [-sigma, sigma].
Eigen::VectorXd saturate(const Eigen::VectorXd& y, double sigma);

struct ControllerConfig {
  Eigen::Vector3d b1_command = Eigen::Vector3d::UnitX();
  bool feedforward = true;      // finite-differenced Omega_ic terms
  int filter_steps = 5;         // low-pass time constant, in control periods
  int decimation = 1;           // control period in integrator steps
};

// Commanded attitude, rate and rate derivative for one quadrotor, with the
// finite-difference + low-pass bookkeeping between calls.
class DesiredAttitudeTracker {
 public:
  struct Command {
    Rotation attitude;
    Eigen::Vector3d rate = Eigen::Vector3d::Zero();
    Eigen::Vector3d rate_dot = Eigen::Vector3d::Zero();
  };

  // commanded_force must be nonzero and not parallel to b1 (both throw
  // NumericalError). First call returns zero rates.
  Command update(const Eigen::Vector3d& commanded_force, const Eigen::Vector3d& b1,
                 double dt, const ControllerConfig& cfg);

 private:
  bool primed_ = false;
  Rotation prev_attitude_;
  Eigen::Vector3d rate_filtered_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d rate_prev_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d rate_dot_filtered_ = Eigen::Vector3d::Zero();
};

// Attitude extraction alone (the static part of the tracker): columns built
// from b3 = -A/||A|| and the projected heading command.
Rotation desired_attitude(const Eigen::Vector3d& commanded_force, const Eigen::Vector3d& b1);

struct ControllerState {
  Eigen::VectorXd translational_integral;            // e_x, dim D
  std::vector<Eigen::Vector3d> attitude_integral;    // e_Ii
  Eigen::VectorXd prev_translational_rate;
  std::vector<Eigen::Vector3d> prev_attitude_rate;
  std::vector<DesiredAttitudeTracker> trackers;
  bool primed = false;

  static ControllerState zero(const SystemParams& params);
};

struct ControlOutput {
  std::vector<dynamics::QuadInput> inputs;
  std::vector<Eigen::Vector3d> commanded_force;   // A_i
  std::vector<Rotation> commanded_attitude;       // R_ic
  std::vector<Eigen::Vector3d> commanded_rate;    // Omega_ic
  std::vector<Eigen::Vector3d> commanded_rate_dot;
  std::vector<gains::AttitudeErrors> errors;      // psi, e_R, e_Omega, e_I
  Eigen::VectorXd reduced_position;               // x
  Eigen::VectorXd reduced_velocity;               // xdot
};

// Fictitious ideal force for quadrotor i given the deviation coordinates and
// the saturated integral. Throws NumericalError if the result is numerically
// zero (desired thrust direction undefined).
Eigen::Vector3d fictitious_force(const Eigen::VectorXd& reduced_position,
                                 const Eigen::VectorXd& reduced_velocity,
                                 const Eigen::VectorXd& ex, const gains::GainSet& gains,
                                 const SystemParams& params, const DerivedMasses& masses,
                                 int i);

// Tracking moment on SO(3) with integral term and feedforward.
Eigen::Vector3d attitude_control(const Rotation& attitude, const Eigen::Vector3d& rate,
                                 const DesiredAttitudeTracker::Command& command,
                                 const Eigen::Vector3d& integral,
                                 const Eigen::Matrix3d& inertia,
                                 const gains::AttitudeGains& ag);

// One controller tick: integral update, fictitious forces, desired attitudes,
// thrusts and moments. dt is the control period. Deterministic in its inputs.
ControlOutput compute_control(const FullState& state, const SystemParams& params,
                              const DerivedMasses& masses, const gains::GainSet& gains,
                              const ControllerConfig& cfg, const Eigen::Vector3d& x0_desired,
                              double dt, ControllerState& ctrl);

}  // namespace controller
}  // namespace multilift
