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

#include "multilift/controller.hpp"

#include <cmath>

#include "multilift/linearization.hpp"

namespace multilift {
namespace controller {
namespace {

const Eigen::Vector3d kDown = Eigen::Vector3d::UnitZ();

}  // namespace

Eigen::VectorXd saturate(const Eigen::VectorXd& y, double sigma) {
  return y.cwiseMax(-sigma).cwiseMin(sigma);
}

Rotation desired_attitude(const Eigen::Vector3d& commanded_force, const Eigen::Vector3d& b1) {
  const double norm = commanded_force.norm();
  if (norm < 1e-9) {
    throw NumericalError("desired_attitude: commanded force is numerically zero");
  }
  const Eigen::Vector3d b3 = -commanded_force / norm;
  const Eigen::Vector3d b2_raw = b3.cross(b1);
  if (b2_raw.norm() < 1e-6) {
    throw NumericalError("desired_attitude: heading command parallel to thrust axis");
  }
  const Eigen::Vector3d b2 = b2_raw.normalized();
  // First column is -b3hat^2 b1 normalized, i.e. b2 x b3.
  Eigen::Matrix3d r;
  r.col(0) = b2.cross(b3);
  r.col(1) = b2;
  r.col(2) = b3;
  return Rotation::trusted(r);
}

DesiredAttitudeTracker::Command DesiredAttitudeTracker::update(
    const Eigen::Vector3d& commanded_force, const Eigen::Vector3d& b1, double dt,
    const ControllerConfig& cfg) {
  Command cmd;
  cmd.attitude = desired_attitude(commanded_force, b1);
  if (!cfg.feedforward) {
    prev_attitude_ = cmd.attitude;
    primed_ = true;
    return cmd;
  }
  if (!primed_) {
    prev_attitude_ = cmd.attitude;
    primed_ = true;
    return cmd;  // zero rates on the first call
  }
  const Eigen::Vector3d rate_raw =
      log_so3(prev_attitude_.matrix().transpose() * cmd.attitude.matrix()) / dt;
  const double blend = dt / (cfg.filter_steps * dt + dt);
  rate_filtered_ += blend * (rate_raw - rate_filtered_);
  const Eigen::Vector3d rate_dot_raw = (rate_filtered_ - rate_prev_) / dt;
  rate_dot_filtered_ += blend * (rate_dot_raw - rate_dot_filtered_);
  rate_prev_ = rate_filtered_;
  prev_attitude_ = cmd.attitude;
  cmd.rate = rate_filtered_;
  cmd.rate_dot = rate_dot_filtered_;
  return cmd;
}

ControllerState ControllerState::zero(const SystemParams& params) {
  const Layout layout(params);
  ControllerState cs;
  cs.translational_integral = Eigen::VectorXd::Zero(layout.reduced_dof);
  cs.prev_translational_rate = Eigen::VectorXd::Zero(layout.reduced_dof);
  cs.attitude_integral.assign(params.quad_count(), Eigen::Vector3d::Zero());
  cs.prev_attitude_rate.assign(params.quad_count(), Eigen::Vector3d::Zero());
  cs.trackers.resize(params.quad_count());
  return cs;
}

Eigen::Vector3d fictitious_force(const Eigen::VectorXd& reduced_position,
                                 const Eigen::VectorXd& reduced_velocity,
                                 const Eigen::VectorXd& ex, const gains::GainSet& gains,
                                 const SystemParams& params, const DerivedMasses& masses,
                                 int i) {
  const Eigen::Vector3d equilibrium =
      -(masses.chain_mass[i] + gains.load_share[i]) * params.gravity * kDown;
  const Eigen::Vector3d force =
      equilibrium - gains.position_gain.middleRows(3 * i, 3) * reduced_position -
      gains.velocity_gain.middleRows(3 * i, 3) * reduced_velocity -
      gains.integral_gain * saturate(ex, gains.sigma);
  if (force.norm() < 1e-9) {
    throw NumericalError("fictitious_force: commanded force is numerically zero");
  }
  return force;
}

Eigen::Vector3d attitude_control(const Rotation& attitude, const Eigen::Vector3d& rate,
                                 const DesiredAttitudeTracker::Command& command,
                                 const Eigen::Vector3d& integral,
                                 const Eigen::Matrix3d& inertia,
                                 const gains::AttitudeGains& ag) {
  const AttitudeError err = attitude_error(attitude, command.attitude);
  const Eigen::Vector3d rate_err =
      angular_velocity_error(attitude, command.attitude, rate, command.rate);
  const Eigen::Matrix3d relative = attitude.matrix().transpose() * command.attitude.matrix();
  const Eigen::Vector3d commanded_rate_body = relative * command.rate;
  return -ag.kr * err.vector - ag.komega * rate_err - ag.ki * integral +
         commanded_rate_body.cross(inertia * commanded_rate_body) +
         inertia * relative * command.rate_dot;
}

ControlOutput compute_control(const FullState& state, const SystemParams& params,
                              const DerivedMasses& masses, const gains::GainSet& gains,
                              const ControllerConfig& cfg, const Eigen::Vector3d& x0_desired,
                              double dt, ControllerState& ctrl) {
  const int n = params.quad_count();
  const auto reduced = linearization::deviation_coordinates(state, params, x0_desired);

  // Advance e_x by trapezoid before use; e_x(0) = 0 on the first tick.
  Eigen::VectorXd z1(2 * reduced.position.size());
  z1 << reduced.position, reduced.velocity;
  const Eigen::VectorXd ex_rate = gains.integral_map * z1;
  if (ctrl.primed) {
    ctrl.translational_integral += 0.5 * dt * (ctrl.prev_translational_rate + ex_rate);
  }
  ctrl.prev_translational_rate = ex_rate;

  ControlOutput out;
  out.inputs.resize(n);
  out.commanded_force.resize(n);
  out.commanded_attitude.resize(n);
  out.commanded_rate.resize(n);
  out.commanded_rate_dot.resize(n);
  out.errors.resize(n);
  out.reduced_position = reduced.position;
  out.reduced_velocity = reduced.velocity;

  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d force = fictitious_force(
        reduced.position, reduced.velocity, ctrl.translational_integral, gains, params,
        masses, i);
    const auto command = ctrl.trackers[i].update(force, cfg.b1_command, dt, cfg);

    const Rotation& attitude = state.quad_attitudes[i];
    const Eigen::Vector3d& rate = state.quad_angular_rates[i];
    const AttitudeError att_err = attitude_error(attitude, command.attitude);
    const Eigen::Vector3d rate_err =
        angular_velocity_error(attitude, command.attitude, rate, command.rate);

    // e_I uses the same trapezoid bookkeeping as e_x.
    const Eigen::Vector3d integral_rate = rate_err + gains.attitude[i].c2 * att_err.vector;
    if (ctrl.primed) {
      ctrl.attitude_integral[i] += 0.5 * dt * (ctrl.prev_attitude_rate[i] + integral_rate);
    }
    ctrl.prev_attitude_rate[i] = integral_rate;

    out.inputs[i].thrust = -force.dot(attitude.matrix() * kDown);
    out.inputs[i].moment =
        attitude_control(attitude, rate, command, ctrl.attitude_integral[i],
                         params.quadrotors[i].inertia, gains.attitude[i]);
    out.commanded_force[i] = force;
    out.commanded_attitude[i] = command.attitude;
    out.commanded_rate[i] = command.rate;
    out.commanded_rate_dot[i] = command.rate_dot;
    out.errors[i].psi = att_err.psi;
    out.errors[i].attitude = att_err.vector;
    out.errors[i].rate = rate_err;
    out.errors[i].integral = ctrl.attitude_integral[i];
  }
  ctrl.primed = true;
  return out;
}

}  // namespace controller
}  // namespace multilift
