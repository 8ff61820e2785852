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

// Independently coded reference: one quadrotor with a point mass suspended on
// a single massless rod, derived from the two-body Newton equations with the
// tension eliminated. Used only as a reduction oracle for the chain dynamics.

#pragma once

#include <Eigen/Dense>

namespace multilift {
namespace testing {

struct PendulumState {
  Eigen::Vector3d load_position;   // x_p
  Eigen::Vector3d load_velocity;
  Eigen::Vector3d direction;       // q, from the quadrotor toward the load
  Eigen::Vector3d rate;            // omega with q . omega = 0
};

struct PendulumParams {
  double quad_mass;   // m_Q, at the upper end
  double load_mass;   // point mass at the lower end
  double length;      // rod length
  double gravity;
};

struct PendulumDerivative {
  Eigen::Vector3d load_velocity;
  Eigen::Vector3d load_acceleration;
  Eigen::Vector3d direction_rate;
  Eigen::Vector3d rate_dot;
};

// Newton derivation: load at x_p, quadrotor at x_p - L q, cable tension T
// along q.  m_p xdd_p = m_p g e3 - T q;  m_Q xdd_Q = m_Q g e3 + u + T q;
// the constraint xdd_Q = xdd_p - L qdd eliminates T.
inline PendulumDerivative pendulum_rhs(const PendulumState& s, const PendulumParams& p,
                                       const Eigen::Vector3d& applied_force) {
  const Eigen::Vector3d e3 = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d q_dot = s.rate.cross(s.direction);
  const double reduced = p.quad_mass * p.load_mass / (p.quad_mass + p.load_mass);
  const double t = reduced * (p.length * q_dot.squaredNorm() -
                              applied_force.dot(s.direction) / p.quad_mass);
  PendulumDerivative d;
  d.load_velocity = s.load_velocity;
  d.load_acceleration = p.gravity * e3 - (t / p.load_mass) * s.direction;
  d.direction_rate = q_dot;
  const Eigen::Vector3d qdd =
      -((applied_force + t * s.direction) / p.quad_mass + (t / p.load_mass) * s.direction) /
      p.length;
  d.rate_dot = s.direction.cross(qdd);
  return d;
}

// Plain vector RK4 with renormalization, independent of the library
// integrator.
inline PendulumState pendulum_step(const PendulumState& s, const PendulumParams& p,
                                   const Eigen::Vector3d& applied_force, double dt) {
  const auto add = [](const PendulumState& base, const PendulumDerivative& d, double h) {
    PendulumState out = base;
    out.load_position += h * d.load_velocity;
    out.load_velocity += h * d.load_acceleration;
    out.direction += h * d.direction_rate;
    out.rate += h * d.rate_dot;
    return out;
  };
  const PendulumDerivative k1 = pendulum_rhs(s, p, applied_force);
  const PendulumDerivative k2 = pendulum_rhs(add(s, k1, dt / 2), p, applied_force);
  const PendulumDerivative k3 = pendulum_rhs(add(s, k2, dt / 2), p, applied_force);
  const PendulumDerivative k4 = pendulum_rhs(add(s, k3, dt), p, applied_force);
  PendulumState out = s;
  out.load_position +=
      dt / 6.0 * (k1.load_velocity + 2 * k2.load_velocity + 2 * k3.load_velocity + k4.load_velocity);
  out.load_velocity += dt / 6.0 *
                       (k1.load_acceleration + 2 * k2.load_acceleration +
                        2 * k3.load_acceleration + k4.load_acceleration);
  out.direction += dt / 6.0 *
                   (k1.direction_rate + 2 * k2.direction_rate + 2 * k3.direction_rate +
                    k4.direction_rate);
  out.rate += dt / 6.0 * (k1.rate_dot + 2 * k2.rate_dot + 2 * k3.rate_dot + k4.rate_dot);
  out.direction.normalize();
  out.rate -= out.direction.dot(out.rate) * out.direction;
  return out;
}

}  // namespace testing
}  // namespace multilift
