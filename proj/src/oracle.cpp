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

#include "multilift/oracle.hpp"

#include <cmath>
#include <utility>

namespace multilift {
namespace oracle {
namespace {

const Eigen::Vector3d kDown = Eigen::Vector3d::UnitZ();

// dexp on so(3): dexp_u(v) = v + (1-cos t)/t^2 u x v + (t - sin t)/t^3 u x (u x v).
Eigen::Vector3d dexp(const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
  const double t2 = u.squaredNorm();
  double ca, cb;
  if (t2 < 1e-12) {
    ca = 0.5 - t2 / 24.0;
    cb = 1.0 / 6.0 - t2 / 120.0;
  } else {
    const double t = std::sqrt(t2);
    ca = (1.0 - std::cos(t)) / t2;
    cb = (t - std::sin(t)) / (t2 * t);
  }
  const Eigen::Vector3d uxv = u.cross(v);
  return v + ca * uxv + cb * u.cross(uxv);
}

struct Chart {
  const FullState* base;
  const SystemParams* params;
  Layout layout;
  std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> bases;  // per link, flattened
  int dof;  // 6 + 2 * total_links

  Chart(const FullState& state, const SystemParams& p) : base(&state), params(&p), layout(p) {
    bases.reserve(layout.total_links);
    for (int i = 0; i < layout.quad_count; ++i) {
      for (int j = 0; j < layout.links_per_cable[i]; ++j) {
        bases.push_back(tangent_basis(state.cables[i].directions[j].vector()));
      }
    }
    dof = 6 + 2 * layout.total_links;
  }

  int link_coord(int i, int j) const { return 6 + 2 * (layout.cable_offset[i] + j); }

  // Chart velocity corresponding to the base state's velocities.
  Eigen::VectorXd base_velocity() const {
    Eigen::VectorXd v(dof);
    v.segment<3>(0) = base->payload_velocity;
    v.segment<3>(3) = base->payload_angular_velocity;
    for (int i = 0; i < layout.quad_count; ++i) {
      for (int j = 0; j < layout.links_per_cable[i]; ++j) {
        const auto& [t1, t2] = bases[layout.cable_offset[i] + j];
        const Eigen::Vector3d& w = base->cables[i].angular_rates[j];
        v(link_coord(i, j)) = t1.dot(w);
        v(link_coord(i, j) + 1) = t2.dot(w);
      }
    }
    return v;
  }

  struct BodyKinematics {
    Eigen::Vector3d payload_position;
    Eigen::Vector3d payload_velocity;
    Eigen::Vector3d payload_body_rate;
    std::vector<Eigen::Vector3d> quad_positions;
    std::vector<Eigen::Vector3d> quad_velocities;
    std::vector<std::vector<Eigen::Vector3d>> joint_positions;
    std::vector<std::vector<Eigen::Vector3d>> joint_velocities;
  };

  BodyKinematics kinematics(const Eigen::VectorXd& theta, const Eigen::VectorXd& theta_dot) const {
    BodyKinematics k;
    k.payload_position = base->payload_position + theta.segment<3>(0);
    k.payload_velocity = theta_dot.segment<3>(0);
    const Eigen::Vector3d eta = theta.segment<3>(3);
    const Eigen::Matrix3d r0 = base->payload_attitude.matrix() * exp_so3(eta);
    k.payload_body_rate = dexp(-eta, theta_dot.segment<3>(3));

    k.quad_positions.resize(layout.quad_count);
    k.quad_velocities.resize(layout.quad_count);
    k.joint_positions.resize(layout.quad_count);
    k.joint_velocities.resize(layout.quad_count);
    for (int i = 0; i < layout.quad_count; ++i) {
      const auto& quad = params->quadrotors[i];
      const int links = layout.links_per_cable[i];
      k.joint_positions[i].resize(links);
      k.joint_velocities[i].resize(links);
      Eigen::Vector3d x = k.payload_position + r0 * quad.attachment;
      Eigen::Vector3d v = k.payload_velocity + r0 * k.payload_body_rate.cross(quad.attachment);
      // Walk the chain from the payload attachment up toward the quadrotor.
      for (int j = links - 1; j >= 0; --j) {
        k.joint_positions[i][j] = x;
        k.joint_velocities[i][j] = v;
        const int c = link_coord(i, j);
        const auto& [t1, t2] = bases[layout.cable_offset[i] + j];
        const Eigen::Vector3d w = theta(c) * t1 + theta(c + 1) * t2;
        const Eigen::Vector3d w_dot = theta_dot(c) * t1 + theta_dot(c + 1) * t2;
        const Eigen::Vector3d q = exp_so3(w) * base->cables[i].directions[j].vector();
        const Eigen::Vector3d q_dot = dexp(w, w_dot).cross(q);
        x -= quad.links[j].length * q;
        v -= quad.links[j].length * q_dot;
      }
      k.quad_positions[i] = x;
      k.quad_velocities[i] = v;
    }
    return k;
  }

  double lagrangian(const Eigen::VectorXd& theta, const Eigen::VectorXd& theta_dot) const {
    const BodyKinematics k = kinematics(theta, theta_dot);
    const double g = params->gravity;
    double kinetic = 0.5 * params->payload_mass * k.payload_velocity.squaredNorm() +
                     0.5 * k.payload_body_rate.dot(params->payload_inertia * k.payload_body_rate);
    double potential = -params->payload_mass * g * kDown.dot(k.payload_position);
    for (int i = 0; i < layout.quad_count; ++i) {
      const auto& quad = params->quadrotors[i];
      kinetic += 0.5 * quad.mass * k.quad_velocities[i].squaredNorm();
      potential += -quad.mass * g * kDown.dot(k.quad_positions[i]);
      for (int j = 0; j < layout.links_per_cable[i]; ++j) {
        kinetic += 0.5 * quad.links[j].mass * k.joint_velocities[i][j].squaredNorm();
        potential += -quad.links[j].mass * g * kDown.dot(k.joint_positions[i][j]);
      }
    }
    return kinetic - potential;
  }
};

}  // namespace

std::pair<Eigen::Vector3d, Eigen::Vector3d> tangent_basis(const Eigen::Vector3d& q) {
  Eigen::Vector3d seed = Eigen::Vector3d::UnitX();
  if (std::abs(q.dot(seed)) > 0.9) seed = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d t1 = (seed - q.dot(seed) * q).normalized();
  return {t1, q.cross(t1)};
}

Eigen::MatrixXd chart_mass_matrix(const FullState& state, const SystemParams& params) {
  const Chart chart(state, params);
  const int dof = chart.dof;
  const Eigen::VectorXd theta = Eigen::VectorXd::Zero(dof);
  const Eigen::VectorXd v0 = Eigen::VectorXd::Zero(dof);
  // The Lagrangian is exactly quadratic in the chart velocity, so the second
  // difference below is exact up to rounding for any step.
  const double h = 1.0;
  const double l00 = chart.lagrangian(theta, v0);
  Eigen::VectorXd single(dof);
  for (int r = 0; r < dof; ++r) {
    single(r) = chart.lagrangian(theta, h * Eigen::VectorXd::Unit(dof, r));
  }
  Eigen::MatrixXd m(dof, dof);
  for (int r = 0; r < dof; ++r) {
    for (int c = r; c < dof; ++c) {
      const double pair = chart.lagrangian(
          theta, h * (Eigen::VectorXd::Unit(dof, r) + Eigen::VectorXd::Unit(dof, c)));
      m(r, c) = m(c, r) = (pair - single(r) - single(c) + l00) / (h * h);
    }
  }
  return m;
}

CoupledAccelerations reference_accelerations(const FullState& state,
                                             const SystemParams& params,
                                             const std::vector<Eigen::Vector3d>& applied_force,
                                             const std::vector<Eigen::Vector3d>& force_disturbance) {
  const Chart chart(state, params);
  const int dof = chart.dof;
  const Eigen::VectorXd vel = chart.base_velocity();
  const double h = 1e-3;

  // Fourth-order central differences along a chart direction.
  const auto directional = [&](auto&& f, const Eigen::VectorXd& dir, double step) -> double {
    return (-f((2.0 * step) * dir) + 8.0 * f(step * dir) - 8.0 * f(-step * dir) +
            f((-2.0 * step) * dir)) /
           (12.0 * step);
  };
  const auto directional_vec = [&](auto&& f, const Eigen::VectorXd& dir,
                                   double step) -> Eigen::VectorXd {
    const Eigen::VectorXd outer_plus = f((2.0 * step) * dir);
    const Eigen::VectorXd inner_plus = f(step * dir);
    const Eigen::VectorXd inner_minus = f(-step * dir);
    const Eigen::VectorXd outer_minus = f((-2.0 * step) * dir);
    return (-outer_plus + 8.0 * inner_plus - 8.0 * inner_minus + outer_minus) /
           (12.0 * step);
  };

  // Conjugate momentum p = dL/dthetadot; exact symmetric difference since the
  // Lagrangian is quadratic in the chart velocity.
  const auto momentum = [&](const Eigen::VectorXd& theta) {
    Eigen::VectorXd p(dof);
    for (int r = 0; r < dof; ++r) {
      const Eigen::VectorXd unit = Eigen::VectorXd::Unit(dof, r);
      p(r) = (chart.lagrangian(theta, vel + unit) - chart.lagrangian(theta, vel - unit)) / 2.0;
    }
    return p;
  };

  // dL/dtheta.
  Eigen::VectorXd config_gradient(dof);
  for (int r = 0; r < dof; ++r) {
    config_gradient(r) = directional(
        [&](const Eigen::VectorXd& theta) { return chart.lagrangian(theta, vel); },
        Eigen::VectorXd::Unit(dof, r), h);
  }

  // (dp/dtheta) thetadot as a directional derivative along the motion.
  const double hd = h / std::max(1.0, vel.norm());
  const Eigen::VectorXd momentum_drift = directional_vec(momentum, vel, hd);

  // Generalized forces from the virtual work of thrust + disturbance at the
  // quadrotor positions.
  Eigen::VectorXd generalized_force = Eigen::VectorXd::Zero(dof);
  for (int r = 0; r < dof; ++r) {
    const auto quad_positions = [&](const Eigen::VectorXd& theta) {
      Eigen::VectorXd stacked(3 * params.quad_count());
      const auto k = chart.kinematics(theta, vel);
      for (int i = 0; i < params.quad_count(); ++i) {
        stacked.segment<3>(3 * i) = k.quad_positions[i];
      }
      return stacked;
    };
    const Eigen::VectorXd sensitivity =
        directional_vec(quad_positions, Eigen::VectorXd::Unit(dof, r), h);
    for (int i = 0; i < params.quad_count(); ++i) {
      generalized_force(r) +=
          (applied_force[i] + force_disturbance[i]).dot(sensitivity.segment<3>(3 * i));
    }
  }

  const Eigen::MatrixXd mass = chart_mass_matrix(state, params);
  const Eigen::VectorXd accel =
      mass.ldlt().solve(config_gradient - momentum_drift + generalized_force);

  CoupledAccelerations out;
  out.payload_linear = accel.segment<3>(0);
  out.payload_angular = accel.segment<3>(3);
  out.link_angular.resize(params.quad_count());
  for (int i = 0; i < params.quad_count(); ++i) {
    out.link_angular[i].resize(params.link_count(i));
    for (int j = 0; j < params.link_count(i); ++j) {
      const int c = chart.link_coord(i, j);
      const auto& [t1, t2] = chart.bases[chart.layout.cable_offset[i] + j];
      out.link_angular[i][j] = accel(c) * t1 + accel(c + 1) * t2;
    }
  }
  return out;
}

}  // namespace oracle
}  // namespace multilift
