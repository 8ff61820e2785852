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

#include "multilift/model.hpp"

#include <cmath>
#include <string>

namespace multilift {
namespace {

const Eigen::Vector3d kDown = Eigen::Vector3d::UnitZ();  // e3 points down

void check_spd(const Eigen::Matrix3d& m, const std::string& name) {
  if ((m - m.transpose()).norm() >= 1e-9) {
    throw ValidationError(name + ": inertia matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(m);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw ValidationError(name + ": inertia matrix is not positive definite");
  }
}

Eigen::Vector3d link_direction_rate(const FullState::Cable& cable, int j) {
  return cable.angular_rates[j].cross(cable.directions[j].vector());
}

}  // namespace

int SystemParams::total_links() const {
  int total = 0;
  for (const auto& quad : quadrotors) total += static_cast<int>(quad.links.size());
  return total;
}

void SystemParams::validate() const {
  if (payload_mass <= 0.0) throw ValidationError("payload mass must be positive");
  check_spd(payload_inertia, "payload");
  if (quadrotors.empty()) throw ValidationError("at least one quadrotor is required");
  if (gravity < 0.0) throw ValidationError("gravity must be non-negative");
  for (int i = 0; i < quad_count(); ++i) {
    const auto& quad = quadrotors[i];
    const std::string name = "quadrotor " + std::to_string(i);
    if (quad.mass <= 0.0) throw ValidationError(name + ": mass must be positive");
    check_spd(quad.inertia, name);
    if (quad.links.empty()) throw ValidationError(name + ": cable needs at least one link");
    for (const auto& link : quad.links) {
      if (link.mass <= 0.0) throw ValidationError(name + ": link mass must be positive");
      if (link.length <= 0.0) throw ValidationError(name + ": link length must be positive");
    }
  }
}

Layout::Layout(const SystemParams& params) {
  quad_count = params.quad_count();
  links_per_cable.resize(quad_count);
  cable_offset.resize(quad_count);
  for (int i = 0; i < quad_count; ++i) {
    links_per_cable[i] = params.link_count(i);
    cable_offset[i] = total_links;
    total_links += links_per_cable[i];
  }
  velocity_dof = 6 + 3 * total_links;
  reduced_dof = 6 + 2 * total_links;
}

DerivedMasses derive_masses(const SystemParams& params) {
  DerivedMasses out;
  const int n = params.quad_count();
  out.chain_mass.resize(n);
  out.upper_chain_mass.resize(n);
  out.total_mass = params.payload_mass;
  Eigen::Matrix3d inertia_shift = Eigen::Matrix3d::Zero();
  for (int i = 0; i < n; ++i) {
    const auto& quad = params.quadrotors[i];
    double chain = quad.mass;
    out.upper_chain_mass[i].resize(quad.links.size());
    double above = quad.mass;
    for (size_t j = 0; j < quad.links.size(); ++j) {
      out.upper_chain_mass[i][j] = above;  // links strictly above link j
      above += quad.links[j].mass;
      chain += quad.links[j].mass;
    }
    out.chain_mass[i] = chain;
    out.total_mass += chain;
    const Eigen::Matrix3d rho_hat = hat(quad.attachment);
    inertia_shift += chain * rho_hat * rho_hat;
  }
  out.effective_payload_inertia = params.payload_inertia - inertia_shift;
  return out;
}

FullState FullState::hanging_equilibrium(const SystemParams& params) {
  FullState state;
  state.cables.resize(params.quad_count());
  for (int i = 0; i < params.quad_count(); ++i) {
    state.cables[i].directions.assign(params.link_count(i), UnitVector::from_vector(kDown));
    state.cables[i].angular_rates.assign(params.link_count(i), Eigen::Vector3d::Zero());
  }
  state.quad_attitudes.assign(params.quad_count(), Rotation());
  state.quad_angular_rates.assign(params.quad_count(), Eigen::Vector3d::Zero());
  return state;
}

void FullState::validate(const SystemParams& params) const {
  const int n = params.quad_count();
  if (static_cast<int>(cables.size()) != n || static_cast<int>(quad_attitudes.size()) != n ||
      static_cast<int>(quad_angular_rates.size()) != n) {
    throw ValidationError("state: quadrotor count mismatch");
  }
  for (int i = 0; i < n; ++i) {
    const auto& cable = cables[i];
    const int links = params.link_count(i);
    if (static_cast<int>(cable.directions.size()) != links ||
        static_cast<int>(cable.angular_rates.size()) != links) {
      throw ValidationError("state: link count mismatch in cable " + std::to_string(i));
    }
    for (int j = 0; j < links; ++j) {
      if (std::abs(cable.directions[j].vector().dot(cable.angular_rates[j])) >= 1e-9) {
        throw ValidationError("state: link angular rate not orthogonal to its direction");
      }
    }
  }
}

void DisturbanceSpec::validate(const SystemParams& params) const {
  const size_t n = static_cast<size_t>(params.quad_count());
  if (!force.empty() && force.size() != n) {
    throw ValidationError("disturbance: force list size mismatch");
  }
  if (!moment.empty() && moment.size() != n) {
    throw ValidationError("disturbance: moment list size mismatch");
  }
  for (const auto& f : force) {
    if (f.lpNorm<Eigen::Infinity>() > force_bound + 1e-12) {
      throw ValidationError("disturbance: force exceeds declared bound");
    }
  }
}

Eigen::Vector3d attachment_point(const FullState& state, const SystemParams& params, int i) {
  if (i < 0 || i >= params.quad_count()) throw ValidationError("attachment_point: index out of range");
  return state.payload_position + state.payload_attitude.matrix() * params.quadrotors[i].attachment;
}

Eigen::Vector3d quadrotor_position(const FullState& state, const SystemParams& params, int i) {
  Eigen::Vector3d x = attachment_point(state, params, i);
  for (int j = 0; j < params.link_count(i); ++j) {
    x -= params.quadrotors[i].links[j].length * state.cables[i].directions[j].vector();
  }
  return x;
}

Eigen::Vector3d link_position(const FullState& state, const SystemParams& params, int i, int j) {
  if (i < 0 || i >= params.quad_count() || j < 0 || j >= params.link_count(i)) {
    throw ValidationError("link_position: index out of range");
  }
  Eigen::Vector3d x = attachment_point(state, params, i);
  for (int a = j + 1; a < params.link_count(i); ++a) {
    x -= params.quadrotors[i].links[a].length * state.cables[i].directions[a].vector();
  }
  return x;
}

Eigen::Vector3d quadrotor_velocity(const FullState& state, const SystemParams& params, int i) {
  const Eigen::Matrix3d r0 = state.payload_attitude.matrix();
  Eigen::Vector3d v = state.payload_velocity +
                      r0 * state.payload_angular_velocity.cross(params.quadrotors[i].attachment);
  for (int j = 0; j < params.link_count(i); ++j) {
    v -= params.quadrotors[i].links[j].length * link_direction_rate(state.cables[i], j);
  }
  return v;
}

Eigen::Vector3d link_velocity(const FullState& state, const SystemParams& params, int i, int j) {
  const Eigen::Matrix3d r0 = state.payload_attitude.matrix();
  Eigen::Vector3d v = state.payload_velocity +
                      r0 * state.payload_angular_velocity.cross(params.quadrotors[i].attachment);
  for (int a = j + 1; a < params.link_count(i); ++a) {
    v -= params.quadrotors[i].links[a].length * link_direction_rate(state.cables[i], a);
  }
  return v;
}

Energy total_energy(const FullState& state, const SystemParams& params) {
  const DerivedMasses masses = derive_masses(params);
  const Eigen::Matrix3d r0 = state.payload_attitude.matrix();
  const Eigen::Vector3d& v0 = state.payload_velocity;
  const Eigen::Vector3d& w0 = state.payload_angular_velocity;
  const double g = params.gravity;

  Energy e;
  e.kinetic = 0.5 * masses.total_mass * v0.squaredNorm() +
              0.5 * w0.dot(params.payload_inertia * w0);
  e.potential = -masses.total_mass * g * kDown.dot(state.payload_position);

  for (int i = 0; i < params.quad_count(); ++i) {
    const auto& quad = params.quadrotors[i];
    const auto& cable = state.cables[i];
    const Eigen::Vector3d attach_rate = r0 * w0.cross(quad.attachment);
    e.kinetic += 0.5 * masses.chain_mass[i] * attach_rate.squaredNorm() +
                 masses.chain_mass[i] * v0.dot(attach_rate) +
                 0.5 * state.quad_angular_rates[i].dot(quad.inertia * state.quad_angular_rates[i]);
    e.potential += -masses.chain_mass[i] * g * kDown.dot(r0 * quad.attachment);

    const int links = params.link_count(i);
    Eigen::Vector3d weighted_rate_sum = Eigen::Vector3d::Zero();
    for (int j = 0; j < links; ++j) {
      const double lj = quad.links[j].length;
      const Eigen::Vector3d qdot_j = link_direction_rate(cable, j);
      weighted_rate_sum += masses.upper_chain_mass[i][j] * lj * qdot_j;
      e.potential += masses.upper_chain_mass[i][j] * lj * g * kDown.dot(cable.directions[j].vector());
      // Pairwise chain coupling: coefficient is the mass above the lower link.
      e.kinetic += 0.5 * masses.upper_chain_mass[i][j] * lj * lj * qdot_j.squaredNorm();
      for (int k = j + 1; k < links; ++k) {
        e.kinetic += masses.upper_chain_mass[i][j] * lj * quad.links[k].length *
                     qdot_j.dot(link_direction_rate(cable, k));
      }
    }
    e.kinetic -= (v0 + attach_rate).dot(weighted_rate_sum);
  }
  return e;
}

Eigen::Vector3d total_linear_momentum(const FullState& state, const SystemParams& params) {
  Eigen::Vector3d p = params.payload_mass * state.payload_velocity;
  for (int i = 0; i < params.quad_count(); ++i) {
    p += params.quadrotors[i].mass * quadrotor_velocity(state, params, i);
    for (int j = 0; j < params.link_count(i); ++j) {
      p += params.quadrotors[i].links[j].mass * link_velocity(state, params, i, j);
    }
  }
  return p;
}

}  // namespace multilift
