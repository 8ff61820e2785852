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

#include "multilift/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace multilift {
namespace dynamics {
namespace {

const Eigen::Vector3d kDown = Eigen::Vector3d::UnitZ();

// Fills every block owned by cable i: its own rows (link equations), its
// columns in the payload rows, and its additive contributions to the payload
// forcing, returned so the caller can reduce them in a fixed order.
struct CableContribution {
  Eigen::Vector3d forcing_translation = Eigen::Vector3d::Zero();
  Eigen::Vector3d forcing_rotation = Eigen::Vector3d::Zero();
};

CableContribution fill_cable(int i, const FullState& state, const SystemParams& params,
                             const DerivedMasses& masses, const Layout& layout,
                             const Eigen::Vector3d& force, const Eigen::Vector3d& disturbance,
                             EomSystem& out) {
  const auto& quad = params.quadrotors[i];
  const auto& cable = state.cables[i];
  const Eigen::Matrix3d r0 = state.payload_attitude.matrix();
  const Eigen::Vector3d& w0 = state.payload_angular_velocity;
  const Eigen::Matrix3d rho_hat = hat(quad.attachment);
  const Eigen::Matrix3d w0_hat = hat(w0);

  const double chain = masses.chain_mass[i];
  const Eigen::Vector3d centripetal = r0 * w0_hat * w0_hat * quad.attachment;
  const Eigen::Matrix3d rho_r0t = rho_hat * r0.transpose();

  const int links = layout.links_per_cable[i];
  for (int j = 0; j < links; ++j) {
    const int row = layout.link_block(i, j);
    const double mass_j = masses.upper_chain_mass[i][j];
    const double len_j = quad.links[j].length;
    const Eigen::Vector3d q = cable.directions[j].vector();
    const Eigen::Matrix3d q_hat = hat(q);
    const Eigen::Matrix3d q_hat2 = q_hat * q_hat;

    // Payload rows, columns of this link.
    out.inertia.block<3, 3>(0, row) = -mass_j * len_j * Eigen::Matrix3d::Identity();
    out.inertia.block<3, 3>(3, row) = -mass_j * len_j * rho_r0t;

    // Link row: payload columns.
    out.inertia.block<3, 3>(row, 0) = -mass_j * q_hat2;
    out.inertia.block<3, 3>(row, 3) = mass_j * q_hat2 * r0 * rho_hat;

    // Link row: chain columns. Off-diagonal coefficient is the mass above the
    // upper link of the pair; the diagonal uses qhat^2 qdd = -qdd - |qdot|^2 q.
    for (int k = 0; k < links; ++k) {
      const int col = layout.link_block(i, k);
      if (k == j) {
        out.inertia.block<3, 3>(row, col) = -mass_j * len_j * Eigen::Matrix3d::Identity();
      } else {
        const double pair_mass = masses.upper_chain_mass[i][std::min(j, k)];
        out.inertia.block<3, 3>(row, col) = pair_mass * quad.links[k].length * q_hat2;
      }
    }

    const Eigen::Vector3d qdot = cable.angular_rates[j].cross(q);
    out.forcing.segment<3>(row) =
        mass_j * q_hat2 * centripetal -
        q_hat2 * (mass_j * params.gravity * kDown + force + disturbance) +
        mass_j * len_j * qdot.squaredNorm() * q;
  }

  CableContribution add;
  add.forcing_translation = force + disturbance - chain * centripetal;
  add.forcing_rotation = rho_r0t * (chain * params.gravity * kDown + force + disturbance);
  return add;
}

void assemble_impl(const FullState& state, const SystemParams& params,
                   const DerivedMasses& masses,
                   const std::vector<Eigen::Vector3d>& applied_force,
                   const std::vector<Eigen::Vector3d>& force_disturbance,
                   bool parallel, EomSystem& out) {
  const Layout layout(params);
  const int dof = layout.velocity_dof;
  const int n = layout.quad_count;
  out.inertia.setZero(dof, dof);
  out.forcing.setZero(dof);

  std::vector<CableContribution> contributions(n);
#if defined(_OPENMP)
#pragma omp parallel for schedule(static) if (parallel && layout.total_links >= 16)
#endif
  for (int i = 0; i < n; ++i) {
    contributions[i] = fill_cable(i, state, params, masses, layout, applied_force[i],
                                  force_disturbance[i], out);
  }
  (void)parallel;

  // Payload blocks and reductions, in cable order regardless of threading.
  const Eigen::Matrix3d r0 = state.payload_attitude.matrix();
  const Eigen::Vector3d& w0 = state.payload_angular_velocity;
  out.inertia.block<3, 3>(0, 0) = masses.total_mass * Eigen::Matrix3d::Identity();
  out.inertia.block<3, 3>(3, 3) = masses.effective_payload_inertia;

  Eigen::Matrix3d translation_rotation = Eigen::Matrix3d::Zero();
  Eigen::Vector3d forcing_translation = masses.total_mass * params.gravity * kDown;
  Eigen::Vector3d forcing_rotation =
      -w0.cross(masses.effective_payload_inertia * w0);
  for (int i = 0; i < n; ++i) {
    translation_rotation -= masses.chain_mass[i] * r0 * hat(params.quadrotors[i].attachment);
    forcing_translation += contributions[i].forcing_translation;
    forcing_rotation += contributions[i].forcing_rotation;
  }
  out.inertia.block<3, 3>(0, 3) = translation_rotation;
  out.inertia.block<3, 3>(3, 0) = translation_rotation.transpose();
  out.forcing.segment<3>(0) = forcing_translation;
  out.forcing.segment<3>(3) = forcing_rotation;
}

std::vector<Eigen::Vector3d> thrust_vectors(const FullState& state,
                                            const std::vector<QuadInput>& inputs) {
  std::vector<Eigen::Vector3d> forces(inputs.size());
  for (size_t i = 0; i < inputs.size(); ++i) {
    forces[i] = -inputs[i].thrust * (state.quad_attitudes[i].matrix() * kDown);
  }
  return forces;
}

std::vector<Eigen::Vector3d> disturbance_vectors(const DisturbanceSpec& disturbances, int n) {
  std::vector<Eigen::Vector3d> out(n);
  for (int i = 0; i < n; ++i) out[i] = disturbances.force_on(i);
  return out;
}

StateDerivative coupled_derivative(const FullState& state, const SystemParams& params,
                                   const Eigen::VectorXd& accel) {
  const Layout layout(params);
  StateDerivative d;
  d.payload_position_rate = state.payload_velocity;
  d.payload_velocity_rate = accel.segment<3>(0);
  d.payload_body_rate = state.payload_angular_velocity;
  d.payload_body_rate_dot = accel.segment<3>(3);
  d.link_rates.resize(layout.quad_count);
  d.link_rate_dots.resize(layout.quad_count);
  for (int i = 0; i < layout.quad_count; ++i) {
    const int links = layout.links_per_cable[i];
    d.link_rates[i].resize(links);
    d.link_rate_dots[i].resize(links);
    for (int j = 0; j < links; ++j) {
      const Eigen::Vector3d q = state.cables[i].directions[j].vector();
      const Eigen::Vector3d qdd = accel.segment<3>(layout.link_block(i, j));
      d.link_rates[i][j] = state.cables[i].angular_rates[j];
      // omegadot = q x qdd, exact while q . qdot = 0.
      d.link_rate_dots[i][j] = q.cross(qdd);
    }
  }
  return d;
}

}  // namespace

void assemble_eom(const FullState& state, const SystemParams& params,
                  const DerivedMasses& masses,
                  const std::vector<Eigen::Vector3d>& applied_force,
                  const std::vector<Eigen::Vector3d>& force_disturbance,
                  EomSystem& out) {
  assemble_impl(state, params, masses, applied_force, force_disturbance, true, out);
}

EomSystem assemble_eom(const FullState& state, const SystemParams& params,
                       const DerivedMasses& masses,
                       const std::vector<Eigen::Vector3d>& applied_force,
                       const std::vector<Eigen::Vector3d>& force_disturbance) {
  EomSystem out;
  assemble_eom(state, params, masses, applied_force, force_disturbance, out);
  return out;
}

EomSystem assemble_eom(const FullState& state, const SystemParams& params,
                       const DerivedMasses& masses,
                       const std::vector<QuadInput>& inputs,
                       const DisturbanceSpec& disturbances) {
  return assemble_eom(state, params, masses, thrust_vectors(state, inputs),
                      disturbance_vectors(disturbances, params.quad_count()));
}

void assemble_eom_reference(const FullState& state, const SystemParams& params,
                            const DerivedMasses& masses,
                            const std::vector<Eigen::Vector3d>& applied_force,
                            const std::vector<Eigen::Vector3d>& force_disturbance,
                            EomSystem& out) {
  assemble_impl(state, params, masses, applied_force, force_disturbance, false, out);
}

Eigen::VectorXd solve_accelerations(const EomSystem& eom) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(eom.inertia);
  const double rcond = lu.rcond();
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(std::isfinite(rcond) && rcond > 1e-12) || min_pivot == 0.0) {
    throw NumericalError(
        "solve_accelerations: singular configuration, condition estimate " +
        std::to_string(rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity()));
  }
  return lu.solve(eom.forcing);
}

StateDerivative full_rhs(const FullState& state, const SystemParams& params,
                         const DerivedMasses& masses,
                         const std::vector<QuadInput>& inputs,
                         const DisturbanceSpec& disturbances) {
  const EomSystem eom = assemble_eom(state, params, masses, inputs, disturbances);
  StateDerivative d = coupled_derivative(state, params, solve_accelerations(eom));
  const int n = params.quad_count();
  d.quad_body_rates.resize(n);
  d.quad_body_rate_dots.resize(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d& w = state.quad_angular_rates[i];
    const Eigen::Matrix3d& inertia = params.quadrotors[i].inertia;
    d.quad_body_rates[i] = w;
    d.quad_body_rate_dots[i] =
        inertia.ldlt().solve(inputs[i].moment + disturbances.moment_on(i) - w.cross(inertia * w));
  }
  return d;
}

StateDerivative simplified_rhs(const FullState& state, const SystemParams& params,
                               const DerivedMasses& masses,
                               const std::vector<Eigen::Vector3d>& applied_force) {
  const std::vector<Eigen::Vector3d> zero(params.quad_count(), Eigen::Vector3d::Zero());
  const EomSystem eom = assemble_eom(state, params, masses, applied_force, zero);
  StateDerivative d = coupled_derivative(state, params, solve_accelerations(eom));
  const int n = params.quad_count();
  d.quad_body_rates.assign(n, Eigen::Vector3d::Zero());
  d.quad_body_rate_dots.assign(n, Eigen::Vector3d::Zero());
  return d;
}

}  // namespace dynamics
}  // namespace multilift
