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

#include "multilift/linearization.hpp"

#include <cmath>

#include "multilift/oracle.hpp"

namespace multilift {
namespace linearization {
namespace {

const Eigen::Vector3d kDown = Eigen::Vector3d::UnitZ();

// C = [e1, e2]: embedding of the in-plane link coordinates.
Eigen::Matrix<double, 3, 2> plane_embedding() {
  Eigen::Matrix<double, 3, 2> c;
  c << 1, 0, 0, 1, 0, 0;
  return c;
}

Eigen::VectorXd project_accelerations(const dynamics::StateDerivative& d,
                                      const Layout& layout) {
  Eigen::VectorXd a(layout.reduced_dof);
  a.segment<3>(0) = d.payload_velocity_rate;
  a.segment<3>(3) = d.payload_body_rate_dot;
  for (int i = 0; i < layout.quad_count; ++i) {
    for (int j = 0; j < layout.links_per_cable[i]; ++j) {
      a.segment<2>(layout.reduced_block(i, j)) = d.link_rate_dots[i][j].head<2>();
    }
  }
  return a;
}

}  // namespace

std::vector<double> equilibrium_load_share(const SystemParams& params, LoadShare mode) {
  const int n = params.quad_count();
  std::vector<double> share(n, params.payload_mass / n);
  if (mode == LoadShare::kUniform) return share;

  // Static balance: the vertical force transmitted at attachment i is
  // share_i * g; require sum share_i = m0 and zero torque about the payload
  // center, solved as the minimum-norm correction to the uniform share.
  Eigen::MatrixXd a(3, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(3);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d lever = params.quadrotors[i].attachment.cross(kDown);
    a(0, i) = 1.0;
    a.block<2, 1>(1, i) = lever.head<2>();
    b(0) += share[i];
    b.segment<2>(1) += share[i] * lever.head<2>();
  }
  Eigen::VectorXd target(3);
  target << params.payload_mass, 0.0, 0.0;
  const Eigen::VectorXd correction =
      a.completeOrthogonalDecomposition().solve(target - b);
  for (int i = 0; i < n; ++i) share[i] += correction(i);
  return share;
}

Eigen::Vector3d equilibrium_force(const SystemParams& params, const DerivedMasses& masses,
                                  double share, int i) {
  return -(masses.chain_mass[i] + share) * params.gravity * kDown;
}

LinearModel build_linear_model(const SystemParams& params, const DerivedMasses& masses,
                               LoadShare share_mode) {
  const Layout layout(params);
  const auto share = equilibrium_load_share(params, share_mode);
  const Eigen::Matrix<double, 3, 2> c = plane_embedding();
  const Eigen::Matrix3d e3_hat = hat(kDown);
  const double g = params.gravity;

  LinearModel lm;
  lm.dim = layout.reduced_dof;
  lm.input_dim = 3 * layout.quad_count;
  lm.mass.setZero(lm.dim, lm.dim);
  lm.stiffness.setZero(lm.dim, lm.dim);
  lm.input.setZero(lm.dim, lm.input_dim);

  lm.mass.block<3, 3>(0, 0) = masses.total_mass * Eigen::Matrix3d::Identity();
  lm.mass.block<3, 3>(3, 3) = masses.effective_payload_inertia;

  Eigen::Matrix3d coupling = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d payload_stiffness = Eigen::Matrix3d::Zero();
  for (int i = 0; i < layout.quad_count; ++i) {
    const auto& quad = params.quadrotors[i];
    const Eigen::Matrix3d rho_hat = hat(quad.attachment);
    coupling -= masses.chain_mass[i] * rho_hat;
    payload_stiffness += share[i] * g * rho_hat * e3_hat;

    lm.input.block<3, 3>(0, 3 * i) = Eigen::Matrix3d::Identity();
    lm.input.block<3, 3>(3, 3 * i) = rho_hat;

    for (int j = 0; j < layout.links_per_cable[i]; ++j) {
      const int row = layout.reduced_block(i, j);
      const double mass_j = masses.upper_chain_mass[i][j];
      const double len_j = quad.links[j].length;

      lm.mass.block<3, 2>(0, row) = mass_j * len_j * e3_hat * c;
      lm.mass.block<3, 2>(3, row) = mass_j * len_j * rho_hat * e3_hat * c;
      lm.mass.block<2, 3>(row, 0) = lm.mass.block<3, 2>(0, row).transpose();
      lm.mass.block<2, 3>(row, 3) = lm.mass.block<3, 2>(3, row).transpose();
      for (int k = 0; k < layout.links_per_cable[i]; ++k) {
        const double pair_mass = masses.upper_chain_mass[i][std::min(j, k)];
        lm.mass.block<2, 2>(row, layout.reduced_block(i, k)) =
            pair_mass * len_j * quad.links[k].length * Eigen::Matrix2d::Identity();
      }

      // Restoring stiffness of a hanging link: mass hanging below it times g.
      lm.stiffness.block<2, 2>(row, row) =
          (masses.chain_mass[i] + share[i] - mass_j) * g * len_j *
          Eigen::Matrix2d::Identity();

      lm.input.block<2, 3>(row, 3 * i) = -len_j * c.transpose() * e3_hat;
    }
  }
  lm.mass.block<3, 3>(0, 3) = coupling;
  lm.mass.block<3, 3>(3, 0) = coupling.transpose();
  lm.stiffness.block<3, 3>(3, 3) = payload_stiffness;
  return lm;
}

FullState state_from_reduced(const Eigen::VectorXd& position, const SystemParams& params,
                             const Eigen::Vector3d& x0_desired) {
  const Layout layout(params);
  FullState s = FullState::hanging_equilibrium(params);
  s.payload_position = x0_desired + position.segment<3>(0);
  s.payload_attitude = Rotation::about_axis(position.segment<3>(3));
  const Eigen::Matrix<double, 3, 2> c = plane_embedding();
  for (int i = 0; i < layout.quad_count; ++i) {
    for (int j = 0; j < layout.links_per_cable[i]; ++j) {
      const Eigen::Vector3d xi = c * position.segment<2>(layout.reduced_block(i, j));
      s.cables[i].directions[j] = UnitVector::normalized(exp_so3(xi) * kDown);
    }
  }
  return s;
}

ReducedState deviation_coordinates(const FullState& state, const SystemParams& params,
                                   const Eigen::Vector3d& x0_desired) {
  const Layout layout(params);
  ReducedState r;
  r.position.resize(layout.reduced_dof);
  r.velocity.resize(layout.reduced_dof);
  r.position.segment<3>(0) = state.payload_position - x0_desired;
  r.velocity.segment<3>(0) = state.payload_velocity;
  const Eigen::Vector3d eta = log_so3(state.payload_attitude.matrix());
  r.position.segment<3>(3) = eta;
  r.velocity.segment<3>(3) = dexpinv(-eta, state.payload_angular_velocity);
  for (int i = 0; i < layout.quad_count; ++i) {
    for (int j = 0; j < layout.links_per_cable[i]; ++j) {
      const int row = layout.reduced_block(i, j);
      const Eigen::Vector3d q = state.cables[i].directions[j].vector();
      const Eigen::Vector3d q_dot = state.cables[i].angular_rates[j].cross(q);
      r.position.segment<2>(row) = kDown.cross(q).head<2>();
      r.velocity.segment<2>(row) = kDown.cross(q_dot).head<2>();
    }
  }
  return r;
}

LinearModel finite_difference_linearize(const SystemParams& params,
                                        const DerivedMasses& masses, double h) {
  if (h < 1e-7 || h > 1e-3) {
    throw ValidationError("finite_difference_linearize: h outside [1e-7, 1e-3]");
  }
  const Layout layout(params);
  const int dim = layout.reduced_dof;
  const int input_dim = 3 * layout.quad_count;
  const auto share = equilibrium_load_share(params, LoadShare::kUniform);
  const Eigen::Vector3d origin = Eigen::Vector3d::Zero();

  std::vector<Eigen::Vector3d> base_force(layout.quad_count);
  for (int i = 0; i < layout.quad_count; ++i) {
    base_force[i] = equilibrium_force(params, masses, share[i], i);
  }

  LinearModel lm;
  lm.dim = dim;
  lm.input_dim = input_dim;
  lm.mass = oracle::chart_mass_matrix(FullState::hanging_equilibrium(params), params);

  // d(accel)/dx = -M^-1 G by central differences of the nonlinear RHS.
  Eigen::MatrixXd accel_by_state(dim, dim);
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic)
#endif
  for (int r = 0; r < dim; ++r) {
    const Eigen::VectorXd unit = h * Eigen::VectorXd::Unit(dim, r);
    const Eigen::VectorXd plus = project_accelerations(
        dynamics::simplified_rhs(state_from_reduced(unit, params, origin), params, masses,
                                 base_force),
        layout);
    const Eigen::VectorXd minus = project_accelerations(
        dynamics::simplified_rhs(state_from_reduced(-unit, params, origin), params, masses,
                                 base_force),
        layout);
    accel_by_state.col(r) = (plus - minus) / (2.0 * h);
  }
  lm.stiffness = -lm.mass * accel_by_state;

  // d(accel)/du = M^-1 B at the equilibrium.
  const FullState eq = FullState::hanging_equilibrium(params);
  Eigen::MatrixXd accel_by_input(dim, input_dim);
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic)
#endif
  for (int col = 0; col < input_dim; ++col) {
    auto forces = base_force;
    forces[col / 3](col % 3) += h;
    const Eigen::VectorXd plus =
        project_accelerations(dynamics::simplified_rhs(eq, params, masses, forces), layout);
    forces[col / 3](col % 3) -= 2.0 * h;
    const Eigen::VectorXd minus =
        project_accelerations(dynamics::simplified_rhs(eq, params, masses, forces), layout);
    accel_by_input.col(col) = (plus - minus) / (2.0 * h);
  }
  lm.input = lm.mass * accel_by_input;
  return lm;
}

ClosedLoopModel build_closed_loop(const LinearModel& lm, const Eigen::MatrixXd& position_gain,
                                  const Eigen::MatrixXd& velocity_gain) {
  const int d = lm.dim;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(lm.mass);
  if (!lu.isInvertible()) {
    throw NumericalError("build_closed_loop: mass matrix is singular");
  }
  ClosedLoopModel cl;
  cl.dynamics.setZero(2 * d, 2 * d);
  cl.dynamics.topRightCorner(d, d).setIdentity();
  cl.dynamics.bottomLeftCorner(d, d) =
      -lu.solve(lm.stiffness + lm.input * position_gain);
  cl.dynamics.bottomRightCorner(d, d) = -lu.solve(lm.input * velocity_gain);
  cl.input_map.setZero(2 * d, d);
  cl.input_map.bottomRows(d) = lu.inverse();
  return cl;
}

int controllability_rank(const LinearModel& lm) {
  const int d = lm.dim;
  const int n2 = 2 * d;
  Eigen::MatrixXd a(n2, n2);
  a.setZero();
  a.topRightCorner(d, d).setIdentity();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(lm.mass);
  a.bottomLeftCorner(d, d) = -lu.solve(lm.stiffness);
  Eigen::MatrixXd b(n2, lm.input_dim);
  b.topRows(d).setZero();
  b.bottomRows(d) = lu.solve(lm.input);

  // Block-Krylov basis with repeated Gram-Schmidt; column count is the rank.
  Eigen::MatrixXd basis(n2, 0);
  Eigen::MatrixXd block = b;
  for (int iter = 0; iter <= n2 && basis.cols() < n2; ++iter) {
    Eigen::MatrixXd next(n2, block.cols());
    int added = 0;
    for (int c = 0; c < block.cols(); ++c) {
      Eigen::VectorXd v = block.col(c);
      const double scale = v.norm();
      if (scale < 1e-300) continue;
      v /= scale;
      for (int pass = 0; pass < 2; ++pass) {
        if (basis.cols() > 0) v -= basis * (basis.transpose() * v);
        if (added > 0) v -= next.leftCols(added) * (next.leftCols(added).transpose() * v);
      }
      if (v.norm() > 1e-9) {
        next.col(added++) = v.normalized();
      }
    }
    if (added == 0) break;
    basis.conservativeResize(Eigen::NoChange, basis.cols() + added);
    basis.rightCols(added) = next.leftCols(added);
    block = a * basis.rightCols(added);
  }
  return static_cast<int>(basis.cols());
}

}  // namespace linearization
}  // namespace multilift
