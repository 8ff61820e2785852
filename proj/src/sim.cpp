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

#include "multilift/sim.hpp"

#include <chrono>
#include <cmath>

namespace multilift {
namespace sim {
namespace {

const Eigen::Vector3d kDown = Eigen::Vector3d::UnitZ();

void record_metrics(Metrics& m, double t, const FullState& state, const Scenario& scenario,
                    const controller::ControlOutput& control,
                    const controller::ControllerState& ctrl, const Setup& setup,
                    const DerivedMasses& masses) {
  const SystemParams& params = scenario.params;
  const int n = params.quad_count();
  m.time.push_back(t);
  m.position_error.push_back((state.payload_position - scenario.desired_position).norm());
  m.payload_psi.push_back(attitude_error(state.payload_attitude, Rotation()).psi);

  double eq = 0.0, ew = 0.0;
  for (const auto& cable : state.cables) {
    for (size_t j = 0; j < cable.directions.size(); ++j) {
      eq += (cable.directions[j].vector() - kDown).norm();
      ew += cable.angular_rates[j].norm();
    }
  }
  m.link_direction_error.push_back(eq);
  m.link_rate_error.push_back(ew);

  std::vector<gains::AttitudeErrors> errors(n);
  for (int i = 0; i < n; ++i) {
    const AttitudeError err =
        attitude_error(state.quad_attitudes[i], control.commanded_attitude[i]);
    errors[i].psi = err.psi;
    errors[i].attitude = err.vector;
    errors[i].rate = angular_velocity_error(state.quad_attitudes[i],
                                            control.commanded_attitude[i],
                                            state.quad_angular_rates[i],
                                            control.commanded_rate[i]);
    errors[i].integral = ctrl.attitude_integral[i];
    m.quad_psi[i].push_back(err.psi);
    m.quad_rate_error[i].push_back(errors[i].rate.norm());
    m.thrust[i].push_back(control.inputs[i].thrust);
    m.integral_gap[i].push_back(
        (ctrl.attitude_integral[i] -
         scenario.disturbances.moment_on(i) / setup.gain_set.attitude[i].ki)
            .norm());
  }

  const auto reduced =
      linearization::deviation_coordinates(state, params, scenario.desired_position);
  Eigen::VectorXd z1(2 * reduced.position.size());
  z1 << reduced.position, reduced.velocity;
  const auto v = gains::lyapunov_value(z1, ctrl.translational_integral, errors,
                                       setup.gain_set, params, setup.linear_model,
                                       scenario.disturbances);
  m.lyapunov_translational.push_back(v.translational);
  m.lyapunov_attitude.push_back(v.attitude);
  m.lyapunov_total.push_back(v.total);

  const Energy e = total_energy(state, params);
  m.kinetic_energy.push_back(e.kinetic);
  m.potential_energy.push_back(e.potential);
  m.ex_sup.push_back(ctrl.translational_integral.size() > 0
                         ? ctrl.translational_integral.lpNorm<Eigen::Infinity>()
                         : 0.0);
  (void)masses;
}

}  // namespace

Setup prepare(const Scenario& scenario) {
  scenario.validate();
  const SystemParams& params = scenario.params;
  const DerivedMasses masses = derive_masses(params);
  const Layout layout(params);

  Setup setup;
  setup.linear_model =
      linearization::build_linear_model(params, masses, scenario.load_share);
  const gains::StateGains state_gains =
      gains::synthesize_gains(setup.linear_model, scenario.gains.weights);
  const linearization::ClosedLoopModel closed = linearization::build_closed_loop(
      setup.linear_model, state_gains.position_gain, state_gains.velocity_gain);

  auto& gs = setup.gain_set;
  gs.position_gain = state_gains.position_gain;
  gs.velocity_gain = state_gains.velocity_gain;
  gs.integral_gain = gains::build_integral_gain(
      layout, scenario.gains.kz,
      std::vector<double>(params.quad_count(), scenario.gains.kz_link));
  gs.sigma = scenario.gains.sigma;
  gs.attitude.assign(params.quad_count(), scenario.gains.attitude);
  Eigen::VectorXd q_diag =
      scenario.gains.q_scale * Eigen::VectorXd::Ones(2 * layout.reduced_dof);
  q_diag.segment(0, 3) *= scenario.gains.q_payload_boost;
  q_diag.segment(layout.reduced_dof, 3) *= scenario.gains.q_payload_boost;
  gs.lyapunov_q = q_diag.asDiagonal();
  gs.lyapunov_p = gains::solve_lyapunov(closed.dynamics, gs.lyapunov_q);
  gs.integral_map = (gs.lyapunov_p * closed.input_map).transpose();
  gs.load_share = linearization::equilibrium_load_share(params, scenario.load_share);

  gains::CertificateOptions options;
  options.psi1.assign(params.quad_count(), scenario.certificate.psi1);
  options.psi2.assign(params.quad_count(), scenario.certificate.psi2);
  options.command_rate_bound = scenario.certificate.command_rate_bound;
  setup.certificate =
      gains::check_certificate(gs, params, masses, setup.linear_model, options);
  return setup;
}

RunResult run(const Scenario& scenario) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  result.setup = prepare(scenario);

  const SystemParams& params = scenario.params;
  const DerivedMasses masses = derive_masses(params);
  const int n = params.quad_count();
  const int steps =
      scenario.duration > 0.0
          ? static_cast<int>(std::llround(scenario.duration / scenario.integrator.dt))
          : 0;
  const double dt = scenario.integrator.dt;
  const double control_dt = dt * scenario.control.decimation;

  Metrics& m = result.metrics;
  m.quad_psi.resize(n);
  m.quad_rate_error.resize(n);
  m.thrust.resize(n);
  m.integral_gap.resize(n);

  controller::ControllerState ctrl = controller::ControllerState::zero(params);
  FullState state = scenario.initial;
  controller::ControlOutput control;

  result.trajectory.times.reserve(steps + 1);
  result.trajectory.states.reserve(steps + 1);
  result.controls.reserve(steps + 1);

  for (int k = 0; k <= steps; ++k) {
    const double t = k * dt;
    if (k % scenario.control.decimation == 0) {
      control = controller::compute_control(state, params, masses, result.setup.gain_set,
                                            scenario.control, scenario.desired_position,
                                            control_dt, ctrl);
    }
    result.trajectory.times.push_back(t);
    result.trajectory.states.push_back(state);
    result.controls.push_back(control);
    record_metrics(m, t, state, scenario, control, ctrl, result.setup, masses);

    if (k == steps) break;
    const auto& inputs = control.inputs;
    state = integrator::step(
        state, t,
        [&](double, const FullState& s) {
          return dynamics::full_rhs(s, params, masses, inputs, scenario.disturbances);
        },
        scenario.integrator);
    if (scenario.integrator.renormalize_every > 0 &&
        (k + 1) % scenario.integrator.renormalize_every == 0) {
      integrator::repair_drift(state);
    }
  }

  Summary& summary = result.summary;
  summary.terminal_position_error = m.position_error.back();
  summary.terminal_payload_psi = m.payload_psi.back();
  summary.terminal_link_direction_error = m.link_direction_error.back();
  summary.terminal_link_rate_error = m.link_rate_error.back();
  summary.ex_sup_final = m.ex_sup.back();
  for (int i = 0; i < n; ++i) {
    for (const double psi : m.quad_psi[i]) {
      summary.max_quad_psi = std::max(summary.max_quad_psi, psi);
    }
  }
  summary.position_convergence_time = -1.0;
  for (int k = static_cast<int>(m.time.size()) - 1; k >= 0; --k) {
    if (m.position_error[k] < 0.01) {
      summary.position_convergence_time = m.time[k];
    } else {
      break;
    }
  }
  int increases = 0;
  const double v0 = m.lyapunov_total.front();
  for (size_t k = 1; k < m.lyapunov_total.size(); ++k) {
    if (m.lyapunov_total[k] > m.lyapunov_total[k - 1] + 1e-6 * v0) ++increases;
  }
  summary.lyapunov_increase_fraction =
      m.lyapunov_total.size() > 1
          ? static_cast<double>(increases) / (m.lyapunov_total.size() - 1)
          : 0.0;
  summary.certificate_pass = result.setup.certificate.pass;
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace sim
}  // namespace multilift
