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

// End-to-end acceptance checks. Each test prints one [CRITERION n] line with
// its verdict so the suite can be audited from the ctest log alone.

#include <chrono>
#include <cstdio>
#include <random>

#include <gtest/gtest.h>

#include "multilift/oracle.hpp"
#include "multilift/sim.hpp"
#include "support/pendulum_reference.hpp"
#include "support/test_helpers.hpp"

namespace multilift {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(const Clock::time_point& start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

class Criterion : public ::testing::Test {
 protected:
  void describe(int number, const char* what) {
    number_ = number;
    what_ = what;
  }
  void TearDown() override {
    std::printf("[CRITERION %d] %s: %s\n", number_,
                ::testing::Test::HasFailure() ? "FAIL" : "PASS", what_);
    std::fflush(stdout);
  }
  int number_ = 0;
  const char* what_ = "";
};

TEST_F(Criterion, C01_EquilibriumResidual) {
  describe(1, "hanging equilibrium residual < 1e-10 in < 1 s");
  const auto start = Clock::now();
  const SystemParams params = testing::paper_params();
  const auto masses = derive_masses(params);
  const FullState eq = FullState::hanging_equilibrium(params);
  std::vector<dynamics::QuadInput> inputs(4);
  for (int i = 0; i < 4; ++i) {
    inputs[i].thrust =
        (masses.chain_mass[i] + params.payload_mass / 4.0) * params.gravity;
  }
  const auto eom = dynamics::assemble_eom(eq, params, masses, inputs, DisturbanceSpec{});
  const double residual = dynamics::solve_accelerations(eom).norm();
  EXPECT_LT(residual, 1e-10);
  EXPECT_LT(seconds_since(start), 1.0);
}

TEST_F(Criterion, C02_DynamicsOracleEquivalence) {
  describe(2, "assembled accelerations match the Euler-Lagrange oracle on 50 states");
  const auto start = Clock::now();
  const SystemParams params = testing::paper_params();
  const auto masses = derive_masses(params);
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> uf(2.0, 12.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const FullState s = testing::random_state(params, rng);
    std::vector<dynamics::QuadInput> inputs(4);
    std::vector<Eigen::Vector3d> forces(4);
    for (int i = 0; i < 4; ++i) {
      inputs[i].thrust = uf(rng);
      forces[i] = -inputs[i].thrust *
                  (s.quad_attitudes[i].matrix() * Eigen::Vector3d::UnitZ());
    }
    const std::vector<Eigen::Vector3d> zero(4, Eigen::Vector3d::Zero());
    const auto rhs = dynamics::full_rhs(s, params, masses, inputs, DisturbanceSpec{});
    const auto ref = oracle::reference_accelerations(s, params, forces, zero);
    double num = (rhs.payload_velocity_rate - ref.payload_linear).squaredNorm() +
                 (rhs.payload_body_rate_dot - ref.payload_angular).squaredNorm();
    double den = ref.payload_linear.squaredNorm() + ref.payload_angular.squaredNorm();
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 5; ++j) {
        num += (rhs.link_rate_dots[i][j] - ref.link_angular[i][j]).squaredNorm();
        den += ref.link_angular[i][j].squaredNorm();
      }
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  EXPECT_LT(worst, 1e-6);
  EXPECT_LT(seconds_since(start), 30.0);
  std::printf("    worst relative error %.3e\n", worst);
}

TEST_F(Criterion, C03_ReductionOracle) {
  describe(3, "point-payload reduction matches the independent pendulum over 2 s");
  SystemParams params = testing::pendulum_params();
  const auto masses = derive_masses(params);
  FullState s = FullState::hanging_equilibrium(params);
  const Eigen::Vector3d q0 =
      exp_so3(0.4 * Eigen::Vector3d::UnitX()) * Eigen::Vector3d::UnitZ();
  s.cables[0].directions[0] = UnitVector::normalized(q0);
  Eigen::Vector3d w0(0.2, 0.5, 0.0);
  w0 -= q0.dot(w0) * q0;
  s.cables[0].angular_rates[0] = w0;

  std::vector<dynamics::QuadInput> inputs(1);
  inputs[0].thrust = 9.0;
  // Zero moment and zero initial rate keep the quad attitude frozen, so the
  // applied force is constant for both models.
  const Eigen::Vector3d force = -9.0 * Eigen::Vector3d::UnitZ();

  const double dt = 1e-4;
  integrator::IntegratorConfig cfg;
  cfg.dt = dt;
  const auto rhs = [&](double, const FullState& state) {
    return dynamics::full_rhs(state, params, masses, inputs, DisturbanceSpec{});
  };
  const auto traj = integrator::simulate(s, rhs, cfg, 2.0);

  testing::PendulumState ps;
  ps.load_position = s.payload_position;
  ps.load_velocity = s.payload_velocity;
  ps.direction = q0;
  ps.rate = w0;
  const testing::PendulumParams pp{params.quadrotors[0].mass,
                                   params.payload_mass + params.quadrotors[0].links[0].mass,
                                   params.quadrotors[0].links[0].length, params.gravity};
  for (int k = 0; k < 20000; ++k) ps = testing::pendulum_step(ps, pp, force, dt);

  const FullState& end = traj.states.back();
  EXPECT_LT((end.payload_position - ps.load_position).norm(), 1e-8);
  EXPECT_LT((end.payload_velocity - ps.load_velocity).norm(), 1e-8);
  EXPECT_LT((end.cables[0].directions[0].vector() - ps.direction).norm(), 1e-8);
  EXPECT_LT((end.cables[0].angular_rates[0] - ps.rate).norm(), 1e-8);
}

TEST_F(Criterion, C04_EnergyConservation) {
  describe(4, "open-loop energy drift |dE|/|E0| < 1e-6 over 5 s at dt = 1e-3");
  const SystemParams params = testing::paper_params();
  const auto masses = derive_masses(params);
  FullState s = FullState::hanging_equilibrium(params);
  s.payload_position = {0.0, 0.0, 0.5};
  s.payload_velocity = {0.2, -0.1, 0.05};
  s.payload_angular_velocity = {0.1, 0.2, -0.1};
  s.payload_attitude = Rotation::about_axis({0.05, -0.1, 0.2});
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 5; ++j) {
      const Eigen::Vector3d q =
          exp_so3(0.2 * Eigen::Vector3d(0.1 * (i + 1), -0.07 * (j + 1), 0.0)) *
          Eigen::Vector3d::UnitZ();
      Eigen::Vector3d w(0.1 * j, -0.05 * i, 0.0);
      w -= q.dot(w) * q;
      s.cables[i].directions[j] = UnitVector::normalized(q);
      s.cables[i].angular_rates[j] = w;
    }
  }
  const std::vector<dynamics::QuadInput> idle(4);
  integrator::IntegratorConfig cfg;  // dt = 1e-3
  const auto traj = integrator::simulate(
      s, [&](double, const FullState& state) {
        return dynamics::full_rhs(state, params, masses, idle, DisturbanceSpec{});
      },
      cfg, 5.0);
  const double e0 = total_energy(traj.states.front(), params).total();
  double worst = 0.0;
  for (const auto& state : traj.states) {
    worst = std::max(worst, std::abs(total_energy(state, params).total() - e0));
  }
  std::printf("    |E0| = %.3f J, worst drift %.3e\n", std::abs(e0), worst / std::abs(e0));
  EXPECT_LT(worst / std::abs(e0), 1e-6);
}

TEST_F(Criterion, C05_ConstraintPreservation) {
  describe(5, "unit norms, orthogonality and tangency < 1e-9 through a 10 s run");
  const auto scenario = sim::builtin_scenario("paper-case2");
  const auto result = sim::run(scenario);
  double worst_q = 0.0, worst_r = 0.0, worst_t = 0.0;
  for (const auto& s : result.trajectory.states) {
    worst_r = std::max(worst_r, Rotation::orthogonality_defect(s.payload_attitude.matrix()));
    for (int i = 0; i < 4; ++i) {
      worst_r =
          std::max(worst_r, Rotation::orthogonality_defect(s.quad_attitudes[i].matrix()));
      for (int j = 0; j < 5; ++j) {
        const Eigen::Vector3d q = s.cables[i].directions[j].vector();
        worst_q = std::max(worst_q, std::abs(q.norm() - 1.0));
        worst_t = std::max(worst_t, std::abs(q.dot(s.cables[i].angular_rates[j])));
      }
    }
  }
  std::printf("    |q|-1: %.2e   |R'R-I|: %.2e   |q.w|: %.2e\n", worst_q, worst_r, worst_t);
  EXPECT_LT(worst_q, 1e-9);
  EXPECT_LT(worst_r, 1e-9);
  EXPECT_LT(worst_t, 1e-9);
}

TEST_F(Criterion, C06_LinearizationCrossCheck) {
  describe(6, "analytic M, G, B match finite differences at 1e-4; rank = 92");
  const SystemParams params = testing::paper_params();
  const auto masses = derive_masses(params);
  const auto lm = linearization::build_linear_model(params, masses);
  const auto fd = linearization::finite_difference_linearize(params, masses);
  const double mass_err = (lm.mass - fd.mass).norm() / fd.mass.norm();
  const double stiffness_err = (lm.stiffness - fd.stiffness).norm() / fd.stiffness.norm();
  const double input_err = (lm.input - fd.input).norm() / fd.input.norm();
  std::printf("    mass %.2e  stiffness %.2e  input %.2e\n", mass_err, stiffness_err,
              input_err);
  EXPECT_LT(mass_err, 1e-4);
  EXPECT_LT(stiffness_err, 1e-4);
  EXPECT_LT(input_err, 1e-4);
  EXPECT_EQ(linearization::controllability_rank(lm), 92);
}

TEST_F(Criterion, C07_LyapunovSolver) {
  describe(7, "Lyapunov residual < 1e-8 on the 92-dimensional closed loop");
  const auto scenario = sim::builtin_scenario("paper-case1");
  const auto setup = sim::prepare(scenario);
  const auto closed = linearization::build_closed_loop(
      setup.linear_model, setup.gain_set.position_gain, setup.gain_set.velocity_gain);
  ASSERT_EQ(closed.dynamics.rows(), 92);
  const double residual =
      (closed.dynamics.transpose() * setup.gain_set.lyapunov_p +
       setup.gain_set.lyapunov_p * closed.dynamics + setup.gain_set.lyapunov_q)
          .norm() /
      setup.gain_set.lyapunov_q.norm();
  std::printf("    residual %.3e\n", residual);
  EXPECT_LT(residual, 1e-8);
}

TEST_F(Criterion, C08_PaperCase1Convergence) {
  describe(8, "paper-case1 reaches x0d within 1 cm, e_q and e_omega < 1e-2 by 10 s");
  const auto start = Clock::now();
  const auto result = sim::run(sim::builtin_scenario("paper-case1"));
  std::printf("    terminal |x0-x0d| %.4g m, e_q %.4g, e_omega %.4g rad/s\n",
              result.summary.terminal_position_error,
              result.summary.terminal_link_direction_error,
              result.summary.terminal_link_rate_error);
  EXPECT_LT(result.summary.terminal_position_error, 0.01);
  EXPECT_LT(result.summary.terminal_link_direction_error, 0.01);
  EXPECT_LT(result.summary.terminal_link_rate_error, 0.01);
  EXPECT_LT(seconds_since(start), 60.0);
}

TEST_F(Criterion, C09_PaperCase2LargeAttitudeRecovery) {
  describe(9, "paper-case2 stabilizes from 30/-35 degree initial attitude errors by 10 s");
  const auto result = sim::run(sim::builtin_scenario("paper-case2"));
  const auto& m = result.metrics;
  std::printf("    terminal |x0-x0d| %.4g m, psi0 %.4g, e_q %.4g, e_omega %.4g\n",
              m.position_error.back(), m.payload_psi.back(),
              m.link_direction_error.back(), m.link_rate_error.back());
  EXPECT_LT(m.position_error.back(), 0.02);
  EXPECT_LT(m.payload_psi.back(), 0.01);
  EXPECT_LT(m.link_direction_error.back(), 0.05);
  EXPECT_LT(m.link_rate_error.back(), 0.05);
  for (int i = 0; i < 4; ++i) EXPECT_LT(m.quad_psi[i].back(), 0.01);
}

TEST_F(Criterion, C10_CertificateChecker) {
  describe(10, "certificate passes Eq. (c2)/W2 for sane gains, reports the violation");
  const auto scenario = sim::builtin_scenario("paper-case1");
  const auto setup = sim::prepare(scenario);
  const auto masses = derive_masses(scenario.params);
  gains::CertificateOptions options;
  options.psi1.assign(4, 0.1);
  options.psi2.assign(4, 1.0);
  options.command_rate_bound = 1.0;

  auto sane = setup.gain_set;
  for (auto& ag : sane.attitude) ag.c2 = 1e-3;
  const auto cert = gains::check_certificate(sane, scenario.params, masses,
                                             setup.linear_model, options);
  for (const auto& qc : cert.quads) {
    EXPECT_TRUE(qc.c2_ok);
    EXPECT_TRUE(qc.w2_positive);
  }

  auto violating = setup.gain_set;
  const double c2_bad = std::max(1.5 * cert.quads[0].c2_limit,
                                 1.05 * setup.gain_set.attitude[0].komega /
                                     (2.0 * cert.quads[0].inertia_max));
  for (auto& ag : violating.attitude) ag.c2 = c2_bad;
  const auto bad = gains::check_certificate(violating, scenario.params, masses,
                                            setup.linear_model, options);
  for (const auto& qc : bad.quads) {
    EXPECT_LE(qc.w2_min_eigenvalue, 0.0);
    EXPECT_FALSE(qc.w2_positive);
    EXPECT_FALSE(qc.pass);
  }
  std::printf("    sane c2 limit %.3g, violating lambda_min(W2) %.3g\n",
              cert.quads[0].c2_limit, bad.quads[0].w2_min_eigenvalue);
}

TEST_F(Criterion, C11_LyapunovMonotonicity) {
  describe(11, "V non-increasing along a closed-loop trajectory near the equilibrium");
  auto scenario = sim::builtin_scenario("paper-case1");
  scenario.initial.payload_position = scenario.desired_position +
                                      Eigen::Vector3d(0.15, -0.10, 0.08);
  scenario.duration = 5.0;
  const auto result = sim::run(scenario);
  const auto& v = result.metrics.lyapunov_total;
  const double v0 = v.front();
  int increases = 0;
  double worst = 0.0;
  for (size_t k = 1; k < v.size(); ++k) {
    const double jump = v[k] - v[k - 1];
    if (jump > 1e-6 * v0) ++increases;
    worst = std::max(worst, jump);
  }
  std::printf("    V(0) = %.4g, increases above tolerance: %d of %zu, worst jump %.2e\n",
              v0, increases, v.size() - 1, worst);
  EXPECT_EQ(increases, 0);
  EXPECT_EQ(result.summary.lyapunov_increase_fraction, 0.0);
}

TEST_F(Criterion, C12_DisturbanceRejection) {
  describe(12, "constant disturbances: < 5 mm at 20 s, e_x plateaued, e_I -> Delta_R/kI");
  const auto scenario = sim::builtin_scenario("disturbance-rejection");
  const auto result = sim::run(scenario);
  const auto& m = result.metrics;
  EXPECT_LT(m.position_error.back(), 0.005);

  // e_x bounded and plateaued: the sup norm moves less than 1% over the last
  // quarter of the run.
  const size_t last = m.ex_sup.size() - 1;
  const size_t three_quarters = (3 * last) / 4;
  EXPECT_LT(std::abs(m.ex_sup[last] - m.ex_sup[three_quarters]),
            0.01 * std::max(1e-9, m.ex_sup[last]));
  EXPECT_LT(m.ex_sup[last], 10.0 * scenario.gains.sigma);

  // Attitude integrals settle to Delta_R / kI within 5%.
  const double target =
      (scenario.disturbances.moment_on(0) / scenario.gains.attitude.ki).norm();
  for (int i = 0; i < 4; ++i) {
    EXPECT_LT(m.integral_gap[i].back(), 0.05 * target);
  }
  std::printf("    terminal error %.4g m, ex_sup %.4g, integral gap %.3g (5%% = %.3g)\n",
              m.position_error.back(), m.ex_sup.back(), m.integral_gap[0].back(),
              0.05 * target);
}

}  // namespace
}  // namespace multilift
