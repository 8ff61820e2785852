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

#include "multilift/integrator.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support/test_helpers.hpp"

namespace multilift {
namespace {

using testing::paper_params;
using testing::pendulum_params;

dynamics::StateDerivative zero_derivative(const FullState& s) {
  dynamics::StateDerivative d;
  d.link_rates.resize(s.cables.size());
  d.link_rate_dots.resize(s.cables.size());
  for (size_t i = 0; i < s.cables.size(); ++i) {
    d.link_rates[i].assign(s.cables[i].directions.size(), Eigen::Vector3d::Zero());
    d.link_rate_dots[i].assign(s.cables[i].directions.size(), Eigen::Vector3d::Zero());
  }
  d.quad_body_rates.assign(s.quad_attitudes.size(), Eigen::Vector3d::Zero());
  d.quad_body_rate_dots.assign(s.quad_attitudes.size(), Eigen::Vector3d::Zero());
  return d;
}

TEST(Step, ZeroDerivativeLeavesStateUnchanged) {
  const SystemParams params = pendulum_params();
  std::mt19937 rng(67);
  const FullState s = testing::random_state(params, rng);
  integrator::IntegratorConfig cfg;
  const FullState out = integrator::step(
      s, 0.0, [&](double, const FullState& state) { return zero_derivative(state); }, cfg);
  EXPECT_EQ(out.payload_position, s.payload_position);
  EXPECT_EQ(out.payload_attitude.matrix(), s.payload_attitude.matrix());
  EXPECT_EQ(out.cables[0].directions[0].vector(), s.cables[0].directions[0].vector());
  EXPECT_EQ(out.quad_attitudes[0].matrix(), s.quad_attitudes[0].matrix());
}

// Constant body rate: the chart update reproduces R0 exp(t what) exactly and
// the rotation stays on SO(3) for any step size.
TEST(Step, ConstantRateRotationIsExact) {
  const SystemParams params = pendulum_params();
  FullState s = FullState::hanging_equilibrium(params);
  const Eigen::Vector3d omega(0.7, -1.3, 0.4);
  const Eigen::Vector3d spatial(0.3, 0.2, -0.5);
  s.quad_angular_rates[0] = omega;
  s.cables[0].angular_rates[0] =
      spatial - s.cables[0].directions[0].vector().dot(spatial) *
                    s.cables[0].directions[0].vector();
  const Eigen::Vector3d q0 = s.cables[0].directions[0].vector();
  const Eigen::Vector3d w_link = s.cables[0].angular_rates[0];

  const auto rhs = [&](double, const FullState& state) {
    auto d = zero_derivative(state);
    d.quad_body_rates[0] = omega;
    d.link_rates[0][0] = w_link;
    return d;
  };
  for (const double dt : {1e-3, 0.05, 0.5}) {
    integrator::IntegratorConfig cfg;
    cfg.dt = dt;
    FullState out = s;
    const int steps = static_cast<int>(std::lround(1.0 / dt));
    for (int k = 0; k < steps; ++k) out = integrator::step(out, k * dt, rhs, cfg);
    const Eigen::Matrix3d expected = exp_so3(omega);  // R(1) = exp(1 * what)
    EXPECT_LT((out.quad_attitudes[0].matrix() - expected).norm(), 20.0 * dt * dt * dt * dt + 1e-12);
    EXPECT_LT(Rotation::orthogonality_defect(out.quad_attitudes[0].matrix()), 1e-12);
    const Eigen::Vector3d q_expected = exp_so3(w_link) * q0;
    EXPECT_LT((out.cables[0].directions[0].vector() - q_expected).norm(),
              20.0 * dt * dt * dt * dt + 1e-12);
    EXPECT_NEAR(out.cables[0].directions[0].vector().norm(), 1.0, 1e-12);
  }
}

TEST(Step, FreeFallMatchesClosedForm) {
  const SystemParams params = paper_params();
  const auto masses = derive_masses(params);
  FullState s = FullState::hanging_equilibrium(params);
  s.payload_velocity = {0.3, -0.2, 0.1};
  const std::vector<dynamics::QuadInput> inputs(4);
  const auto rhs = [&](double, const FullState& state) {
    return dynamics::full_rhs(state, params, masses, inputs, DisturbanceSpec{});
  };
  integrator::IntegratorConfig cfg;
  const auto traj = integrator::simulate(s, rhs, cfg, 1.0);
  const double t = traj.times.back();
  const Eigen::Vector3d expected = s.payload_position + t * s.payload_velocity +
                                   0.5 * params.gravity * t * t * Eigen::Vector3d::UnitZ();
  EXPECT_LT((traj.states.back().payload_position - expected).norm(), 1e-10);
}

TEST(Simulate, ZeroDurationReturnsInitialState) {
  const SystemParams params = pendulum_params();
  const FullState s = FullState::hanging_equilibrium(params);
  integrator::IntegratorConfig cfg;
  const auto traj = integrator::simulate(
      s, [&](double, const FullState& state) { return zero_derivative(state); }, cfg, 0.0);
  EXPECT_EQ(traj.states.size(), 1u);
  EXPECT_EQ(traj.times.front(), 0.0);
}

TEST(Simulate, DeterministicRepetition) {
  const SystemParams params = paper_params();
  const auto masses = derive_masses(params);
  std::mt19937 rng(71);
  const FullState initial = testing::random_state(params, rng, 0.3);
  std::vector<dynamics::QuadInput> inputs(4);
  for (auto& in : inputs) in.thrust = 9.1;
  const auto rhs = [&](double, const FullState& state) {
    return dynamics::full_rhs(state, params, masses, inputs, DisturbanceSpec{});
  };
  integrator::IntegratorConfig cfg;
  const auto a = integrator::simulate(initial, rhs, cfg, 0.5);
  const auto b = integrator::simulate(initial, rhs, cfg, 0.5);
  for (size_t k = 0; k < a.states.size(); ++k) {
    EXPECT_EQ((a.states[k].payload_position - b.states[k].payload_position).norm(), 0.0);
    EXPECT_EQ((a.states[k].payload_attitude.matrix() -
               b.states[k].payload_attitude.matrix()).norm(),
              0.0);
  }
}

// Fourth-order convergence: halving dt shrinks the terminal error against a
// dt/8 reference by about 16x on a smooth open-loop trajectory.
TEST(Simulate, Rk4OrderCheck) {
  const SystemParams params = paper_params();
  const auto masses = derive_masses(params);
  std::mt19937 rng(73);
  const FullState initial = testing::random_state(params, rng, 0.2);
  std::vector<dynamics::QuadInput> inputs(4);
  for (auto& in : inputs) in.thrust = 9.1233;
  const auto rhs = [&](double, const FullState& state) {
    return dynamics::full_rhs(state, params, masses, inputs, DisturbanceSpec{});
  };
  const double duration = 0.5;
  const auto terminal = [&](double dt) {
    integrator::IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.renormalize_every = 0;
    return integrator::simulate(initial, rhs, cfg, duration).states.back();
  };
  const auto distance = [](const FullState& a, const FullState& b) {
    double d2 = (a.payload_position - b.payload_position).squaredNorm() +
                (a.payload_velocity - b.payload_velocity).squaredNorm() +
                (a.payload_attitude.matrix() - b.payload_attitude.matrix()).squaredNorm();
    for (size_t i = 0; i < a.cables.size(); ++i) {
      for (size_t j = 0; j < a.cables[i].directions.size(); ++j) {
        d2 += (a.cables[i].directions[j].vector() - b.cables[i].directions[j].vector())
                  .squaredNorm() +
              (a.cables[i].angular_rates[j] - b.cables[i].angular_rates[j]).squaredNorm();
      }
    }
    return std::sqrt(d2);
  };
  const FullState reference = terminal(2e-3 / 8.0);
  const double coarse = distance(terminal(2e-3), reference);
  const double fine = distance(terminal(1e-3), reference);
  const double factor = coarse / fine;
  EXPECT_GE(factor, 12.0);
  EXPECT_LE(factor, 20.0);
}

TEST(Simulate, ManifoldInvariantsHoldOverLongRuns) {
  const SystemParams params = paper_params();
  const auto masses = derive_masses(params);
  std::mt19937 rng(79);
  const FullState initial = testing::random_state(params, rng, 0.3);
  std::vector<dynamics::QuadInput> inputs(4);
  for (auto& in : inputs) in.thrust = 9.1;
  const auto rhs = [&](double, const FullState& state) {
    return dynamics::full_rhs(state, params, masses, inputs, DisturbanceSpec{});
  };
  integrator::IntegratorConfig cfg;
  const auto traj = integrator::simulate(initial, rhs, cfg, 10.0);
  for (size_t k = 0; k < traj.states.size(); k += 100) {
    const FullState& s = traj.states[k];
    EXPECT_LT(Rotation::orthogonality_defect(s.payload_attitude.matrix()), 1e-9);
    for (int i = 0; i < 4; ++i) {
      EXPECT_LT(Rotation::orthogonality_defect(s.quad_attitudes[i].matrix()), 1e-9);
      for (int j = 0; j < 5; ++j) {
        const Eigen::Vector3d q = s.cables[i].directions[j].vector();
        EXPECT_LT(std::abs(q.norm() - 1.0), 1e-9);
        EXPECT_LT(std::abs(q.dot(s.cables[i].angular_rates[j])), 1e-9);
      }
    }
  }
}

TEST(Simulate, RejectsNonPositiveStep) {
  const SystemParams params = pendulum_params();
  const FullState s = FullState::hanging_equilibrium(params);
  integrator::IntegratorConfig cfg;
  cfg.dt = 0.0;
  EXPECT_THROW(integrator::simulate(
                   s, [&](double, const FullState& state) { return zero_derivative(state); },
                   cfg, 1.0),
               ValidationError);
}

}  // namespace
}  // namespace multilift
