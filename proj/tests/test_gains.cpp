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

#include "multilift/gains.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "multilift/sim.hpp"
#include "support/test_helpers.hpp"

namespace multilift {
namespace {

using testing::paper_params;

TEST(SolveCare, DoubleIntegratorClosedForm) {
  Eigen::MatrixXd a(2, 2), b(2, 1);
  a << 0, 1, 0, 0;
  b << 0, 1;
  const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd r = Eigen::MatrixXd::Identity(1, 1);
  const Eigen::MatrixXd p = gains::solve_care(a, b, q, r);
  Eigen::MatrixXd expected(2, 2);
  expected << std::sqrt(3.0), 1.0, 1.0, std::sqrt(3.0);
  EXPECT_LT((p - expected).norm(), 1e-10);
  const Eigen::MatrixXd k = b.transpose() * p;  // [1, sqrt(3)]
  EXPECT_NEAR(k(0, 0), 1.0, 1e-10);
  EXPECT_NEAR(k(0, 1), std::sqrt(3.0), 1e-10);
}

TEST(SolveLyapunov, ScalarFamilyClosedForm) {
  const Eigen::MatrixXd a = -0.5 * Eigen::MatrixXd::Identity(4, 4);
  const Eigen::MatrixXd p = gains::solve_lyapunov(a, Eigen::MatrixXd::Identity(4, 4));
  EXPECT_LT((p - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-12);
}

TEST(SolveLyapunov, RandomStableSystemsMeetResidual) {
  std::mt19937 rng(97);
  std::normal_distribution<double> g(0.0, 1.0);
  for (const int n : {7, 30, 100}) {
    Eigen::MatrixXd m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m(r, c) = g(rng);
    const double shift =
        Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues().real().maxCoeff();
    const Eigen::MatrixXd a = m - (shift + 0.5) * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd q = Eigen::MatrixXd::Random(n, n);
    q = (q * q.transpose() + Eigen::MatrixXd::Identity(n, n)).eval();
    const Eigen::MatrixXd p = gains::solve_lyapunov(a, q);
    EXPECT_LT((a.transpose() * p + p * a + q).norm() / q.norm(), 1e-8);
    EXPECT_LT((p - p.transpose()).norm(), 1e-10 * p.norm());
    EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(p).info(), Eigen::Success);  // P SPD
  }
}

TEST(SolveLyapunov, RejectsUnstableMatrix) {
  Eigen::MatrixXd a = -Eigen::MatrixXd::Identity(3, 3);
  a(1, 1) = 0.1;
  EXPECT_THROW(gains::solve_lyapunov(a, Eigen::MatrixXd::Identity(3, 3)), NumericalError);
}

TEST(SynthesizeGains, PaperConfigurationIsHurwitz) {
  const SystemParams params = paper_params();
  const auto lm = linearization::build_linear_model(params, derive_masses(params));
  const auto sg = gains::synthesize_gains(lm, gains::SynthesisWeights{});
  const auto cl = linearization::build_closed_loop(lm, sg.position_gain, sg.velocity_gain);
  const double abscissa =
      Eigen::EigenSolver<Eigen::MatrixXd>(cl.dynamics, false).eigenvalues().real().maxCoeff();
  EXPECT_LT(abscissa, 0.0);
}

TEST(SynthesizeGains, ExpensiveControlLimitShrinksGains) {
  const SystemParams params = paper_params();
  const auto lm = linearization::build_linear_model(params, derive_masses(params));
  gains::SynthesisWeights weights;
  double previous = std::numeric_limits<double>::infinity();
  for (const double penalty : {1e4, 1e6, 1e8}) {
    weights.control = penalty;
    const auto sg = gains::synthesize_gains(lm, weights);
    const double norm = std::max(sg.position_gain.norm(), sg.velocity_gain.norm());
    EXPECT_LT(norm, previous);
    previous = norm;
  }
  EXPECT_LT(previous, 0.1);

  // The clean vanishing-gain limit on a well-conditioned plant.
  Eigen::MatrixXd a(2, 2), b(2, 1);
  a << 0, 1, 0, 0;
  b << 0, 1;
  const Eigen::MatrixXd p = gains::solve_care(
      a, b, Eigen::MatrixXd::Identity(2, 2), 1e10 * Eigen::MatrixXd::Identity(1, 1));
  EXPECT_LT((b.transpose() * p / 1e10).norm(), 1e-2);
}

TEST(SynthesizeGains, UncontrollableModelRejected) {
  const SystemParams params = paper_params();
  auto lm = linearization::build_linear_model(params, derive_masses(params));
  lm.input.setZero();
  EXPECT_THROW(gains::synthesize_gains(lm, gains::SynthesisWeights{}), NumericalError);
}

TEST(IntegralGain, MatchesBlockStructure) {
  const SystemParams params = paper_params();
  const Layout layout(params);
  const Eigen::MatrixXd k =
      gains::build_integral_gain(layout, 0.4, std::vector<double>(4, 0.04));
  EXPECT_TRUE((k.block<3, 3>(0, 0).isApprox(0.4 * Eigen::Matrix3d::Identity(), 0.0)));
  EXPECT_TRUE((k.block<3, 3>(0, 3).isApprox(0.4 * Eigen::Matrix3d::Identity(), 0.0)));
  EXPECT_TRUE((k.block<2, 2>(0, layout.reduced_block(2, 1))
                   .isApprox(0.04 * Eigen::Matrix2d::Identity(), 0.0)));
  EXPECT_EQ(k.rows(), 3);
  EXPECT_EQ(k.cols(), 46);
}

class CertificateTest : public ::testing::Test {
 protected:
  void SetUp() override {
    scenario_ = sim::builtin_scenario("paper-case1");
    setup_ = sim::prepare(scenario_);
    masses_ = derive_masses(scenario_.params);
  }

  gains::Certificate evaluate(double c2, double psi1 = 0.1) {
    auto gains_copy = setup_.gain_set;
    for (auto& ag : gains_copy.attitude) ag.c2 = c2;
    gains::CertificateOptions options;
    options.psi1.assign(4, psi1);
    options.psi2.assign(4, 1.0);
    options.command_rate_bound = 1.0;
    return gains::check_certificate(gains_copy, scenario_.params, masses_,
                                    setup_.linear_model, options);
  }

  sim::Scenario scenario_;
  sim::Setup setup_;
  DerivedMasses masses_;
};

TEST_F(CertificateTest, SmallC2PassesAttitudeLayer) {
  const auto cert = evaluate(1e-3);
  for (const auto& qc : cert.quads) {
    EXPECT_TRUE(qc.c2_ok);
    EXPECT_TRUE(qc.w2_positive);
    EXPECT_GT(qc.w2_min_eigenvalue, 0.0);
    // Lower sandwich matrix valid as well.
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(qc.m21).eigenvalues().minCoeff(),
              0.0);
  }
}

TEST_F(CertificateTest, C2AboveTheBoundBreaksW2) {
  const auto ok = evaluate(1e-3);
  // Large enough to make the rate entry of W2 non-positive, which also
  // violates the printed admissibility bound.
  const double komega = setup_.gain_set.attitude[0].komega;
  const double lambda_max = ok.quads[0].inertia_max;
  const double violating = std::max(1.5 * ok.quads[0].c2_limit,
                                    1.05 * komega / (2.0 * lambda_max));
  const auto cert = evaluate(violating);
  for (const auto& qc : cert.quads) {
    EXPECT_FALSE(qc.c2_ok);
    EXPECT_LE(qc.w2_min_eigenvalue, 0.0);
    EXPECT_FALSE(qc.w2_positive);
    EXPECT_FALSE(qc.pass);
  }
  EXPECT_FALSE(cert.pass);
}

TEST_F(CertificateTest, VanishingDomainRecoversPlainQCondition) {
  const auto cert = evaluate(1e-3, 1e-14);
  EXPECT_NEAR(cert.alpha, 0.0, 1e-6);
  EXPECT_NEAR(cert.translational_margin, cert.q_min_eigenvalue,
              0.01 * cert.q_min_eigenvalue);
}

TEST_F(CertificateTest, StrongerAttitudeGainsNeverRegress) {
  auto base_gains = setup_.gain_set;
  gains::CertificateOptions options;
  options.psi1.assign(4, 0.1);
  options.psi2.assign(4, 1.0);
  for (const double kr : {1.5, 3.0, 6.0, 12.0}) {
    for (const double komega : {0.35, 0.7, 1.4}) {
      auto g = base_gains;
      for (auto& ag : g.attitude) {
        ag.kr = kr;
        ag.komega = komega;
        ag.c2 = 1e-3;
      }
      const auto cert = gains::check_certificate(g, scenario_.params, masses_,
                                                 setup_.linear_model, options);
      for (const auto& qc : cert.quads) {
        EXPECT_TRUE(qc.c2_ok);
        EXPECT_TRUE(qc.w2_positive);
      }
    }
  }
}

TEST(LyapunovValue, ZeroAtTheShiftedEquilibrium) {
  const auto scenario = sim::builtin_scenario("disturbance-rejection");
  const auto setup = sim::prepare(scenario);
  const int d = setup.linear_model.dim;
  const Eigen::VectorXd z1 = Eigen::VectorXd::Zero(2 * d);

  // p_eq for a uniform force disturbance: head block Delta / kz.
  Eigen::VectorXd ex = Eigen::VectorXd::Zero(d);
  ex.head<3>() = scenario.disturbances.force_on(0) / scenario.gains.kz;
  std::vector<gains::AttitudeErrors> errors(4);
  for (int i = 0; i < 4; ++i) {
    errors[i].integral = scenario.disturbances.moment_on(i) / scenario.gains.attitude.ki;
  }
  const auto v = gains::lyapunov_value(z1, ex, errors, setup.gain_set, scenario.params,
                                       setup.linear_model, scenario.disturbances);
  EXPECT_NEAR(v.total, 0.0, 1e-12);
}

TEST(LyapunovValue, AttitudeTermRespectsSandwichBounds) {
  const auto scenario = sim::builtin_scenario("paper-case1");
  const auto setup = sim::prepare(scenario);
  const int d = setup.linear_model.dim;
  const double psi2 = 1.0;
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    // Attitude error pair drawn inside the psi2 domain.
    Eigen::Vector3d axis(u(rng), u(rng), u(rng));
    axis.normalize();
    const double psi = 0.999 * psi2 * std::abs(u(rng));
    const double angle = std::acos(1.0 - psi);
    const Rotation rc;
    const Rotation r = Rotation::about_axis(angle * axis);
    const auto err = attitude_error(r, rc);

    std::vector<gains::AttitudeErrors> errors(4);
    errors[0].psi = err.psi;
    errors[0].attitude = err.vector;
    errors[0].rate = Eigen::Vector3d(u(rng), u(rng), u(rng));

    const auto v = gains::lyapunov_value(Eigen::VectorXd::Zero(2 * d),
                                         Eigen::VectorXd::Zero(d), errors, setup.gain_set,
                                         scenario.params, setup.linear_model,
                                         DisturbanceSpec{});
    const auto& qc_gain = setup.gain_set.attitude[0];
    const Eigen::Matrix3d j = scenario.params.quadrotors[0].inertia;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(j);
    const double lm_min = eig.eigenvalues().minCoeff();
    const double lm_max = eig.eigenvalues().maxCoeff();
    Eigen::Vector2d z2(err.vector.norm(), errors[0].rate.norm());
    Eigen::Matrix2d m21, m22;
    m21 << qc_gain.kr, -qc_gain.c2 * lm_max, -qc_gain.c2 * lm_max, lm_min;
    m22 << 2.0 * qc_gain.kr / (2.0 - psi2), qc_gain.c2 * lm_max, qc_gain.c2 * lm_max, lm_max;
    const double lower = 0.5 * z2.dot(m21 * z2);
    const double upper = 0.5 * z2.dot(m22 * z2);
    EXPECT_GE(v.attitude, lower - 1e-12);
    EXPECT_LE(v.attitude, upper + 1e-12);
  }
}

}  // namespace
}  // namespace multilift
