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

// Gain synthesis for the linearized model, Lyapunov equation solving, and the
// numeric stability-certificate checker for the full controller.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "multilift/linearization.hpp"
#include "multilift/model.hpp"

namespace multilift {
namespace gains {

// Continuous-time algebraic Riccati equation A'P + PA - P B R^-1 B' P + Q = 0,
// solved through the stable invariant subspace of the Hamiltonian matrix.
// Throws NumericalError if no stabilizing solution is found.
Eigen::MatrixXd solve_care(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const Eigen::MatrixXd& q, const Eigen::MatrixXd& r);

// A'P + PA = -Q for Hurwitz A and SPD Q, by Bartels-Stewart on the complex
// Schur form. Throws NumericalError if A is not Hurwitz or the residual
// ||A'P + PA + Q|| / ||Q|| exceeds 1e-8.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);

struct SynthesisWeights {
  double position = 10.0;
  double attitude = 8.0;
  double link = 1.0;
  double position_rate = 4.0;
  double attitude_rate = 2.0;
  double link_rate = 0.4;
  double control = 1.0;
};

struct StateGains {
  Eigen::MatrixXd position_gain;  // K_x, 3n x D
  Eigen::MatrixXd velocity_gain;  // K_xdot, 3n x D
};

// LQR on the first-order form of the linear model. Requires a controllable
// model (throws NumericalError otherwise); the returned gains make the
// closed-loop matrix Hurwitz.
StateGains synthesize_gains(const linearization::LinearModel& lm,
                            const SynthesisWeights& weights);

struct AttitudeGains {
  double kr = 1.5;       // attitude error
  double komega = 0.35;  // rate error
  double ki = 0.8;       // integral
  double c2 = 2.0;       // cross term in e_I and the Lyapunov analysis
};

// Everything the full controller and the certificate need.
struct GainSet {
  Eigen::MatrixXd position_gain;   // 3n x D
  Eigen::MatrixXd velocity_gain;   // 3n x D
  Eigen::MatrixXd integral_gain;   // K_z, 3 x D
  double sigma = 1.0;              // saturation bound on e_x
  std::vector<AttitudeGains> attitude;  // per quadrotor
  Eigen::MatrixXd lyapunov_q;      // 2D x 2D SPD
  Eigen::MatrixXd lyapunov_p;      // solution of A'P + PA = -Q
  Eigen::MatrixXd integral_map;    // (P * Bm)^T, D x 2D: drives e_x
  std::vector<double> load_share;  // kg carried per quadrotor at equilibrium
};

// K_z = [k_z I3, k_z I3, k_link(i) C, ...] with one 2-column block per link.
Eigen::MatrixXd build_integral_gain(const Layout& layout, double kz,
                                    const std::vector<double>& kz_link);

struct CertificateOptions {
  std::vector<double> psi1;    // attitude domain for the coupled analysis, < 1
  std::vector<double> psi2;    // attitude domain for the attitude analysis, < 2
  double command_rate_bound = 1.0;  // bound on ||Omega_ic||, rad/s
};

struct QuadCertificate {
  double b1 = 0.0;                // bound on ||u_id||
  double b2 = 0.0;                // bound on ||d_i||
  double psi1 = 0.0, psi2 = 0.0;  // domain parameters
  double alpha = 0.0;             // sqrt(psi1 (2 - psi1))
  double inertia_min = 0.0, inertia_max = 0.0;
  double c2_limit = 0.0;          // admissible upper bound on c_2i
  Eigen::Matrix2d w2;             // attitude decay matrix
  double w2_min_eigenvalue = 0.0;
  double w2_required = 0.0;       // lower bound on lambda_min(W_2i)
  Eigen::Matrix2d m21, m22;       // Lyapunov sandwich matrices
  Eigen::Matrix2d w;              // combined decay matrix
  double w_min_eigenvalue = 0.0;
  bool c2_ok = false;
  bool w2_positive = false;
  bool coupling_ok = false;       // lambda_m(W_2i) > required
  bool pass = false;
};

struct Certificate {
  std::vector<QuadCertificate> quads;
  double c3 = 0.0;      // 2 ||P Bm B||_2
  double k_max = 0.0;   // max(||K_x||, ||K_xdot||)
  double k_zm = 0.0;    // ||K_z||
  double alpha = 0.0;   // sum of alpha_i
  double q_min_eigenvalue = 0.0;
  double translational_margin = 0.0;  // lambda_min(Q) - 2 c3 K_max alpha
  double gamma_bound = 0.0;           // admissible size of the neglected remainder
  bool pass = false;
};

// Evaluates every inequality of the stability analysis; failures are reported
// in the flags, never thrown.
Certificate check_certificate(const GainSet& gains, const SystemParams& params,
                              const DerivedMasses& masses,
                              const linearization::LinearModel& lm,
                              const CertificateOptions& options);

struct LyapunovValue {
  double translational = 0.0;  // z1' P z1 + saturation integral
  double attitude = 0.0;       // sum of the per-quadrotor terms
  double total = 0.0;
};

struct AttitudeErrors {
  double psi = 0.0;
  Eigen::Vector3d attitude = Eigen::Vector3d::Zero();   // e_R
  Eigen::Vector3d rate = Eigen::Vector3d::Zero();       // e_Omega
  Eigen::Vector3d integral = Eigen::Vector3d::Zero();   // e_I
};

// Monitored Lyapunov function: V1 for the translational subsystem (with the
// saturation line integral from its shifted equilibrium p_eq) plus the
// per-quadrotor attitude terms.
LyapunovValue lyapunov_value(const Eigen::VectorXd& z1, const Eigen::VectorXd& ex,
                             const std::vector<AttitudeErrors>& errors,
                             const GainSet& gains, const SystemParams& params,
                             const linearization::LinearModel& lm,
                             const DisturbanceSpec& disturbances);

}  // namespace gains
}  // namespace multilift
