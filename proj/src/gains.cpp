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

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

namespace multilift {
namespace gains {
namespace {

double spectral_norm(const Eigen::MatrixXd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

double min_eigenvalue_sym(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
}

double max_real_eigenvalue(const Eigen::MatrixXd& m) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues().real().maxCoeff();
}

// Line integral int_{p_eq}^{ex} (Bbar Kz sat(mu) - b_dist) . dmu along the
// straight path. sat is piecewise linear there, so the integrand is piecewise
// quadratic and Simpson is exact between the sat crossings.
double saturation_integral(const Eigen::VectorXd& p_eq, const Eigen::VectorXd& ex,
                           const Eigen::MatrixXd& bbar_kz, const Eigen::VectorXd& b_dist,
                           double sigma) {
  const Eigen::VectorXd d = ex - p_eq;
  if (d.norm() == 0.0) return 0.0;
  std::vector<double> knots{0.0, 1.0};
  for (int k = 0; k < d.size(); ++k) {
    if (std::abs(d(k)) < 1e-300) continue;
    for (const double level : {sigma, -sigma}) {
      const double s = (level - p_eq(k)) / d(k);
      if (s > 0.0 && s < 1.0) knots.push_back(s);
    }
  }
  std::sort(knots.begin(), knots.end());
  const auto integrand = [&](double s) {
    const Eigen::VectorXd mu = p_eq + s * d;
    const Eigen::VectorXd sat = mu.cwiseMax(-sigma).cwiseMin(sigma);
    return (bbar_kz * sat - b_dist).dot(d);
  };
  double total = 0.0;
  for (size_t k = 0; k + 1 < knots.size(); ++k) {
    const double a = knots[k], b = knots[k + 1];
    if (b - a < 1e-15) continue;
    total += (b - a) / 6.0 * (integrand(a) + 4.0 * integrand(0.5 * (a + b)) + integrand(b));
  }
  return total;
}

}  // namespace

Eigen::MatrixXd solve_care(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const Eigen::MatrixXd& q, const Eigen::MatrixXd& r) {
  const int n = static_cast<int>(a.rows());
  Eigen::LLT<Eigen::MatrixXd> r_llt(r);
  if (r_llt.info() != Eigen::Success) {
    throw ValidationError("solve_care: control weight matrix is not SPD");
  }
  Eigen::MatrixXd h(2 * n, 2 * n);
  h.topLeftCorner(n, n) = a;
  h.topRightCorner(n, n) = -b * r_llt.solve(b.transpose());
  h.bottomLeftCorner(n, n) = -q;
  h.bottomRightCorner(n, n) = -a.transpose();

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h.cast<std::complex<double>>());
  if (es.info() != Eigen::Success) {
    throw NumericalError("solve_care: Hamiltonian eigendecomposition failed");
  }
  // The Hamiltonian spectrum is symmetric about the imaginary axis; take the
  // n leftmost eigenvalues so near-axis rounding cannot unbalance the split.
  std::vector<int> order(2 * n);
  for (int k = 0; k < 2 * n; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return es.eigenvalues()(a).real() < es.eigenvalues()(b).real();
  });
  Eigen::MatrixXcd stable(2 * n, n);
  for (int k = 0; k < n; ++k) stable.col(k) = es.eigenvectors().col(order[k]);
  // A wrong split leaves a large residual below, which is the real guard.
  const Eigen::MatrixXcd x1 = stable.topRows(n);
  const Eigen::MatrixXcd x2 = stable.bottomRows(n);
  const Eigen::MatrixXcd pt =
      x1.transpose().colPivHouseholderQr().solve(x2.transpose());
  Eigen::MatrixXd p = pt.transpose().real();
  p = ((p + p.transpose()) / 2.0).eval();

  const auto relative_residual = [&](const Eigen::MatrixXd& candidate) {
    const Eigen::MatrixXd linear_term = a.transpose() * candidate;
    const Eigen::MatrixXd quadratic_term =
        candidate * b * r_llt.solve(b.transpose()) * candidate;
    const double scale = q.norm() + 2.0 * linear_term.norm() + quadratic_term.norm();
    return (linear_term + linear_term.transpose() - quadratic_term + q).norm() /
           std::max(1.0, scale);
  };

  // Newton (Kleinman) refinement: each step solves one Lyapunov equation and
  // repairs the conditioning loss of the invariant-subspace extraction.
  double residual = relative_residual(p);
  for (int iter = 0; iter < 6 && residual > 1e-9; ++iter) {
    const Eigen::MatrixXd k = r_llt.solve(b.transpose() * p);
    const Eigen::MatrixXd a_closed = a - b * k;
    if (Eigen::EigenSolver<Eigen::MatrixXd>(a_closed, false)
            .eigenvalues().real().maxCoeff() >= 0.0) {
      break;
    }
    const Eigen::MatrixXd q_closed = q + k.transpose() * r * k;
    const Eigen::MatrixXd refined = solve_lyapunov(a_closed, q_closed);
    const double refined_residual = relative_residual(refined);
    if (refined_residual >= residual) break;
    p = refined;
    residual = refined_residual;
  }
  if (residual > 1e-7) {
    throw NumericalError("solve_care: residual too large, solution rejected");
  }
  return p;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  const int n = static_cast<int>(a.rows());
  if ((q - q.transpose()).norm() > 1e-9 * std::max(1.0, q.norm()) ||
      Eigen::LLT<Eigen::MatrixXd>(q).info() != Eigen::Success) {
    throw ValidationError("solve_lyapunov: Q must be symmetric positive definite");
  }
  if (max_real_eigenvalue(a) >= 0.0) {
    throw NumericalError("solve_lyapunov: matrix is not Hurwitz");
  }

  // A'P + PA = -Q  <=>  M P + P M^H = -Q with M = A'; Schur-transform M and
  // back-substitute one column at a time (each solve is triangular).
  const Eigen::MatrixXcd m = a.transpose().cast<std::complex<double>>();
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(m);
  if (schur.info() != Eigen::Success) {
    throw NumericalError("solve_lyapunov: Schur decomposition failed");
  }
  const Eigen::MatrixXcd& u = schur.matrixU();
  const Eigen::MatrixXcd& t = schur.matrixT();
  const Eigen::MatrixXcd c = -u.adjoint() * q.cast<std::complex<double>>() * u;

  Eigen::MatrixXcd y(n, n);
  Eigen::MatrixXcd shifted(n, n);
  for (int k = n - 1; k >= 0; --k) {
    Eigen::VectorXcd rhs = c.col(k);
    if (k + 1 < n) {
      rhs -= y.rightCols(n - 1 - k) * t.row(k).tail(n - 1 - k).adjoint();
    }
    shifted = t;
    shifted.diagonal().array() += std::conj(t(k, k));
    y.col(k) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  Eigen::MatrixXd p = (u * y * u.adjoint()).real();
  p = ((p + p.transpose()) / 2.0).eval();

  const double residual = (a.transpose() * p + p * a + q).norm() / q.norm();
  if (residual > 1e-8) {
    throw NumericalError("solve_lyapunov: residual " + std::to_string(residual));
  }
  return p;
}

StateGains synthesize_gains(const linearization::LinearModel& lm,
                            const SynthesisWeights& weights) {
  const int d = lm.dim;
  const int rank = linearization::controllability_rank(lm);
  if (rank < 2 * d) {
    throw NumericalError("synthesize_gains: model is not controllable (rank " +
                         std::to_string(rank) + " of " + std::to_string(2 * d) + ")");
  }
  const linearization::ClosedLoopModel open_loop = linearization::build_closed_loop(
      lm, Eigen::MatrixXd::Zero(lm.input_dim, d), Eigen::MatrixXd::Zero(lm.input_dim, d));
  const Eigen::MatrixXd b = open_loop.input_map * lm.input;

  Eigen::VectorXd state_weight(2 * d);
  state_weight.segment(0, 3).setConstant(weights.position);
  state_weight.segment(3, 3).setConstant(weights.attitude);
  state_weight.segment(6, d - 6).setConstant(weights.link);
  state_weight.segment(d, 3).setConstant(weights.position_rate);
  state_weight.segment(d + 3, 3).setConstant(weights.attitude_rate);
  state_weight.segment(d + 6, d - 6).setConstant(weights.link_rate);
  const Eigen::MatrixXd q_lqr = state_weight.asDiagonal();
  const Eigen::MatrixXd r =
      weights.control * Eigen::MatrixXd::Identity(lm.input_dim, lm.input_dim);

  const Eigen::MatrixXd p = solve_care(open_loop.dynamics, b, q_lqr, r);
  const Eigen::MatrixXd k = (b.transpose() * p) / weights.control;

  StateGains out;
  out.position_gain = k.leftCols(d);
  out.velocity_gain = k.rightCols(d);

  const auto closed =
      linearization::build_closed_loop(lm, out.position_gain, out.velocity_gain);
  if (max_real_eigenvalue(closed.dynamics) >= 0.0) {
    throw NumericalError("synthesize_gains: closed loop is not Hurwitz");
  }
  return out;
}

Eigen::MatrixXd build_integral_gain(const Layout& layout, double kz,
                                    const std::vector<double>& kz_link) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(3, layout.reduced_dof);
  k.block<3, 3>(0, 0) = kz * Eigen::Matrix3d::Identity();
  k.block<3, 3>(0, 3) = kz * Eigen::Matrix3d::Identity();
  for (int i = 0; i < layout.quad_count; ++i) {
    for (int j = 0; j < layout.links_per_cable[i]; ++j) {
      k.block<2, 2>(0, layout.reduced_block(i, j)) =
          kz_link[i] * Eigen::Matrix2d::Identity();
    }
  }
  return k;
}

Certificate check_certificate(const GainSet& gains, const SystemParams& params,
                              const DerivedMasses& masses,
                              const linearization::LinearModel& lm,
                              const CertificateOptions& options) {
  const int n = params.quad_count();
  Certificate cert;
  cert.quads.resize(n);

  Eigen::MatrixXd bm = Eigen::MatrixXd::Zero(2 * lm.dim, lm.dim);
  bm.bottomRows(lm.dim) = lm.mass.partialPivLu().inverse();
  cert.c3 = 2.0 * spectral_norm(gains.lyapunov_p * bm * lm.input);
  cert.k_max = std::max(spectral_norm(gains.position_gain), spectral_norm(gains.velocity_gain));
  cert.k_zm = spectral_norm(gains.integral_gain);
  cert.q_min_eigenvalue = min_eigenvalue_sym(gains.lyapunov_q);

  cert.alpha = 0.0;
  for (int i = 0; i < n; ++i) {
    QuadCertificate& qc = cert.quads[i];
    qc.psi1 = options.psi1[i];
    qc.psi2 = options.psi2[i];
    qc.alpha = std::sqrt(qc.psi1 * (2.0 - qc.psi1));
    cert.alpha += qc.alpha;
  }

  const double denom = cert.q_min_eigenvalue - 2.0 * cert.c3 * cert.k_max * cert.alpha;
  cert.translational_margin = denom;

  double w_min_all = std::numeric_limits<double>::infinity();
  bool all_pass = denom > 0.0;
  for (int i = 0; i < n; ++i) {
    QuadCertificate& qc = cert.quads[i];
    const auto& ag = gains.attitude[i];
    const Eigen::Matrix3d j = params.quadrotors[i].inertia;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(j);
    qc.inertia_min = eig.eigenvalues().minCoeff();
    qc.inertia_max = eig.eigenvalues().maxCoeff();
    qc.b1 = (masses.chain_mass[i] + gains.load_share[i]) * params.gravity;
    const Eigen::Matrix3d d_mat = 2.0 * j - j.trace() * Eigen::Matrix3d::Identity();
    qc.b2 = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(d_mat)
                .eigenvalues().cwiseAbs().maxCoeff() * options.command_rate_bound;

    qc.c2_limit = std::min(std::sqrt(ag.kr * qc.inertia_min) / qc.inertia_max,
                           4.0 * ag.komega /
                               (8.0 * ag.kr * qc.inertia_max +
                                (ag.komega + qc.b2) * (ag.komega + qc.b2)));
    qc.c2_ok = ag.c2 < qc.c2_limit;

    qc.w2 << ag.c2 * ag.kr, -0.5 * ag.c2 * (ag.komega + qc.b2),
        -0.5 * ag.c2 * (ag.komega + qc.b2), ag.komega - 2.0 * ag.c2 * qc.inertia_max;
    qc.w2_min_eigenvalue =
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(qc.w2).eigenvalues().minCoeff();
    qc.w2_positive = qc.w2_min_eigenvalue > 0.0;

    qc.m21 << ag.kr, -ag.c2 * qc.inertia_max, -ag.c2 * qc.inertia_max, qc.inertia_min;
    qc.m21 *= 0.5;
    qc.m22 << 2.0 * ag.kr / (2.0 - qc.psi2), ag.c2 * qc.inertia_max,
        ag.c2 * qc.inertia_max, qc.inertia_max;
    qc.m22 *= 0.5;

    const double off = 0.5 * cert.c3 * (qc.b1 + gains.sigma * cert.k_zm);
    qc.w2_required = denom > 0.0 ? n * off * off / denom
                                 : std::numeric_limits<double>::infinity();
    qc.coupling_ok = qc.w2_min_eigenvalue > qc.w2_required;

    qc.w << denom / n, -off, -off, qc.w2_min_eigenvalue;
    qc.w_min_eigenvalue =
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(qc.w).eigenvalues().minCoeff();
    w_min_all = std::min(w_min_all, qc.w_min_eigenvalue);

    qc.pass = qc.c2_ok && qc.w2_positive && qc.coupling_ok && qc.w_min_eigenvalue > 0.0 &&
              denom > 0.0;
    all_pass = all_pass && qc.pass;
  }
  cert.gamma_bound = n * w_min_all / (2.0 * spectral_norm(gains.lyapunov_p));
  cert.pass = all_pass;
  return cert;
}

LyapunovValue lyapunov_value(const Eigen::VectorXd& z1, const Eigen::VectorXd& ex,
                             const std::vector<AttitudeErrors>& errors,
                             const GainSet& gains, const SystemParams& params,
                             const linearization::LinearModel& lm,
                             const DisturbanceSpec& disturbances) {
  const int n = params.quad_count();
  LyapunovValue v;
  v.translational = z1.dot(gains.lyapunov_p * z1);

  // Column sum of B (the integral action is common to all quadrotors) and the
  // disturbance image.
  Eigen::MatrixXd bbar = Eigen::MatrixXd::Zero(lm.dim, 3);
  Eigen::VectorXd b_dist = Eigen::VectorXd::Zero(lm.dim);
  for (int i = 0; i < n; ++i) {
    bbar += lm.input.middleCols(3 * i, 3);
    b_dist += lm.input.middleCols(3 * i, 3) * disturbances.force_on(i);
  }
  Eigen::VectorXd p_eq = Eigen::VectorXd::Zero(lm.dim);
  if (!disturbances.empty()) {
    const double kz = gains.integral_gain(0, 0);
    const Eigen::Vector3d w = bbar.colPivHouseholderQr().solve(b_dist);
    if (kz > 0.0) p_eq.head<3>() = w / kz;
  }
  v.translational += 2.0 * saturation_integral(p_eq, ex, bbar * gains.integral_gain,
                                               b_dist, gains.sigma);

  for (int i = 0; i < n; ++i) {
    const auto& ag = gains.attitude[i];
    const auto& err = errors[i];
    const Eigen::Vector3d shifted = err.integral - disturbances.moment_on(i) / ag.ki;
    const Eigen::Matrix3d& inertia = params.quadrotors[i].inertia;
    // Cross term carries the inertia: the quadratic sandwich bounds and the
    // cancellation in Vdot both require c2 e_R . J e_Omega.
    v.attitude += 0.5 * err.rate.dot(inertia * err.rate) + ag.kr * err.psi +
                  ag.c2 * err.attitude.dot(inertia * err.rate) +
                  0.5 * ag.ki * shifted.squaredNorm();
  }
  v.total = v.translational + v.attitude;
  return v;
}

}  // namespace gains
}  // namespace multilift
