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

// Command-line front end: run scenarios, inspect the linearized model,
// synthesize gains, evaluate the stability certificate, and run the
// finite-difference validations.

#include <cstdio>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "multilift/oracle.hpp"
#include "multilift/sim.hpp"

namespace {

using namespace multilift;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct CommonArgs {
  std::string scenario;
  std::string out_dir = "out";
  double dt = -1.0;
  double duration = -1.0;
  std::string format = "csv";
  bool dump = false;
};

sim::Scenario load(const CommonArgs& args) {
  sim::Scenario scenario = sim::load_scenario(args.scenario);
  if (args.dt > 0.0) scenario.integrator.dt = args.dt;
  if (args.duration >= 0.0) scenario.duration = args.duration;
  scenario.validate();
  return scenario;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("scenario", args.scenario, "built-in name or JSON file")->required();
  cmd->add_option("--out-dir", args.out_dir, "output directory");
  cmd->add_option("--dt", args.dt, "override integrator step, s");
  cmd->add_option("--duration", args.duration, "override duration, s");
  cmd->add_option("--format", args.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--dump-matrices", args.dump, "write linear model matrices");
}

int cmd_run(const CommonArgs& args) {
  const sim::Scenario scenario = load(args);
  const sim::RunResult result = sim::run(scenario);
  sim::export_run(result, scenario,
                  args.format == "json" ? sim::ExportFormat::kJson : sim::ExportFormat::kCsv,
                  args.out_dir);
  if (args.dump) sim::dump_matrices(result.setup, args.out_dir);
  std::printf("scenario           %s\n", scenario.name.c_str());
  std::printf("steps              %zu\n", result.trajectory.times.size() - 1);
  std::printf("terminal |x0-x0d|  %.6g m\n", result.summary.terminal_position_error);
  std::printf("terminal e_q       %.6g\n", result.summary.terminal_link_direction_error);
  std::printf("terminal e_omega   %.6g rad/s\n", result.summary.terminal_link_rate_error);
  std::printf("certificate        %s\n", result.setup.certificate.pass ? "pass" : "fail");
  std::printf("wall time          %.2f s\n", result.summary.wall_seconds);
  std::printf("results written to %s\n", args.out_dir.c_str());
  return 0;
}

int cmd_linearize(const CommonArgs& args) {
  const sim::Scenario scenario = load(args);
  const DerivedMasses masses = derive_masses(scenario.params);
  const auto lm =
      linearization::build_linear_model(scenario.params, masses, scenario.load_share);
  const auto fd = linearization::finite_difference_linearize(scenario.params, masses);
  const double mass_err = (lm.mass - fd.mass).norm() / fd.mass.norm();
  const double stiff_err = (lm.stiffness - fd.stiffness).norm() / fd.stiffness.norm();
  const double input_err = (lm.input - fd.input).norm() / fd.input.norm();
  const int rank = linearization::controllability_rank(lm);
  std::printf("state dimension    %d (first-order %d)\n", lm.dim, 2 * lm.dim);
  std::printf("mass rel. error    %.3e\n", mass_err);
  std::printf("stiffness rel. err %.3e\n", stiff_err);
  std::printf("input rel. error   %.3e\n", input_err);
  std::printf("controllability    rank %d of %d\n", rank, 2 * lm.dim);
  if (args.dump) {
    const sim::Setup setup = sim::prepare(scenario);
    sim::dump_matrices(setup, args.out_dir);
    std::printf("matrices written to %s\n", args.out_dir.c_str());
  }
  const bool ok = mass_err < 1e-4 && stiff_err < 1e-4 && input_err < 1e-4;
  if (!ok) std::printf("finite-difference check FAILED\n");
  return ok ? 0 : kExitNumerical;
}

int cmd_gains(const CommonArgs& args) {
  const sim::Scenario scenario = load(args);
  const sim::Setup setup = sim::prepare(scenario);
  const auto closed = linearization::build_closed_loop(
      setup.linear_model, setup.gain_set.position_gain, setup.gain_set.velocity_gain);
  const double spectral_abscissa =
      Eigen::EigenSolver<Eigen::MatrixXd>(closed.dynamics, false)
          .eigenvalues().real().maxCoeff();
  std::printf("position gain norm %.6g\n", setup.gain_set.position_gain.norm());
  std::printf("velocity gain norm %.6g\n", setup.gain_set.velocity_gain.norm());
  std::printf("spectral abscissa  %.6g\n", spectral_abscissa);
  std::printf("lyapunov residual  %.3e\n",
              (closed.dynamics.transpose() * setup.gain_set.lyapunov_p +
               setup.gain_set.lyapunov_p * closed.dynamics + setup.gain_set.lyapunov_q)
                      .norm() /
                  setup.gain_set.lyapunov_q.norm());
  if (args.dump) sim::dump_matrices(setup, args.out_dir);
  return 0;
}

int cmd_certify(const CommonArgs& args) {
  const sim::Scenario scenario = load(args);
  const sim::Setup setup = sim::prepare(scenario);
  const auto& cert = setup.certificate;
  std::printf("c3 = %.6g, K_max = %.6g, K_zm = %.6g, alpha = %.6g\n", cert.c3, cert.k_max,
              cert.k_zm, cert.alpha);
  std::printf("lambda_min(Q) = %.6g, translational margin = %.6g\n", cert.q_min_eigenvalue,
              cert.translational_margin);
  for (size_t i = 0; i < cert.quads.size(); ++i) {
    const auto& qc = cert.quads[i];
    std::printf(
        "quad %zu: c2 %s (limit %.4g)  W2 %s (lambda_min %.4g, required %.4g)  W %s\n", i,
        qc.c2_ok ? "ok" : "VIOLATED", qc.c2_limit, qc.w2_positive ? "pd" : "NOT PD",
        qc.w2_min_eigenvalue, qc.w2_required,
        qc.w_min_eigenvalue > 0.0 ? "pd" : "NOT PD");
  }
  std::printf("gamma bound        %.6g\n", cert.gamma_bound);
  std::printf("certificate        %s\n", cert.pass ? "PASS" : "FAIL");
  return 0;
}

// Random state in a neighbourhood of the hanging equilibrium.
FullState random_state(const SystemParams& params, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto vec = [&](double scale) {
    return (scale * Eigen::Vector3d(u(rng), u(rng), u(rng))).eval();
  };
  FullState s = FullState::hanging_equilibrium(params);
  s.payload_position = vec(1.0);
  s.payload_velocity = vec(0.5);
  s.payload_attitude = Rotation::about_axis(vec(0.4));
  s.payload_angular_velocity = vec(0.5);
  for (int i = 0; i < params.quad_count(); ++i) {
    s.quad_attitudes[i] = Rotation::about_axis(vec(0.5));
    s.quad_angular_rates[i] = vec(0.5);
    for (int j = 0; j < params.link_count(i); ++j) {
      const Eigen::Vector3d q = (Eigen::Vector3d::UnitZ() + vec(0.35)).normalized();
      Eigen::Vector3d w = vec(0.6);
      w -= q.dot(w) * q;
      s.cables[i].directions[j] = UnitVector::normalized(q);
      s.cables[i].angular_rates[j] = w;
    }
  }
  return s;
}

int cmd_oracle(const CommonArgs& args, int samples, unsigned seed) {
  const sim::Scenario scenario = load(args);
  const SystemParams& params = scenario.params;
  const DerivedMasses masses = derive_masses(params);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uf(2.0, 12.0);

  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const FullState state = random_state(params, rng);
    std::vector<dynamics::QuadInput> inputs(params.quad_count());
    std::vector<Eigen::Vector3d> forces(params.quad_count());
    for (int i = 0; i < params.quad_count(); ++i) {
      inputs[i].thrust = uf(rng);
      forces[i] = -inputs[i].thrust * (state.quad_attitudes[i].matrix() *
                                       Eigen::Vector3d::UnitZ());
    }
    const std::vector<Eigen::Vector3d> zero(params.quad_count(), Eigen::Vector3d::Zero());
    const auto rhs = dynamics::full_rhs(state, params, masses, inputs, DisturbanceSpec{});
    const auto ref = oracle::reference_accelerations(state, params, forces, zero);

    double num = (rhs.payload_velocity_rate - ref.payload_linear).squaredNorm() +
                 (rhs.payload_body_rate_dot - ref.payload_angular).squaredNorm();
    double den = ref.payload_linear.squaredNorm() + ref.payload_angular.squaredNorm();
    for (int i = 0; i < params.quad_count(); ++i) {
      for (int j = 0; j < params.link_count(i); ++j) {
        num += (rhs.link_rate_dots[i][j] - ref.link_angular[i][j]).squaredNorm();
        den += ref.link_angular[i][j].squaredNorm();
      }
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  std::printf("dynamics oracle: %d states, worst rel. error %.3e\n", samples, worst);

  const auto lm = linearization::build_linear_model(params, masses, scenario.load_share);
  const auto fd = linearization::finite_difference_linearize(params, masses);
  const double mass_err = (lm.mass - fd.mass).norm() / fd.mass.norm();
  const double stiff_err = (lm.stiffness - fd.stiffness).norm() / fd.stiffness.norm();
  const double input_err = (lm.input - fd.input).norm() / fd.input.norm();
  std::printf("linearization: mass %.3e stiffness %.3e input %.3e\n", mass_err, stiff_err,
              input_err);

  const bool ok = worst < 1e-6 && mass_err < 1e-4 && stiff_err < 1e-4 && input_err < 1e-4;
  std::printf("oracle %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and geometric control of quadrotor teams carrying a "
               "cable-slung rigid payload"};
  app.require_subcommand(1);

  CommonArgs run_args, lin_args, gains_args, cert_args, oracle_args;
  int oracle_samples = 10;
  unsigned oracle_seed = 2024;

  add_common(app.add_subcommand("run", "closed-loop simulation"), run_args);
  add_common(app.add_subcommand("linearize", "linear model + finite-difference check"),
             lin_args);
  add_common(app.add_subcommand("gains", "gain synthesis report"), gains_args);
  add_common(app.add_subcommand("certify", "stability certificate report"), cert_args);
  auto* oracle_cmd = app.add_subcommand("oracle", "finite-difference dynamics validation");
  add_common(oracle_cmd, oracle_args);
  oracle_cmd->add_option("--samples", oracle_samples, "random states to check");
  oracle_cmd->add_option("--seed", oracle_seed, "random seed");

  try {
    app.parse(argc, argv);
    if (app.got_subcommand("run")) return cmd_run(run_args);
    if (app.got_subcommand("linearize")) return cmd_linearize(lin_args);
    if (app.got_subcommand("gains")) return cmd_gains(gains_args);
    if (app.got_subcommand("certify")) return cmd_certify(cert_args);
    if (app.got_subcommand("oracle"))
      return cmd_oracle(oracle_args, oracle_samples, oracle_seed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
