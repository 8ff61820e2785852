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

// Closed-loop scenario execution, per-step metrics, and result export.

#pragma once

#include <string>
#include <vector>

#include "multilift/scenario.hpp"

namespace multilift {
namespace sim {

// Everything derived from a scenario before stepping: the linear model, the
// synthesized gain set, and the certificate report.
struct Setup {
  linearization::LinearModel linear_model;
  gains::GainSet gain_set;
  gains::Certificate certificate;
};

Setup prepare(const Scenario& scenario);

struct Metrics {
  std::vector<double> time;
  std::vector<double> position_error;   // ||x0 - x0d||
  std::vector<double> payload_psi;      // attitude error vs identity
  std::vector<double> link_direction_error;  // e_q
  std::vector<double> link_rate_error;       // e_omega
  std::vector<std::vector<double>> quad_psi;         // [quad][step]
  std::vector<std::vector<double>> quad_rate_error;  // ||e_Omega_i||
  std::vector<std::vector<double>> thrust;           // f_i
  std::vector<std::vector<double>> integral_gap;     // ||e_Ii - Delta_Ri / kI||
  std::vector<double> lyapunov_translational;
  std::vector<double> lyapunov_attitude;
  std::vector<double> lyapunov_total;
  std::vector<double> kinetic_energy;
  std::vector<double> potential_energy;
  std::vector<double> ex_sup;  // ||e_x||_inf
};

struct Summary {
  double terminal_position_error = 0.0;
  double terminal_payload_psi = 0.0;
  double terminal_link_direction_error = 0.0;
  double terminal_link_rate_error = 0.0;
  double max_quad_psi = 0.0;
  double ex_sup_final = 0.0;
  double position_convergence_time = -1.0;  // earliest t with error < 1 cm to the end
  double lyapunov_increase_fraction = 0.0;  // steps with V(t+dt) > V(t) + 1e-6 V(0)
  bool certificate_pass = false;
  double wall_seconds = 0.0;
};

struct RunResult {
  Setup setup;
  integrator::Trajectory trajectory;
  std::vector<controller::ControlOutput> controls;  // one per recorded state
  Metrics metrics;
  Summary summary;
};

// Runs the scenario closed loop. Controls are recomputed every
// `control.decimation` steps and held in between.
RunResult run(const Scenario& scenario);

enum class ExportFormat { kCsv, kJson };

// Writes payload.csv / quadrotors.csv / metrics.csv / snapshots.csv (or a
// single trajectory.json) plus summary.json into out_dir. Creates the
// directory. I/O failures raise IoError with the path.
void export_run(const RunResult& result, const Scenario& scenario, ExportFormat format,
                const std::string& out_dir);

// Writes the linear model blocks and the closed-loop matrix in a plain
// coordinate text format for offline inspection.
void dump_matrices(const Setup& setup, const std::string& out_dir);

}  // namespace sim
}  // namespace multilift
