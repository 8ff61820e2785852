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

// Scenario definition and loading. Scenarios come from JSON files (schema in
// the README) or from the compiled-in set: paper-case1, paper-case2,
// paper-case2-alt, rod-2quad, disturbance-rejection.

#pragma once

#include <string>
#include <vector>

#include "multilift/controller.hpp"
#include "multilift/gains.hpp"
#include "multilift/integrator.hpp"
#include "multilift/linearization.hpp"
#include "multilift/model.hpp"

namespace multilift {
namespace sim {

struct GainConfig {
  gains::SynthesisWeights weights;
  double kz = 0.02;
  double kz_link = 0.002;  // default kz / 10
  double sigma = 5.0;
  gains::AttitudeGains attitude;  // applied to every quadrotor
  double q_scale = 1e-3;          // Lyapunov Q diagonal baseline
  double q_payload_boost = 1.0;   // extra Q weight on payload pos/vel rows
};

struct CertificateConfig {
  double psi1 = 0.1;
  double psi2 = 1.0;
  double command_rate_bound = 1.0;
};

struct OutputConfig {
  int downsample = 10;                 // snapshot stride when no explicit times
  std::vector<double> snapshot_times;  // s
};

struct Scenario {
  std::string name;
  SystemParams params;
  FullState initial;
  Eigen::Vector3d desired_position = Eigen::Vector3d::Zero();
  controller::ControllerConfig control;
  linearization::LoadShare load_share = linearization::LoadShare::kUniform;
  GainConfig gains;
  CertificateConfig certificate;
  DisturbanceSpec disturbances;
  double duration = 10.0;
  integrator::IntegratorConfig integrator;
  OutputConfig output;

  // Throws ValidationError on any invariant violation.
  void validate() const;
};

// Names of the compiled-in scenarios.
std::vector<std::string> builtin_scenario_names();

// Throws ValidationError for an unknown name.
Scenario builtin_scenario(const std::string& name);

// Loads a scenario from a JSON file, or a built-in when `path_or_name`
// matches one. Schema violations raise ValidationError with the field path;
// missing files raise IoError.
Scenario load_scenario(const std::string& path_or_name);

// Parses scenario JSON text (exposed for tests).
Scenario parse_scenario_json(const std::string& text);

}  // namespace sim
}  // namespace multilift
