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

// Fixed-step explicit integration with structure-preserving updates: each
// step integrates in a step-local exponential chart (rotations and link
// directions move by exp, chart velocities are pulled back through dexpinv),
// so SO(3) and unit-norm invariants hold to machine precision at any dt.

#pragma once

#include <functional>
#include <vector>

#include "multilift/dynamics.hpp"
#include "multilift/model.hpp"

namespace multilift {
namespace integrator {

enum class Scheme { kRk4, kEuler };

struct IntegratorConfig {
  double dt = 1e-3;  // s
  Scheme scheme = Scheme::kRk4;
  int renormalize_every = 16;  // steps between drift checks
};

using RhsProvider = std::function<dynamics::StateDerivative(double t, const FullState&)>;

// One step from time t. Propagates NumericalError from the dynamics with the
// step time attached.
FullState step(const FullState& state, double t, const RhsProvider& rhs,
               const IntegratorConfig& cfg);

// Projects rotations back onto SO(3) and renormalizes link directions when
// accumulated drift exceeds 1e-12. Called by simulate on the configured
// cadence; exposed for callers running their own stepping loop.
void repair_drift(FullState& state);

struct Trajectory {
  std::vector<double> times;
  std::vector<FullState> states;
};

// Integrates over [0, duration] storing every step (duration rounded to a
// whole number of steps; duration <= 0 yields just the initial state).
Trajectory simulate(const FullState& initial, const RhsProvider& rhs,
                    const IntegratorConfig& cfg, double duration);

}  // namespace integrator
}  // namespace multilift
