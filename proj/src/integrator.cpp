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
#include <string>

namespace multilift {
namespace integrator {
namespace {

using dynamics::StateDerivative;

// Step-local chart displacement: plain vectors move additively, rotational
// factors through exp. Payload/quadrotor charts are right (body) charts
// R = R_n exp(u^); link directions use a left chart q = exp(w^) q_n.
struct Displacement {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d payload_chart = Eigen::Vector3d::Zero();
  Eigen::Vector3d payload_rate = Eigen::Vector3d::Zero();
  std::vector<std::vector<Eigen::Vector3d>> link_charts;
  std::vector<std::vector<Eigen::Vector3d>> link_rates;
  std::vector<Eigen::Vector3d> quad_charts;
  std::vector<Eigen::Vector3d> quad_rates;

  static Displacement zero(const FullState& s) {
    Displacement d;
    d.link_charts.resize(s.cables.size());
    d.link_rates.resize(s.cables.size());
    for (size_t i = 0; i < s.cables.size(); ++i) {
      d.link_charts[i].assign(s.cables[i].directions.size(), Eigen::Vector3d::Zero());
      d.link_rates[i].assign(s.cables[i].directions.size(), Eigen::Vector3d::Zero());
    }
    d.quad_charts.assign(s.quad_attitudes.size(), Eigen::Vector3d::Zero());
    d.quad_rates.assign(s.quad_attitudes.size(), Eigen::Vector3d::Zero());
    return d;
  }
};

FullState apply(const FullState& base, const Displacement& d) {
  FullState s = base;
  s.payload_position += d.position;
  s.payload_velocity += d.velocity;
  s.payload_attitude =
      Rotation::trusted(base.payload_attitude.matrix() * exp_so3(d.payload_chart));
  s.payload_angular_velocity += d.payload_rate;
  for (size_t i = 0; i < s.cables.size(); ++i) {
    for (size_t j = 0; j < s.cables[i].directions.size(); ++j) {
      s.cables[i].directions[j] = UnitVector::normalized(
          exp_so3(d.link_charts[i][j]) * base.cables[i].directions[j].vector());
      s.cables[i].angular_rates[j] += d.link_rates[i][j];
    }
  }
  for (size_t i = 0; i < s.quad_attitudes.size(); ++i) {
    s.quad_attitudes[i] =
        Rotation::trusted(base.quad_attitudes[i].matrix() * exp_so3(d.quad_charts[i]));
    s.quad_angular_rates[i] += d.quad_rates[i];
  }
  return s;
}

// Pulls the state derivative back to a chart velocity at displacement d.
Displacement chart_velocity(const Displacement& d, const StateDerivative& f) {
  Displacement v = d;  // copy for shape
  v.position = f.payload_position_rate;
  v.velocity = f.payload_velocity_rate;
  v.payload_chart = dexpinv(-d.payload_chart, f.payload_body_rate);
  v.payload_rate = f.payload_body_rate_dot;
  for (size_t i = 0; i < d.link_charts.size(); ++i) {
    for (size_t j = 0; j < d.link_charts[i].size(); ++j) {
      v.link_charts[i][j] = dexpinv(d.link_charts[i][j], f.link_rates[i][j]);
      v.link_rates[i][j] = f.link_rate_dots[i][j];
    }
  }
  for (size_t i = 0; i < d.quad_charts.size(); ++i) {
    v.quad_charts[i] = dexpinv(-d.quad_charts[i], f.quad_body_rates[i]);
    v.quad_rates[i] = f.quad_body_rate_dots[i];
  }
  return v;
}

Displacement axpy(const Displacement& shape, double a, const Displacement& x,
                  double b, const Displacement& y) {
  Displacement r = shape;
  r.position = a * x.position + b * y.position;
  r.velocity = a * x.velocity + b * y.velocity;
  r.payload_chart = a * x.payload_chart + b * y.payload_chart;
  r.payload_rate = a * x.payload_rate + b * y.payload_rate;
  for (size_t i = 0; i < r.link_charts.size(); ++i) {
    for (size_t j = 0; j < r.link_charts[i].size(); ++j) {
      r.link_charts[i][j] = a * x.link_charts[i][j] + b * y.link_charts[i][j];
      r.link_rates[i][j] = a * x.link_rates[i][j] + b * y.link_rates[i][j];
    }
  }
  for (size_t i = 0; i < r.quad_charts.size(); ++i) {
    r.quad_charts[i] = a * x.quad_charts[i] + b * y.quad_charts[i];
    r.quad_rates[i] = a * x.quad_rates[i] + b * y.quad_rates[i];
  }
  return r;
}

void enforce_tangency(FullState& s) {
  for (auto& cable : s.cables) {
    for (size_t j = 0; j < cable.directions.size(); ++j) {
      const Eigen::Vector3d& q = cable.directions[j].vector();
      cable.angular_rates[j] -= q.dot(cable.angular_rates[j]) * q;
    }
  }
}

}  // namespace

void repair_drift(FullState& s) {
  const Eigen::Matrix3d r0 = s.payload_attitude.matrix();
  if (Rotation::orthogonality_defect(r0) > 1e-12) {
    s.payload_attitude = Rotation::projected(r0);
  }
  for (auto& r : s.quad_attitudes) {
    if (Rotation::orthogonality_defect(r.matrix()) > 1e-12) {
      r = Rotation::projected(r.matrix());
    }
  }
  for (auto& cable : s.cables) {
    for (auto& q : cable.directions) {
      if (std::abs(q.vector().norm() - 1.0) > 1e-12) {
        q = UnitVector::normalized(q.vector());
      }
    }
  }
}

FullState step(const FullState& state, double t, const RhsProvider& rhs,
               const IntegratorConfig& cfg) {
  const double dt = cfg.dt;
  const Displacement zero = Displacement::zero(state);

  FullState out = state;
  try {
    if (cfg.scheme == Scheme::kEuler) {
      const Displacement k1 = chart_velocity(zero, rhs(t, state));
      out = apply(state, axpy(zero, dt, k1, 0.0, zero));
    } else {
      const Displacement k1 = chart_velocity(zero, rhs(t, state));
      const Displacement c2 = axpy(zero, 0.5 * dt, k1, 0.0, zero);
      const Displacement k2 = chart_velocity(c2, rhs(t + 0.5 * dt, apply(state, c2)));
      const Displacement c3 = axpy(zero, 0.5 * dt, k2, 0.0, zero);
      const Displacement k3 = chart_velocity(c3, rhs(t + 0.5 * dt, apply(state, c3)));
      const Displacement c4 = axpy(zero, dt, k3, 0.0, zero);
      const Displacement k4 = chart_velocity(c4, rhs(t + dt, apply(state, c4)));
      Displacement sum = axpy(zero, dt / 6.0, k1, dt / 3.0, k2);
      sum = axpy(zero, 1.0, sum, dt / 3.0, k3);
      sum = axpy(zero, 1.0, sum, dt / 6.0, k4);
      out = apply(state, sum);
    }
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + " (during step at t=" + std::to_string(t) + ")");
  }
  enforce_tangency(out);
  return out;
}

Trajectory simulate(const FullState& initial, const RhsProvider& rhs,
                    const IntegratorConfig& cfg, double duration) {
  if (cfg.dt <= 0.0) throw ValidationError("integrator: dt must be positive");
  Trajectory traj;
  const int steps = duration > 0.0 ? static_cast<int>(std::llround(duration / cfg.dt)) : 0;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(initial);
  FullState s = initial;
  for (int k = 0; k < steps; ++k) {
    s = step(s, k * cfg.dt, rhs, cfg);
    if (cfg.renormalize_every > 0 && (k + 1) % cfg.renormalize_every == 0) {
      repair_drift(s);
    }
    traj.times.push_back((k + 1) * cfg.dt);
    traj.states.push_back(s);
  }
  return traj;
}

}  // namespace integrator
}  // namespace multilift
