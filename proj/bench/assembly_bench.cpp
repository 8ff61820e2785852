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

// Serial reference vs OpenMP assembly of the equations of motion, across
// problem sizes from the four-quadrotor paper rig up to large swarms, plus
// the end-to-end right-hand side (assembly + factorization).

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "multilift/dynamics.hpp"

namespace {

using namespace multilift;

SystemParams make_params(int quads, int links) {
  SystemParams p;
  p.payload_mass = 0.5;
  p.payload_inertia = Eigen::Vector3d(0.028, 0.017, 0.042).asDiagonal();
  for (int i = 0; i < quads; ++i) {
    QuadrotorParams quad;
    quad.mass = 0.755;
    quad.inertia = Eigen::Vector3d(0.00557, 0.00557, 0.0105).asDiagonal();
    const double angle = 2.0 * M_PI * i / quads;
    quad.attachment = {0.5 * std::cos(angle), 0.5 * std::sin(angle), -0.1};
    quad.links.assign(links, LinkParams{0.01, 0.15});
    p.quadrotors.push_back(quad);
  }
  return p;
}

FullState make_state(const SystemParams& params) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FullState s = FullState::hanging_equilibrium(params);
  s.payload_attitude = Rotation::about_axis({0.1, -0.2, 0.05});
  s.payload_angular_velocity = {0.2, 0.1, -0.1};
  for (int i = 0; i < params.quad_count(); ++i) {
    for (int j = 0; j < params.link_count(i); ++j) {
      const Eigen::Vector3d q =
          (Eigen::Vector3d::UnitZ() + 0.3 * Eigen::Vector3d(u(rng), u(rng), u(rng)))
              .normalized();
      Eigen::Vector3d w(u(rng), u(rng), u(rng));
      w -= q.dot(w) * q;
      s.cables[i].directions[j] = UnitVector::normalized(q);
      s.cables[i].angular_rates[j] = w;
    }
  }
  return s;
}

struct Fixture {
  SystemParams params;
  DerivedMasses masses;
  FullState state;
  std::vector<Eigen::Vector3d> forces;
  std::vector<Eigen::Vector3d> zero;
  dynamics::EomSystem eom;

  explicit Fixture(int quads, int links)
      : params(make_params(quads, links)),
        masses(derive_masses(params)),
        state(make_state(params)),
        forces(quads, Eigen::Vector3d(0.1, -0.2, -9.0)),
        zero(quads, Eigen::Vector3d::Zero()) {}
};

void BM_AssembleReference(benchmark::State& bench) {
  Fixture f(static_cast<int>(bench.range(0)), static_cast<int>(bench.range(1)));
  for (auto _ : bench) {
    dynamics::assemble_eom_reference(f.state, f.params, f.masses, f.forces, f.zero, f.eom);
    benchmark::DoNotOptimize(f.eom.inertia.data());
  }
}

void BM_AssembleParallel(benchmark::State& bench) {
  Fixture f(static_cast<int>(bench.range(0)), static_cast<int>(bench.range(1)));
  for (auto _ : bench) {
    dynamics::assemble_eom(f.state, f.params, f.masses, f.forces, f.zero, f.eom);
    benchmark::DoNotOptimize(f.eom.inertia.data());
  }
}

void BM_FullRhs(benchmark::State& bench) {
  Fixture f(static_cast<int>(bench.range(0)), static_cast<int>(bench.range(1)));
  std::vector<dynamics::QuadInput> inputs(f.params.quad_count());
  for (auto& in : inputs) in.thrust = 9.1;
  for (auto _ : bench) {
    const auto d = dynamics::full_rhs(f.state, f.params, f.masses, inputs, DisturbanceSpec{});
    benchmark::DoNotOptimize(d.payload_velocity_rate.data());
  }
}

void sizes(benchmark::internal::Benchmark* b) {
  b->Args({4, 5})->Args({8, 10})->Args({16, 20})->Args({32, 40});
}

BENCHMARK(BM_AssembleReference)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AssembleParallel)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FullRhs)->Apply(sizes)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
