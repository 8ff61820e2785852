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

#include "multilift/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace multilift {
namespace sim {
namespace {

using nlohmann::json;

constexpr double kDegree = M_PI / 180.0;

Eigen::Matrix3d box_inertia(double mass, double lx, double ly, double lz) {
  return mass / 12.0 *
         Eigen::Vector3d(ly * ly + lz * lz, lx * lx + lz * lz, lx * lx + ly * ly)
             .asDiagonal()
             .toDenseMatrix();
}

QuadrotorParams paper_quadrotor(const Eigen::Vector3d& attachment) {
  QuadrotorParams quad;
  quad.mass = 0.755;
  quad.inertia = Eigen::Vector3d(0.557, 0.557, 1.05).asDiagonal();
  quad.inertia *= 1e-2;
  quad.attachment = attachment;
  quad.links.assign(5, LinkParams{0.01, 0.15});
  return quad;
}

SystemParams paper_params() {
  SystemParams p;
  p.payload_mass = 0.5;
  p.payload_inertia = box_inertia(0.5, 0.6, 0.8, 0.2);
  p.quadrotors = {paper_quadrotor({0.3, -0.4, -0.1}), paper_quadrotor({0.3, 0.4, -0.1}),
                  paper_quadrotor({-0.3, -0.4, -0.1}), paper_quadrotor({-0.3, 0.4, -0.1})};
  return p;
}

Scenario paper_case1() {
  Scenario s;
  s.name = "paper-case1";
  s.params = paper_params();
  s.initial = FullState::hanging_equilibrium(s.params);
  s.initial.payload_position = {1.0, 4.8, 0.0};
  s.desired_position = {0.44, 0.78, -0.5};
  s.duration = 10.0;
  return s;
}

Scenario paper_case2(bool heavy) {
  Scenario s;
  s.name = heavy ? "paper-case2-alt" : "paper-case2";
  s.params = paper_params();
  if (heavy) {
    s.params.payload_mass = 1.0;
    s.params.payload_inertia = box_inertia(1.0, 1.0, 1.2, 0.2);
  }
  s.initial = FullState::hanging_equilibrium(s.params);
  s.initial.payload_position = {2.4, 0.8, -1.0};
  s.initial.payload_attitude = Rotation::about_axis(30.0 * kDegree * Eigen::Vector3d::UnitX());
  const Rotation tilt = Rotation::about_axis(-35.0 * kDegree * Eigen::Vector3d::UnitY());
  s.initial.quad_attitudes[0] = tilt;
  s.initial.quad_attitudes[2] = tilt;
  // Cables 1 and 3 start curved toward horizontal, straightening toward the
  // payload end.
  for (const int i : {0, 2}) {
    const int links = s.params.link_count(i);
    for (int j = 0; j < links; ++j) {
      const double angle = 60.0 * kDegree * (links - 1 - j) / (links - 1);
      s.initial.cables[i].directions[j] = UnitVector::normalized(
          exp_so3(angle * Eigen::Vector3d::UnitY()) * Eigen::Vector3d::UnitZ());
    }
  }
  s.desired_position = {2.4, 0.8, -1.0};
  s.duration = 10.0;
  return s;
}

Scenario rod_2quad() {
  Scenario s;
  s.name = "rod-2quad";
  s.params.payload_mass = 0.52;
  const double half_length = 2.05 / 2.0;
  const double rod_inertia = 0.52 * 2.05 * 2.05 / 12.0;
  // Axial term of a 2 cm radius rod; attachment hooks sit 1 cm above the axis
  // so payload roll stays controllable.
  s.params.payload_inertia =
      Eigen::Vector3d(0.5 * 0.52 * 0.02 * 0.02, rod_inertia, rod_inertia).asDiagonal();
  QuadrotorParams quad;
  quad.mass = 0.755;
  Eigen::Matrix3d inertia;
  inertia << 5.5711, 0.0618, -0.0251, 0.06177, 5.5757, 0.0101, -0.02502, 0.01007, 1.05053;
  inertia *= 1e-2;
  quad.inertia = (inertia + inertia.transpose()) / 2.0;
  quad.links.assign(1, LinkParams{0.01, 1.3});
  quad.attachment = {-half_length, 0.0, -0.01};
  s.params.quadrotors.assign(2, quad);
  s.params.quadrotors[1].attachment = {half_length, 0.0, -0.01};

  s.initial = FullState::hanging_equilibrium(s.params);
  // Pulled 30 degrees toward +y and released.
  const Eigen::Vector3d pulled =
      exp_so3(-30.0 * kDegree * Eigen::Vector3d::UnitX()) * Eigen::Vector3d::UnitZ();
  for (auto& cable : s.initial.cables) {
    cable.directions[0] = UnitVector::normalized(pulled);
  }
  s.desired_position = {0.0, 0.0, -1.5};
  s.initial.payload_position =
      s.desired_position + 1.3 * (pulled - Eigen::Vector3d::UnitZ());
  s.duration = 10.0;
  s.gains.weights.link = 2.0;
  s.gains.weights.link_rate = 1.0;
  // These quadrotors carry ten times the inertia of the four-quadrotor rig;
  // scale the attitude loop to keep its bandwidth above the payload roll mode.
  s.gains.attitude.kr = 15.0;
  s.gains.attitude.komega = 3.0;
  s.gains.attitude.ki = 0.1;
  s.gains.attitude.c2 = 0.6;
  // No disturbance here: keep the translational integral nearly off so the
  // release transient does not wind it up.
  s.gains.kz = 0.002;
  s.gains.kz_link = 0.0002;
  return s;
}

Scenario disturbance_rejection() {
  Scenario s = paper_case1();
  s.name = "disturbance-rejection";
  // Single-link cables of the same total length and mass: fewer lightly
  // damped chain modes, so the translational integral loop can run fast.
  for (auto& quad : s.params.quadrotors) quad.links.assign(1, LinkParams{0.05, 0.75});
  s.initial = FullState::hanging_equilibrium(s.params);
  s.initial.payload_position = s.desired_position;
  s.duration = 20.0;
  s.gains.q_scale = 1e-4;
  s.gains.q_payload_boost = 1e4;
  s.gains.kz = 4.0;
  s.gains.kz_link = 0.4;
  s.gains.sigma = 0.05;
  // Common force offset at 80% of the saturated integral authority.
  const double amplitude = 0.8 * s.gains.kz * s.gains.sigma;
  s.disturbances.force.assign(4, amplitude * Eigen::Vector3d(1.0, 0.5, -0.75));
  s.disturbances.moment.assign(4, Eigen::Vector3d(0.002, -0.003, 0.001));
  s.disturbances.force_bound = amplitude;
  return s;
}

// ---- JSON helpers ------------------------------------------------------

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError("scenario: " + where + ": " + what);
}

Eigen::Vector3d read_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) fail(where, "expected an array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Eigen::Matrix3d read_inertia(const json& j, const std::string& where) {
  if (j.is_object() && j.contains("diag")) {
    return read_vec3(j["diag"], where + ".diag").asDiagonal();
  }
  if (j.is_array() && j.size() == 9) {
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = j[3 * r + c].get<double>();
    return m;
  }
  fail(where, "expected {\"diag\": [..]} or an array of 9 numbers");
}

Rotation read_rotation(const json& j, const std::string& where) {
  if (j.is_object() && j.contains("axis") && j.contains("angle_deg")) {
    const Eigen::Vector3d axis = read_vec3(j["axis"], where + ".axis");
    if (axis.norm() < 1e-12) fail(where, "axis must be nonzero");
    return Rotation::about_axis(j["angle_deg"].get<double>() * kDegree * axis.normalized());
  }
  if (j.is_array() && j.size() == 9) {
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = j[3 * r + c].get<double>();
    try {
      return Rotation::from_matrix(m);
    } catch (const ValidationError& e) {
      fail(where, e.what());
    }
  }
  fail(where, "expected {\"axis\",\"angle_deg\"} or an array of 9 numbers");
}

template <typename T>
T value_or(const json& j, const std::string& key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::vector<Eigen::Vector3d> read_vec3_list(const json& j, int n, const std::string& where) {
  std::vector<Eigen::Vector3d> out;
  if (j.is_array() && !j.empty() && j[0].is_number()) {
    out.assign(n, read_vec3(j, where));  // broadcast a single vector
    return out;
  }
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    fail(where, "expected one 3-vector or a list of " + std::to_string(n));
  }
  for (int i = 0; i < n; ++i) out.push_back(read_vec3(j[i], where));
  return out;
}

Scenario scenario_from_json(const json& root) {
  Scenario s;
  s.name = value_or<std::string>(root, "name", "scenario");

  if (!root.contains("payload") || !root.contains("quadrotors")) {
    fail("root", "payload and quadrotors are required");
  }
  const json& payload = root["payload"];
  s.params.payload_mass = payload.at("mass").get<double>();
  s.params.payload_inertia = read_inertia(payload.at("inertia"), "payload.inertia");
  s.params.gravity = value_or(root, "gravity", 9.81);

  for (size_t i = 0; i < root["quadrotors"].size(); ++i) {
    const json& jq = root["quadrotors"][i];
    const std::string where = "quadrotors[" + std::to_string(i) + "]";
    QuadrotorParams quad;
    quad.mass = jq.at("mass").get<double>();
    quad.inertia = read_inertia(jq.at("inertia"), where + ".inertia");
    quad.attachment = read_vec3(jq.at("attachment"), where + ".attachment");
    const json& links = jq.at("links");
    if (links.is_object()) {
      quad.links.assign(links.at("count").get<int>(),
                        LinkParams{links.at("mass").get<double>(),
                                   links.at("length").get<double>()});
    } else if (links.is_array()) {
      for (const auto& jl : links) {
        quad.links.push_back(
            LinkParams{jl.at("mass").get<double>(), jl.at("length").get<double>()});
      }
    } else {
      fail(where + ".links", "expected an array or {count, mass, length}");
    }
    s.params.quadrotors.push_back(quad);
  }
  s.params.validate();

  s.initial = FullState::hanging_equilibrium(s.params);
  if (root.contains("initial")) {
    const json& init = root["initial"];
    if (init.contains("payload_position"))
      s.initial.payload_position = read_vec3(init["payload_position"], "initial.payload_position");
    if (init.contains("payload_velocity"))
      s.initial.payload_velocity = read_vec3(init["payload_velocity"], "initial.payload_velocity");
    if (init.contains("payload_attitude"))
      s.initial.payload_attitude = read_rotation(init["payload_attitude"], "initial.payload_attitude");
    if (init.contains("payload_angular_velocity"))
      s.initial.payload_angular_velocity =
          read_vec3(init["payload_angular_velocity"], "initial.payload_angular_velocity");
    if (init.contains("quad_attitudes")) {
      const json& list = init["quad_attitudes"];
      if (static_cast<int>(list.size()) != s.params.quad_count())
        fail("initial.quad_attitudes", "size mismatch");
      for (int i = 0; i < s.params.quad_count(); ++i)
        s.initial.quad_attitudes[i] = read_rotation(list[i], "initial.quad_attitudes");
    }
    if (init.contains("quad_angular_rates")) {
      const auto rates = read_vec3_list(init["quad_angular_rates"], s.params.quad_count(),
                                        "initial.quad_angular_rates");
      s.initial.quad_angular_rates = rates;
    }
    if (init.contains("cables")) {
      const json& cables = init["cables"];
      if (static_cast<int>(cables.size()) != s.params.quad_count())
        fail("initial.cables", "size mismatch");
      for (int i = 0; i < s.params.quad_count(); ++i) {
        const std::string where = "initial.cables[" + std::to_string(i) + "]";
        const json& jc = cables[i];
        if (jc.contains("directions")) {
          const json& dirs = jc["directions"];
          if (static_cast<int>(dirs.size()) != s.params.link_count(i))
            fail(where + ".directions", "size mismatch");
          for (int j = 0; j < s.params.link_count(i); ++j) {
            try {
              s.initial.cables[i].directions[j] =
                  UnitVector::from_vector(read_vec3(dirs[j], where + ".directions"));
            } catch (const ValidationError& e) {
              fail(where + ".directions", e.what());
            }
          }
        }
        if (jc.contains("angular_rates")) {
          const auto rates = read_vec3_list(jc["angular_rates"], s.params.link_count(i),
                                            where + ".angular_rates");
          s.initial.cables[i].angular_rates = rates;
        }
      }
    }
  }

  if (root.contains("desired_position"))
    s.desired_position = read_vec3(root["desired_position"], "desired_position");

  if (root.contains("controller")) {
    const json& jc = root["controller"];
    if (jc.contains("b1_command"))
      s.control.b1_command =
          read_vec3(jc["b1_command"], "controller.b1_command").normalized();
    s.control.feedforward = value_or(jc, "feedforward", s.control.feedforward);
    s.control.decimation = value_or(jc, "decimation", s.control.decimation);
    s.control.filter_steps = value_or(jc, "filter_steps", s.control.filter_steps);
    const std::string share = value_or<std::string>(jc, "load_share", "uniform");
    if (share == "uniform") {
      s.load_share = linearization::LoadShare::kUniform;
    } else if (share == "static") {
      s.load_share = linearization::LoadShare::kStaticBalance;
    } else {
      fail("controller.load_share", "expected \"uniform\" or \"static\"");
    }
  }

  if (root.contains("gains")) {
    const json& jg = root["gains"];
    if (jg.contains("weights")) {
      const json& jw = jg["weights"];
      auto& w = s.gains.weights;
      w.position = value_or(jw, "position", w.position);
      w.attitude = value_or(jw, "attitude", w.attitude);
      w.link = value_or(jw, "link", w.link);
      w.position_rate = value_or(jw, "position_rate", w.position_rate);
      w.attitude_rate = value_or(jw, "attitude_rate", w.attitude_rate);
      w.link_rate = value_or(jw, "link_rate", w.link_rate);
      w.control = value_or(jw, "control", w.control);
    }
    s.gains.kz = value_or(jg, "kz", s.gains.kz);
    s.gains.kz_link = value_or(jg, "kz_link", s.gains.kz / 10.0);
    s.gains.sigma = value_or(jg, "sigma", s.gains.sigma);
    s.gains.q_scale = value_or(jg, "q_scale", s.gains.q_scale);
    s.gains.q_payload_boost = value_or(jg, "q_payload_boost", s.gains.q_payload_boost);
    if (jg.contains("attitude")) {
      const json& ja = jg["attitude"];
      s.gains.attitude.kr = value_or(ja, "kr", s.gains.attitude.kr);
      s.gains.attitude.komega = value_or(ja, "komega", s.gains.attitude.komega);
      s.gains.attitude.ki = value_or(ja, "ki", s.gains.attitude.ki);
      s.gains.attitude.c2 = value_or(ja, "c2", s.gains.attitude.c2);
    }
  }

  if (root.contains("certificate")) {
    const json& jc = root["certificate"];
    s.certificate.psi1 = value_or(jc, "psi1", s.certificate.psi1);
    s.certificate.psi2 = value_or(jc, "psi2", s.certificate.psi2);
    s.certificate.command_rate_bound =
        value_or(jc, "command_rate_bound", s.certificate.command_rate_bound);
  }

  if (root.contains("disturbances")) {
    const json& jd = root["disturbances"];
    if (jd.contains("force"))
      s.disturbances.force =
          read_vec3_list(jd["force"], s.params.quad_count(), "disturbances.force");
    if (jd.contains("moment"))
      s.disturbances.moment =
          read_vec3_list(jd["moment"], s.params.quad_count(), "disturbances.moment");
    double default_bound = 0.0;
    for (const auto& f : s.disturbances.force)
      default_bound = std::max(default_bound, f.lpNorm<Eigen::Infinity>());
    s.disturbances.force_bound = value_or(jd, "bound", default_bound);
  }

  s.duration = value_or(root, "duration", s.duration);
  if (root.contains("integrator")) {
    const json& ji = root["integrator"];
    s.integrator.dt = value_or(ji, "dt", s.integrator.dt);
    const std::string scheme = value_or<std::string>(ji, "scheme", "rk4");
    if (scheme == "rk4") {
      s.integrator.scheme = integrator::Scheme::kRk4;
    } else if (scheme == "euler") {
      s.integrator.scheme = integrator::Scheme::kEuler;
    } else {
      fail("integrator.scheme", "expected \"rk4\" or \"euler\"");
    }
    s.integrator.renormalize_every =
        value_or(ji, "renormalize_every", s.integrator.renormalize_every);
  }
  if (root.contains("output")) {
    const json& jo = root["output"];
    s.output.downsample = value_or(jo, "downsample", s.output.downsample);
    if (jo.contains("snapshot_times"))
      s.output.snapshot_times = jo["snapshot_times"].get<std::vector<double>>();
  }

  s.validate();
  return s;
}

}  // namespace

void Scenario::validate() const {
  params.validate();
  initial.validate(params);
  disturbances.validate(params);
  if (duration < 0.0) throw ValidationError("scenario: duration must be non-negative");
  if (integrator.dt <= 0.0) throw ValidationError("scenario: dt must be positive");
  if (control.decimation < 1) throw ValidationError("scenario: decimation must be >= 1");
  if (gains.sigma <= 0.0) throw ValidationError("scenario: sigma must be positive");
  if (gains.kz < 0.0 || gains.kz_link < 0.0)
    throw ValidationError("scenario: integral gains must be non-negative");
  if (gains.attitude.kr <= 0.0 || gains.attitude.komega <= 0.0 || gains.attitude.ki <= 0.0 ||
      gains.attitude.c2 <= 0.0)
    throw ValidationError("scenario: attitude gains must be positive");
  if (certificate.psi1 <= 0.0 || certificate.psi1 >= 1.0)
    throw ValidationError("scenario: certificate psi1 must lie in (0, 1)");
  if (certificate.psi2 <= 0.0 || certificate.psi2 >= 2.0)
    throw ValidationError("scenario: certificate psi2 must lie in (0, 2)");
}

std::vector<std::string> builtin_scenario_names() {
  return {"paper-case1", "paper-case2", "paper-case2-alt", "rod-2quad",
          "disturbance-rejection"};
}

Scenario builtin_scenario(const std::string& name) {
  Scenario s;
  if (name == "paper-case1") {
    s = paper_case1();
  } else if (name == "paper-case2") {
    s = paper_case2(false);
  } else if (name == "paper-case2-alt") {
    s = paper_case2(true);
  } else if (name == "rod-2quad") {
    s = rod_2quad();
  } else if (name == "disturbance-rejection") {
    s = disturbance_rejection();
  } else {
    throw ValidationError("unknown built-in scenario: " + name);
  }
  s.validate();
  return s;
}

Scenario parse_scenario_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("scenario: invalid JSON: ") + e.what());
  }
  try {
    return scenario_from_json(root);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path_or_name) {
  for (const auto& name : builtin_scenario_names()) {
    if (path_or_name == name) return builtin_scenario(name);
  }
  std::ifstream in(path_or_name);
  if (!in) throw IoError("cannot open scenario file: " + path_or_name);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_json(buffer.str());
}

}  // namespace sim
}  // namespace multilift
