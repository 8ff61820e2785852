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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "multilift/sim.hpp"

namespace multilift {
namespace sim {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw IoError("cannot write " + path.string());
    for (size_t k = 0; k < header.size(); ++k) {
      out_ << (k ? "," : "") << header[k];
    }
    out_ << "\r\n";
  }

  void row(const std::vector<double>& values) {
    for (size_t k = 0; k < values.size(); ++k) {
      out_ << (k ? "," : "") << fmt(values[k]);
    }
    out_ << "\r\n";
  }

 private:
  std::ofstream out_;
};

void append_vec3(std::vector<std::string>& header, std::vector<const char*> axes,
                 const std::string& stem, const std::string& unit) {
  for (const char* a : axes) header.push_back(stem + "_" + a + unit);
}

void write_payload_csv(const RunResult& r, const Scenario& scenario, const fs::path& dir) {
  std::vector<std::string> header{"time_s"};
  append_vec3(header, {"x", "y", "z"}, "payload_position", "_m");
  append_vec3(header, {"x", "y", "z"}, "payload_velocity", "_mps");
  append_vec3(header, {"x", "y", "z"}, "payload_attitude_log", "_rad");
  append_vec3(header, {"x", "y", "z"}, "payload_angular_velocity", "_radps");
  header.push_back("position_error_m");
  CsvWriter csv(dir / "payload.csv", header);
  for (size_t k = 0; k < r.trajectory.states.size(); ++k) {
    const FullState& s = r.trajectory.states[k];
    const Eigen::Vector3d eta = log_so3(s.payload_attitude.matrix());
    std::vector<double> row{r.trajectory.times[k]};
    for (int a = 0; a < 3; ++a) row.push_back(s.payload_position(a));
    for (int a = 0; a < 3; ++a) row.push_back(s.payload_velocity(a));
    for (int a = 0; a < 3; ++a) row.push_back(eta(a));
    for (int a = 0; a < 3; ++a) row.push_back(s.payload_angular_velocity(a));
    row.push_back(r.metrics.position_error[k]);
    csv.row(row);
  }
  (void)scenario;
}

void write_quadrotors_csv(const RunResult& r, const Scenario& scenario, const fs::path& dir) {
  const int n = scenario.params.quad_count();
  std::vector<std::string> header{"time_s"};
  for (int i = 0; i < n; ++i) {
    const std::string tag = std::to_string(i);
    header.push_back("psi_" + tag);
    header.push_back("rate_error_" + tag + "_radps");
    header.push_back("thrust_" + tag + "_N");
  }
  CsvWriter csv(dir / "quadrotors.csv", header);
  for (size_t k = 0; k < r.metrics.time.size(); ++k) {
    std::vector<double> row{r.metrics.time[k]};
    for (int i = 0; i < n; ++i) {
      row.push_back(r.metrics.quad_psi[i][k]);
      row.push_back(r.metrics.quad_rate_error[i][k]);
      row.push_back(r.metrics.thrust[i][k]);
    }
    csv.row(row);
  }
}

void write_metrics_csv(const RunResult& r, const Scenario& scenario, const fs::path& dir) {
  const int n = scenario.params.quad_count();
  std::vector<std::string> header{
      "time_s",         "position_error_m",      "payload_psi",
      "e_q",            "e_omega_radps",         "lyapunov_translational",
      "lyapunov_attitude", "lyapunov_total",     "kinetic_energy_J",
      "potential_energy_J", "ex_sup"};
  for (int i = 0; i < n; ++i) header.push_back("integral_gap_" + std::to_string(i));
  CsvWriter csv(dir / "metrics.csv", header);
  const Metrics& m = r.metrics;
  for (size_t k = 0; k < m.time.size(); ++k) {
    std::vector<double> row{m.time[k],
                            m.position_error[k],
                            m.payload_psi[k],
                            m.link_direction_error[k],
                            m.link_rate_error[k],
                            m.lyapunov_translational[k],
                            m.lyapunov_attitude[k],
                            m.lyapunov_total[k],
                            m.kinetic_energy[k],
                            m.potential_energy[k],
                            m.ex_sup[k]};
    for (int i = 0; i < n; ++i) row.push_back(m.integral_gap[i][k]);
    csv.row(row);
  }
}

std::vector<size_t> snapshot_indices(const RunResult& r, const Scenario& scenario) {
  std::vector<size_t> idx;
  const auto& times = r.trajectory.times;
  if (!scenario.output.snapshot_times.empty()) {
    for (const double t : scenario.output.snapshot_times) {
      size_t best = 0;
      for (size_t k = 1; k < times.size(); ++k) {
        if (std::abs(times[k] - t) < std::abs(times[best] - t)) best = k;
      }
      idx.push_back(best);
    }
  } else {
    const size_t stride = std::max(1, scenario.output.downsample);
    for (size_t k = 0; k < times.size(); k += stride) idx.push_back(k);
    if (idx.back() != times.size() - 1) idx.push_back(times.size() - 1);
  }
  return idx;
}

// All body positions per snapshot row, for external 3D plotting.
void write_snapshots_csv(const RunResult& r, const Scenario& scenario, const fs::path& dir) {
  const SystemParams& params = scenario.params;
  std::vector<std::string> header{"time_s"};
  append_vec3(header, {"x", "y", "z"}, "payload", "_m");
  for (int i = 0; i < params.quad_count(); ++i) {
    append_vec3(header, {"x", "y", "z"}, "quad_" + std::to_string(i), "_m");
    for (int j = 0; j < params.link_count(i); ++j) {
      append_vec3(header, {"x", "y", "z"},
                  "joint_" + std::to_string(i) + "_" + std::to_string(j), "_m");
    }
  }
  CsvWriter csv(dir / "snapshots.csv", header);
  for (const size_t k : snapshot_indices(r, scenario)) {
    const FullState& s = r.trajectory.states[k];
    std::vector<double> row{r.trajectory.times[k]};
    for (int a = 0; a < 3; ++a) row.push_back(s.payload_position(a));
    for (int i = 0; i < params.quad_count(); ++i) {
      const Eigen::Vector3d xq = quadrotor_position(s, params, i);
      for (int a = 0; a < 3; ++a) row.push_back(xq(a));
      for (int j = 0; j < params.link_count(i); ++j) {
        const Eigen::Vector3d xl = link_position(s, params, i, j);
        for (int a = 0; a < 3; ++a) row.push_back(xl(a));
      }
    }
    csv.row(row);
  }
}

json certificate_json(const gains::Certificate& cert) {
  json j;
  j["pass"] = cert.pass;
  j["c3"] = cert.c3;
  j["k_max"] = cert.k_max;
  j["k_zm"] = cert.k_zm;
  j["alpha"] = cert.alpha;
  j["q_min_eigenvalue"] = cert.q_min_eigenvalue;
  j["translational_margin"] = cert.translational_margin;
  j["gamma_bound"] = cert.gamma_bound;
  j["quadrotors"] = json::array();
  for (const auto& qc : cert.quads) {
    json q;
    q["pass"] = qc.pass;
    q["b1"] = qc.b1;
    q["b2"] = qc.b2;
    q["psi1"] = qc.psi1;
    q["psi2"] = qc.psi2;
    q["alpha"] = qc.alpha;
    q["c2_limit"] = qc.c2_limit;
    q["c2_ok"] = qc.c2_ok;
    q["w2_min_eigenvalue"] = qc.w2_min_eigenvalue;
    q["w2_required"] = qc.w2_required;
    q["w2_positive"] = qc.w2_positive;
    q["coupling_ok"] = qc.coupling_ok;
    q["w_min_eigenvalue"] = qc.w_min_eigenvalue;
    j["quadrotors"].push_back(q);
  }
  return j;
}

void write_summary_json(const RunResult& r, const Scenario& scenario, const fs::path& dir) {
  json j;
  j["scenario"] = scenario.name;
  j["duration_s"] = scenario.duration;
  j["dt_s"] = scenario.integrator.dt;
  j["steps"] = r.trajectory.times.size() - 1;
  j["terminal"] = {
      {"position_error_m", r.summary.terminal_position_error},
      {"payload_psi", r.summary.terminal_payload_psi},
      {"e_q", r.summary.terminal_link_direction_error},
      {"e_omega_radps", r.summary.terminal_link_rate_error},
      {"ex_sup", r.summary.ex_sup_final},
  };
  j["max_quad_psi"] = r.summary.max_quad_psi;
  j["position_convergence_time_s"] = r.summary.position_convergence_time;
  j["lyapunov_increase_fraction"] = r.summary.lyapunov_increase_fraction;
  j["certificate"] = certificate_json(r.setup.certificate);
  j["config"] = {
      {"kz", scenario.gains.kz},
      {"kz_link", scenario.gains.kz_link},
      {"sigma", scenario.gains.sigma},
      {"kr", scenario.gains.attitude.kr},
      {"komega", scenario.gains.attitude.komega},
      {"ki", scenario.gains.attitude.ki},
      {"c2", scenario.gains.attitude.c2},
      {"feedforward", scenario.control.feedforward},
      {"decimation", scenario.control.decimation},
  };
  j["wall_seconds"] = r.summary.wall_seconds;
  std::ofstream out(dir / "summary.json");
  if (!out) throw IoError("cannot write " + (dir / "summary.json").string());
  out << j.dump(2) << "\n";
}

void write_trajectory_json(const RunResult& r, const Scenario& scenario, const fs::path& dir) {
  json j;
  j["time_s"] = r.metrics.time;
  auto vec_series = [&](auto getter) {
    json arr = json::array();
    for (const auto& s : r.trajectory.states) {
      const Eigen::Vector3d v = getter(s);
      arr.push_back({v.x(), v.y(), v.z()});
    }
    return arr;
  };
  j["payload_position_m"] = vec_series([](const FullState& s) { return s.payload_position; });
  j["payload_velocity_mps"] = vec_series([](const FullState& s) { return s.payload_velocity; });
  j["payload_attitude_log_rad"] =
      vec_series([](const FullState& s) { return log_so3(s.payload_attitude.matrix()); });
  j["position_error_m"] = r.metrics.position_error;
  j["payload_psi"] = r.metrics.payload_psi;
  j["e_q"] = r.metrics.link_direction_error;
  j["e_omega_radps"] = r.metrics.link_rate_error;
  j["lyapunov_total"] = r.metrics.lyapunov_total;
  json quads = json::array();
  for (int i = 0; i < scenario.params.quad_count(); ++i) {
    quads.push_back({{"psi", r.metrics.quad_psi[i]},
                     {"rate_error_radps", r.metrics.quad_rate_error[i]},
                     {"thrust_N", r.metrics.thrust[i]}});
  }
  j["quadrotors"] = quads;
  std::ofstream out(dir / "trajectory.json");
  if (!out) throw IoError("cannot write " + (dir / "trajectory.json").string());
  out << j.dump() << "\n";
}

void write_matrix(const Eigen::MatrixXd& m, const std::string& name, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# " << name << " " << m.rows() << " " << m.cols() << "\n";
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (m(r, c) != 0.0) out << r << " " << c << " " << fmt(m(r, c)) << "\n";
    }
  }
}

}  // namespace

void export_run(const RunResult& result, const Scenario& scenario, ExportFormat format,
                const std::string& out_dir) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
  if (format == ExportFormat::kCsv) {
    write_payload_csv(result, scenario, dir);
    write_quadrotors_csv(result, scenario, dir);
    write_metrics_csv(result, scenario, dir);
    write_snapshots_csv(result, scenario, dir);
  } else {
    write_trajectory_json(result, scenario, dir);
  }
  write_summary_json(result, scenario, dir);
}

void dump_matrices(const Setup& setup, const std::string& out_dir) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
  write_matrix(setup.linear_model.mass, "mass", dir / "mass.txt");
  write_matrix(setup.linear_model.stiffness, "stiffness", dir / "stiffness.txt");
  write_matrix(setup.linear_model.input, "input", dir / "input.txt");
  const auto closed = linearization::build_closed_loop(
      setup.linear_model, setup.gain_set.position_gain, setup.gain_set.velocity_gain);
  write_matrix(closed.dynamics, "closed_loop", dir / "closed_loop.txt");
}

}  // namespace sim
}  // namespace multilift
