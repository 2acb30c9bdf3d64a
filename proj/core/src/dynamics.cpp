// Copyright 2026 The wecest Authors.
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

#include "wecest/dynamics.hpp"

#include <cmath>
#include <random>
#include <string>

#include "wecest/csv.hpp"
#include "wecest/error.hpp"

namespace wecest {

namespace {

constexpr double kDivergenceBound = 1e6;

void check_finite(const Eigen::VectorXd& x, std::size_t step) {
  if (!x.allFinite()) throw DivergenceError("simulation produced a non-finite state", step);
  if (x.cwiseAbs().maxCoeff() > kDivergenceBound) {
    throw DivergenceError("simulation state exceeded 1e6", step);
  }
}

// Integrates from x0 over the half-step input grid; fills y/ydot/radiation.
void integrate(const FloatParams& params, const RadiationRealization& real, SimRun& run,
               Eigen::VectorXd x, const std::optional<std::array<double, 2>>& injection,
               std::mt19937_64* rng) {
  const std::size_t steps = run.t.size();
  const double dt = run.dt;
  const auto order = real.order();
  run.y.resize(steps);
  run.ydot.resize(steps);
  run.radiation_states.resize(static_cast<Eigen::Index>(steps), order);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const auto record = [&](std::size_t k) {
    run.y[k] = x(0);
    run.ydot[k] = x(1);
    run.radiation_states.row(static_cast<Eigen::Index>(k)) = x.tail(order).transpose();
  };
  record(0);
  for (std::size_t k = 0; k + 1 < steps; ++k) {
    const std::size_t h = 2 * k;
    const auto rhs = [&](const Eigen::VectorXd& s, std::size_t idx) {
      return eom_rhs(params, real, s, run.fex_half[idx], run.water_vel_half[idx]);
    };
    const Eigen::VectorXd k1 = rhs(x, h);
    const Eigen::VectorXd k2 = rhs(x + 0.5 * dt * k1, h + 1);
    const Eigen::VectorXd k3 = rhs(x + 0.5 * dt * k2, h + 1);
    const Eigen::VectorXd k4 = rhs(x + dt * k3, h + 2);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (injection && rng) {
      const double sq = std::sqrt(dt);
      x(0) += (*injection)[0] * sq * gauss(*rng);
      x(1) += (*injection)[1] * sq * gauss(*rng);
    }
    check_finite(x, k + 1);
    record(k + 1);
  }
}

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0)) throw ValidationError("sim.dt must be > 0");
  if (!(duration > 0)) throw ValidationError("sim.duration must be > 0");
  if (!(measurement_rate > 0)) throw ValidationError("sim.rate must be > 0");
  if (measurement_rate * dt > 1.0 + 1e-12) {
    throw ValidationError("sim.rate exceeds the integration rate 1/dt");
  }
  const double stride = 1.0 / (measurement_rate * dt);
  if (std::abs(stride - std::round(stride)) > 1e-9 * stride) {
    throw ValidationError("sim.rate must divide the integration rate 1/dt evenly");
  }
  if (!(noise_position >= 0) || !(noise_velocity >= 0)) {
    throw ValidationError("measurement noise std must be >= 0");
  }
}

std::size_t SimConfig::measurement_stride() const {
  return static_cast<std::size_t>(std::llround(1.0 / (measurement_rate * dt)));
}

Eigen::VectorXd ProcessNoiseVariance::per_state(Eigen::Index dim) const {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(dim);
  q(0) = position;
  q(1) = velocity;
  return q;
}

Eigen::VectorXd eom_rhs(const FloatParams& params, const RadiationRealization& real,
                        const Eigen::VectorXd& state, double fex, double water_vel) {
  const auto order = real.order();
  const double y = state(0);
  const double v = state(1);
  const auto xr = state.tail(order);
  const double rel = v - water_vel;
  const double force = -params.restoring_stiffness() * y - params.drag_factor() * rel * std::abs(rel) -
                       params.linear_damping * rel - (real.c * xr)(0) + fex;
  Eigen::VectorXd d(state.size());
  d(0) = v;
  d(1) = force / params.virtual_mass();
  d.tail(order) = real.a * xr + real.b * v;
  return d;
}

SimRun simulate(const FloatParams& params, const RadiationRealization& real,
                const IrregularWave& wave, const ExcitationIRF& irf, const SimConfig& cfg) {
  params.validate();
  cfg.validate();
  const auto steps = static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt)) + 1;

  SimRun run;
  run.dt = cfg.dt;
  run.wave = wave;
  run.t.resize(steps);
  for (std::size_t k = 0; k < steps; ++k) run.t[k] = cfg.dt * static_cast<double>(k);

  std::vector<double> half_grid(2 * steps - 1);
  for (std::size_t k = 0; k < half_grid.size(); ++k) {
    half_grid[k] = 0.5 * cfg.dt * static_cast<double>(k);
  }
  run.fex_half = excitation_force_truth(irf, wave, half_grid);
  run.water_vel_half.resize(half_grid.size());
  for (std::size_t k = 0; k < half_grid.size(); ++k) {
    run.water_vel_half[k] = particle_velocity(wave, half_grid[k]);
  }
  run.fex.resize(steps);
  run.water_vel.resize(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    run.fex[k] = run.fex_half[2 * k];
    run.water_vel[k] = run.water_vel_half[2 * k];
  }

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2 + real.order());
  x0(0) = cfg.initial_heave;
  x0(1) = cfg.initial_velocity;
  std::mt19937_64 process_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  integrate(params, real, run, x0, cfg.process_noise_injection, &process_rng);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t stride = cfg.measurement_stride();
  for (std::size_t k = 0; k < steps; k += stride) {
    run.measurement_index.push_back(k);
    run.measurements.t.push_back(run.t[k]);
    run.measurements.position.push_back(run.y[k] + cfg.noise_position * gauss(rng));
    run.measurements.velocity.push_back(run.ydot[k] + cfg.noise_velocity * gauss(rng));
  }
  return run;
}

SimRun resimulate(const FloatParams& params, const RadiationRealization& real, const SimRun& run) {
  if (run.fex_half.size() != 2 * run.size() - 1 || run.water_vel_half.size() != run.fex_half.size()) {
    throw ValidationError("run does not carry half-step inputs");
  }
  SimRun out;
  out.dt = run.dt;
  out.t = run.t;
  out.fex = run.fex;
  out.water_vel = run.water_vel;
  out.fex_half = run.fex_half;
  out.water_vel_half = run.water_vel_half;
  out.wave = run.wave;
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2 + real.order());
  x0(0) = run.y.front();
  x0(1) = run.ydot.front();
  integrate(params, real, out, x0, std::nullopt, nullptr);
  return out;
}

ProcessNoiseVariance calibrate_process_noise(const FloatParams& params,
                                             const RadiationRealization& real, const SimRun& run) {
  if (run.measurement_index.size() < 10) {
    throw ValidationError("calibration run needs at least 10 measurement instants");
  }
  const SimRun model = resimulate(params, real, run);
  const auto variance = [&](const std::vector<double>& truth, const std::vector<double>& sim) {
    double mean = 0.0;
    for (auto k : run.measurement_index) mean += truth[k] - sim[k];
    mean /= static_cast<double>(run.measurement_index.size());
    double acc = 0.0;
    for (auto k : run.measurement_index) {
      const double e = truth[k] - sim[k] - mean;
      acc += e * e;
    }
    return acc / static_cast<double>(run.measurement_index.size() - 1);
  };
  return {variance(run.y, model.y), variance(run.ydot, model.ydot)};
}

void write_truth_csv(const std::filesystem::path& path, const SimRun& run) {
  std::vector<std::vector<double>> rows;
  rows.reserve(run.size());
  for (std::size_t k = 0; k < run.size(); ++k) {
    rows.push_back({run.t[k], run.y[k], run.ydot[k], run.fex[k], run.water_vel[k]});
  }
  csv::write(path, {"t", "y", "ydot", "fex_true", "water_vel"}, rows);
}

void write_measurements_csv(const std::filesystem::path& path, const Measurements& m) {
  std::vector<std::vector<double>> rows;
  rows.reserve(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) rows.push_back({m.t[k], m.position[k], m.velocity[k]});
  csv::write(path, {"t", "pos_meas", "vel_meas"}, rows);
}

Measurements read_measurements_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  csv::require_header(table, {"t", "pos_meas", "vel_meas"});
  Measurements m;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    if (!m.t.empty() && !(r[0] > m.t.back())) {
      throw ParseError("measurement timestamps must be strictly increasing", table.row_lines[i]);
    }
    m.t.push_back(r[0]);
    m.position.push_back(r[1]);
    m.velocity.push_back(r[2]);
  }
  if (m.t.empty()) throw ValidationError("measurements file " + path.string() + " has no rows");
  return m;
}

SimRun read_truth_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  csv::require_header(table, {"t", "y", "ydot", "fex_true", "water_vel"});
  if (table.rows.size() < 2) throw ValidationError("truth file " + path.string() + " too short");
  SimRun run;
  for (const auto& r : table.rows) {
    run.t.push_back(r[0]);
    run.y.push_back(r[1]);
    run.ydot.push_back(r[2]);
    run.fex.push_back(r[3]);
    run.water_vel.push_back(r[4]);
  }
  run.dt = (run.t.back() - run.t.front()) / static_cast<double>(run.t.size() - 1);
  for (std::size_t k = 0; k < run.size(); ++k) {
    run.fex_half.push_back(run.fex[k]);
    run.water_vel_half.push_back(run.water_vel[k]);
    if (k + 1 < run.size()) {
      run.fex_half.push_back(0.5 * (run.fex[k] + run.fex[k + 1]));
      run.water_vel_half.push_back(0.5 * (run.water_vel[k] + run.water_vel[k + 1]));
    }
  }
  return run;
}

}  // namespace wecest
