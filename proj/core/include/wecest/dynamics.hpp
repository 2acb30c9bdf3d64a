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

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "wecest/hydro.hpp"
#include "wecest/radiation.hpp"
#include "wecest/waves.hpp"

namespace wecest {

/// Standard deviation of the position/velocity sensor noise of the tank data.
inline constexpr double kBaseMeasurementNoise = 6.075e-4;

struct SimConfig {
  double dt = 1.0 / 200.0;  // s, RK4 step
  double duration = 300.0;  // s
  double measurement_rate = 200.0;  // Hz
  double noise_position = kBaseMeasurementNoise;  // m
  double noise_velocity = kBaseMeasurementNoise;  // m/s
  /// Optional per-step std of random-walk increments on (y, ydot), per sqrt(s).
  std::optional<std::array<double, 2>> process_noise_injection;
  double initial_heave = 0.0;     // m
  double initial_velocity = 0.0;  // m/s
  std::uint64_t seed = 0;

  void validate() const;
  /// Number of RK4 steps between two measurements.
  std::size_t measurement_stride() const;
};

struct Measurements {
  std::vector<double> t;
  std::vector<double> position;
  std::vector<double> velocity;

  std::size_t size() const { return t.size(); }
};

/// Ground-truth record. Inputs are kept on the half-step grid so that the
/// same excitation can drive a re-simulation with a different model.
struct SimRun {
  double dt = 0.0;
  std::vector<double> t;
  std::vector<double> y;
  std::vector<double> ydot;
  Eigen::MatrixXd radiation_states;  // steps x order
  std::vector<double> fex;           // at t
  std::vector<double> water_vel;     // at t
  std::vector<double> fex_half;      // at k*dt/2
  std::vector<double> water_vel_half;
  Measurements measurements;
  std::vector<std::size_t> measurement_index;  // into t
  std::optional<IrregularWave> wave;

  std::size_t size() const { return t.size(); }
};

/// Heave state layout [y, ydot, x_r...].
Eigen::VectorXd eom_rhs(const FloatParams& params, const RadiationRealization& real,
                        const Eigen::VectorXd& state, double fex, double water_vel);

/// Fixed-step RK4 truth simulation driven by the convolution excitation and
/// the wave particle velocity, with seeded Gaussian measurement noise.
/// Throws DivergenceError on a non-finite state or |state| > 1e6.
SimRun simulate(const FloatParams& params, const RadiationRealization& real,
                const IrregularWave& wave, const ExcitationIRF& irf, const SimConfig& cfg);

/// Re-integrates `run`'s recorded inputs through `params`/`real` from the same
/// initial state. Returns a run with the same grid and no measurements.
SimRun resimulate(const FloatParams& params, const RadiationRealization& real, const SimRun& run);

struct ProcessNoiseVariance {
  double position = 0.0;  // m^2
  double velocity = 0.0;  // (m/s)^2

  /// Per-state diagonal for a layout [y, ydot, <extra zeros>].
  Eigen::VectorXd per_state(Eigen::Index dim) const;
};

/// Variance of (truth - model variant) at the measurement instants, model
/// variant driven by the run's true inputs. Radiation states get none.
/// Throws ValidationError for runs with fewer than 10 measurements.
ProcessNoiseVariance calibrate_process_noise(const FloatParams& params,
                                             const RadiationRealization& real, const SimRun& run);

/// Truth CSV `t,y,ydot,fex_true,water_vel` and measurements CSV
/// `t,pos_meas,vel_meas`.
void write_truth_csv(const std::filesystem::path& path, const SimRun& run);
void write_measurements_csv(const std::filesystem::path& path, const Measurements& m);
Measurements read_measurements_csv(const std::filesystem::path& path);
/// Rebuilds a truth-only run (no radiation states, half-step inputs linearly
/// interpolated) from a truth CSV.
SimRun read_truth_csv(const std::filesystem::path& path);

}  // namespace wecest
