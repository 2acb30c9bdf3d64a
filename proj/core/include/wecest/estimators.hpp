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
#include <optional>
#include <string>
#include <vector>

#include "wecest/dynamics.hpp"
#include "wecest/ekf.hpp"
#include "wecest/hydro.hpp"
#include "wecest/radiation.hpp"
#include "wecest/waves.hpp"

namespace wecest {

enum class Method { direct, disturbance };

std::string to_string(Method m);
/// Accepts "direct" or "disturbance"; throws ValidationError otherwise.
Method parse_method(const std::string& s);

/// Index map of an augmented heave state.
///   direct:      [y, ydot, F_ex, x_r...]
///   disturbance: [y, ydot, f_1..f_N, fdot_1..fdot_N, x_r...]
struct StateLayout {
  Method method = Method::direct;
  Eigen::Index components = 1;  // 1 for direct
  Eigen::Index radiation_order = 0;

  Eigen::Index dim() const;
  Eigen::Index force_begin() const { return 2; }
  Eigen::Index rate_begin() const { return 2 + components; }  // disturbance only
  Eigen::Index radiation_begin() const;
  /// Total excitation force carried by `x`.
  double excitation(const Eigen::VectorXd& x) const;
};

/// EKF model plus the layout needed to read it. Input u = [water velocity].
struct AugmentedModel {
  EkfModel model;
  StateLayout layout;
  std::vector<double> frequencies;  // disturbance only, rad/s
};

/// Random-walk excitation state; G routes `fex_process_std` into F_ex.
AugmentedModel build_direct_model(const FloatParams& params, const RadiationRealization& real,
                                  double fex_process_std);

/// Harmonic oscillators f_i'' = -w_i^2 f_i at the selected frequencies, noise
/// on each fdot_i with std `component_process_std`.
AugmentedModel build_disturbance_model(const FloatParams& params, const RadiationRealization& real,
                                       const EqualEnergySelection& selection,
                                       double component_process_std);

/// Process noise intensity for the layout: (position, velocity) from the
/// calibration, unit intensity on the augmented channels (scaled by G).
Eigen::MatrixXd augmented_process_noise(const StateLayout& layout, const ProcessNoiseVariance& q);

/// Elevation from the estimated excitation, eta = F / |Fx(wp)|, and water
/// velocity by a two-point backward difference at the update cadence.
class WaterVelocityEstimator {
 public:
  struct Estimate {
    double elevation = 0.0;
    double velocity = 0.0;
  };

  /// Throws ValidationError unless fx_norm_at_peak > 0.
  WaterVelocityEstimator(double peak_frequency, double fx_norm_at_peak);

  Estimate update(double fex_estimate, double t);
  bool primed() const { return count_ >= 2; }
  double peak_frequency() const { return peak_frequency_; }
  double fx_norm_at_peak() const { return fx_norm_; }

 private:
  double peak_frequency_;
  double fx_norm_;
  std::array<double, 2> elevation_{};
  std::array<double, 2> time_{};
  std::size_t count_ = 0;
};

struct DisturbanceInitial {
  std::vector<double> force;  // f_i(0)
  std::vector<double> rate;   // fdot_i(0)
};

/// f_i(0) = 0, fdot_i(0) = a_i w_i with a_i = sqrt(2 P_i) |Fx(w_i)|.
DisturbanceInitial initial_conditions_disturbance(const EqualEnergySelection& selection,
                                                  const HydroCoeffs& coeffs);

struct EstimatorConfig {
  Method method = Method::direct;
  std::size_t n_components = 3;
  double fex_process_std = 0.0;        // N/sqrt(s); direct method
  double component_process_std = 0.0;  // N/s/sqrt(s); disturbance method
  double power_threshold = 0.01;
  double measurement_noise = kBaseMeasurementNoise;  // std of pos and vel, for R
  double max_step = 0.005;  // s, longest propagation sub-step
  /// When false, the water velocity input is held at zero.
  bool estimate_water_velocity = true;
  /// The input is held at zero for this long after the first sample, while
  /// the force estimate converges from its prior.
  double water_velocity_delay = 2.0;  // s
  /// The input is clamped to +-limit * (Hs / 2) * wp, a multiple of the
  /// particle velocity amplitude of the significant wave. <= 0 disables.
  double water_velocity_limit = 3.0;
};

struct SeaState {
  double hs = 0.0;
  double tp = 0.0;
};

struct EstimateResult {
  std::vector<double> t;
  std::vector<double> fex;
  std::vector<double> elevation;
  std::vector<double> water_vel;  // after the start-up hold and the clamp
  std::vector<double> y;
  std::vector<double> ydot;
  FilterTrajectory trajectory;
  std::vector<double> frequencies;  // disturbance components, if any

  std::size_t size() const { return t.size(); }
};

/// Runs the augmented EKF over a measurement record, closing the drag term
/// with the water-velocity estimator.
EstimateResult estimate_excitation(const FloatParams& params, const RadiationRealization& real,
                                   const HydroCoeffs& coeffs, const SeaState& sea,
                                   const Measurements& measurements,
                                   const ProcessNoiseVariance& process_noise,
                                   const EstimatorConfig& config);

}  // namespace wecest
