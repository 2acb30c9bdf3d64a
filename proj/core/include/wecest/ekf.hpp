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
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace wecest {

/// Continuous-discrete model
///   x' = f(x, u, t) + G w,   w ~ N(0, Q)
///   z  = h(x, t) + v,        v ~ N(0, R)
/// with analytic Jacobians F = df/dx and H = dh/dx.
struct EkfModel {
  using Vector = Eigen::VectorXd;
  using Matrix = Eigen::MatrixXd;

  Eigen::Index state_dim = 0;
  Eigen::Index measurement_dim = 0;
  std::function<Vector(const Vector& x, const Vector& u, double t)> dynamics;
  std::function<Matrix(const Vector& x, const Vector& u, double t)> dynamics_jacobian;
  std::function<Vector(const Vector& x, double t)> measurement;
  std::function<Matrix(const Vector& x, double t)> measurement_jacobian;
  Matrix noise_map;  // G, state_dim x noise_dim
};

struct NoiseSpec {
  Eigen::MatrixXd q;  // process noise spectral density, noise_dim square
  Eigen::MatrixXd r;  // measurement noise covariance

  /// Symmetric, Q PSD, R PD. Throws ValidationError.
  void validate() const;
};

struct EkfState {
  Eigen::VectorXd x;
  Eigen::MatrixXd p;
  double t = 0.0;
};

struct Innovation {
  Eigen::VectorXd residual;    // z - h(x)
  Eigen::MatrixXd covariance;  // H P H' + R
};

struct UpdateResult {
  EkfState state;
  Innovation innovation;
};

struct PropagateOptions {
  /// Longest RK4 sub-step; intervals are split evenly. <= 0 means one step.
  double max_step = 0.005;
  /// Further splits the interval so that h * ||F||_inf <= stiffness_limit,
  /// with F evaluated at the interval start, using at most 64x the
  /// max_step count. <= 0 disables the check.
  double stiffness_limit = 0.5;
};

/// Joint RK4 of x' = f and P' = F P + P F' + G Q G' over `dt`, input held
/// constant; P is symmetrized afterwards. Throws DivergenceError on
/// non-finite output.
EkfState propagate(const EkfModel& model, const NoiseSpec& noise, const EkfState& state,
                   const Eigen::VectorXd& u, double dt, const PropagateOptions& options = {});

/// Kalman update with the Joseph-form covariance. Throws SingularUpdateError
/// if H P H' + R is not positive definite.
UpdateResult update(const EkfModel& model, const NoiseSpec& noise, const EkfState& state,
                    const Eigen::VectorXd& z);

/// One entry of a measurement stream; an empty `z` only propagates.
struct MeasurementSample {
  double t = 0.0;
  std::optional<Eigen::VectorXd> z;
};

/// Supplies the (held) input for the interval after each recorded state.
using InputProvider = std::function<Eigen::VectorXd(const EkfState& state)>;

struct CovarianceDiagnostics {
  double max_asymmetry = 0.0;         // max |P - P'| over all recorded states
  double min_diagonal = std::numeric_limits<double>::infinity();    // min P_ii over all recorded states
  std::size_t updates = 0;
};

struct FilterTrajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> p_diag;
  std::vector<Eigen::VectorXd> innovation;  // empty vector where no update
  CovarianceDiagnostics diagnostics;
  EkfState final_state;

  std::size_t size() const { return t.size(); }
};

/// Alternates propagate-to-timestamp and update along the stream; records
/// the posterior at every sample. Timestamps must be strictly increasing and
/// not earlier than `initial.t`.
FilterTrajectory run_filter(const EkfModel& model, const NoiseSpec& noise, const EkfState& initial,
                            const std::vector<MeasurementSample>& stream,
                            const InputProvider& input, const PropagateOptions& options = {});

struct JacobianSample {
  Eigen::VectorXd x;
  Eigen::VectorXd u;
  double t = 0.0;
};

struct JacobianReport {
  double max_deviation = 0.0;  // |analytic - fd| / max(|analytic|, |fd|, 1)
  bool passed = true;
  std::string worst_block;     // "dynamics" or "measurement"
  Eigen::Index worst_row = -1;
  Eigen::Index worst_col = -1;
  std::size_t worst_sample = 0;
};

/// CSV `t,xhat_0..,pdiag_0..,innov_0..`; innovation fields are empty where
/// no update happened.
void write_trajectory_csv(const std::filesystem::path& path, const FilterTrajectory& traj);

/// Compares the analytic Jacobians against central finite differences.
JacobianReport check_jacobians(const EkfModel& model, const std::vector<JacobianSample>& samples,
                               double tolerance = 1e-4);

/// Max |P - P'|.
double asymmetry(const Eigen::MatrixXd& p);

}  // namespace wecest
