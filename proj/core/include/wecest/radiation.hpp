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
#include <vector>

#include "wecest/hydro.hpp"

namespace wecest {

/// Radiation impulse response K(t) sampled uniformly on [0, T].
struct RadiationIRF {
  double dt = 0.0;
  std::vector<double> samples;

  double time(std::size_t i) const { return dt * static_cast<double>(i); }
  double duration() const { return dt * static_cast<double>(samples.size() - 1); }
};

/// Causal state-space realization with D = 0:
///   x' = A x + B ydot,   F_R = -C x
struct RadiationRealization {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::RowVectorXd c;
  double fit_score = 1.0;  // R^2 of the impulse-response reconstruction

  int order() const { return static_cast<int>(a.rows()); }
  /// Largest real part of the eigenvalues of A.
  double spectral_abscissa() const;
  /// C exp(A t) B.
  double impulse_response(double t) const;
};

struct IrfOptions {
  double dt = 0.01;        // s
  double duration = 20.0;  // s
};

/// Cosine transform K(t) = (2/pi) * int B(w) cos(w t) dw, trapezoidal over the
/// table grid. Throws ValidationError if |K(T)| > 1% of max|K|.
RadiationIRF compute_irf(const HydroCoeffs& coeffs, const IrfOptions& options = {});

/// Fits a stable order-n realization to the IRF by Hankel/SVD pole recovery
/// followed by a linear least-squares residue solve. Unstable poles are
/// mirrored into the left half plane. Throws FitError if no stable finite
/// realization can be produced.
RadiationRealization fit_realization(const RadiationIRF& irf, int order);

/// 1 - SSE/SST of the realization's impulse response against the IRF samples.
/// SST == 0 yields 1 when SSE <= 1e-18, else 0.
double realization_fit_score(const RadiationRealization& real, const RadiationIRF& irf);

struct RadiationOutput {
  double force;                // F_R = -C x
  Eigen::VectorXd derivative;  // A x + B ydot
};

/// Throws ValidationError on dimension mismatch.
RadiationOutput radiation_force(const RadiationRealization& real, const Eigen::VectorXd& state,
                                double heave_velocity);

/// CSV block: `order,<n>` then n rows `A,...`, one `B,...` and one `C,...`.
void write_realization(const std::filesystem::path& path, const RadiationRealization& real);
RadiationRealization read_realization(const std::filesystem::path& path);

}  // namespace wecest
