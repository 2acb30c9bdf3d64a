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

#include <complex>
#include <cstddef>
#include <filesystem>
#include <vector>

namespace wecest {

/// Physical parameters of a heaving float. SI units throughout.
struct FloatParams {
  double mass = 50.0;               // kg
  double added_mass_inf = 12.0;     // kg, infinite-frequency added mass
  double waterplane_area = 0.28;    // m^2
  double projected_area = 0.28;     // m^2, heave-projected area for drag
  double drag_coeff = 0.8;          // Morison C_D
  double linear_damping = 2.0;      // N s/m
  double mooring_stiffness = 60.0;  // N/m
  double water_density = 1000.0;    // kg/m^3
  double gravity = 9.81;            // m/s^2

  /// Throws ValidationError naming the first offending field.
  void validate() const;

  double virtual_mass() const { return mass + added_mass_inf; }
  /// Hydrostatic plus mooring stiffness, rho*g*A + K_mu.
  double restoring_stiffness() const {
    return water_density * gravity * waterplane_area + mooring_stiffness;
  }
  /// Quadratic drag factor 0.5*rho*A_p*C_D.
  double drag_factor() const {
    return 0.5 * water_density * projected_area * drag_coeff;
  }
  /// Diameter of a circle with the waterplane area.
  double characteristic_diameter() const;
};

/// Frequency-tabulated heave coefficients. Grid in rad/s, strictly increasing.
struct HydroCoeffs {
  std::vector<double> freq_grid;
  std::vector<double> added_mass;
  std::vector<double> radiation_damping;
  std::vector<std::complex<double>> excitation;
  double added_mass_inf = 0.0;

  std::size_t size() const { return freq_grid.size(); }
  double omega_min() const { return freq_grid.front(); }
  double omega_max() const { return freq_grid.back(); }

  /// Structural invariants: matching lengths, >= 1 point, strictly increasing
  /// grid, non-negative damping, non-zero excitation somewhere.
  void validate() const;

  /// True when the grid has >= 16 points and spans [0.2*wp, 5*wp].
  bool covers_spectrum(double peak_frequency) const;
};

struct GridSpec {
  double omega_min = 0.02;
  double omega_max = 60.0;
  std::size_t n = 1500;
};

/// Shape constants of the analytic coefficient generator.
///
///   B(w)   = peak_damping * (w/w0)^2 * exp(1 - (w/w0)^2)
///   |Fx|   = rho*g*A / (1 + (w/w0)^2),  arg Fx = -w * excitation_delay
///   A(w)   = A_inf + added_mass_excess / (1 + (w/w0)^2)
struct AnalyticShape {
  double peak_frequency = 12.0;    // w0, rad/s
  double peak_damping = 10.0;      // B0, N s/m
  double excitation_delay = 0.01;  // tau0, s
  double added_mass_excess = 6.0;  // kg
};

/// Reads a CSV table with header `omega,added_mass,damping,fx_re,fx_im`.
/// `#` comment lines and blank lines are skipped. The infinite-frequency
/// added mass is taken from an optional `# added_mass_inf = <value>` comment,
/// otherwise from the last row's added mass.
HydroCoeffs load_bem_table(const std::filesystem::path& path);

/// Writes the table in the format read by load_bem_table, full precision.
void write_bem_table(const std::filesystem::path& path, const HydroCoeffs& coeffs);

/// Smooth, single-peaked coefficients for a canonical float.
HydroCoeffs generate_analytic_coeffs(const FloatParams& params, const GridSpec& grid,
                                     const AnalyticShape& shape = {});

struct CoeffSample {
  double added_mass;
  double damping;
  std::complex<double> excitation;
};

/// Linear interpolation between bracketing grid points; exact at grid points.
/// Throws OutOfRangeError outside [omega_min, omega_max].
CoeffSample interp_coeffs(const HydroCoeffs& coeffs, double omega);

}  // namespace wecest
