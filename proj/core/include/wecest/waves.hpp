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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "wecest/hydro.hpp"

namespace wecest {

/// One-sided wave energy spectrum S(w) in m^2 s/rad.
struct WaveSpectrum {
  double hs = 0.0;  // m
  double tp = 0.0;  // s
  std::function<double(double)> density;
  /// Frequency band outside of which S is negligible; used for quadrature.
  double support_min = 0.0;
  double support_max = 0.0;

  double peak_frequency() const;
  double operator()(double omega) const { return density(omega); }
};

/// S(w) = 5/16 Hs^2 wp^4 w^-5 exp(-5/4 (wp/w)^4), wp = 2 pi / Tp.
WaveSpectrum bretschneider(double hs, double tp);

/// Flat density on [lo, hi]; used to exercise the selectors on a trivial case.
WaveSpectrum flat_spectrum(double level, double lo, double hi);

/// Trapezoidal integral of S over [lo, hi] with `n` intervals.
double spectral_energy(const WaveSpectrum& spec, double lo, double hi, std::size_t n = 20000);

/// Sum of cosines  eta(t) = sum a_i cos(w_i t + phi_i).
struct IrregularWave {
  std::vector<double> freqs;       // rad/s
  std::vector<double> amplitudes;  // m
  std::vector<double> phases;      // rad, [0, 2 pi)
  std::uint64_t seed = 0;

  std::size_t size() const { return freqs.size(); }
};

/// `n` equally spaced components over [0.5 wp, 4 wp] (or the spectrum support
/// when no peak period is set), amplitude sqrt(2 dw S(w_i)), phases uniform
/// from a generator seeded with `seed`.
IrregularWave sample_irregular_wave(const WaveSpectrum& spec, std::size_t n, std::uint64_t seed);

/// Single-component wave.
IrregularWave monochromatic_wave(double amplitude, double omega, double phase = 0.0);

/// Component lists concatenated with amplitudes scaled by alpha and beta.
IrregularWave superpose(const IrregularWave& w1, double alpha, const IrregularWave& w2,
                        double beta);

double surface_elevation(const IrregularWave& wave, double t);
/// Exact time derivative of surface_elevation.
double particle_velocity(const IrregularWave& wave, double t);

/// Two-sided excitation impulse response sampled on [-T_c, T_c].
struct ExcitationIRF {
  double dt = 0.0;
  double half_width = 0.0;  // T_c
  std::vector<double> samples;  // index 0 is t = -T_c

  std::size_t half_count() const { return (samples.size() - 1) / 2; }
  double time(std::size_t i) const {
    return dt * (static_cast<double>(i) - static_cast<double>(half_count()));
  }
};

/// F_IRF(t) = (1/pi) int [Re Fx cos(w t) - Im Fx sin(w t)] dw over the table
/// grid. Throws ValidationError if either end exceeds 1% of the peak.
ExcitationIRF excitation_irf(const HydroCoeffs& coeffs, double dt, double half_width);

/// Trapezoidal convolution F(t) = int F_IRF(tau) eta(t - tau) dtau on
/// [-T_c, T_c], evaluated at each point of a uniform grid. The IRF step must
/// be an integer multiple of the grid step.
std::vector<double> excitation_force_truth(const ExcitationIRF& irf, const IrregularWave& wave,
                                           std::span<const double> time_grid);

/// CSV `t,elevation,velocity,fex_true` of `wave` on `time_grid`.
void write_wave_series_csv(const std::filesystem::path& path, const IrregularWave& wave,
                           const ExcitationIRF& irf, std::span<const double> time_grid);

struct EqualEnergySelection {
  std::vector<double> freqs;           // N representative frequencies
  std::vector<double> edges;           // N+1 division boundaries
  std::vector<double> component_power; // m^2 per division
};

/// Clips the band to S >= threshold * max S, splits it into `n` divisions of
/// equal energy and picks in each the lowest frequency where S equals the
/// division's mean density.
EqualEnergySelection equal_energy_select(const WaveSpectrum& spec, std::size_t n,
                                         double power_threshold = 0.01);

}  // namespace wecest
