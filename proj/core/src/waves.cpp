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

#include "wecest/waves.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "wecest/csv.hpp"
#include "wecest/error.hpp"

namespace wecest {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kSelectGrid = 20000;

// Lowest point of (lo, hi) where s(w) == level, by scan then bisection.
double first_crossing(const WaveSpectrum& spec, double lo, double hi, double level) {
  constexpr int kScan = 400;
  const double h = (hi - lo) / kScan;
  double prev_w = lo;
  double prev = spec(lo) - level;
  for (int k = 1; k <= kScan; ++k) {
    const double w = k == kScan ? hi : lo + h * k;
    const double cur = spec(w) - level;
    if (std::abs(cur) <= 1e-12 * std::abs(level) && k < kScan) return w;
    if ((prev < 0) != (cur < 0) && k > 0) {
      double a = prev_w, b = w, fa = prev;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = spec(mid) - level;
        if ((fa < 0) == (fm < 0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      const double root = 0.5 * (a + b);
      return std::clamp(root, std::nextafter(lo, hi), std::nextafter(hi, lo));
    }
    prev_w = w;
    prev = cur;
  }
  // No crossing sampled: fall back to the midpoint.
  return 0.5 * (lo + hi);
}

// Bisection for s(w) == level on [a, b] where the sign differs at the ends.
double bisect_level(const WaveSpectrum& spec, double a, double b, double level) {
  double fa = spec(a) - level;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = spec(mid) - level;
    if ((fa < 0) == (fm < 0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double WaveSpectrum::peak_frequency() const {
  return tp > 0 ? kTwoPi / tp : 0.5 * (support_min + support_max);
}

WaveSpectrum bretschneider(double hs, double tp) {
  if (!(hs > 0) || !(tp > 0)) {
    throw ValidationError("Bretschneider spectrum requires Hs > 0 and Tp > 0");
  }
  const double wp = kTwoPi / tp;
  WaveSpectrum s;
  s.hs = hs;
  s.tp = tp;
  s.support_min = 0.25 * wp;
  s.support_max = 10.0 * wp;
  s.density = [hs, wp](double w) {
    if (!(w > 0)) return 0.0;
    const double r = wp / w;
    const double r4 = r * r * r * r;
    if (r4 > 500.0) return 0.0;
    return 5.0 / 16.0 * hs * hs * r4 / w * std::exp(-1.25 * r4);
  };
  return s;
}

WaveSpectrum flat_spectrum(double level, double lo, double hi) {
  if (!(level >= 0) || !(hi > lo) || !(lo >= 0)) {
    throw ValidationError("flat spectrum requires level >= 0 and 0 <= lo < hi");
  }
  WaveSpectrum s;
  s.support_min = lo;
  s.support_max = hi;
  s.density = [level, lo, hi](double w) { return (w >= lo && w <= hi) ? level : 0.0; };
  // Hs from m0 = level * (hi - lo).
  s.hs = 4.0 * std::sqrt(level * (hi - lo));
  return s;
}

double spectral_energy(const WaveSpectrum& spec, double lo, double hi, std::size_t n) {
  const double h = (hi - lo) / static_cast<double>(n);
  double acc = 0.5 * (spec(lo) + spec(hi));
  for (std::size_t i = 1; i < n; ++i) acc += spec(lo + h * static_cast<double>(i));
  return acc * h;
}

IrregularWave sample_irregular_wave(const WaveSpectrum& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("irregular wave needs at least one component");
  double lo = spec.support_min, hi = spec.support_max;
  if (spec.tp > 0) {
    lo = 0.5 * spec.peak_frequency();
    hi = 4.0 * spec.peak_frequency();
  }
  const double dw = (hi - lo) / static_cast<double>(n);
  std::mt19937_64 rng(seed);
  IrregularWave wave;
  wave.seed = seed;
  wave.freqs.reserve(n);
  wave.amplitudes.reserve(n);
  wave.phases.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = lo + dw * (static_cast<double>(i) + 0.5);
    wave.freqs.push_back(w);
    wave.amplitudes.push_back(std::sqrt(2.0 * dw * spec(w)));
    double phase = kTwoPi * std::generate_canonical<double, 53>(rng);
    if (phase >= kTwoPi) phase = 0.0;
    wave.phases.push_back(phase);
  }
  return wave;
}

IrregularWave monochromatic_wave(double amplitude, double omega, double phase) {
  IrregularWave w;
  w.freqs = {omega};
  w.amplitudes = {amplitude};
  w.phases = {phase};
  return w;
}

IrregularWave superpose(const IrregularWave& w1, double alpha, const IrregularWave& w2,
                        double beta) {
  IrregularWave out = w1;
  for (auto& a : out.amplitudes) a *= alpha;
  for (std::size_t i = 0; i < w2.size(); ++i) {
    out.freqs.push_back(w2.freqs[i]);
    out.amplitudes.push_back(beta * w2.amplitudes[i]);
    out.phases.push_back(w2.phases[i]);
  }
  return out;
}

double surface_elevation(const IrregularWave& wave, double t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < wave.size(); ++i) {
    acc += wave.amplitudes[i] * std::cos(wave.freqs[i] * t + wave.phases[i]);
  }
  return acc;
}

double particle_velocity(const IrregularWave& wave, double t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < wave.size(); ++i) {
    acc -= wave.amplitudes[i] * wave.freqs[i] * std::sin(wave.freqs[i] * t + wave.phases[i]);
  }
  return acc;
}

ExcitationIRF excitation_irf(const HydroCoeffs& coeffs, double dt, double half_width) {
  coeffs.validate();
  if (!(dt > 0) || !(half_width >= dt)) {
    throw ValidationError("excitation IRF requires 0 < dt <= T_c");
  }
  const auto& w = coeffs.freq_grid;
  const std::size_t m = w.size();
  std::vector<double> weight(m, 0.0);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double half = 0.5 * (w[i + 1] - w[i]);
    weight[i] += half;
    weight[i + 1] += half;
  }

  ExcitationIRF irf;
  irf.dt = dt;
  const auto k = static_cast<std::size_t>(std::llround(half_width / dt));
  irf.half_width = dt * static_cast<double>(k);
  irf.samples.resize(2 * k + 1);
  double peak = 0.0;
  for (std::size_t j = 0; j < irf.samples.size(); ++j) {
    const double t = irf.time(j);
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& fx = coeffs.excitation[i];
      acc += weight[i] * (fx.real() * std::cos(w[i] * t) - fx.imag() * std::sin(w[i] * t));
    }
    irf.samples[j] = acc / std::numbers::pi;
    peak = std::max(peak, std::abs(irf.samples[j]));
  }
  if (std::max(std::abs(irf.samples.front()), std::abs(irf.samples.back())) > 0.01 * peak) {
    throw ValidationError("excitation IRF is not contained in +-" + csv::format(irf.half_width) +
                          " s; use a larger T_c");
  }
  return irf;
}

std::vector<double> excitation_force_truth(const ExcitationIRF& irf, const IrregularWave& wave,
                                           std::span<const double> time_grid) {
  if (time_grid.empty()) return {};
  if (irf.samples.empty() || !(irf.dt > 0)) throw ValidationError("excitation IRF is empty");
  const std::size_t n = time_grid.size();
  double h = irf.dt;
  std::size_t ratio = 1;
  if (n > 1) {
    h = (time_grid[n - 1] - time_grid[0]) / static_cast<double>(n - 1);
    if (!(h > 0)) throw ValidationError("time grid must be increasing");
    for (std::size_t k = 1; k < n; ++k) {
      const double expected = time_grid[0] + h * static_cast<double>(k);
      if (std::abs(time_grid[k] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
        throw ValidationError("time grid is not uniform at index " + std::to_string(k));
      }
    }
    const double r = irf.dt / h;
    ratio = static_cast<std::size_t>(std::llround(r));
    if (ratio < 1 || std::abs(r - static_cast<double>(ratio)) > 1e-9 * r) {
      throw ValidationError("IRF step " + csv::format(irf.dt) +
                            " s is not an integer multiple of the grid step " + csv::format(h) +
                            " s");
    }
  }

  const std::size_t half = irf.half_count();
  const std::size_t pad = half * ratio;
  // eta sampled on the grid extended by T_c on both sides.
  std::vector<double> eta(n + 2 * pad);
  for (std::size_t j = 0; j < eta.size(); ++j) {
    const double t = time_grid[0] + h * (static_cast<double>(j) - static_cast<double>(pad));
    eta[j] = surface_elevation(wave, t);
  }

  std::vector<double> weights(irf.samples.size());
  for (std::size_t q = 0; q < weights.size(); ++q) {
    const bool end = q == 0 || q + 1 == weights.size();
    weights[q] = irf.samples[q] * irf.dt * (end ? 0.5 : 1.0);
  }

  // F(t_k) = sum_q w_q eta(t_k - tau_q),  tau_q = (q - half) * irf.dt.
  std::vector<double> force(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    const std::size_t base = k + pad + half * ratio;  // index of t_k - tau_0
    for (std::size_t q = 0; q < weights.size(); ++q) acc += weights[q] * eta[base - q * ratio];
    force[k] = acc;
  }
  return force;
}

EqualEnergySelection equal_energy_select(const WaveSpectrum& spec, std::size_t n,
                                         double power_threshold) {
  if (n < 1) throw ValidationError("equal-energy selection needs N >= 1");
  if (!(power_threshold >= 0) || !(power_threshold < 1)) {
    throw ValidationError("power threshold must lie in [0, 1)");
  }
  if (n > kSelectGrid / 16) {
    throw ValidationError("N = " + std::to_string(n) + " too large for selection grid resolution");
  }

  // Locate the clipped band on a dense scan.
  const double lo = spec.support_min, hi = spec.support_max;
  const double h = (hi - lo) / static_cast<double>(kSelectGrid);
  std::vector<double> s(kSelectGrid + 1);
  for (std::size_t i = 0; i <= kSelectGrid; ++i) s[i] = spec(lo + h * static_cast<double>(i));
  const auto peak_it = std::max_element(s.begin(), s.end());
  const double level = power_threshold * *peak_it;
  auto first = static_cast<std::size_t>(peak_it - s.begin());
  auto last = first;
  while (first > 0 && s[first - 1] >= level) --first;
  while (last < kSelectGrid && s[last + 1] >= level) ++last;
  double band_lo = lo + h * static_cast<double>(first);
  double band_hi = lo + h * static_cast<double>(last);
  if (first > 0 && power_threshold > 0) band_lo = bisect_level(spec, band_lo - h, band_lo, level);
  if (last < kSelectGrid && power_threshold > 0) {
    band_hi = bisect_level(spec, band_hi, band_hi + h, level);
  }

  // Cumulative energy on a uniform grid over the clipped band.
  const double bh = (band_hi - band_lo) / static_cast<double>(kSelectGrid);
  std::vector<double> sv(kSelectGrid + 1), cum(kSelectGrid + 1, 0.0);
  for (std::size_t i = 0; i <= kSelectGrid; ++i) {
    sv[i] = spec(band_lo + bh * static_cast<double>(i));
  }
  for (std::size_t i = 1; i <= kSelectGrid; ++i) cum[i] = cum[i - 1] + 0.5 * bh * (sv[i - 1] + sv[i]);
  const double total = cum.back();
  if (!(total > 0)) throw ValidationError("spectrum has no energy above the power threshold");

  EqualEnergySelection sel;
  sel.edges.push_back(band_lo);
  std::size_t j = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const double target = total * static_cast<double>(i) / static_cast<double>(n);
    while (j + 1 < kSelectGrid && cum[j + 1] < target) ++j;
    // Invert the trapezoid segment: cum(x) = cum_j + s_j x + (s_j1 - s_j) x^2 / (2 bh).
    const double rem = target - cum[j];
    const double a = 0.5 * (sv[j + 1] - sv[j]) / bh;
    const double b = sv[j];
    double x;
    if (std::abs(a) * bh < 1e-12 * std::max(b, 1e-300)) {
      x = rem / b;
    } else {
      x = (-b + std::sqrt(std::max(b * b + 4.0 * a * rem, 0.0))) / (2.0 * a);
    }
    x = std::clamp(x, 0.0, bh);
    sel.edges.push_back(band_lo + bh * static_cast<double>(j) + x);
  }
  sel.edges.push_back(band_hi);

  for (std::size_t i = 0; i < n; ++i) {
    const double e0 = sel.edges[i], e1 = sel.edges[i + 1];
    if (!(e1 - e0 > 4.0 * bh)) {
      throw ValidationError("N = " + std::to_string(n) + " too large for selection grid resolution");
    }
    const double power = total / static_cast<double>(n);
    sel.component_power.push_back(power);
    sel.freqs.push_back(first_crossing(spec, e0, e1, power / (e1 - e0)));
  }
  return sel;
}

void write_wave_series_csv(const std::filesystem::path& path, const IrregularWave& wave,
                           const ExcitationIRF& irf, std::span<const double> time_grid) {
  const auto fex = excitation_force_truth(irf, wave, time_grid);
  std::vector<std::vector<double>> rows;
  rows.reserve(time_grid.size());
  for (std::size_t k = 0; k < time_grid.size(); ++k) {
    const double t = time_grid[k];
    rows.push_back({t, surface_elevation(wave, t), particle_velocity(wave, t), fex[k]});
  }
  csv::write(path, {"t", "elevation", "velocity", "fex_true"}, rows);
}

}  // namespace wecest
