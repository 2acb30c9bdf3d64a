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

#include "wecest/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "wecest/csv.hpp"
#include "wecest/error.hpp"

namespace wecest {

namespace {

void require(bool ok, const char* field, const char* rule) {
  if (!ok) throw ValidationError(std::string("FloatParams.") + field + " must be " + rule);
}

const std::vector<std::string> kBemHeader = {"omega", "added_mass", "damping", "fx_re", "fx_im"};
constexpr std::string_view kAddedMassInfKey = "added_mass_inf";

}  // namespace

void FloatParams::validate() const {
  require(mass > 0, "mass", "> 0");
  require(added_mass_inf >= 0, "added_mass_inf", ">= 0");
  require(waterplane_area > 0, "waterplane_area", "> 0");
  require(projected_area > 0, "projected_area", "> 0");
  require(water_density > 0, "water_density", "> 0");
  require(gravity > 0, "gravity", "> 0");
  require(drag_coeff >= 0, "drag_coeff", ">= 0");
  require(linear_damping >= 0, "linear_damping", ">= 0");
  require(mooring_stiffness >= 0, "mooring_stiffness", ">= 0");
}

double FloatParams::characteristic_diameter() const {
  return 2.0 * std::sqrt(waterplane_area / std::numbers::pi);
}

void HydroCoeffs::validate() const {
  const auto n = freq_grid.size();
  if (n == 0) throw ValidationError("hydro table is empty");
  if (added_mass.size() != n || radiation_damping.size() != n || excitation.size() != n) {
    throw ValidationError("hydro table columns have inconsistent lengths");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(freq_grid[i]) || !std::isfinite(added_mass[i]) ||
        !std::isfinite(radiation_damping[i]) || !std::isfinite(excitation[i].real()) ||
        !std::isfinite(excitation[i].imag())) {
      throw ValidationError("hydro table row " + std::to_string(i + 1) + " is not finite");
    }
    if (i > 0 && !(freq_grid[i] > freq_grid[i - 1])) {
      throw ValidationError("hydro table row " + std::to_string(i + 1) +
                            ": omega not strictly increasing");
    }
    if (radiation_damping[i] < 0) {
      throw ValidationError("hydro table row " + std::to_string(i + 1) + ": negative damping");
    }
  }
  if (!(freq_grid.front() >= 0)) throw ValidationError("hydro table has negative frequency");
  if (std::none_of(excitation.begin(), excitation.end(),
                   [](const auto& c) { return std::abs(c) > 0; })) {
    throw ValidationError("hydro table excitation coefficient is zero everywhere");
  }
  if (!(added_mass_inf >= 0)) throw ValidationError("added_mass_inf must be >= 0");
}

bool HydroCoeffs::covers_spectrum(double peak_frequency) const {
  return size() >= 16 && omega_min() <= 0.2 * peak_frequency &&
         omega_max() >= 5.0 * peak_frequency;
}

HydroCoeffs load_bem_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open hydro table " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  std::optional<double> a_inf;
  {
    std::istringstream scan(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(scan, raw)) {
      ++line_no;
      auto line = csv::trim(raw);
      if (line.empty() || line.front() != '#') continue;
      line.remove_prefix(1);
      line = csv::trim(line);
      if (!line.starts_with(kAddedMassInfKey)) continue;
      line.remove_prefix(kAddedMassInfKey.size());
      line = csv::trim(line);
      if (line.empty() || line.front() != '=') continue;
      line.remove_prefix(1);
      try {
        a_inf = std::stod(std::string(csv::trim(line)));
      } catch (const std::exception&) {
        throw ParseError("bad added_mass_inf value", line_no);
      }
    }
  }

  std::istringstream body(text);
  const auto table = csv::parse(body);
  csv::require_header(table, kBemHeader);
  if (table.rows.empty()) throw ValidationError("hydro table " + path.string() + " is empty");

  HydroCoeffs c;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    if (!c.freq_grid.empty() && !(r[0] > c.freq_grid.back())) {
      throw ValidationError("hydro table line " + std::to_string(table.row_lines[i]) +
                            ": omega " + csv::format(r[0]) +
                            (r[0] == c.freq_grid.back() ? " duplicates previous row"
                                                        : " is not increasing"));
    }
    c.freq_grid.push_back(r[0]);
    c.added_mass.push_back(r[1]);
    c.radiation_damping.push_back(r[2]);
    c.excitation.emplace_back(r[3], r[4]);
  }
  c.added_mass_inf = a_inf.value_or(c.added_mass.back());
  c.validate();
  return c;
}

void write_bem_table(const std::filesystem::path& path, const HydroCoeffs& coeffs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# " << kAddedMassInfKey << " = " << csv::format(coeffs.added_mass_inf) << '\n';
  out << "omega,added_mass,damping,fx_re,fx_im\n";
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    out << csv::format(coeffs.freq_grid[i]) << ',' << csv::format(coeffs.added_mass[i]) << ','
        << csv::format(coeffs.radiation_damping[i]) << ','
        << csv::format(coeffs.excitation[i].real()) << ','
        << csv::format(coeffs.excitation[i].imag()) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

HydroCoeffs generate_analytic_coeffs(const FloatParams& params, const GridSpec& grid,
                                     const AnalyticShape& shape) {
  params.validate();
  if (!(grid.omega_min > 0) || !(grid.omega_max > grid.omega_min) || grid.n < 16) {
    throw ValidationError("grid spec requires 0 < omega_min < omega_max and n >= 16");
  }
  if (!(shape.peak_frequency > 0) || !(shape.peak_damping >= 0) ||
      !(shape.excitation_delay >= 0) || !(shape.added_mass_excess >= 0)) {
    throw ValidationError("analytic shape constants must be non-negative (peak_frequency > 0)");
  }

  const double static_force = params.water_density * params.gravity * params.waterplane_area;
  HydroCoeffs c;
  c.added_mass_inf = params.added_mass_inf;
  const double step = (grid.omega_max - grid.omega_min) / static_cast<double>(grid.n - 1);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double w = i + 1 == grid.n ? grid.omega_max : grid.omega_min + step * static_cast<double>(i);
    const double x2 = (w / shape.peak_frequency) * (w / shape.peak_frequency);
    c.freq_grid.push_back(w);
    c.radiation_damping.push_back(shape.peak_damping * x2 * std::exp(1.0 - x2));
    c.added_mass.push_back(params.added_mass_inf + shape.added_mass_excess / (1.0 + x2));
    c.excitation.push_back(std::polar(static_force / (1.0 + x2), -w * shape.excitation_delay));
  }
  c.validate();
  return c;
}

CoeffSample interp_coeffs(const HydroCoeffs& coeffs, double omega) {
  const auto& g = coeffs.freq_grid;
  if (g.empty() || !(omega >= g.front()) || !(omega <= g.back())) {
    throw OutOfRangeError("omega " + csv::format(omega) + " outside hydro grid");
  }
  const auto it = std::lower_bound(g.begin(), g.end(), omega);
  const auto hi = static_cast<std::size_t>(it - g.begin());
  if (g[hi] == omega) {
    return {coeffs.added_mass[hi], coeffs.radiation_damping[hi], coeffs.excitation[hi]};
  }
  const auto lo = hi - 1;
  const double s = (omega - g[lo]) / (g[hi] - g[lo]);
  const auto lerp = [s](auto a, auto b) { return a + s * (b - a); };
  return {lerp(coeffs.added_mass[lo], coeffs.added_mass[hi]),
          lerp(coeffs.radiation_damping[lo], coeffs.radiation_damping[hi]),
          lerp(coeffs.excitation[lo], coeffs.excitation[hi])};
}

}  // namespace wecest
