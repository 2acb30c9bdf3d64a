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
#include <string>
#include <vector>

#include "wecest/harness.hpp"

namespace wecest::cli {

enum class WaveMode { catalog, single };
enum class SweepKind { none, rate, order, noise };

std::string to_string(SweepKind k);
/// Throws ValidationError naming the accepted kinds.
SweepKind parse_sweep_kind(const std::string& s);

/// Everything a subcommand needs, read from one INI file.
struct ExperimentConfig {
  FloatParams params;

  // [hydro]; an empty path selects the analytic generator.
  std::filesystem::path hydro_path;
  GridSpec grid;
  AnalyticShape shape;

  int truth_order = 4;
  int filter_order = 4;
  IrfOptions radiation_irf;
  double excitation_irf_dt = 0.005;
  double excitation_half_width = 2.0;

  WaveMode wave_mode = WaveMode::catalog;
  std::vector<int> runs;  // empty: the whole catalog
  double hs = 0.3;
  double tp = 2.37;
  std::size_t wave_components = 200;

  EstimatorConfig estimator;
  double fex_std_fraction = 0.015;
  double component_std_fraction = 0.05;

  SimConfig sim;
  double calibration_duration = 60.0;

  SweepKind sweep = SweepKind::none;
  std::vector<double> sweep_values;
  std::vector<Method> sweep_methods;  // empty: estimator.method only

  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  /// Every problem found, each prefixed by its `section.key`. Empty if valid.
  std::vector<std::string> problems() const;

  /// Loads the hydro table or generates the analytic one.
  HydroCoeffs coefficients() const;
  HarnessConfig harness() const;
  /// Catalog entries for wave.mode: the selected runs, or one entry numbered 0.
  std::vector<RunCatalogEntry> entries() const;
  /// Methods to evaluate, each with the configured component count.
  std::vector<EstimatorConfig> methods() const;
};

/// Parses an INI file. Unknown sections or keys and unparsable values throw
/// ParseError naming `section.key`; an unreadable file throws IoError.
/// Relative hydro paths resolve against the config file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Writes every field, defaults included, in the format read by load_config.
void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg);

}  // namespace wecest::cli
