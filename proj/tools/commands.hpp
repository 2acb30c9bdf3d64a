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
#include <iosfwd>
#include <optional>
#include <string>

namespace wecest::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kDomainError = 1, kIoError = 2 };

/// Command-line overrides applied on top of the config file.
struct Overrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::string> method;  // direct | disturbance
};

int cmd_validate(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

/// Truth and measurement CSVs for every configured run.
int cmd_simulate(const std::filesystem::path& config, const Overrides& ov, std::ostream& out,
                 std::ostream& err);

/// Estimates on synthetic runs, or on `measurements` when given (wave.mode
/// must be single so that the sea state is known).
int cmd_estimate(const std::filesystem::path& config, const Overrides& ov,
                 const std::optional<std::filesystem::path>& measurements, std::ostream& out,
                 std::ostream& err);

/// results.csv, summary.csv and the resolved config.ini.
int cmd_sweep(const std::filesystem::path& config, const Overrides& ov, std::ostream& out,
              std::ostream& err);

/// Aggregates `results_dir`/results.csv into quartiles.csv, trend.csv and
/// size_ratio.csv; overlay.csv is re-run from the echoed config.ini if present.
int cmd_report(const std::filesystem::path& results_dir, const std::optional<std::filesystem::path>& out_dir,
               std::ostream& out, std::ostream& err);

}  // namespace wecest::cli
