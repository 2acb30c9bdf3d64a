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

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace wecest::cli;
  CLI::App app{"Wave excitation force estimation for a heaving float"};
  app.require_subcommand(1);

  std::string config;
  Overrides ov;
  std::string out_dir, method, measurements;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  const auto add_common = [&](CLI::App* sub, bool estimation) {
    sub->add_option("--config,-c", config, "experiment INI file")->required();
    sub->add_option("--out,-o", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "master seed (overrides run.seed)");
    if (estimation) {
      sub->add_option("--jobs,-j", jobs, "worker threads (overrides run.jobs)")->check(CLI::PositiveNumber);
      sub->add_option("--method", method, "direct | disturbance (overrides estimator.method)")
          ->check(CLI::IsMember({"direct", "disturbance"}));
    }
  };

  auto* validate = app.add_subcommand("validate", "check a config file");
  validate->add_option("--config,-c", config, "experiment INI file")->required();

  auto* simulate = app.add_subcommand("simulate", "write truth and measurement CSVs");
  add_common(simulate, false);

  auto* estimate = app.add_subcommand("estimate", "run the estimator on synthetic or imported data");
  add_common(estimate, true);
  estimate->add_option("--measurements,-m", measurements, "CSV with t,pos_meas,vel_meas");

  auto* sweep = app.add_subcommand("sweep", "catalog experiment or parameter sweep");
  add_common(sweep, true);

  auto* report = app.add_subcommand("report", "plot-ready aggregates of a results directory");
  std::string results_dir;
  report->add_option("dir", results_dir, "directory holding results.csv")->required();
  report->add_option("--out,-o", out_dir, "where to write (default: the results directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kDomainError;
  }

  const auto given = [](CLI::App* sub, const char* name) { return sub->count(name) > 0; };
  const auto collect = [&](CLI::App* sub) {
    if (given(sub, "--out")) ov.out = out_dir;
    if (given(sub, "--seed")) ov.seed = seed;
    if (sub->get_option_no_throw("--jobs") && given(sub, "--jobs")) ov.jobs = jobs;
    if (sub->get_option_no_throw("--method") && given(sub, "--method")) ov.method = method;
  };

  if (*validate) return cmd_validate(config, std::cout, std::cerr);
  if (*simulate) {
    collect(simulate);
    return cmd_simulate(config, ov, std::cout, std::cerr);
  }
  if (*estimate) {
    collect(estimate);
    std::optional<std::filesystem::path> m;
    if (given(estimate, "--measurements")) m = measurements;
    return cmd_estimate(config, ov, m, std::cout, std::cerr);
  }
  if (*sweep) {
    collect(sweep);
    return cmd_sweep(config, ov, std::cout, std::cerr);
  }
  std::optional<std::filesystem::path> dest;
  if (given(report, "--out")) dest = out_dir;
  return cmd_report(results_dir, dest, std::cout, std::cerr);
}
