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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>

#include "config.hpp"
#include "wecest/csv.hpp"
#include "wecest/error.hpp"

namespace wecest::cli {

namespace fs = std::filesystem;

namespace {

// Maps library errors onto the exit-code contract.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
}

std::optional<ExperimentConfig> load_checked(const fs::path& path, const Overrides& ov, std::ostream& err) {
  auto cfg = load_config(path);
  if (ov.out) cfg.output_dir = *ov.out;
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.jobs) cfg.jobs = *ov.jobs;
  if (ov.method) {
    cfg.estimator.method = parse_method(*ov.method);
    cfg.sweep_methods.clear();
  }
  const auto problems = cfg.problems();
  if (problems.empty()) return cfg;
  for (const auto& p : problems) err << path.string() << ": " << p << '\n';
  return std::nullopt;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::string run_suffix(const ExperimentConfig& cfg, int run_no) {
  if (cfg.wave_mode == WaveMode::single) return "";
  char buf[16];
  std::snprintf(buf, sizeof buf, "_run%02d", run_no);
  return buf;
}

std::string slug(const std::string& label) {
  std::string s = label;
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

void write_estimate(const fs::path& path, const EstimateResult& r, const SimRun* truth) {
  std::vector<std::string> header = {"t", "fex", "elevation", "water_vel", "y", "ydot"};
  if (truth) {
    header.push_back("fex_true");
    header.push_back("water_vel_true");
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    std::vector<double> row = {r.t[k], r.fex[k], r.elevation[k], r.water_vel[k], r.y[k], r.ydot[k]};
    if (truth) {
      const auto i = truth->measurement_index[k];
      row.push_back(truth->fex[i]);
      row.push_back(truth->water_vel[i]);
    }
    rows.push_back(std::move(row));
  }
  csv::write(path, header, rows);
}

IrregularWave wave_for(const ExperimentConfig& cfg, const RunCatalogEntry& entry, std::uint64_t seed) {
  if (entry.hs == 0) return {};
  return sample_irregular_wave(bretschneider(entry.hs, entry.tp), cfg.wave_components, seed);
}

}  // namespace

int cmd_validate(const fs::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const auto cfg = load_checked(config, {}, err);
    if (!cfg) return kDomainError;
    const auto coeffs = cfg->coefficients();
    for (const auto& e : cfg->entries()) {
      if (e.tp > 0 && !coeffs.covers_spectrum(2.0 * std::numbers::pi / e.tp)) {
        err << config.string() << ": hydro table does not cover the spectrum of run " << e.run_no << '\n';
        return kDomainError;
      }
    }
    out << config.string() << ": ok (" << cfg->entries().size() << " run(s), sweep "
        << to_string(cfg->sweep) << ")\n";
    return kOk;
  });
}

int cmd_simulate(const fs::path& config, const Overrides& ov, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const auto cfg = load_checked(config, ov, err);
    if (!cfg) return kDomainError;
    Experiment exp(cfg->harness());
    make_dir(cfg->output_dir);
    save_config(cfg->output_dir / "config.ini", *cfg);
    write_realization(cfg->output_dir / "realization.csv", exp.truth_realization());
    for (const auto& entry : cfg->entries()) {
      const std::uint64_t seed = cfg->seed ^ static_cast<std::uint64_t>(entry.run_no);
      if (entry.hs > 0 && !exp.config().coeffs.covers_spectrum(2.0 * std::numbers::pi / entry.tp)) {
        throw ValidationError("hydro table does not cover run " + std::to_string(entry.run_no));
      }
      SimConfig sim = cfg->sim;
      sim.seed = derive_seed(seed, kNoiseStream);
      const auto run = simulate(cfg->params, exp.truth_realization(), wave_for(*cfg, entry, seed),
                                exp.excitation_kernel(), sim);
      const auto suffix = run_suffix(*cfg, entry.run_no);
      write_truth_csv(cfg->output_dir / ("truth" + suffix + ".csv"), run);
      write_measurements_csv(cfg->output_dir / ("measurements" + suffix + ".csv"), run.measurements);
      out << "run " << entry.run_no << ": " << run.size() << " steps, " << run.measurements.size()
          << " measurements\n";
    }
    return kOk;
  });
}

int cmd_estimate(const fs::path& config, const Overrides& ov, const std::optional<fs::path>& measurements,
                 std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const auto cfg = load_checked(config, ov, err);
    if (!cfg) return kDomainError;
    if (measurements && cfg->wave_mode != WaveMode::single) {
      err << "error: --measurements needs wave.mode = single to fix the sea state\n";
      return kDomainError;
    }
    // Read before the (slow) setup so that schema errors surface at once.
    std::optional<Measurements> imported;
    if (measurements) imported = read_measurements_csv(*measurements);

    Experiment exp(cfg->harness());
    make_dir(cfg->output_dir);
    save_config(cfg->output_dir / "config.ini", *cfg);

    const std::vector<std::string> header = {"run_no", "method", "sweep_var", "sweep_val",
                                             "nmse_fex", "nmse_vel", "size_ratio"};
    int status = kOk;
    if (imported) {
      const auto entry = cfg->entries().front();
      std::vector<std::vector<std::string>> rows;
      for (const auto& est : cfg->methods()) {
        const auto label = method_label(est);
        const auto result = exp.estimate(entry, est, *imported);
        write_estimate(cfg->output_dir / ("estimate_" + slug(label) + ".csv"), result, nullptr);
        rows.push_back({"0", label, "none", "0", "NA", "NA", csv::format(size_ratio(cfg->params, entry.tp))});
        out << label << ": " << result.size() << " estimates, scores unavailable (no truth)\n";
      }
      csv::write(cfg->output_dir / "scores.csv", header, rows);
      return status;
    }

    std::vector<ScoreCard> scores;
    for (const auto& est : cfg->methods()) {
      for (const auto& entry : cfg->entries()) {
        auto cell = exp.evaluate(entry, est, Variant{}, true);
        const auto& s = cell.score;
        if (!s.ok()) {
          err << "run " << s.run_no << " " << s.method << ": " << s.error << '\n';
          status = kDomainError;
        } else {
          const auto name = "estimate_" + slug(s.method) + run_suffix(*cfg, entry.run_no) + ".csv";
          write_estimate(cfg->output_dir / name, *cell.estimate, &exp.run(entry).truth);
          out << "run " << s.run_no << " " << s.method << ": nmse_fex " << csv::format(s.nmse_fex)
              << ", nmse_vel " << csv::format(s.nmse_vel) << '\n';
        }
        scores.push_back(s);
      }
    }
    write_results_csv(cfg->output_dir / "scores.csv", scores);
    return status;
  });
}

int cmd_sweep(const fs::path& config, const Overrides& ov, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const auto cfg = load_checked(config, ov, err);
    if (!cfg) return kDomainError;
    Experiment exp(cfg->harness());
    const auto catalog = cfg->entries();
    std::vector<ScoreCard> scores;
    for (const auto& est : cfg->methods()) {
      std::vector<ScoreCard> part;
      switch (cfg->sweep) {
        case SweepKind::none:
          part = run_catalog_experiment(exp, est, catalog, cfg->jobs);
          break;
        case SweepKind::rate:
          part = sweep_sampling_rate(exp, est, cfg->sweep_values, catalog, cfg->jobs);
          break;
        case SweepKind::order: {
          std::vector<int> orders;
          for (double v : cfg->sweep_values) orders.push_back(static_cast<int>(v));
          part = sweep_radiation_order(exp, est, orders, catalog, cfg->jobs);
          break;
        }
        case SweepKind::noise:
          part = sweep_measurement_noise(exp, est, cfg->sweep_values, catalog, cfg->jobs);
          break;
      }
      scores.insert(scores.end(), part.begin(), part.end());
    }

    make_dir(cfg->output_dir);
    save_config(cfg->output_dir / "config.ini", *cfg);
    write_results_csv(cfg->output_dir / "results.csv", scores);
    const auto summary = summarize(scores);
    write_summary_csv(cfg->output_dir / "summary.csv", summary);
    for (const auto& row : summary) {
      out << row.method << " " << row.sweep_var << "=" << csv::format(row.sweep_val) << ": median nmse_fex "
          << csv::format(row.fex_median) << ", nmse_vel " << csv::format(row.vel_median) << " (" << row.count
          << " runs, " << row.failed << " failed)\n";
    }
    for (const auto& s : scores) {
      if (!s.ok()) err << "run " << s.run_no << " " << s.method << " " << s.sweep_var << "=" << s.sweep_val
                       << ": " << s.error << '\n';
    }
    return kOk;
  });
}

int cmd_report(const fs::path& results_dir, const std::optional<fs::path>& out_dir, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&]() -> int {
    const auto results = results_dir / "results.csv";
    if (!fs::is_regular_file(results)) {
      err << "error: no results.csv in " << results_dir.string() << '\n';
      return kDomainError;
    }
    const auto scores = read_results_csv(results);
    if (scores.empty()) {
      err << "error: " << results.string() << " has no rows\n";
      return kDomainError;
    }
    const fs::path dest = out_dir.value_or(results_dir);
    make_dir(dest);

    const auto summary = summarize(scores);
    write_summary_csv(dest / "quartiles.csv", summary);

    std::vector<std::vector<std::string>> trend;
    for (const auto& row : summary) {
      trend.push_back({row.method, row.sweep_var, csv::format(row.sweep_val), csv::format(row.fex_median),
                       csv::format(row.vel_median)});
    }
    csv::write(dest / "trend.csv", {"method", "sweep_var", "sweep_val", "fex_median", "vel_median"}, trend);

    auto sorted = scores;
    std::stable_sort(sorted.begin(), sorted.end(), [](const ScoreCard& a, const ScoreCard& b) {
      if (a.method != b.method) return a.method < b.method;
      if (a.sweep_var != b.sweep_var) return a.sweep_var < b.sweep_var;
      if (a.sweep_val != b.sweep_val) return a.sweep_val < b.sweep_val;
      return a.size_ratio < b.size_ratio;
    });
    std::vector<std::vector<std::string>> ratio;
    for (const auto& s : sorted) {
      ratio.push_back({s.method, s.sweep_var, csv::format(s.sweep_val), std::to_string(s.run_no),
                       csv::format(s.size_ratio), csv::format(s.nmse_fex), csv::format(s.nmse_vel)});
    }
    csv::write(dest / "size_ratio.csv",
               {"method", "sweep_var", "sweep_val", "run_no", "size_ratio", "nmse_fex", "nmse_vel"}, ratio);
    out << "wrote quartiles.csv, trend.csv, size_ratio.csv (" << summary.size() << " groups)\n";

    const auto config = results_dir / "config.ini";
    if (!fs::is_regular_file(config)) {
      err << "note: no config.ini in " << results_dir.string() << ", overlay.csv skipped\n";
      return kOk;
    }
    auto cfg = load_config(config);
    const auto entries = cfg.entries();
    auto entry = entries.front();
    for (const auto& e : entries) {
      if (e.run_no == 7) entry = e;
    }
    Experiment exp(cfg.harness());
    EstimatorConfig direct = cfg.estimator, disturbance = cfg.estimator;
    direct.method = Method::direct;
    disturbance.method = Method::disturbance;
    const auto a = exp.evaluate(entry, direct, Variant{}, true);
    const auto b = exp.evaluate(entry, disturbance, Variant{}, true);
    for (const auto* cell : {&a, &b}) {
      if (!cell->score.ok()) throw Error("overlay run " + std::to_string(entry.run_no) + ": " + cell->score.error);
    }
    const auto& truth = exp.run(entry).truth;
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < a.estimate->size(); ++k) {
      rows.push_back({a.estimate->t[k], truth.fex[truth.measurement_index[k]], a.estimate->fex[k],
                      b.estimate->fex[k]});
    }
    csv::write(dest / "overlay.csv", {"t", "fex_true", "fex_direct", "fex_disturbance"}, rows);
    out << "wrote overlay.csv (run " << entry.run_no << ")\n";
    return kOk;
  });
}

}  // namespace wecest::cli
