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
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wecest/dynamics.hpp"
#include "wecest/estimators.hpp"
#include "wecest/hydro.hpp"
#include "wecest/radiation.hpp"
#include "wecest/waves.hpp"

namespace wecest {

/// 1 - |s - s~| / |s - mean(s)|. Throws ValidationError on length mismatch,
/// fewer than two samples or a constant reference.
double nmse(std::span<const double> reference, std::span<const double> estimate);

struct RunCatalogEntry {
  int run_no = 0;
  double hs = 0.0;  // m
  double tp = 0.0;  // s
};

/// The 17 tank climates, heights in metres.
const std::vector<RunCatalogEntry>& wave_catalog();

/// Entries whose run numbers appear in `runs`; throws ValidationError for an
/// unknown run number.
std::vector<RunCatalogEntry> select_runs(const std::vector<int>& runs);

/// Float diameter over deep-water wavelength g Tp^2 / (2 pi).
double size_ratio(const FloatParams& params, double tp);

/// Independent stream derived from `seed` (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Streams split off a run seed (master ^ run_no). The evaluation wave phases
/// use the run seed itself.
enum SeedStream : std::uint64_t {
  kNoiseStream = 1,             // evaluation measurement noise
  kCalibrationWaveStream = 2,
  kCalibrationNoiseStream = 3,
  kAddedNoiseStream = 4,        // noise sweep
};

struct ScoreCard {
  int run_no = 0;
  std::string method;     // "direct" or "disturbance-N"
  std::string sweep_var;  // "none", "rate", "order", "noise"
  double sweep_val = 0.0;
  double nmse_fex = 0.0;
  double nmse_vel = 0.0;
  double size_ratio = 0.0;
  std::string error;  // non-empty if the cell failed
  /// Covariance bookkeeping of the filter run; not written to CSV.
  double max_asymmetry = 0.0;
  double min_p_diagonal = 0.0;

  bool ok() const { return error.empty(); }
};

std::string method_label(const EstimatorConfig& est);

struct HarnessConfig {
  FloatParams params;
  HydroCoeffs coeffs;  // must cover every catalog spectrum
  int truth_order = 4;
  int filter_order = 4;
  IrfOptions radiation_irf;
  double excitation_irf_dt = 0.005;       // s, multiple of sim.dt / 2
  double excitation_half_width = 2.0;     // s
  std::size_t wave_components = 200;
  SimConfig sim;                          // evaluation record; seed is ignored
  double calibration_duration = 60.0;     // s, separate record for Q and F std
  EstimatorConfig estimator;
  /// Process stds left <= 0 in `estimator` are set per run from the
  /// calibration record, as fraction * wp * std(F):
  double fex_std_fraction = 0.015;       // direct random walk, N/sqrt(s)
  double component_std_fraction = 0.05;  // disturbance fdot channels, N/s/sqrt(s)
  std::uint64_t master_seed = 0;
  std::size_t jobs = 1;

  void validate() const;
};

/// Per-analysis override of HarnessConfig's process noise fractions; values
/// <= 0 keep the configured ones.
struct ProcessNoiseTuning {
  double fex_std_fraction = 0.0;
  double component_std_fraction = 0.0;
};

/// Per-cell modification of the reference estimation.
struct Variant {
  std::string sweep_var = "none";
  double sweep_val = 0.0;
  std::size_t rate_stride = 1;  // keep every k-th measurement
  int filter_order = 0;         // 0: the configured filter order
  double noise_factor = 0.0;    // added noise std = factor * base std
  ProcessNoiseTuning tuning;
};

/// Truth runs, calibration records and fitted realizations shared by every
/// cell. Runs are generated lazily and cached; `prepare` fills the cache.
class Experiment {
 public:
  explicit Experiment(HarnessConfig cfg);
  ~Experiment();
  Experiment(const Experiment&) = delete;
  Experiment& operator=(const Experiment&) = delete;

  const HarnessConfig& config() const { return cfg_; }
  const RadiationRealization& truth_realization() const { return truth_real_; }
  const ExcitationIRF& excitation_kernel() const { return exc_irf_; }
  /// Realization of the given order, fitted once.
  const RadiationRealization& realization(int order);

  struct RunData {
    RunCatalogEntry entry;
    std::uint64_t seed = 0;
    SimRun truth;
    SimRun calibration;
    double fex_std = 0.0;  // std of the calibration excitation
  };

  /// Simulates (or returns the cached) truth for `entry`.
  const RunData& run(const RunCatalogEntry& entry);
  /// Simulates every entry, using up to `jobs` threads.
  void prepare(const std::vector<RunCatalogEntry>& catalog, std::size_t jobs);

  /// Filters `meas` with the calibration of `entry`'s run and `filter_order`
  /// (0: the configured order). Process stds <= 0 in `est` are filled from
  /// the calibration record.
  EstimateResult estimate(const RunCatalogEntry& entry, const EstimatorConfig& est,
                          const Measurements& meas, int filter_order = 0,
                          const ProcessNoiseTuning& tuning = {});

  struct CellOutput {
    ScoreCard score;
    std::optional<EstimateResult> estimate;  // only if requested
  };
  /// One filter run; failures are reported in the score's error field.
  CellOutput evaluate(const RunCatalogEntry& entry, const EstimatorConfig& est,
                      const Variant& variant, bool keep_estimate = false);

 private:
  HarnessConfig cfg_;
  RadiationRealization truth_real_;
  RadiationIRF rad_irf_;
  ExcitationIRF exc_irf_;
  struct Cache;
  std::unique_ptr<Cache> cache_;
};

/// Evaluates `variants` x `catalog` on up to `jobs` workers. Output is
/// ordered by variant, then catalog entry, independent of `jobs`.
std::vector<ScoreCard> run_grid(Experiment& exp, const EstimatorConfig& est,
                                const std::vector<RunCatalogEntry>& catalog,
                                const std::vector<Variant>& variants, std::size_t jobs);

std::vector<ScoreCard> run_catalog_experiment(Experiment& exp, const EstimatorConfig& est,
                                              const std::vector<RunCatalogEntry>& catalog,
                                              std::size_t jobs = 1);

/// Each rate must divide the base measurement rate; throws ValidationError.
std::vector<ScoreCard> sweep_sampling_rate(Experiment& exp, const EstimatorConfig& est,
                                           const std::vector<double>& rates,
                                           const std::vector<RunCatalogEntry>& catalog,
                                           std::size_t jobs = 1,
                                           const ProcessNoiseTuning& tuning = {});

/// Orders in 1..6; the truth keeps its reference order.
std::vector<ScoreCard> sweep_radiation_order(Experiment& exp, const EstimatorConfig& est,
                                             const std::vector<int>& orders,
                                             const std::vector<RunCatalogEntry>& catalog,
                                             std::size_t jobs = 1,
                                             const ProcessNoiseTuning& tuning = {});

/// Factors >= 1; adds seeded noise of std factor * base and widens R to match.
std::vector<ScoreCard> sweep_measurement_noise(Experiment& exp, const EstimatorConfig& est,
                                               const std::vector<double>& factors,
                                               const std::vector<RunCatalogEntry>& catalog,
                                               std::size_t jobs = 1,
                                               const ProcessNoiseTuning& tuning = {});

/// Type-7 quantile of unsorted data; throws ValidationError if empty.
double quantile(std::vector<double> values, double p);

struct SummaryRow {
  std::string method;
  std::string sweep_var;
  double sweep_val = 0.0;
  std::size_t count = 0;
  std::size_t failed = 0;
  double fex_min = 0.0, fex_q1 = 0.0, fex_median = 0.0, fex_q3 = 0.0, fex_max = 0.0;
  double vel_min = 0.0, vel_q1 = 0.0, vel_median = 0.0, vel_q3 = 0.0, vel_max = 0.0;
};

/// Groups by (method, sweep_var, sweep_val) in order of first appearance;
/// failed cells are counted but not aggregated.
std::vector<SummaryRow> summarize(const std::vector<ScoreCard>& scores);

/// Median NMSE(F_ex) of the successful cards matching `method` and `sweep_val`.
double median_fex(const std::vector<ScoreCard>& scores, const std::string& method,
                  std::optional<double> sweep_val = std::nullopt);

void write_results_csv(const std::filesystem::path& path, const std::vector<ScoreCard>& scores);
std::vector<ScoreCard> read_results_csv(const std::filesystem::path& path);
void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);

}  // namespace wecest
