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

#include "wecest/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <thread>

#include "wecest/csv.hpp"
#include "wecest/error.hpp"

namespace wecest {

double nmse(std::span<const double> reference, std::span<const double> estimate) {
  if (reference.size() != estimate.size()) {
    throw ValidationError("nmse: reference has " + std::to_string(reference.size()) +
                          " samples, estimate " + std::to_string(estimate.size()));
  }
  if (reference.size() < 2) throw ValidationError("nmse needs at least two samples");
  const double mean =
      std::accumulate(reference.begin(), reference.end(), 0.0) / static_cast<double>(reference.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    num += (reference[i] - estimate[i]) * (reference[i] - estimate[i]);
    den += (reference[i] - mean) * (reference[i] - mean);
  }
  if (!(den > 0)) throw ValidationError("nmse: reference is constant");
  return 1.0 - std::sqrt(num) / std::sqrt(den);
}

const std::vector<RunCatalogEntry>& wave_catalog() {
  static const std::vector<RunCatalogEntry> catalog = {
      {1, 0.175, 1.42},  {2, 0.050, 1.90},  {3, 0.175, 1.90},  {4, 0.300, 1.90},
      {5, 0.050, 2.37},  {6, 0.175, 2.37},  {7, 0.300, 2.37},  {8, 0.050, 2.69},
      {9, 0.175, 2.69},  {10, 0.300, 2.69}, {11, 0.050, 3.16}, {12, 0.175, 3.16},
      {13, 0.175, 3.95}, {14, 0.175, 4.74}, {15, 0.175, 5.53}, {16, 0.375, 2.06},
      {17, 0.375, 2.37},
  };
  return catalog;
}

std::vector<RunCatalogEntry> select_runs(const std::vector<int>& runs) {
  std::vector<RunCatalogEntry> out;
  for (int r : runs) {
    const auto& cat = wave_catalog();
    const auto it = std::find_if(cat.begin(), cat.end(), [r](const auto& e) { return e.run_no == r; });
    if (it == cat.end()) throw ValidationError("unknown run number " + std::to_string(r));
    out.push_back(*it);
  }
  return out;
}

double size_ratio(const FloatParams& params, double tp) {
  const double wavelength = params.gravity * tp * tp / (2.0 * std::numbers::pi);
  return params.characteristic_diameter() / wavelength;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string method_label(const EstimatorConfig& est) {
  if (est.method == Method::direct) return "direct";
  return "disturbance-" + std::to_string(est.n_components);
}

void HarnessConfig::validate() const {
  params.validate();
  coeffs.validate();
  sim.validate();
  if (truth_order < 1 || truth_order > 6) throw ValidationError("radiation.order must be in 1..6");
  if (filter_order < 1 || filter_order > 6) throw ValidationError("filter order must be in 1..6");
  const double ratio = excitation_irf_dt / (0.5 * sim.dt);
  if (!(excitation_irf_dt > 0) || std::abs(ratio - std::round(ratio)) > 1e-9) {
    throw ValidationError("excitation.irf_dt must be a multiple of sim.dt / 2");
  }
  if (!(excitation_half_width > excitation_irf_dt)) {
    throw ValidationError("excitation.half_width must exceed excitation.irf_dt");
  }
  if (wave_components == 0) throw ValidationError("wave.components must be >= 1");
  if (!(calibration_duration > 0)) throw ValidationError("calibration duration must be > 0");
  if (!(fex_std_fraction >= 0) || !(component_std_fraction >= 0)) {
    throw ValidationError("process noise fractions must be >= 0");
  }
}

namespace {

template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double stddev(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

struct Experiment::Cache {
  std::mutex mutex;
  std::map<int, std::unique_ptr<RunData>> runs;
  std::map<int, std::unique_ptr<std::once_flag>> run_once;
  std::map<int, RadiationRealization> realizations;
};

Experiment::Experiment(HarnessConfig cfg) : cfg_(std::move(cfg)), cache_(std::make_unique<Cache>()) {
  cfg_.validate();
  rad_irf_ = compute_irf(cfg_.coeffs, cfg_.radiation_irf);
  truth_real_ = fit_realization(rad_irf_, cfg_.truth_order);
  cache_->realizations[cfg_.truth_order] = truth_real_;
  exc_irf_ = excitation_irf(cfg_.coeffs, cfg_.excitation_irf_dt, cfg_.excitation_half_width);
}

Experiment::~Experiment() = default;

const RadiationRealization& Experiment::realization(int order) {
  std::lock_guard lock(cache_->mutex);
  auto it = cache_->realizations.find(order);
  if (it == cache_->realizations.end()) {
    it = cache_->realizations.emplace(order, fit_realization(rad_irf_, order)).first;
  }
  return it->second;
}

const Experiment::RunData& Experiment::run(const RunCatalogEntry& entry) {
  std::once_flag* once = nullptr;
  {
    std::lock_guard lock(cache_->mutex);
    auto& slot = cache_->run_once[entry.run_no];
    if (!slot) slot = std::make_unique<std::once_flag>();
    once = slot.get();
  }
  std::call_once(*once, [&] {
    auto data = std::make_unique<RunData>();
    data->entry = entry;
    data->seed = cfg_.master_seed ^ static_cast<std::uint64_t>(entry.run_no);
    const auto spectrum = bretschneider(entry.hs, entry.tp);
    if (!cfg_.coeffs.covers_spectrum(spectrum.peak_frequency())) {
      throw ValidationError("hydrodynamic table does not cover run " + std::to_string(entry.run_no));
    }

    SimConfig sim = cfg_.sim;
    sim.seed = derive_seed(data->seed, kNoiseStream);
    const auto wave = sample_irregular_wave(spectrum, cfg_.wave_components, data->seed);
    data->truth = simulate(cfg_.params, truth_real_, wave, exc_irf_, sim);

    SimConfig cal = cfg_.sim;
    cal.duration = cfg_.calibration_duration;
    cal.seed = derive_seed(data->seed, kCalibrationNoiseStream);
    const auto cal_wave =
        sample_irregular_wave(spectrum, cfg_.wave_components, derive_seed(data->seed, kCalibrationWaveStream));
    data->calibration = simulate(cfg_.params, truth_real_, cal_wave, exc_irf_, cal);
    data->fex_std = stddev(data->calibration.fex);

    std::lock_guard lock(cache_->mutex);
    cache_->runs[entry.run_no] = std::move(data);
  });
  std::lock_guard lock(cache_->mutex);
  return *cache_->runs.at(entry.run_no);
}

void Experiment::prepare(const std::vector<RunCatalogEntry>& catalog, std::size_t jobs) {
  parallel_for(catalog.size(), jobs, [&](std::size_t i) { run(catalog[i]); });
}

EstimateResult Experiment::estimate(const RunCatalogEntry& entry, const EstimatorConfig& est,
                                    const Measurements& meas, int filter_order,
                                    const ProcessNoiseTuning& tuning) {
  const auto& data = run(entry);
  const auto& real = realization(filter_order > 0 ? filter_order : cfg_.filter_order);
  const auto q = calibrate_process_noise(cfg_.params, real, data.calibration);
  EstimatorConfig cfg = est;
  const double wp = 2.0 * std::numbers::pi / entry.tp;
  const double fex_fraction = tuning.fex_std_fraction > 0 ? tuning.fex_std_fraction : cfg_.fex_std_fraction;
  const double component_fraction =
      tuning.component_std_fraction > 0 ? tuning.component_std_fraction : cfg_.component_std_fraction;
  if (cfg.fex_process_std <= 0) cfg.fex_process_std = fex_fraction * wp * data.fex_std;
  if (cfg.component_process_std <= 0) cfg.component_process_std = component_fraction * wp * data.fex_std;
  return estimate_excitation(cfg_.params, real, cfg_.coeffs, {entry.hs, entry.tp}, meas, q, cfg);
}

Experiment::CellOutput Experiment::evaluate(const RunCatalogEntry& entry, const EstimatorConfig& est,
                                            const Variant& variant, bool keep_estimate) {
  CellOutput out;
  auto& score = out.score;
  score.run_no = entry.run_no;
  score.method = method_label(est);
  score.sweep_var = variant.sweep_var;
  score.sweep_val = variant.sweep_val;
  score.size_ratio = size_ratio(cfg_.params, entry.tp);
  try {
    const auto& data = run(entry);
    const auto& full = data.truth.measurements;
    const std::size_t stride = std::max<std::size_t>(1, variant.rate_stride);
    Measurements meas;
    std::vector<std::size_t> truth_index;
    for (std::size_t k = 0; k < full.size(); k += stride) {
      meas.t.push_back(full.t[k]);
      meas.position.push_back(full.position[k]);
      meas.velocity.push_back(full.velocity[k]);
      truth_index.push_back(data.truth.measurement_index[k]);
    }

    EstimatorConfig cfg = est;
    double base_noise = cfg.measurement_noise;
    if (variant.noise_factor > 0) {
      const double added = variant.noise_factor * kBaseMeasurementNoise;
      std::mt19937_64 rng(derive_seed(data.seed, kAddedNoiseStream));
      std::normal_distribution<double> normal(0.0, 1.0);
      for (std::size_t k = 0; k < meas.size(); ++k) {
        meas.position[k] += added * normal(rng);
        meas.velocity[k] += added * normal(rng);
      }
      base_noise = std::hypot(base_noise, added);
    }
    cfg.measurement_noise = base_noise;

    auto result = estimate(entry, cfg, meas, variant.filter_order, variant.tuning);

    std::vector<double> fex_true, vel_true;
    fex_true.reserve(truth_index.size());
    vel_true.reserve(truth_index.size());
    for (auto i : truth_index) {
      fex_true.push_back(data.truth.fex[i]);
      vel_true.push_back(data.truth.water_vel[i]);
    }
    score.max_asymmetry = result.trajectory.diagnostics.max_asymmetry;
    score.min_p_diagonal = result.trajectory.diagnostics.min_diagonal;
    score.nmse_fex = nmse(fex_true, result.fex);
    score.nmse_vel = nmse(vel_true, result.water_vel);
    if (!std::isfinite(score.nmse_fex) || !std::isfinite(score.nmse_vel)) {
      throw DivergenceError("estimate is not finite", 0);
    }
    if (keep_estimate) out.estimate = std::move(result);
  } catch (const Error& e) {
    score.error = e.what();
    score.nmse_fex = std::numeric_limits<double>::quiet_NaN();
    score.nmse_vel = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::vector<ScoreCard> run_grid(Experiment& exp, const EstimatorConfig& est,
                                const std::vector<RunCatalogEntry>& catalog,
                                const std::vector<Variant>& variants, std::size_t jobs) {
  exp.prepare(catalog, jobs);
  std::vector<ScoreCard> out(variants.size() * catalog.size());
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    out[i] = exp.evaluate(catalog[i % catalog.size()], est, variants[i / catalog.size()]).score;
  });
  return out;
}

std::vector<ScoreCard> run_catalog_experiment(Experiment& exp, const EstimatorConfig& est,
                                              const std::vector<RunCatalogEntry>& catalog,
                                              std::size_t jobs) {
  return run_grid(exp, est, catalog, {Variant{}}, jobs);
}

std::vector<ScoreCard> sweep_sampling_rate(Experiment& exp, const EstimatorConfig& est,
                                           const std::vector<double>& rates,
                                           const std::vector<RunCatalogEntry>& catalog,
                                           std::size_t jobs,
                                           const ProcessNoiseTuning& tuning) {
  const double base = exp.config().sim.measurement_rate;
  std::vector<Variant> variants;
  for (double r : rates) {
    const double stride = base / r;
    if (!(r > 0) || std::abs(stride - std::round(stride)) > 1e-9) {
      throw ValidationError("sampling rate " + csv::format(r) + " Hz does not divide " +
                            csv::format(base) + " Hz");
    }
    Variant v;
    v.sweep_var = "rate";
    v.sweep_val = r;
    v.rate_stride = static_cast<std::size_t>(std::round(stride));
    v.tuning = tuning;
    variants.push_back(v);
  }
  return run_grid(exp, est, catalog, variants, jobs);
}

std::vector<ScoreCard> sweep_radiation_order(Experiment& exp, const EstimatorConfig& est,
                                             const std::vector<int>& orders,
                                             const std::vector<RunCatalogEntry>& catalog,
                                             std::size_t jobs,
                                             const ProcessNoiseTuning& tuning) {
  std::vector<Variant> variants;
  for (int o : orders) {
    if (o < 1 || o > 6) throw ValidationError("radiation order " + std::to_string(o) + " not in 1..6");
    Variant v;
    v.sweep_var = "order";
    v.sweep_val = o;
    v.filter_order = o;
    v.tuning = tuning;
    variants.push_back(v);
  }
  return run_grid(exp, est, catalog, variants, jobs);
}

std::vector<ScoreCard> sweep_measurement_noise(Experiment& exp, const EstimatorConfig& est,
                                               const std::vector<double>& factors,
                                               const std::vector<RunCatalogEntry>& catalog,
                                               std::size_t jobs,
                                               const ProcessNoiseTuning& tuning) {
  std::vector<Variant> variants;
  for (double f : factors) {
    if (!(f >= 1)) throw ValidationError("noise factor " + csv::format(f) + " must be >= 1");
    Variant v;
    v.sweep_var = "noise";
    v.sweep_val = f;
    v.noise_factor = f;
    v.tuning = tuning;
    variants.push_back(v);
  }
  return run_grid(exp, est, catalog, variants, jobs);
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ValidationError("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<SummaryRow> summarize(const std::vector<ScoreCard>& scores) {
  struct Group {
    SummaryRow row;
    std::vector<double> fex, vel;
  };
  std::vector<Group> groups;
  for (const auto& s : scores) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.row.method == s.method && g.row.sweep_var == s.sweep_var &&
             g.row.sweep_val == s.sweep_val;
    });
    if (it == groups.end()) {
      groups.push_back({});
      it = std::prev(groups.end());
      it->row.method = s.method;
      it->row.sweep_var = s.sweep_var;
      it->row.sweep_val = s.sweep_val;
    }
    ++it->row.count;
    if (!s.ok()) {
      ++it->row.failed;
      continue;
    }
    it->fex.push_back(s.nmse_fex);
    it->vel.push_back(s.nmse_vel);
  }
  std::vector<SummaryRow> out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto& g : groups) {
    auto& r = g.row;
    const auto fill = [&](const std::vector<double>& v, double& mn, double& q1, double& med, double& q3,
                          double& mx) {
      if (v.empty()) {
        mn = q1 = med = q3 = mx = nan;
        return;
      }
      mn = quantile(v, 0.0);
      q1 = quantile(v, 0.25);
      med = quantile(v, 0.5);
      q3 = quantile(v, 0.75);
      mx = quantile(v, 1.0);
    };
    fill(g.fex, r.fex_min, r.fex_q1, r.fex_median, r.fex_q3, r.fex_max);
    fill(g.vel, r.vel_min, r.vel_q1, r.vel_median, r.vel_q3, r.vel_max);
    out.push_back(r);
  }
  return out;
}

double median_fex(const std::vector<ScoreCard>& scores, const std::string& method,
                  std::optional<double> sweep_val) {
  std::vector<double> v;
  for (const auto& s : scores) {
    if (s.ok() && s.method == method && (!sweep_val || s.sweep_val == *sweep_val)) {
      v.push_back(s.nmse_fex);
    }
  }
  return quantile(std::move(v), 0.5);
}

namespace {
const std::vector<std::string> kResultsHeader = {"run_no", "method", "sweep_var", "sweep_val",
                                                 "nmse_fex", "nmse_vel", "size_ratio"};
}

void write_results_csv(const std::filesystem::path& path, const std::vector<ScoreCard>& scores) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : scores) {
    rows.push_back({std::to_string(s.run_no), s.method, s.sweep_var, csv::format(s.sweep_val),
                    csv::format(s.nmse_fex), csv::format(s.nmse_vel), csv::format(s.size_ratio)});
  }
  csv::write(path, kResultsHeader, rows);
}

std::vector<ScoreCard> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::vector<ScoreCard> out;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = csv::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto fields = csv::split(std::string(trimmed), ',');
    if (!header) {
      if (fields != kResultsHeader) {
        throw ParseError("expected header " + std::string("run_no,method,sweep_var,sweep_val,") +
                             "nmse_fex,nmse_vel,size_ratio",
                         line_no);
      }
      header = true;
      continue;
    }
    if (fields.size() != kResultsHeader.size()) {
      throw ParseError("expected 7 fields, got " + std::to_string(fields.size()), line_no);
    }
    const auto num = [&](const std::string& f) {
      try {
        std::size_t used = 0;
        const double v = std::stod(f, &used);
        if (used != f.size()) throw std::invalid_argument(f);
        return v;
      } catch (const std::exception&) {
        throw ParseError("not a number: '" + f + "'", line_no);
      }
    };
    ScoreCard s;
    s.run_no = static_cast<int>(num(fields[0]));
    s.method = fields[1];
    s.sweep_var = fields[2];
    s.sweep_val = num(fields[3]);
    s.nmse_fex = num(fields[4]);
    s.nmse_vel = num(fields[5]);
    s.size_ratio = num(fields[6]);
    if (std::isnan(s.nmse_fex)) s.error = "failed";
    out.push_back(std::move(s));
  }
  if (!header) throw ParseError("missing header row", line_no);
  return out;
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows) {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : rows) {
    out.push_back({r.method, r.sweep_var, csv::format(r.sweep_val), std::to_string(r.count),
                   std::to_string(r.failed), csv::format(r.fex_min), csv::format(r.fex_q1),
                   csv::format(r.fex_median), csv::format(r.fex_q3), csv::format(r.fex_max),
                   csv::format(r.vel_min), csv::format(r.vel_q1), csv::format(r.vel_median),
                   csv::format(r.vel_q3), csv::format(r.vel_max)});
  }
  csv::write(path,
             {"method", "sweep_var", "sweep_val", "count", "failed", "fex_min", "fex_q1",
              "fex_median", "fex_q3", "fex_max", "vel_min", "vel_q1", "vel_median", "vel_q3",
              "vel_max"},
             out);
}

}  // namespace wecest
