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

#include <benchmark/benchmark.h>

#include "wecest/dynamics.hpp"
#include "wecest/estimators.hpp"
#include "wecest/harness.hpp"

namespace wecest {
namespace {

const HydroCoeffs& coeffs() {
  static const HydroCoeffs c = generate_analytic_coeffs(FloatParams{}, GridSpec{});
  return c;
}

const RadiationRealization& realization() {
  static const RadiationRealization r = fit_realization(compute_irf(coeffs()), 4);
  return r;
}

const ExcitationIRF& kernel() {
  static const ExcitationIRF k = excitation_irf(coeffs(), 0.005, 2.0);
  return k;
}

void BM_RadiationFit(benchmark::State& state) {
  const auto irf = compute_irf(coeffs());
  for (auto _ : state) benchmark::DoNotOptimize(fit_realization(irf, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_RadiationFit)->DenseRange(1, 6)->Unit(benchmark::kMillisecond);

void BM_ExcitationConvolution(benchmark::State& state) {
  const auto wave = sample_irregular_wave(bretschneider(0.3, 2.37), 200, 1);
  std::vector<double> t(12000);
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = 0.005 * static_cast<double>(k);
  for (auto _ : state) benchmark::DoNotOptimize(excitation_force_truth(kernel(), wave, t));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
}
BENCHMARK(BM_ExcitationConvolution)->Unit(benchmark::kMillisecond);

void BM_Propagate(benchmark::State& state) {
  const bool direct = state.range(0) == 0;
  const auto sel = equal_energy_select(bretschneider(0.3, 2.37), 3, 0.01);
  const auto m = direct ? build_direct_model(FloatParams{}, realization(), 10.0)
                        : build_disturbance_model(FloatParams{}, realization(), sel, 10.0);
  const auto dim = m.layout.dim();
  NoiseSpec noise{augmented_process_noise(m.layout, {1e-8, 1e-6}), Eigen::Matrix2d::Identity() * 1e-6};
  EkfState s{Eigen::VectorXd::Constant(dim, 0.01), Eigen::MatrixXd::Identity(dim, dim), 0.0};
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(1, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(propagate(m.model, noise, s, u, 0.005));
  state.SetLabel(direct ? "direct" : "disturbance-3");
}
BENCHMARK(BM_Propagate)->Arg(0)->Arg(1);

void BM_Update(benchmark::State& state) {
  const auto m = build_direct_model(FloatParams{}, realization(), 10.0);
  const auto dim = m.layout.dim();
  NoiseSpec noise{augmented_process_noise(m.layout, {1e-8, 1e-6}), Eigen::Matrix2d::Identity() * 1e-6};
  EkfState s{Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Identity(dim, dim), 0.0};
  const Eigen::Vector2d z(0.01, -0.02);
  for (auto _ : state) benchmark::DoNotOptimize(update(m.model, noise, s, z));
}
BENCHMARK(BM_Update);

void BM_Simulate(benchmark::State& state) {
  const auto wave = sample_irregular_wave(bretschneider(0.3, 2.37), 200, 1);
  SimConfig cfg;
  cfg.duration = 60.0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(FloatParams{}, realization(), wave, kernel(), cfg));
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMillisecond);

void BM_EstimateRun(benchmark::State& state) {
  HarnessConfig cfg;
  cfg.coeffs = coeffs();
  cfg.sim.duration = 60.0;
  cfg.calibration_duration = 30.0;
  Experiment exp(cfg);
  const RunCatalogEntry entry{7, 0.3, 2.37};
  exp.run(entry);
  EstimatorConfig est;
  est.method = state.range(0) == 0 ? Method::direct : Method::disturbance;
  for (auto _ : state) benchmark::DoNotOptimize(exp.evaluate(entry, est, Variant{}));
  state.SetLabel(method_label(est));
}
BENCHMARK(BM_EstimateRun)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace wecest

BENCHMARK_MAIN();
