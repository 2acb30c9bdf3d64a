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

#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "support.hpp"
#include "wecest/csv.hpp"
#include "wecest/dynamics.hpp"
#include "wecest/error.hpp"

namespace wecest {
namespace {

using testing::demo_coeffs;
using testing::rel_err;

// First-order realization with no coupling: radiation contributes nothing.
RadiationRealization inert() {
  RadiationRealization r;
  r.a = Eigen::MatrixXd::Constant(1, 1, -1.0);
  r.b = Eigen::VectorXd::Zero(1);
  r.c = Eigen::RowVectorXd::Zero(1);
  return r;
}

const RadiationRealization& demo_real() {
  static const RadiationRealization r = fit_realization(compute_irf(demo_coeffs()), 4);
  return r;
}

const ExcitationIRF& demo_kernel() {
  static const ExcitationIRF k = excitation_irf(demo_coeffs(), 0.005, 2.0);
  return k;
}

TEST(Eom, HandExamples) {
  const FloatParams p;
  const auto r = inert();
  Eigen::VectorXd s(3);
  s << 0.1, 0.0, 0.0;
  auto d = eom_rhs(p, r, s, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(d(0), 0.0);
  EXPECT_NEAR(d(1), -2806.8 * 0.1 / 62.0, 1e-12);

  s << 0.0, 0.5, 0.0;
  d = eom_rhs(p, r, s, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(d(0), 0.5);
  EXPECT_NEAR(d(1), -(112.0 * 0.25 + 2.0 * 0.5) / 62.0, 1e-12);

  // Moving with the water: no drag and no damping, only the excitation.
  d = eom_rhs(p, r, s, 31.0, 0.5);
  EXPECT_NEAR(d(1), 0.5, 1e-12);

  // Drag opposes relative motion in either direction.
  s << 0.0, -0.5, 0.0;
  d = eom_rhs(p, r, s, 0.0, 0.0);
  EXPECT_NEAR(d(1), (112.0 * 0.25 + 2.0 * 0.5) / 62.0, 1e-12);
}

TEST(Eom, RadiationStateCoupling) {
  const FloatParams p;
  RadiationRealization r;
  r.a = Eigen::MatrixXd::Constant(1, 1, -3.0);
  r.b = Eigen::VectorXd::Constant(1, 2.0);
  r.c = Eigen::RowVectorXd::Constant(1, 5.0);
  Eigen::VectorXd s(3);
  s << 0.0, 0.4, 0.2;
  const auto d = eom_rhs(p, r, s, 0.0, 0.4);
  EXPECT_NEAR(d(1), -5.0 * 0.2 / 62.0, 1e-12);
  EXPECT_NEAR(d(2), -3.0 * 0.2 + 2.0 * 0.4, 1e-12);
}

SimConfig short_cfg(double duration = 20.0) {
  SimConfig c;
  c.duration = duration;
  c.seed = 5;
  return c;
}

TEST(Simulate, ZeroWaveStaysAtRest) {
  const auto run = simulate(FloatParams{}, demo_real(), IrregularWave{}, demo_kernel(), short_cfg());
  for (std::size_t k = 0; k < run.size(); ++k) {
    EXPECT_EQ(run.y[k], 0.0);
    EXPECT_EQ(run.ydot[k], 0.0);
  }
}

TEST(Simulate, FreeDecayEnergyAudit) {
  // No radiation: stored energy lost equals work done by drag and damping.
  const FloatParams p;
  auto cfg = short_cfg(5.0);
  cfg.initial_heave = 0.05;
  cfg.dt = 1e-3;
  cfg.measurement_rate = 100;
  const auto run = simulate(p, inert(), IrregularWave{}, demo_kernel(), cfg);
  const auto energy = [&](std::size_t k) {
    return 0.5 * p.virtual_mass() * run.ydot[k] * run.ydot[k] + 0.5 * p.restoring_stiffness() * run.y[k] * run.y[k];
  };
  double lost = 0;
  for (std::size_t k = 0; k + 1 < run.size(); ++k) {
    const auto power = [&](double v) { return p.linear_damping * v * v + p.drag_factor() * std::abs(v) * v * v; };
    lost += 0.5 * cfg.dt * (power(run.ydot[k]) + power(run.ydot[k + 1]));
  }
  const double e0 = energy(0), e1 = energy(run.size() - 1);
  EXPECT_LT(e1, e0);
  EXPECT_LE(rel_err(e0 - e1, lost), 1e-3);
  for (std::size_t k = 1; k < run.size(); ++k) EXPECT_LE(energy(k), energy(k - 1) + 1e-12);
}

TEST(Simulate, ConvergesUnderStepHalving) {
  const auto wave = sample_irregular_wave(bretschneider(0.3, 2.37), 100, 11);
  auto coarse = short_cfg(10.0), fine = coarse;
  coarse.dt = 0.01;
  coarse.measurement_rate = 100;
  fine.dt = 0.005;
  fine.measurement_rate = 100;
  // The kernel step must be a multiple of both grids' half steps.
  const auto k = excitation_irf(demo_coeffs(), 0.005, 2.0);
  const auto a = simulate(FloatParams{}, demo_real(), wave, k, coarse);
  const auto b = simulate(FloatParams{}, demo_real(), wave, k, fine);
  double diff = 0, scale = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a.y[i] - b.y[2 * i]));
    scale = std::max(scale, std::abs(b.y[2 * i]));
  }
  EXPECT_LE(diff, 1e-3 * scale);
}

TEST(Simulate, DeterministicAndNoiseStatistics) {
  const auto wave = sample_irregular_wave(bretschneider(0.3, 2.37), 100, 11);
  auto cfg = short_cfg(100.0);
  const auto a = simulate(FloatParams{}, demo_real(), wave, demo_kernel(), cfg);
  const auto b = simulate(FloatParams{}, demo_real(), wave, demo_kernel(), cfg);
  EXPECT_EQ(a.measurements.position, b.measurements.position);
  EXPECT_EQ(a.measurements.velocity, b.measurements.velocity);
  EXPECT_EQ(a.y, b.y);

  double sp = 0, sv = 0;
  const auto n = a.measurements.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = a.measurement_index[i];
    sp += std::pow(a.measurements.position[i] - a.y[k], 2);
    sv += std::pow(a.measurements.velocity[i] - a.ydot[k], 2);
  }
  EXPECT_LE(rel_err(std::sqrt(sp / n), kBaseMeasurementNoise), 0.05);
  EXPECT_LE(rel_err(std::sqrt(sv / n), kBaseMeasurementNoise), 0.05);

  cfg.seed = 6;
  EXPECT_NE(simulate(FloatParams{}, demo_real(), wave, demo_kernel(), cfg).measurements.position,
            a.measurements.position);
}

TEST(Simulate, MeasurementRateSubsamples) {
  auto cfg = short_cfg(2.0);
  cfg.measurement_rate = 50;
  EXPECT_EQ(cfg.measurement_stride(), 4u);
  const auto run = simulate(FloatParams{}, demo_real(), monochromatic_wave(0.1, 2.5), demo_kernel(), cfg);
  ASSERT_GE(run.measurements.size(), 2u);
  EXPECT_NEAR(run.measurements.t[1] - run.measurements.t[0], 0.02, 1e-12);
}

TEST(SimConfig, Validation) {
  SimConfig c;
  c.measurement_rate = 300;
  EXPECT_THROW(c.validate(), ValidationError);
  c = SimConfig{};
  c.dt = 0;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Resimulate, SameModelReproducesTruth) {
  const auto wave = sample_irregular_wave(bretschneider(0.3, 2.37), 100, 4);
  const auto run = simulate(FloatParams{}, demo_real(), wave, demo_kernel(), short_cfg());
  const auto again = resimulate(FloatParams{}, demo_real(), run);
  ASSERT_EQ(again.size(), run.size());
  for (std::size_t k = 0; k < run.size(); ++k) EXPECT_NEAR(again.y[k], run.y[k], 1e-12);
}

TEST(Calibration, SameModelHasZeroVariance) {
  const auto wave = sample_irregular_wave(bretschneider(0.3, 2.37), 100, 4);
  const auto run = simulate(FloatParams{}, demo_real(), wave, demo_kernel(), short_cfg());
  const auto q = calibrate_process_noise(FloatParams{}, demo_real(), run);
  EXPECT_LE(q.position, 1e-24);
  EXPECT_LE(q.velocity, 1e-24);

  const auto low = fit_realization(compute_irf(demo_coeffs()), 1);
  const auto q1 = calibrate_process_noise(FloatParams{}, low, run);
  EXPECT_GT(q1.position, 0.0);
  EXPECT_GT(q1.velocity, 0.0);
  const auto d = q1.per_state(6);
  EXPECT_EQ(d.size(), 6);
  EXPECT_EQ(d(0), q1.position);
  EXPECT_EQ(d(1), q1.velocity);
  EXPECT_EQ(d.tail(4).norm(), 0.0);
}

TEST(Calibration, TooShortRejected) {
  auto cfg = short_cfg(0.02);
  const auto run = simulate(FloatParams{}, demo_real(), IrregularWave{}, demo_kernel(), cfg);
  EXPECT_THROW(calibrate_process_noise(FloatParams{}, demo_real(), run), ValidationError);
}

TEST(Csv, TruthAndMeasurementsRoundTrip) {
  testing::TempDir dir;
  const auto run =
      simulate(FloatParams{}, demo_real(), monochromatic_wave(0.1, 2.5), demo_kernel(), short_cfg(3.0));
  write_truth_csv(dir / "truth.csv", run);
  write_measurements_csv(dir / "meas.csv", run.measurements);
  const auto m = read_measurements_csv(dir / "meas.csv");
  ASSERT_EQ(m.size(), run.measurements.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_EQ(m.position[i], run.measurements.position[i]);
    EXPECT_EQ(m.t[i], run.measurements.t[i]);
  }
  const auto truth = read_truth_csv(dir / "truth.csv");
  ASSERT_EQ(truth.size(), run.size());
  for (std::size_t k = 0; k < run.size(); ++k) {
    EXPECT_EQ(truth.y[k], run.y[k]);
    EXPECT_EQ(truth.fex[k], run.fex[k]);
  }
}

TEST(Csv, MeasurementsRejectBadInput) {
  testing::TempDir dir;
  {
    std::ofstream f(dir / "bad.csv");
    f << "t,pos,vel\n0,0,0\n";
  }
  EXPECT_THROW(read_measurements_csv(dir / "bad.csv"), ParseError);
  {
    std::ofstream f(dir / "order.csv");
    f << "t,pos_meas,vel_meas\n0,0,0\n0.1,0,0\n0.05,0,0\n";
  }
  try {
    read_measurements_csv(dir / "order.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("4"), std::string::npos);
  }
  EXPECT_THROW(read_measurements_csv(dir / "missing.csv"), IoError);
}

}  // namespace
}  // namespace wecest
