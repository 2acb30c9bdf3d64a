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
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"
#include "wecest/error.hpp"
#include "wecest/estimators.hpp"
#include "wecest/harness.hpp"

namespace wecest {
namespace {

using Eigen::VectorXd;
using testing::demo_coeffs;

const RadiationRealization& demo_real() {
  static const RadiationRealization r = fit_realization(compute_irf(demo_coeffs()), 4);
  return r;
}

EqualEnergySelection demo_selection(std::size_t n) {
  return equal_energy_select(bretschneider(0.3, 2.37), n, 0.01);
}

VectorXd random_state(Eigen::Index dim, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  return VectorXd::NullaryExpr(dim, [&] { return n(rng); });
}

VectorXd input(double u) { return VectorXd::Constant(1, u); }

TEST(Layout, Dimensions) {
  const auto d = build_direct_model(FloatParams{}, demo_real(), 1.0);
  EXPECT_EQ(d.layout.dim(), 7);
  EXPECT_EQ(d.layout.radiation_begin(), 3);
  const auto s = build_disturbance_model(FloatParams{}, demo_real(), demo_selection(3), 1.0);
  EXPECT_EQ(s.layout.dim(), 12);
  EXPECT_EQ(s.layout.rate_begin(), 5);
  EXPECT_EQ(s.layout.radiation_begin(), 8);
  VectorXd x = VectorXd::Zero(12);
  x.segment(2, 3) << 1, 2, 3;
  EXPECT_EQ(s.layout.excitation(x), 6.0);
}

TEST(Models, AnalyticJacobiansMatchFiniteDifferences) {
  std::mt19937_64 rng(4);
  const auto direct = build_direct_model(FloatParams{}, demo_real(), 1.0);
  const auto dist = build_disturbance_model(FloatParams{}, demo_real(), demo_selection(3), 1.0);
  for (const auto* m : {&direct, &dist}) {
    std::vector<JacobianSample> samples;
    for (int k = 0; k < 10; ++k) {
      auto x = random_state(m->layout.dim(), rng, 0.3);
      samples.push_back({x, input(0.2 * k - 1.0), 0.0});
    }
    // Relative velocity just either side of the drag kink.
    for (double off : {-1e-3, 1e-3}) {
      auto x = random_state(m->layout.dim(), rng, 0.3);
      samples.push_back({x, input(x(1) + off), 0.0});
    }
    const auto report = check_jacobians(m->model, samples);
    EXPECT_TRUE(report.passed) << report.worst_block << " " << report.worst_row << "," << report.worst_col
                               << " deviation " << report.max_deviation;
  }
}

TEST(Models, DragKinkHasZeroSlope) {
  FloatParams p;
  p.linear_damping = 0;
  const auto m = build_direct_model(p, demo_real(), 1.0);
  VectorXd x = VectorXd::Zero(7);
  x(1) = 0.4;
  const auto jac = m.model.dynamics_jacobian(x, input(0.4), 0.0);
  EXPECT_EQ(jac(1, 1), 0.0);
}

TEST(Models, ZeroForceIsInvariant) {
  std::mt19937_64 rng(5);
  const auto m = build_disturbance_model(FloatParams{}, demo_real(), demo_selection(3), 1.0);
  auto x = random_state(12, rng);
  x.segment(2, 6).setZero();
  const auto d = m.model.dynamics(x, input(0.3), 0.0);
  EXPECT_EQ(d.segment(2, 6).norm(), 0.0);
  const auto direct = build_direct_model(FloatParams{}, demo_real(), 1.0);
  EXPECT_EQ(direct.model.dynamics(random_state(7, rng), input(0.1), 0.0)(2), 0.0);
}

TEST(Models, OscillatorsConserveEnergy) {
  const auto sel = demo_selection(3);
  const auto m = build_disturbance_model(FloatParams{}, demo_real(), sel, 0.0);
  VectorXd x = VectorXd::Zero(12);
  x.segment(5, 3) << 10, 20, 30;
  NoiseSpec noise{Eigen::MatrixXd::Zero(12, 12), Eigen::Matrix2d::Identity()};
  auto s = propagate(m.model, noise, {x, Eigen::MatrixXd::Identity(12, 12), 0.0}, input(0), 10.0);
  for (int i = 0; i < 3; ++i) {
    const double w = sel.freqs[static_cast<std::size_t>(i)];
    const double e0 = x(5 + i) * x(5 + i);
    const double e1 = w * w * s.x(2 + i) * s.x(2 + i) + s.x(5 + i) * s.x(5 + i);
    EXPECT_NEAR(e1, e0, 1e-6 * e0);
  }
}

TEST(Models, HeaveRowsAgreeAcrossAugmentations) {
  std::mt19937_64 rng(6);
  const auto direct = build_direct_model(FloatParams{}, demo_real(), 1.0);
  const auto dist = build_disturbance_model(FloatParams{}, demo_real(), demo_selection(1), 1.0);
  for (int k = 0; k < 5; ++k) {
    const auto xd = random_state(7, rng);
    VectorXd xs = VectorXd::Zero(8);
    xs.head(3) = xd.head(3);  // y, ydot, f_1 = F
    xs(3) = 0.7;
    xs.tail(4) = xd.tail(4);
    const auto dd = direct.model.dynamics(xd, input(0.2), 0.0);
    const auto ds = dist.model.dynamics(xs, input(0.2), 0.0);
    EXPECT_NEAR(dd(0), ds(0), 1e-14);
    EXPECT_NEAR(dd(1), ds(1), 1e-12);
    EXPECT_LE((dd.tail(4) - ds.tail(4)).norm(), 1e-12);
  }
}

TEST(Models, NoDragMeansNoInputDependence) {
  FloatParams p;
  p.drag_coeff = 0;
  p.linear_damping = 0;
  std::mt19937_64 rng(7);
  const auto m = build_direct_model(p, demo_real(), 1.0);
  const auto x = random_state(7, rng);
  EXPECT_EQ(m.model.dynamics(x, input(0.0), 0.0), m.model.dynamics(x, input(5.0), 0.0));
}

TEST(Models, NoiseMapAndValidation) {
  const auto m = build_direct_model(FloatParams{}, demo_real(), 3.0);
  EXPECT_EQ(m.model.noise_map(2, 2), 3.0);
  EXPECT_THROW(build_direct_model(FloatParams{}, demo_real(), -1.0), ValidationError);
  EXPECT_THROW(build_disturbance_model(FloatParams{}, demo_real(), EqualEnergySelection{}, 1.0), ValidationError);

  const auto q = augmented_process_noise(m.layout, {0.1, 0.2});
  EXPECT_EQ(q(0, 0), 0.1);
  EXPECT_EQ(q(1, 1), 0.2);
  EXPECT_EQ(q(2, 2), 1.0);
  EXPECT_EQ(q(3, 3), 0.0);
}

TEST(WaterVelocity, BackwardDifference) {
  WaterVelocityEstimator w(2.65, 2.0);
  auto e = w.update(2.0, 0.0);
  EXPECT_EQ(e.elevation, 1.0);
  EXPECT_EQ(e.velocity, 0.0);
  EXPECT_FALSE(w.primed());
  e = w.update(4.0, 0.5);
  EXPECT_EQ(e.elevation, 2.0);
  EXPECT_EQ(e.velocity, 2.0);
  EXPECT_TRUE(w.primed());
  e = w.update(1.0, 1.0);
  EXPECT_EQ(e.velocity, -3.0);
  EXPECT_THROW(w.update(1.0, 1.0), ValidationError);
  EXPECT_THROW(WaterVelocityEstimator(2.65, 0.0), ValidationError);
}

TEST(WaterVelocity, RecoversSinusoid) {
  // eta = a cos(w t) gives velocity -a w sin(w t) to O(dt).
  const double a = 0.1, w = 2.65, fx = 4000, dt = 0.005;
  WaterVelocityEstimator est(w, fx);
  for (int k = 0; k < 1000; ++k) {
    const double t = k * dt;
    const auto e = est.update(fx * a * std::cos(w * t), t);
    if (k > 0) EXPECT_NEAR(e.velocity, -a * w * std::sin(w * (t - dt / 2)), 1e-5);
  }
}

TEST(InitialConditions, AmplitudeTimesFrequency) {
  const auto sel = demo_selection(3);
  const auto ic = initial_conditions_disturbance(sel, demo_coeffs());
  ASSERT_EQ(ic.rate.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(ic.force[i], 0.0);
    const double a = std::sqrt(2 * sel.component_power[i]) * std::abs(interp_coeffs(demo_coeffs(), sel.freqs[i]).excitation);
    EXPECT_NEAR(ic.rate[i], a * sel.freqs[i], 1e-9 * ic.rate[i]);
  }
}

TEST(Method, Parsing) {
  EXPECT_EQ(parse_method("direct"), Method::direct);
  EXPECT_EQ(parse_method("disturbance"), Method::disturbance);
  EXPECT_THROW(parse_method("kalman"), ValidationError);
  EXPECT_EQ(to_string(Method::disturbance), "disturbance");
}

class EndToEnd : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    HarnessConfig cfg;
    cfg.coeffs = demo_coeffs();
    cfg.sim.duration = 60.0;
    cfg.calibration_duration = 30.0;
    cfg.master_seed = 99;
    exp_ = new Experiment(cfg);
  }
  static void TearDownTestSuite() {
    delete exp_;
    exp_ = nullptr;
  }
  static Experiment* exp_;
};
Experiment* EndToEnd::exp_ = nullptr;

TEST_F(EndToEnd, BothMethodsTrackTheForce) {
  const RunCatalogEntry entry{7, 0.3, 2.37};
  for (auto method : {Method::direct, Method::disturbance}) {
    EstimatorConfig est;
    est.method = method;
    const auto card = exp_->evaluate(entry, est, Variant{});
    ASSERT_TRUE(card.score.ok()) << card.score.error;
    EXPECT_GT(card.score.nmse_fex, 0.8) << to_string(method);
  }
}

TEST_F(EndToEnd, WaterVelocityHeldThenClamped) {
  const RunCatalogEntry entry{7, 0.3, 2.37};
  EstimatorConfig est;
  est.method = Method::disturbance;
  est.water_velocity_limit = 0.5;
  const auto out = exp_->evaluate(entry, est, Variant{}, true);
  ASSERT_TRUE(out.estimate.has_value());
  const auto& r = *out.estimate;
  const double wp = 2 * std::numbers::pi / 2.37;
  const double limit = 0.5 * 0.5 * 0.3 * wp;
  ASSERT_FALSE(r.water_vel.empty());
  bool saturated = false;
  for (std::size_t k = 0; k < r.water_vel.size(); ++k) {
    if (r.t[k] < r.t.front() + 2.0 - 1e-9) EXPECT_EQ(r.water_vel[k], 0.0);
    EXPECT_LE(std::abs(r.water_vel[k]), limit + 1e-15);
    saturated = saturated || std::abs(r.water_vel[k]) == limit;
  }
  EXPECT_TRUE(saturated);
}

TEST_F(EndToEnd, DisablingWaterVelocityChangesEstimate) {
  const RunCatalogEntry entry{7, 0.3, 2.37};
  EstimatorConfig est;
  const auto with = exp_->evaluate(entry, est, Variant{}, true);
  est.estimate_water_velocity = false;
  const auto without = exp_->evaluate(entry, est, Variant{}, true);
  EXPECT_NE(with.estimate->fex, without.estimate->fex);
}

}  // namespace
}  // namespace wecest
