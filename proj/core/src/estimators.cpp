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

#include "wecest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "wecest/csv.hpp"
#include "wecest/error.hpp"

namespace wecest {

std::string to_string(Method m) { return m == Method::direct ? "direct" : "disturbance"; }

Method parse_method(const std::string& s) {
  if (s == "direct") return Method::direct;
  if (s == "disturbance") return Method::disturbance;
  throw ValidationError("unknown estimation method '" + s + "' (expected direct | disturbance)");
}

Eigen::Index StateLayout::dim() const {
  const Eigen::Index aug = method == Method::direct ? 1 : 2 * components;
  return 2 + aug + radiation_order;
}

Eigen::Index StateLayout::radiation_begin() const {
  return method == Method::direct ? 3 : 2 + 2 * components;
}

double StateLayout::excitation(const Eigen::VectorXd& x) const {
  return method == Method::direct ? x(2) : x.segment(force_begin(), components).sum();
}

namespace {

// Shared heave part of f and F for both augmentations. `fex` is the total
// excitation, `dfex` its gradient row w.r.t. the augmented block.
// Holds copies: the model lambdas outlive the caller's arguments.
struct HeaveTerms {
  FloatParams params;
  RadiationRealization real;
  double inv_mass;
  double stiffness;
  double drag;

  HeaveTerms(const FloatParams& p, const RadiationRealization& r)
      : params(p), real(r), inv_mass(1.0 / p.virtual_mass()), stiffness(p.restoring_stiffness()),
        drag(p.drag_factor()) {}

  void rhs(const Eigen::VectorXd& x, double water_vel, double fex, Eigen::Index rad_begin,
           Eigen::VectorXd& out) const {
    const auto n = real.order();
    const double v = x(1);
    const double rel = v - water_vel;
    const auto xr = x.segment(rad_begin, n);
    out(0) = v;
    out(1) = (-stiffness * x(0) - drag * rel * std::abs(rel) - params.linear_damping * rel -
              real.c.dot(xr) + fex) *
             inv_mass;
    out.segment(rad_begin, n).noalias() = real.a * xr + real.b * v;
  }

  void jacobian(const Eigen::VectorXd& x, double water_vel, Eigen::Index rad_begin,
                Eigen::MatrixXd& jac) const {
    const auto n = real.order();
    const double rel = x(1) - water_vel;
    jac(0, 1) = 1.0;
    jac(1, 0) = -stiffness * inv_mass;
    // d/dV (V|V|) = 2|V|, continuous at V = 0.
    jac(1, 1) = (-2.0 * drag * std::abs(rel) - params.linear_damping) * inv_mass;
    jac.block(1, rad_begin, 1, n) = -real.c * inv_mass;
    jac.block(rad_begin, 1, n, 1) = real.b;
    jac.block(rad_begin, rad_begin, n, n) = real.a;
  }
};

void attach_measurement(EkfModel& model) {
  model.measurement_dim = 2;
  model.measurement = [](const Eigen::VectorXd& x, double) {
    return Eigen::Vector2d(x(0), x(1)).eval();
  };
  const auto dim = model.state_dim;
  model.measurement_jacobian = [dim](const Eigen::VectorXd&, double) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, dim);
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;
    return h;
  };
}

}  // namespace

AugmentedModel build_direct_model(const FloatParams& params, const RadiationRealization& real,
                                  double fex_process_std) {
  params.validate();
  if (!(fex_process_std >= 0)) throw ValidationError("fex_process_std must be >= 0");
  AugmentedModel m;
  m.layout = {Method::direct, 1, real.order()};
  const auto dim = m.layout.dim();
  const auto rad = m.layout.radiation_begin();
  m.model.state_dim = dim;

  const HeaveTerms terms(params, real);
  m.model.dynamics = [terms, dim, rad](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double) {
    Eigen::VectorXd d(dim);
    terms.rhs(x, u(0), x(2), rad, d);
    d(2) = 0.0;
    return d;
  };
  m.model.dynamics_jacobian = [terms, dim, rad](const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                                double) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(dim, dim);
    terms.jacobian(x, u(0), rad, jac);
    jac(1, 2) = terms.inv_mass;
    return jac;
  };
  attach_measurement(m.model);

  m.model.noise_map = Eigen::MatrixXd::Zero(dim, dim);
  m.model.noise_map(0, 0) = 1.0;
  m.model.noise_map(1, 1) = 1.0;
  m.model.noise_map(2, 2) = fex_process_std;
  return m;
}

AugmentedModel build_disturbance_model(const FloatParams& params, const RadiationRealization& real,
                                       const EqualEnergySelection& selection,
                                       double component_process_std) {
  params.validate();
  if (selection.freqs.empty()) throw ValidationError("disturbance model needs N >= 1 frequencies");
  if (!(component_process_std >= 0)) throw ValidationError("component_process_std must be >= 0");
  AugmentedModel m;
  const auto n = static_cast<Eigen::Index>(selection.freqs.size());
  m.layout = {Method::disturbance, n, real.order()};
  m.frequencies = selection.freqs;
  const auto dim = m.layout.dim();
  const auto rad = m.layout.radiation_begin();
  const auto fb = m.layout.force_begin();
  const auto rb = m.layout.rate_begin();
  m.model.state_dim = dim;

  Eigen::VectorXd omega2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    omega2(i) = selection.freqs[static_cast<std::size_t>(i)] * selection.freqs[static_cast<std::size_t>(i)];
  }

  const HeaveTerms terms(params, real);
  m.model.dynamics = [terms, dim, rad, fb, rb, n, omega2](const Eigen::VectorXd& x,
                                                          const Eigen::VectorXd& u, double) {
    Eigen::VectorXd d(dim);
    terms.rhs(x, u(0), x.segment(fb, n).sum(), rad, d);
    d.segment(fb, n) = x.segment(rb, n);
    d.segment(rb, n) = -omega2.cwiseProduct(x.segment(fb, n));
    return d;
  };
  m.model.dynamics_jacobian = [terms, dim, rad, fb, rb, n, omega2](const Eigen::VectorXd& x,
                                                                   const Eigen::VectorXd& u, double) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(dim, dim);
    terms.jacobian(x, u(0), rad, jac);
    for (Eigen::Index i = 0; i < n; ++i) {
      jac(1, fb + i) = terms.inv_mass;
      jac(fb + i, rb + i) = 1.0;
      jac(rb + i, fb + i) = -omega2(i);
    }
    return jac;
  };
  attach_measurement(m.model);

  m.model.noise_map = Eigen::MatrixXd::Zero(dim, dim);
  m.model.noise_map(0, 0) = 1.0;
  m.model.noise_map(1, 1) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) m.model.noise_map(rb + i, rb + i) = component_process_std;
  return m;
}

Eigen::MatrixXd augmented_process_noise(const StateLayout& layout, const ProcessNoiseVariance& q) {
  Eigen::VectorXd diag = q.per_state(layout.dim());
  if (layout.method == Method::direct) {
    diag(2) = 1.0;
  } else {
    diag.segment(layout.rate_begin(), layout.components).setOnes();
  }
  return diag.asDiagonal();
}

WaterVelocityEstimator::WaterVelocityEstimator(double peak_frequency, double fx_norm_at_peak)
    : peak_frequency_(peak_frequency), fx_norm_(fx_norm_at_peak) {
  if (!(fx_norm_at_peak > 0)) {
    throw ValidationError("water velocity estimator needs |Fx(wp)| > 0");
  }
}

WaterVelocityEstimator::Estimate WaterVelocityEstimator::update(double fex_estimate, double t) {
  if (count_ > 0 && !(t > time_[1])) {
    throw ValidationError("water velocity estimator times must increase");
  }
  elevation_[0] = elevation_[1];
  time_[0] = time_[1];
  elevation_[1] = fex_estimate / fx_norm_;
  time_[1] = t;
  ++count_;
  Estimate e;
  e.elevation = elevation_[1];
  if (primed()) e.velocity = (elevation_[1] - elevation_[0]) / (time_[1] - time_[0]);
  return e;
}

DisturbanceInitial initial_conditions_disturbance(const EqualEnergySelection& selection,
                                                  const HydroCoeffs& coeffs) {
  DisturbanceInitial ic;
  for (std::size_t i = 0; i < selection.freqs.size(); ++i) {
    const double w = selection.freqs[i];
    const double a = std::sqrt(2.0 * selection.component_power[i]) *
                     std::abs(interp_coeffs(coeffs, w).excitation);
    ic.force.push_back(0.0);
    ic.rate.push_back(a * w);
  }
  return ic;
}

EstimateResult estimate_excitation(const FloatParams& params, const RadiationRealization& real,
                                   const HydroCoeffs& coeffs, const SeaState& sea,
                                   const Measurements& measurements,
                                   const ProcessNoiseVariance& process_noise,
                                   const EstimatorConfig& config) {
  if (measurements.size() == 0) throw ValidationError("no measurements to filter");
  if (!(config.measurement_noise > 0)) throw ValidationError("measurement noise std must be > 0");
  const auto spectrum = bretschneider(sea.hs, sea.tp);
  const double wp = spectrum.peak_frequency();
  const double fx_peak = std::abs(interp_coeffs(coeffs, wp).excitation);
  const double sigma = config.measurement_noise;
  // Expected excitation std for a narrow-band sea: |Fx(wp)| Hs / 4.
  const double force_scale = fx_peak * sea.hs / 4.0;

  AugmentedModel aug;
  Eigen::VectorXd x0;
  Eigen::VectorXd p0;
  if (config.method == Method::direct) {
    aug = build_direct_model(params, real, config.fex_process_std);
    x0 = Eigen::VectorXd::Zero(aug.layout.dim());
    p0 = Eigen::VectorXd::Zero(aug.layout.dim());
    p0(2) = force_scale * force_scale;
  } else {
    const auto sel = equal_energy_select(spectrum, config.n_components, config.power_threshold);
    aug = build_disturbance_model(params, real, sel, config.component_process_std);
    x0 = Eigen::VectorXd::Zero(aug.layout.dim());
    p0 = Eigen::VectorXd::Zero(aug.layout.dim());
    const auto ic = initial_conditions_disturbance(sel, coeffs);
    for (Eigen::Index i = 0; i < aug.layout.components; ++i) {
      const auto si = static_cast<std::size_t>(i);
      x0(aug.layout.force_begin() + i) = ic.force[si];
      x0(aug.layout.rate_begin() + i) = ic.rate[si];
      const double a = ic.rate[si] / sel.freqs[si];
      p0(aug.layout.force_begin() + i) = a * a;
      p0(aug.layout.rate_begin() + i) = ic.rate[si] * ic.rate[si];
    }
  }
  x0(0) = measurements.position.front();
  x0(1) = measurements.velocity.front();
  p0(0) = sigma * sigma;
  p0(1) = sigma * sigma;
  // Radiation states depend on unseen motion history. Their spread is that of
  // the steady response -A^-1 B v to a heave velocity of the wave's scale.
  if (real.order() > 0) {
    const double v_scale = 0.5 * sea.hs * wp;
    const Eigen::VectorXd gain = real.a.partialPivLu().solve(real.b);
    p0.segment(aug.layout.radiation_begin(), real.order()) = (gain * v_scale).array().square().matrix();
  }

  NoiseSpec noise;
  noise.q = augmented_process_noise(aug.layout, process_noise);
  noise.r = Eigen::Matrix2d::Identity() * sigma * sigma;
  noise.validate();

  EkfState initial{x0, p0.asDiagonal(), measurements.t.front()};
  std::vector<MeasurementSample> stream;
  stream.reserve(measurements.size());
  for (std::size_t k = 0; k < measurements.size(); ++k) {
    stream.push_back({measurements.t[k],
                      Eigen::Vector2d(measurements.position[k], measurements.velocity[k])});
  }

  EstimateResult result;
  result.frequencies = aug.frequencies;
  result.elevation.reserve(stream.size());
  result.water_vel.reserve(stream.size());
  WaterVelocityEstimator water(wp, fx_peak);
  const auto layout = aug.layout;
  const bool use_water = config.estimate_water_velocity;
  const double velocity_limit = config.water_velocity_limit * 0.5 * sea.hs * wp;
  // The prior sits on the first sample's timestamp, so its input is never
  // used; every later query follows an update and is recorded.
  bool prior = true;
  const InputProvider input = [&](const EkfState& s) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(1);
    if (prior) {
      prior = false;
      return u;
    }
    const auto est = water.update(layout.excitation(s.x), s.t);
    double velocity = 0.0;
    if (s.t - measurements.t.front() >= config.water_velocity_delay) {
      velocity = velocity_limit > 0 ? std::clamp(est.velocity, -velocity_limit, velocity_limit)
                                    : est.velocity;
    }
    result.elevation.push_back(est.elevation);
    result.water_vel.push_back(velocity);
    if (use_water) u(0) = velocity;
    return u;
  };

  PropagateOptions options;
  options.max_step = config.max_step;
  result.trajectory = run_filter(aug.model, noise, initial, stream, input, options);
  result.t = result.trajectory.t;
  result.fex.reserve(result.size());
  for (std::size_t k = 0; k < result.size(); ++k) {
    const auto& x = result.trajectory.x[k];
    result.fex.push_back(layout.excitation(x));
    result.y.push_back(x(0));
    result.ydot.push_back(x(1));
  }
  return result;
}

}  // namespace wecest
