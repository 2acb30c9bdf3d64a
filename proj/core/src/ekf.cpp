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

#include "wecest/ekf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "wecest/csv.hpp"
#include "wecest/error.hpp"

namespace wecest {

namespace {

void symmetrize(Eigen::MatrixXd& p) {
  const Eigen::MatrixXd t = p.transpose();
  p = 0.5 * (p + t);
}

bool is_symmetric(const Eigen::MatrixXd& m) {
  return m.rows() == m.cols() && asymmetry(m) <= 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff());
}

}  // namespace

double asymmetry(const Eigen::MatrixXd& p) {
  return (p - p.transpose()).cwiseAbs().maxCoeff();
}

void NoiseSpec::validate() const {
  if (!is_symmetric(q)) throw ValidationError("process noise Q must be square and symmetric");
  if (!is_symmetric(r)) throw ValidationError("measurement noise R must be square and symmetric");
  if (q.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eq(q, Eigen::EigenvaluesOnly);
    if (eq.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, q.cwiseAbs().maxCoeff())) {
      throw ValidationError("process noise Q must be positive semidefinite");
    }
  }
  Eigen::LLT<Eigen::MatrixXd> lr(r);
  if (r.size() == 0 || lr.info() != Eigen::Success) {
    throw ValidationError("measurement noise R must be positive definite");
  }
}

EkfState propagate(const EkfModel& model, const NoiseSpec& noise, const EkfState& state,
                   const Eigen::VectorXd& u, double dt, const PropagateOptions& options) {
  if (!(dt > 0)) throw ValidationError("propagation interval must be > 0");
  const Eigen::MatrixXd gqg = model.noise_map * noise.q * model.noise_map.transpose();
  int substeps =
      options.max_step > 0 ? std::max(1, static_cast<int>(std::ceil(dt / options.max_step - 1e-9)))
                           : 1;
  if (options.stiffness_limit > 0) {
    const double rate = model.dynamics_jacobian(state.x, u, state.t).cwiseAbs().rowwise().sum().maxCoeff();
    if (std::isfinite(rate)) {
      const int needed = static_cast<int>(std::min(1e6, std::ceil(dt * rate / options.stiffness_limit)));
      substeps = std::clamp(needed, substeps, 64 * substeps);
    }
  }
  const double h = dt / substeps;

  EkfState s = state;
  Eigen::MatrixXd fp;
  const auto p_rate = [&](const Eigen::VectorXd& x, const Eigen::MatrixXd& p, double t) {
    const Eigen::MatrixXd f = model.dynamics_jacobian(x, u, t);
    fp.noalias() = f * p;
    return Eigen::MatrixXd(fp + fp.transpose() + gqg);
  };
  for (int k = 0; k < substeps; ++k) {
    const double t0 = state.t + h * k;
    const Eigen::VectorXd kx1 = model.dynamics(s.x, u, t0);
    const Eigen::MatrixXd kp1 = p_rate(s.x, s.p, t0);
    const Eigen::VectorXd x2 = s.x + 0.5 * h * kx1;
    const Eigen::VectorXd kx2 = model.dynamics(x2, u, t0 + 0.5 * h);
    const Eigen::MatrixXd kp2 = p_rate(x2, s.p + 0.5 * h * kp1, t0 + 0.5 * h);
    const Eigen::VectorXd x3 = s.x + 0.5 * h * kx2;
    const Eigen::VectorXd kx3 = model.dynamics(x3, u, t0 + 0.5 * h);
    const Eigen::MatrixXd kp3 = p_rate(x3, s.p + 0.5 * h * kp2, t0 + 0.5 * h);
    const Eigen::VectorXd x4 = s.x + h * kx3;
    const Eigen::VectorXd kx4 = model.dynamics(x4, u, t0 + h);
    const Eigen::MatrixXd kp4 = p_rate(x4, s.p + h * kp3, t0 + h);
    s.x += h / 6.0 * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4);
    s.p += h / 6.0 * (kp1 + 2.0 * kp2 + 2.0 * kp3 + kp4);
  }
  s.t = state.t + dt;
  symmetrize(s.p);
  if (!s.x.allFinite() || !s.p.allFinite()) {
    throw DivergenceError("EKF propagation produced a non-finite state at t=" + csv::format(s.t), 0);
  }
  return s;
}

UpdateResult update(const EkfModel& model, const NoiseSpec& noise, const EkfState& state,
                    const Eigen::VectorXd& z) {
  if (z.size() != model.measurement_dim) {
    throw ValidationError("measurement has dimension " + std::to_string(z.size()) + ", model expects " +
                          std::to_string(model.measurement_dim));
  }
  const Eigen::MatrixXd h = model.measurement_jacobian(state.x, state.t);
  const Eigen::MatrixXd ph = state.p * h.transpose();
  Eigen::MatrixXd s = h * ph + noise.r;
  symmetrize(s);
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    throw SingularUpdateError("innovation covariance is not positive definite at t=" +
                              csv::format(state.t));
  }
  // K = P H' S^-1, computed as (S^-1 H P)'.
  const Eigen::MatrixXd gain = llt.solve(ph.transpose()).transpose();
  const Eigen::VectorXd residual = z - model.measurement(state.x, state.t);

  UpdateResult out;
  out.state.t = state.t;
  out.state.x = state.x + gain * residual;
  Eigen::MatrixXd ikh = -gain * h;
  ikh.diagonal().array() += 1.0;
  out.state.p = ikh * state.p * ikh.transpose() + gain * noise.r * gain.transpose();
  symmetrize(out.state.p);
  out.innovation = {residual, s};
  return out;
}

FilterTrajectory run_filter(const EkfModel& model, const NoiseSpec& noise, const EkfState& initial,
                            const std::vector<MeasurementSample>& stream,
                            const InputProvider& input, const PropagateOptions& options) {
  FilterTrajectory traj;
  traj.t.reserve(stream.size());
  traj.x.reserve(stream.size());
  traj.p_diag.reserve(stream.size());
  traj.innovation.reserve(stream.size());

  EkfState state = initial;
  Eigen::VectorXd u = input(state);
  double last_t = initial.t;
  for (std::size_t k = 0; k < stream.size(); ++k) {
    const auto& sample = stream[k];
    if (k > 0 ? !(sample.t > last_t) : !(sample.t >= last_t)) {
      throw ValidationError("measurement timestamps must be strictly increasing (t=" +
                            csv::format(sample.t) + ")");
    }
    try {
      if (sample.t > state.t) state = propagate(model, noise, state, u, sample.t - state.t, options);
      Eigen::VectorXd innovation;
      if (sample.z) {
        auto up = update(model, noise, state, *sample.z);
        state = std::move(up.state);
        innovation = std::move(up.innovation.residual);
        ++traj.diagnostics.updates;
      }
      traj.diagnostics.max_asymmetry = std::max(traj.diagnostics.max_asymmetry, asymmetry(state.p));
      traj.diagnostics.min_diagonal =
          std::min(traj.diagnostics.min_diagonal, state.p.diagonal().minCoeff());
      traj.t.push_back(state.t);
      traj.x.push_back(state.x);
      traj.p_diag.push_back(state.p.diagonal());
      traj.innovation.push_back(std::move(innovation));
    } catch (const DivergenceError& e) {
      throw DivergenceError(std::string(e.what()) + " [sample t=" + csv::format(sample.t) + "]", k);
    } catch (const SingularUpdateError& e) {
      throw SingularUpdateError(std::string(e.what()) + " [sample " + std::to_string(k) + "]");
    }
    last_t = sample.t;
    u = input(state);
  }
  traj.final_state = state;
  return traj;
}

void write_trajectory_csv(const std::filesystem::path& path, const FilterTrajectory& traj) {
  const Eigen::Index n = traj.size() ? traj.x.front().size() : 0;
  Eigen::Index m = 0;
  for (const auto& v : traj.innovation) m = std::max(m, v.size());
  std::vector<std::string> header = {"t"};
  for (Eigen::Index i = 0; i < n; ++i) header.push_back("xhat_" + std::to_string(i));
  for (Eigen::Index i = 0; i < n; ++i) header.push_back("pdiag_" + std::to_string(i));
  for (Eigen::Index i = 0; i < m; ++i) header.push_back("innov_" + std::to_string(i));
  std::vector<std::vector<std::string>> rows;
  rows.reserve(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::vector<std::string> row = {csv::format(traj.t[k])};
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(csv::format(traj.x[k](i)));
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(csv::format(traj.p_diag[k](i)));
    const auto& innov = traj.innovation[k];
    for (Eigen::Index i = 0; i < m; ++i) row.push_back(i < innov.size() ? csv::format(innov(i)) : "");
    rows.push_back(std::move(row));
  }
  csv::write(path, header, rows);
}

JacobianReport check_jacobians(const EkfModel& model, const std::vector<JacobianSample>& samples,
                               double tolerance) {
  if (samples.empty()) throw ValidationError("check_jacobians needs at least one sample");
  JacobianReport report;
  const auto compare = [&](const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& fd,
                           const char* block, std::size_t sample) {
    for (Eigen::Index i = 0; i < analytic.rows(); ++i) {
      for (Eigen::Index j = 0; j < analytic.cols(); ++j) {
        const double a = analytic(i, j), n = fd(i, j);
        const double dev = std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1.0});
        if (report.worst_row < 0 || dev > report.max_deviation) {
          report.max_deviation = dev;
          report.worst_block = block;
          report.worst_row = i;
          report.worst_col = j;
          report.worst_sample = sample;
        }
      }
    }
  };

  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& [x, u, t] = samples[s];
    const auto n = x.size();
    Eigen::MatrixXd fd_f(model.state_dim, n), fd_h(model.measurement_dim, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double step = 1e-6 * std::max(1.0, std::abs(x(j)));
      Eigen::VectorXd xp = x, xm = x;
      xp(j) += step;
      xm(j) -= step;
      fd_f.col(j) = (model.dynamics(xp, u, t) - model.dynamics(xm, u, t)) / (2.0 * step);
      fd_h.col(j) = (model.measurement(xp, t) - model.measurement(xm, t)) / (2.0 * step);
    }
    compare(model.dynamics_jacobian(x, u, t), fd_f, "dynamics", s);
    compare(model.measurement_jacobian(x, t), fd_h, "measurement", s);
  }
  report.passed = report.max_deviation <= tolerance;
  return report;
}

}  // namespace wecest
