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

#include "wecest/radiation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "wecest/csv.hpp"
#include "wecest/error.hpp"

namespace wecest {

namespace {

// Hankel dimension cap; the SVD is O(k^3).
constexpr std::size_t kMaxHankel = 160;
constexpr double kMinDecay = 1e-6;  // 1/s, floor for mirrored poles

struct Pole {
  double sigma;  // real part, 1/s
  double omega;  // imaginary part (>= 0), rad/s; 0 for a real pole
};

std::vector<Pole> hankel_poles(const RadiationIRF& irf, int order) {
  const auto& k = irf.samples;
  const double peak = std::abs(*std::max_element(k.begin(), k.end(), [](double a, double b) {
    return std::abs(a) < std::abs(b);
  }));

  // Window the Hankel matrices on the active part of the response.
  std::size_t active = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (std::abs(k[i]) > 1e-4 * peak) active = i;
  }
  active = std::max<std::size_t>(active + 1, 4 * static_cast<std::size_t>(order) + 4);
  active = std::min(active, k.size() - 1);
  const std::size_t stride = std::max<std::size_t>(1, (active + 2 * kMaxHankel - 1) / (2 * kMaxHankel));
  const std::size_t available = (k.size() - 1) / stride;  // usable shifted samples
  const std::size_t dim = std::min({kMaxHankel, (active / stride + 1) / 2 + 1, available / 2});
  if (dim < static_cast<std::size_t>(order) + 1) {
    throw FitError("IRF too short for order " + std::to_string(order), -INFINITY);
  }
  const double step = irf.dt * static_cast<double>(stride);

  Eigen::MatrixXd h0(dim, dim), h1(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      h0(i, j) = k[(i + j) * stride];
      h1(i, j) = k[(i + j + 1) * stride];
    }
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(h0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto n = static_cast<Eigen::Index>(order);
  Eigen::VectorXd sv = svd.singularValues().head(n);
  const double floor = std::max(sv(0), 1e-300) * 1e-14;
  for (Eigen::Index i = 0; i < n; ++i) sv(i) = std::max(sv(i), floor);
  const Eigen::VectorXd inv_sqrt = sv.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd ad = inv_sqrt.asDiagonal() * svd.matrixU().leftCols(n).transpose() * h1 *
                             svd.matrixV().leftCols(n) * inv_sqrt.asDiagonal();

  Eigen::EigenSolver<Eigen::MatrixXd> eig(ad, false);
  std::vector<Pole> poles;
  const auto& z = eig.eigenvalues();
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const std::complex<double> zi = z(i);
    const double mag = std::abs(zi);
    const bool is_real = std::abs(zi.imag()) <= 1e-12 * std::max(mag, 1e-300);
    double sigma = std::log(std::max(mag, 1e-12)) / step;
    if (!std::isfinite(sigma)) sigma = -1.0 / step;
    if (sigma >= -kMinDecay) sigma = -std::max(std::abs(sigma), kMinDecay);
    if (is_real) {
      poles.push_back({sigma, 0.0});
    } else if (zi.imag() > 0) {
      poles.push_back({sigma, std::arg(zi) / step});
    }
  }
  return poles;
}

// Columns of the real basis, one per state, evaluated at the IRF grid.
Eigen::MatrixXd basis(const std::vector<Pole>& poles, const RadiationIRF& irf, int order) {
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(irf.samples.size()), order);
  for (Eigen::Index r = 0; r < phi.rows(); ++r) {
    const double t = irf.time(static_cast<std::size_t>(r));
    Eigen::Index col = 0;
    for (const auto& p : poles) {
      const double env = std::exp(p.sigma * t);
      if (p.omega == 0.0) {
        phi(r, col++) = env;
      } else {
        phi(r, col++) = env * std::cos(p.omega * t);
        phi(r, col++) = env * std::sin(p.omega * t);
      }
    }
  }
  return phi;
}

RadiationRealization zero_realization(int order) {
  RadiationRealization r;
  r.a = Eigen::MatrixXd::Zero(order, order);
  for (int i = 0; i < order; ++i) r.a(i, i) = -static_cast<double>(i + 1);
  r.b = Eigen::VectorXd::Ones(order);
  r.c = Eigen::RowVectorXd::Zero(order);
  r.fit_score = 1.0;
  return r;
}

}  // namespace

double RadiationRealization::spectral_abscissa() const {
  Eigen::EigenSolver<Eigen::MatrixXd> eig(a, false);
  return eig.eigenvalues().real().maxCoeff();
}

double RadiationRealization::impulse_response(double t) const {
  const Eigen::MatrixXd e = (a * t).exp();
  return c * e * b;
}

RadiationIRF compute_irf(const HydroCoeffs& coeffs, const IrfOptions& options) {
  coeffs.validate();
  if (!(options.dt > 0) || !(options.duration > options.dt)) {
    throw ValidationError("IRF grid requires 0 < dt < duration");
  }
  const auto& w = coeffs.freq_grid;
  const std::size_t m = w.size();
  std::vector<double> weight(m, 0.0);  // trapezoid weights times B(w)
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double half = 0.5 * (w[i + 1] - w[i]);
    weight[i] += half * coeffs.radiation_damping[i];
    weight[i + 1] += half * coeffs.radiation_damping[i + 1];
  }

  RadiationIRF irf;
  irf.dt = options.dt;
  const auto n = static_cast<std::size_t>(std::llround(options.duration / options.dt)) + 1;
  irf.samples.resize(n);
  double peak = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = irf.time(k);
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += weight[i] * std::cos(w[i] * t);
    irf.samples[k] = 2.0 / std::numbers::pi * acc;
    peak = std::max(peak, std::abs(irf.samples[k]));
  }
  if (std::abs(irf.samples.back()) > 0.01 * peak) {
    throw ValidationError("radiation IRF has not decayed by T = " + csv::format(irf.duration()) +
                          " s; use a longer IRF duration");
  }
  return irf;
}

double realization_fit_score(const RadiationRealization& real, const RadiationIRF& irf) {
  const auto n = irf.samples.size();
  double mean = 0.0;
  for (double v : irf.samples) mean += v;
  mean /= static_cast<double>(n);

  // exp(A dt) stepping reproduces C exp(A t) B on the uniform grid.
  const Eigen::MatrixXd step = (real.a * irf.dt).exp();
  Eigen::VectorXd x = real.b;
  double sse = 0.0, sst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double fit = real.c * x;
    sse += (irf.samples[k] - fit) * (irf.samples[k] - fit);
    sst += (irf.samples[k] - mean) * (irf.samples[k] - mean);
    x = step * x;
  }
  if (sst == 0.0) return sse <= 1e-18 ? 1.0 : 0.0;
  return 1.0 - sse / sst;
}

RadiationRealization fit_realization(const RadiationIRF& irf, int order) {
  if (order < 1) throw ValidationError("realization order must be >= 1");
  if (!(irf.dt > 0) || irf.samples.size() < 2) throw ValidationError("IRF is empty");
  if (std::all_of(irf.samples.begin(), irf.samples.end(), [](double v) { return v == 0.0; })) {
    return zero_realization(order);
  }

  const auto poles = hankel_poles(irf, order);
  const Eigen::MatrixXd phi = basis(poles, irf, order);
  const Eigen::Map<const Eigen::VectorXd> target(irf.samples.data(),
                                                 static_cast<Eigen::Index>(irf.samples.size()));
  const Eigen::VectorXd coef = phi.completeOrthogonalDecomposition().solve(target);

  RadiationRealization r;
  r.a = Eigen::MatrixXd::Zero(order, order);
  r.b = Eigen::VectorXd::Zero(order);
  r.c = Eigen::RowVectorXd::Zero(order);
  Eigen::Index i = 0;
  for (const auto& p : poles) {
    if (p.omega == 0.0) {
      r.a(i, i) = p.sigma;
      r.b(i) = 1.0;
      r.c(i) = coef(i);
      ++i;
    } else {
      // exp(A t) B = e^{sigma t} [cos, -sin]^T for this block.
      r.a(i, i) = p.sigma;
      r.a(i, i + 1) = p.omega;
      r.a(i + 1, i) = -p.omega;
      r.a(i + 1, i + 1) = p.sigma;
      r.b(i) = 1.0;
      r.c(i) = coef(i);
      r.c(i + 1) = -coef(i + 1);
      i += 2;
    }
  }
  if (!r.a.allFinite() || !r.c.allFinite() || r.spectral_abscissa() >= 0.0) {
    throw FitError("could not produce a stable realization of order " + std::to_string(order),
                   -INFINITY);
  }
  r.fit_score = realization_fit_score(r, irf);
  if (!std::isfinite(r.fit_score)) {
    throw FitError("non-finite fit score for order " + std::to_string(order), -INFINITY);
  }
  return r;
}

RadiationOutput radiation_force(const RadiationRealization& real, const Eigen::VectorXd& state,
                                double heave_velocity) {
  if (state.size() != real.order() || real.b.size() != real.order() ||
      real.c.size() != real.order()) {
    throw ValidationError("radiation state has dimension " + std::to_string(state.size()) +
                          ", realization order is " + std::to_string(real.order()));
  }
  return {-(real.c * state)(0), real.a * state + real.b * heave_velocity};
}

void write_realization(const std::filesystem::path& path, const RadiationRealization& real) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const auto n = real.order();
  out << "order," << n << '\n';
  for (int i = 0; i < n; ++i) {
    out << 'A';
    for (int j = 0; j < n; ++j) out << ',' << csv::format(real.a(i, j));
    out << '\n';
  }
  out << 'B';
  for (int j = 0; j < n; ++j) out << ',' << csv::format(real.b(j));
  out << "\nC";
  for (int j = 0; j < n; ++j) out << ',' << csv::format(real.c(j));
  out << "\nfit_score," << csv::format(real.fit_score) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

RadiationRealization read_realization(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string raw;
  std::size_t line_no = 0;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> lines;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto t = csv::trim(raw);
    if (t.empty() || t.front() == '#') continue;
    lines.emplace_back(line_no, csv::split(t));
  }
  const auto number = [](const std::string& s, std::size_t line) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ParseError("not a number: '" + s + "'", line);
    }
  };
  if (lines.empty() || lines[0].second.size() != 2 || lines[0].second[0] != "order") {
    throw ParseError("expected 'order,<n>' as first row", lines.empty() ? 0 : lines[0].first);
  }
  const int n = static_cast<int>(number(lines[0].second[1], lines[0].first));
  if (n < 1 || lines.size() < static_cast<std::size_t>(n) + 3) {
    throw ParseError("realization block truncated", 0);
  }
  RadiationRealization r;
  r.a.resize(n, n);
  r.b.resize(n);
  r.c.resize(n);
  const auto row = [&](std::size_t idx, const char* tag) {
    const auto& [ln, f] = lines[idx];
    if (f.size() != static_cast<std::size_t>(n) + 1 || f[0] != tag) {
      throw ParseError(std::string("expected ") + tag + " row with " + std::to_string(n) +
                           " values",
                       ln);
    }
    std::vector<double> v;
    for (int j = 0; j < n; ++j) v.push_back(number(f[static_cast<std::size_t>(j) + 1], ln));
    return v;
  };
  for (int i = 0; i < n; ++i) {
    const auto v = row(static_cast<std::size_t>(i) + 1, "A");
    for (int j = 0; j < n; ++j) r.a(i, j) = v[static_cast<std::size_t>(j)];
  }
  const auto b = row(static_cast<std::size_t>(n) + 1, "B");
  const auto c = row(static_cast<std::size_t>(n) + 2, "C");
  for (int j = 0; j < n; ++j) {
    r.b(j) = b[static_cast<std::size_t>(j)];
    r.c(j) = c[static_cast<std::size_t>(j)];
  }
  r.fit_score = 1.0;
  const auto extra = static_cast<std::size_t>(n) + 3;
  if (lines.size() > extra && lines[extra].second.size() == 2 &&
      lines[extra].second[0] == "fit_score") {
    r.fit_score = number(lines[extra].second[1], lines[extra].first);
  }
  return r;
}

}  // namespace wecest
