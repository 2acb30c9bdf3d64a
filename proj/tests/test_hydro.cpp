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

#include <fstream>

#include <gtest/gtest.h>

#include "support.hpp"
#include "wecest/error.hpp"
#include "wecest/hydro.hpp"

namespace wecest {
namespace {

using testing::demo_coeffs;
using testing::rel_err;
using testing::TempDir;

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

TEST(FloatParams, DemoDefaults) {
  const FloatParams p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_DOUBLE_EQ(p.virtual_mass(), 62.0);
  EXPECT_NEAR(p.restoring_stiffness(), 2806.8, 1e-9);
  EXPECT_NEAR(p.drag_factor(), 112.0, 1e-12);
}

TEST(FloatParams, ValidationNamesField) {
  FloatParams p;
  p.mass = 0;
  try {
    p.validate();
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("mass"), std::string::npos);
  }
  p = {};
  p.drag_coeff = -0.1;
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(BemTable, ThreeRowsLoad) {
  TempDir dir;
  write_text(dir / "t.csv",
             "# three rows\nomega,added_mass,damping,fx_re,fx_im\n"
             "1,13,0.5,2000,-10\n2,12.5,1.0,1900,-20  \n3,12.2,0.4,1700,-30\n");
  const auto c = load_bem_table(dir / "t.csv");
  EXPECT_EQ(c.size(), 3u);
  EXPECT_EQ(c.excitation[1], std::complex<double>(1900, -20));
  EXPECT_EQ(c.added_mass_inf, 12.2);  // last row without an explicit value
}

TEST(BemTable, DuplicateOmegaNamesRow) {
  TempDir dir;
  write_text(dir / "t.csv",
             "omega,added_mass,damping,fx_re,fx_im\n1,13,0.5,2000,0\n1,12,1,1900,0\n2,12,1,1800,0\n");
  try {
    load_bem_table(dir / "t.csv");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(BemTable, MalformedRowReportsLine) {
  TempDir dir;
  write_text(dir / "t.csv", "omega,added_mass,damping,fx_re,fx_im\n1,13,0.5,2000,0\n2,12,abc,1900,0\n");
  try {
    load_bem_table(dir / "t.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(BemTable, EmptyTableRejected) {
  TempDir dir;
  write_text(dir / "t.csv", "omega,added_mass,damping,fx_re,fx_im\n");
  EXPECT_THROW(load_bem_table(dir / "t.csv"), ValidationError);
}

TEST(BemTable, RoundTripOfAnalyticTable) {
  TempDir dir;
  const auto& c = demo_coeffs();
  write_bem_table(dir / "demo.csv", c);
  const auto r = load_bem_table(dir / "demo.csv");
  ASSERT_EQ(r.size(), c.size());
  EXPECT_EQ(r.added_mass_inf, c.added_mass_inf);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_LE(rel_err(r.freq_grid[i], c.freq_grid[i]), 1e-12);
    EXPECT_EQ(r.radiation_damping[i], c.radiation_damping[i]);
    EXPECT_EQ(r.added_mass[i], c.added_mass[i]);
    EXPECT_EQ(r.excitation[i], c.excitation[i]);
  }
}

TEST(AnalyticCoeffs, SinglePeakedDamping) {
  const auto c = generate_analytic_coeffs(FloatParams{}, {0.02, 60.0, 64});
  int sign_changes = 0;
  for (std::size_t i = 2; i < c.size(); ++i) {
    const double d0 = c.radiation_damping[i - 1] - c.radiation_damping[i - 2];
    const double d1 = c.radiation_damping[i] - c.radiation_damping[i - 1];
    if (d0 > 0 && d1 <= 0) ++sign_changes;
    if (d0 < 0 && d1 > 0) ADD_FAILURE() << "interior minimum at " << i;
  }
  EXPECT_EQ(sign_changes, 1);
}

TEST(AnalyticCoeffs, ShapeProperties) {
  const auto& c = demo_coeffs();
  EXPECT_GT(std::abs(c.excitation.front()), std::abs(c.excitation.back()));
  for (std::size_t i = 1; i < c.size(); ++i) {
    EXPECT_LE(std::abs(c.excitation[i]), std::abs(c.excitation[i - 1]));
    EXPECT_GE(c.radiation_damping[i], 0.0);
  }
  EXPECT_LT(c.added_mass.back() - c.added_mass_inf, 0.3);
  EXPECT_GT(c.added_mass.front(), c.added_mass.back());
}

TEST(AnalyticCoeffs, InvalidGridRejected) {
  EXPECT_THROW(generate_analytic_coeffs(FloatParams{}, {1.0, 1.0, 1}), ValidationError);
  EXPECT_THROW(generate_analytic_coeffs(FloatParams{}, {1.0, 2.0, 15}), ValidationError);
  EXPECT_THROW(generate_analytic_coeffs(FloatParams{}, {0.0, 2.0, 32}), ValidationError);
}

TEST(AnalyticCoeffs, PassInvariantsForVariedParams) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int k = 0; k < 20; ++k) {
    FloatParams p;
    p.mass *= u(rng);
    p.waterplane_area *= u(rng);
    p.added_mass_inf *= u(rng);
    EXPECT_NO_THROW(generate_analytic_coeffs(p, {0.05, 30.0, 32}).validate());
  }
}

TEST(Interp, ExactAtGridPointsAndLinearBetween) {
  const auto& c = demo_coeffs();
  for (std::size_t i = 0; i < c.size(); i += 37) {
    const auto s = interp_coeffs(c, c.freq_grid[i]);
    EXPECT_EQ(s.damping, c.radiation_damping[i]);
    EXPECT_EQ(s.added_mass, c.added_mass[i]);
    EXPECT_EQ(s.excitation, c.excitation[i]);
  }
  const double mid = 0.5 * (c.freq_grid[10] + c.freq_grid[11]);
  const auto s = interp_coeffs(c, mid);
  EXPECT_NEAR(s.damping, 0.5 * (c.radiation_damping[10] + c.radiation_damping[11]), 1e-12);
  EXPECT_NEAR(std::abs(s.excitation - 0.5 * (c.excitation[10] + c.excitation[11])), 0.0, 1e-9);
}

TEST(Interp, NoExtrapolation) {
  const auto& c = demo_coeffs();
  EXPECT_THROW(interp_coeffs(c, 1.001 * c.omega_max()), OutOfRangeError);
  EXPECT_THROW(interp_coeffs(c, 0.5 * c.omega_min()), OutOfRangeError);
}

TEST(HydroCoeffs, CoverageRule) {
  const auto& c = demo_coeffs();
  EXPECT_TRUE(c.covers_spectrum(2.0 * std::numbers::pi / 2.37));
  EXPECT_FALSE(c.covers_spectrum(0.05));  // needs omega_min <= 0.01
  EXPECT_FALSE(c.covers_spectrum(20.0));  // needs omega_max >= 100
}

}  // namespace
}  // namespace wecest
