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
#include <limits>
#include <set>

#include <gtest/gtest.h>

#include "support.hpp"
#include "wecest/error.hpp"
#include "wecest/harness.hpp"

namespace wecest {
namespace {

using testing::demo_coeffs;

TEST(Nmse, WorkedExamples) {
  const std::vector<double> s = {1, -1, 1, -1};
  EXPECT_DOUBLE_EQ(nmse(s, s), 1.0);
  const std::vector<double> zero(4, 0.0);
  EXPECT_DOUBLE_EQ(nmse(s, zero), 0.0);
  const std::vector<double> neg = {-1, 1, -1, 1};
  EXPECT_DOUBLE_EQ(nmse(s, neg), -1.0);
  const std::vector<double> half = {0.5, -0.5, 0.5, -0.5};
  EXPECT_DOUBLE_EQ(nmse(s, half), 0.5);
  // Offset reference: the mean is removed only from the denominator.
  const std::vector<double> shifted = {3, 1, 3, 1};
  const std::vector<double> est = {3, 1, 3, 2};
  EXPECT_DOUBLE_EQ(nmse(shifted, est), 0.5);
}

TEST(Nmse, Rejections) {
  const std::vector<double> a = {1, 2, 3}, b = {1, 2}, c = {2, 2, 2}, one = {1};
  EXPECT_THROW(nmse(a, b), ValidationError);
  EXPECT_THROW(nmse(c, a), ValidationError);
  EXPECT_THROW(nmse(one, one), ValidationError);
}

TEST(Catalog, Integrity) {
  const auto& cat = wave_catalog();
  ASSERT_EQ(cat.size(), 17u);
  std::set<int> numbers;
  for (const auto& e : cat) {
    numbers.insert(e.run_no);
    EXPECT_GT(e.hs, 0.0);
    EXPECT_GT(e.tp, 0.0);
  }
  EXPECT_EQ(numbers.size(), 17u);
  EXPECT_EQ(*numbers.begin(), 1);
  EXPECT_EQ(*numbers.rbegin(), 17);
  const auto r = select_runs({7, 17});
  EXPECT_DOUBLE_EQ(r[0].hs, 0.300);
  EXPECT_DOUBLE_EQ(r[0].tp, 2.37);
  EXPECT_DOUBLE_EQ(r[1].hs, 0.375);
  EXPECT_DOUBLE_EQ(r[1].tp, 2.37);
  EXPECT_THROW(select_runs({18}), ValidationError);
}

TEST(Catalog, DemoTableCoversEverySpectrum) {
  for (const auto& e : wave_catalog()) {
    const auto s = bretschneider(e.hs, e.tp);
    EXPECT_TRUE(demo_coeffs().covers_spectrum(s.peak_frequency()))
        << "run " << e.run_no;
  }
}

TEST(SizeRatio, GrowsWithFrequency) {
  const FloatParams p;
  EXPECT_GT(size_ratio(p, 1.42), size_ratio(p, 5.53));
  EXPECT_NEAR(size_ratio(p, 2.0) / size_ratio(p, 4.0), 4.0, 1e-12);
}

TEST(Seeds, StreamsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t run = 0; run < 20; ++run) {
    for (std::uint64_t s = 1; s <= 4; ++s) seen.insert(derive_seed(1234 ^ run, s));
  }
  EXPECT_EQ(seen.size(), 80u);
  EXPECT_EQ(derive_seed(5, 1), derive_seed(5, 1));
}

TEST(Quantile, TypeSeven) {
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile({7}, 0.3), 7.0);
  EXPECT_THROW(quantile({}, 0.5), ValidationError);
}

std::vector<ScoreCard> synthetic_cards() {
  std::vector<ScoreCard> cards;
  for (int run = 1; run <= 5; ++run) {
    for (const char* method : {"direct", "disturbance-3"}) {
      ScoreCard c;
      c.run_no = run;
      c.method = method;
      c.sweep_var = "rate";
      c.sweep_val = run % 2 ? 200 : 50;
      c.nmse_fex = 0.9 - 0.01 * run + (c.method == "direct" ? 0 : 0.05);
      c.nmse_vel = 0.1 * run - 0.3333333333333333;
      c.size_ratio = 0.01 * run;
      cards.push_back(c);
    }
  }
  // Failed cells carry NaN scores, as the harness writes them.
  cards[3].error = "diverged";
  cards[3].nmse_fex = cards[3].nmse_vel = std::numeric_limits<double>::quiet_NaN();
  return cards;
}

TEST(Results, CsvRoundTripIsExact) {
  testing::TempDir dir;
  const auto cards = synthetic_cards();
  write_results_csv(dir / "results.csv", cards);
  const auto back = read_results_csv(dir / "results.csv");
  ASSERT_EQ(back.size(), cards.size());
  for (std::size_t i = 0; i < cards.size(); ++i) {
    EXPECT_EQ(back[i].run_no, cards[i].run_no);
    EXPECT_EQ(back[i].method, cards[i].method);
    EXPECT_EQ(back[i].sweep_val, cards[i].sweep_val);
    EXPECT_EQ(back[i].ok(), cards[i].ok());
    if (cards[i].ok()) {
      EXPECT_EQ(back[i].nmse_fex, cards[i].nmse_fex);
      EXPECT_EQ(back[i].nmse_vel, cards[i].nmse_vel);
    }
  }
}

TEST(Results, MalformedFileNamesLine) {
  testing::TempDir dir;
  {
    std::ofstream f(dir / "r.csv");
    f << "run_no,method,sweep_var,sweep_val,nmse_fex,nmse_vel,size_ratio\n1,direct,none,0,0.9,0.8\n";
  }
  try {
    read_results_csv(dir / "r.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(read_results_csv(dir / "absent.csv"), IoError);
}

TEST(Summary, RecomputedFromResults) {
  const auto cards = synthetic_cards();
  const auto rows = summarize(cards);
  ASSERT_EQ(rows.size(), 4u);  // two methods x two rates, first-appearance order
  EXPECT_EQ(rows[0].method, "direct");
  EXPECT_EQ(rows[0].sweep_val, 200);
  EXPECT_EQ(rows[1].method, "disturbance-3");
  for (const auto& row : rows) {
    std::vector<double> fex, vel;
    std::size_t failed = 0, count = 0;
    for (const auto& c : cards) {
      if (c.method != row.method || c.sweep_val != row.sweep_val) continue;
      ++count;
      if (!c.ok()) {
        ++failed;
        continue;
      }
      fex.push_back(c.nmse_fex);
      vel.push_back(c.nmse_vel);
    }
    EXPECT_EQ(row.count, count);
    EXPECT_EQ(row.failed, failed);
    EXPECT_NEAR(row.fex_median, quantile(fex, 0.5), 1e-12);
    EXPECT_NEAR(row.fex_q1, quantile(fex, 0.25), 1e-12);
    EXPECT_NEAR(row.vel_q3, quantile(vel, 0.75), 1e-12);
    EXPECT_NEAR(row.vel_min, *std::min_element(vel.begin(), vel.end()), 1e-12);
  }
  EXPECT_NEAR(median_fex(cards, "direct", 200.0), rows[0].fex_median, 1e-12);
}

class Sweeps : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    HarnessConfig cfg;
    cfg.coeffs = demo_coeffs();
    cfg.sim.duration = 30.0;
    cfg.calibration_duration = 20.0;
    cfg.master_seed = 17;
    exp_ = new Experiment(cfg);
  }
  static void TearDownTestSuite() {
    delete exp_;
    exp_ = nullptr;
  }
  static Experiment* exp_;
};
Experiment* Sweeps::exp_ = nullptr;

TEST_F(Sweeps, RateMustDivideBaseRate) {
  EXPECT_THROW(sweep_sampling_rate(*exp_, EstimatorConfig{}, {3.0}, select_runs({7}), 1), ValidationError);
  EXPECT_THROW(sweep_radiation_order(*exp_, EstimatorConfig{}, {7}, select_runs({7}), 1), ValidationError);
  EXPECT_THROW(sweep_measurement_noise(*exp_, EstimatorConfig{}, {0.5}, select_runs({7}), 1), ValidationError);
}

TEST_F(Sweeps, GridOrderAndDeterminism) {
  const auto runs = select_runs({5, 7});
  const auto a = sweep_sampling_rate(*exp_, EstimatorConfig{}, {200, 50}, runs, 1);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a[0].sweep_val, 200);
  EXPECT_EQ(a[0].run_no, 5);
  EXPECT_EQ(a[1].run_no, 7);
  EXPECT_EQ(a[2].sweep_val, 50);
  for (const auto& c : a) {
    EXPECT_TRUE(c.ok()) << c.error;
    EXPECT_EQ(c.sweep_var, "rate");
    EXPECT_LE(c.max_asymmetry, 1e-9);
    EXPECT_GT(c.min_p_diagonal, 0.0);
  }
  const auto b = sweep_sampling_rate(*exp_, EstimatorConfig{}, {200, 50}, runs, 2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].nmse_fex, b[i].nmse_fex);
    EXPECT_EQ(a[i].nmse_vel, b[i].nmse_vel);
  }
}

TEST_F(Sweeps, HarnessValidation) {
  HarnessConfig cfg;
  cfg.coeffs = demo_coeffs();
  cfg.truth_order = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg.truth_order = 4;
  cfg.excitation_irf_dt = 0.004;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

}  // namespace
}  // namespace wecest
