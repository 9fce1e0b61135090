// Copyright 2026 The Shapbandit Authors.
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
#include <cstdint>
#include <vector>

#include "gtest/gtest.h"
#include "shapbandit/analysis.h"
#include "shapbandit/error.h"
#include "shapbandit/rng.h"
#include "shapbandit/simworld.h"

namespace shapbandit {
namespace {

// Reference Fisher-z comparison built from first principles: log-form
// atanh and a Simpson-rule integral of the normal density.
double RefAtanh(double r) { return 0.5 * std::log((1.0 + r) / (1.0 - r)); }

double RefUpperTail(double z) {
  // P(Z > z) = 0.5 - integral_0^z phi(t) dt.
  const int n = 20000;
  const double h = z / n;
  double s = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double t = k * h;
    const double f = std::exp(-0.5 * t * t);
    s += (k == 0 || k == n) ? f : (k % 2 ? 4 * f : 2 * f);
  }
  return 0.5 - s * h / 3.0 / std::sqrt(2.0 * M_PI);
}

struct Day {
  bool missed = false;
  double steps = 0.0;
  Arm arm = Arm::kAboveHigher;
  Arm best = Arm::kAboveHigher;
  Arm worst = Arm::kBelowLower;
};

void AddPlayer(StudyLog& log, std::size_t player, const std::vector<Day>& days) {
  int day = 1;
  for (const Day& d : days) {
    SessionRow r;
    r.condition = log.condition;
    r.player = player;
    r.team = player / 2;
    r.day = day++;
    r.missed = d.missed;
    if (!d.missed) r.steps = d.steps;
    r.arm = d.arm;
    r.best_arm = d.best;
    r.worst_arm = d.worst;
    log.rows.push_back(r);
  }
  log.total_sessions = static_cast<int>(days.size());
}

std::vector<Day> Constant(int n, double steps, Arm arm = Arm::kAboveHigher) {
  std::vector<Day> days(n);
  for (Day& d : days) {
    d.steps = steps;
    d.arm = arm;
  }
  return days;
}

TEST(Effort, MeanOverWindowExcludingMissedDays) {
  StudyLog log;
  AddPlayer(log, 0, Constant(21, 10000));
  EXPECT_DOUBLE_EQ(*effort(log, 0), 10000);
  std::vector<Day> days = Constant(12, 0);
  days[9].steps = 8000;
  days[10].missed = true;
  days[11].steps = 12000;
  AddPlayer(log, 1, days);
  EXPECT_DOUBLE_EQ(*effort(log, 1), 10000);
  AnalysisOptions late;
  late.intervention_start_day = 12;
  EXPECT_DOUBLE_EQ(*effort(log, 1, late), 12000);
}

TEST(Effort, AllMissedIsAbsentAndEmptyWindowThrows) {
  StudyLog log;
  std::vector<Day> days = Constant(21, 5000);
  for (int d = 9; d < 21; ++d) days[d].missed = true;
  AddPlayer(log, 0, days);
  EXPECT_FALSE(effort(log, 0).has_value());
  StudyLog short_log;
  AddPlayer(short_log, 0, Constant(5, 100));
  EXPECT_THROW(effort(short_log, 0), std::invalid_argument);
}

TEST(NetTopTreatment, CountsBestMinusWorst) {
  StudyLog log;
  AddPlayer(log, 0, Constant(21, 1, Arm::kAboveHigher));
  AddPlayer(log, 1, Constant(21, 1, Arm::kBelowLower));
  std::vector<Day> even = Constant(21, 1, Arm::kBetween);
  for (int d = 9; d < 21; d += 2) even[d].arm = Arm::kAboveHigher;
  for (int d = 10; d < 21; d += 2) even[d].arm = Arm::kBelowLower;
  AddPlayer(log, 2, even);
  EXPECT_EQ(net_top_treatment(log, 0), 12);
  EXPECT_EQ(net_top_treatment(log, 1), -12);
  EXPECT_EQ(net_top_treatment(log, 2), 0);
}

TEST(MissLikelihood, Fractions) {
  StudyLog log;
  AddPlayer(log, 0, Constant(21, 1));
  std::vector<Day> some = Constant(21, 1);
  for (int d = 0; d < 7; ++d) some[d * 3].missed = true;
  AddPlayer(log, 1, some);
  std::vector<Day> all = Constant(21, 1);
  for (Day& d : all) d.missed = true;
  AddPlayer(log, 2, all);
  EXPECT_DOUBLE_EQ(miss_likelihood(log, 0), 0.0);
  EXPECT_DOUBLE_EQ(miss_likelihood(log, 1), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(miss_likelihood(log, 2), 1.0);
  EXPECT_THROW(miss_likelihood(log, 9), std::invalid_argument);
}

TEST(PercentileRank, RuleAndTies) {
  EXPECT_EQ(percentile_rank(std::vector<double>{10, 20, 30}),
            (std::vector<double>{0, 0.5, 1}));
  EXPECT_EQ(percentile_rank(std::vector<double>{10, 10, 30}),
            (std::vector<double>{0.25, 0.25, 1}));
  EXPECT_EQ(percentile_rank(std::vector<double>{42}), (std::vector<double>{0.5}));
  EXPECT_EQ(percentile_rank(std::vector<double>{30, 10, 20, 10}),
            (std::vector<double>{1, 1.0 / 6, 2.0 / 3, 1.0 / 6}));
  EXPECT_THROW(percentile_rank(std::vector<double>{}), std::invalid_argument);
}

TEST(PercentileRank, Monotone) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(2 + trial % 15);
    for (double& x : v) x = static_cast<double>(rng.uniform_int(6));
    const auto r = percentile_rank(v);
    for (std::size_t a = 0; a < v.size(); ++a) {
      EXPECT_GE(r[a], 0.0);
      EXPECT_LE(r[a], 1.0);
      for (std::size_t b = 0; b < v.size(); ++b) {
        if (v[a] < v[b]) EXPECT_LT(r[a], r[b]);
        if (v[a] == v[b]) EXPECT_EQ(r[a], r[b]);
      }
    }
  }
}

TEST(PearsonR, Examples) {
  const std::vector<double> x = {1, 2, 3, 4};
  EXPECT_NEAR(pearson_r(x, std::vector<double>{2, 1, 4, 3}), 0.6, 1e-12);
  EXPECT_DOUBLE_EQ(pearson_r(x, std::vector<double>{3, 5, 7, 9}), 1.0);
  EXPECT_DOUBLE_EQ(pearson_r(x, std::vector<double>{-1, -2, -3, -4}), -1.0);
  EXPECT_THROW(pearson_r(x, std::vector<double>{1, 1, 1, 1}), DegenerateInput);
  EXPECT_THROW(pearson_r(x, std::vector<double>{1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(pearson_r(std::vector<double>{1, 2}, std::vector<double>{1, 2}),
               std::invalid_argument);
}

TEST(PearsonR, AffineInvariance) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(20), y(20), xt(20), yt(20);
    const double a = rng.uniform(0.1, 10), b = rng.uniform(-50, 50);
    const double c = rng.uniform(0.1, 10), d = rng.uniform(-50, 50);
    for (std::size_t k = 0; k < 20; ++k) {
      x[k] = rng.normal(0, 1);
      y[k] = x[k] + rng.normal(0, 1);
      xt[k] = a * x[k] + b;
      yt[k] = c * y[k] + d;
    }
    EXPECT_NEAR(pearson_r(x, y), pearson_r(xt, yt), 1e-12);
  }
}

TEST(PearsonR, IndependentNoiseIsSmall) {
  Rng rng(10);
  double sum_abs = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(200), y(200);
    for (std::size_t k = 0; k < 200; ++k) {
      x[k] = rng.normal(0, 1);
      y[k] = rng.normal(0, 1);
    }
    sum_abs += std::abs(pearson_r(x, y));
  }
  // E|r| is about sqrt(2 / (pi n)) = 0.056 for n = 200.
  EXPECT_LT(sum_abs / 200, 0.08);
}

TEST(NormalCdf, TabulatedQuantiles) {
  EXPECT_DOUBLE_EQ(NormalCdf(0.0), 0.5);
  EXPECT_NEAR(NormalCdf(1.0), 0.8413447461, 1e-9);
  EXPECT_NEAR(NormalCdf(1.959963985), 0.975, 1e-9);
  EXPECT_NEAR(NormalCdf(-2.575829304), 0.005, 1e-9);
  EXPECT_NEAR(NormalCdf(3.0), 0.9986501020, 1e-9);
  EXPECT_NEAR(NormalCdf(-1.644853627), 0.05, 1e-9);
}

TEST(CorrelationDiffTest, AgreesWithReference) {
  const ZTest t = correlation_diff_test(0.5, 50, 0.0, 50);
  const double ref_z = (RefAtanh(0.5) - RefAtanh(0.0)) / std::sqrt(2.0 / 47.0);
  const double ref_p = 2.0 * RefUpperTail(ref_z);
  EXPECT_NEAR(t.z, ref_z, 1e-9);
  EXPECT_NEAR(t.p, ref_p, 1e-8);
  // Frozen from the reference above.
  EXPECT_NEAR(t.z, 2.662860331, 1e-8);
  EXPECT_NEAR(t.p, 0.007747957, 1e-8);
  EXPECT_NEAR(t.z, 2.66, 0.01);
  EXPECT_NEAR(t.p, 0.008, 0.001);
}

TEST(CorrelationDiffTest, SymmetryAndErrors) {
  const ZTest same = correlation_diff_test(0.3, 40, 0.3, 40);
  EXPECT_EQ(same.z, 0.0);
  EXPECT_EQ(same.p, 1.0);
  const ZTest a = correlation_diff_test(0.16, 56, -0.39, 56);
  const ZTest b = correlation_diff_test(-0.39, 56, 0.16, 56);
  EXPECT_DOUBLE_EQ(a.z, -b.z);
  EXPECT_DOUBLE_EQ(a.p, b.p);
  EXPECT_THROW(correlation_diff_test(0.5, 3, 0.1, 50), DegenerateInput);
  EXPECT_THROW(correlation_diff_test(1.0, 30, 0.1, 50), DegenerateInput);
}

TEST(SlopeDiffTest, Formula) {
  const ZTest t = slope_diff_test(0.5, 0.1, 0.2, 0.1);
  EXPECT_NEAR(t.z, 0.3 / std::sqrt(0.02), 1e-12);
  EXPECT_NEAR(t.p, 2.0 * RefUpperTail(t.z), 1e-8);
  EXPECT_THROW(slope_diff_test(1, 0, 1, 0), DegenerateInput);
}

TEST(DisparityReport, HandBuiltCohort) {
  StudyLog log;
  log.condition = "greedy";
  // Player 0: most effort, always worst arm, misses a lot.
  std::vector<Day> p0 = Constant(21, 12000, Arm::kBelowLower);
  for (int d = 0; d < 21; d += 2) p0[d].missed = true;
  // Player 1: least effort, always best arm, never misses.
  std::vector<Day> p1 = Constant(21, 4000, Arm::kAboveHigher);
  // Player 2: in between on both.
  std::vector<Day> p2 = Constant(21, 8000, Arm::kBetween);
  for (int d = 0; d < 21; d += 7) p2[d].missed = true;
  AddPlayer(log, 0, p0);
  AddPlayer(log, 1, p1);
  AddPlayer(log, 2, p2);
  const DisparityReport r = disparity_report(log);
  ASSERT_EQ(r.players.size(), 3u);
  EXPECT_EQ(r.players[0].player, 1u);
  EXPECT_DOUBLE_EQ(r.players[0].disparity, -1.0);
  EXPECT_DOUBLE_EQ(r.players[1].disparity, 0.0);
  EXPECT_EQ(r.players[2].player, 0u);
  EXPECT_DOUBLE_EQ(r.players[2].disparity, 1.0);
  EXPECT_EQ(r.players[2].net_top_treatment, -12);
  ASSERT_TRUE(r.correlation);
  EXPECT_GT(r.correlation->r, 0.9);
  EXPECT_DOUBLE_EQ(r.mean_signed_disparity, 0.0);
  EXPECT_DOUBLE_EQ(r.mean_abs_disparity, 2.0 / 3.0);
  EXPECT_EQ(DisparityReportCsv(r),
            "player,disparity,miss_likelihood,effort,treatment\n"
            "1,-1,0,4000,12\n"
            "2,0,0.14285714285714285,8000,0\n"
            "0,1,0.5238095238095238,12000,-12\n");
}

TEST(DisparityReport, IdenticalListsGiveUnitCorrelation) {
  // Misses chosen so miss likelihood is an increasing function of disparity.
  StudyLog log;
  const std::vector<double> steps = {1000, 2000, 3000, 4000};
  for (std::size_t p = 0; p < 4; ++p) {
    std::vector<Day> days = Constant(21, steps[p], Arm::kBetween);
    for (std::size_t d = 0; d < p; ++d) days[d].missed = true;
    AddPlayer(log, p, days);
  }
  const DisparityReport r = disparity_report(log);
  ASSERT_TRUE(r.correlation);
  EXPECT_NEAR(r.correlation->r, 1.0, 1e-12);
}

TEST(DisparityReport, TooFewPlayersAndExclusions) {
  StudyLog log;
  AddPlayer(log, 0, Constant(21, 100));
  AddPlayer(log, 1, Constant(21, 200));
  EXPECT_THROW(disparity_report(log), DegenerateInput);
  std::vector<Day> gone = Constant(21, 1);
  for (int d = 9; d < 21; ++d) gone[d].missed = true;
  AddPlayer(log, 2, gone);
  EXPECT_THROW(disparity_report(log), DegenerateInput);
  AddPlayer(log, 3, Constant(21, 300));
  const DisparityReport r = disparity_report(log);
  EXPECT_EQ(r.players.size(), 3u);
  ASSERT_EQ(r.excluded.size(), 1u);
  EXPECT_EQ(r.excluded[0].second, 2u);
  // Nobody misses: correlation is undefined and says why.
  EXPECT_FALSE(r.correlation);
  EXPECT_FALSE(r.correlation_note.empty());
}

TEST(DisparityReport, FuzzedLogsStayInRange) {
  Rng rng(2718);
  for (int trial = 0; trial < 100; ++trial) {
    StudyLog log;
    const std::size_t n = 3 + rng.uniform_int(20);
    for (std::size_t p = 0; p < n; ++p) {
      std::vector<Day> days(21);
      for (Day& d : days) {
        d.missed = rng.uniform() < 0.3;
        d.steps = std::round(rng.uniform(0, 20000));
        d.arm = ArmFromOrdinal(rng.uniform_int(3));
        d.best = ArmFromOrdinal(rng.uniform_int(3));
        d.worst = ArmFromOrdinal(rng.uniform_int(3));
      }
      days[20].missed = false;
      AddPlayer(log, p, days);
    }
    const DisparityReport r = disparity_report(log);
    for (const PlayerMetrics& m : r.players) {
      EXPECT_GE(m.disparity, -1.0);
      EXPECT_LE(m.disparity, 1.0);
      if (m.effort_rank == m.treatment_rank) EXPECT_EQ(m.disparity, 0.0);
    }
    for (std::size_t k = 1; k < r.players.size(); ++k) {
      EXPECT_LE(r.players[k - 1].disparity, r.players[k].disparity);
    }
    if (r.correlation) {
      EXPECT_LE(std::abs(r.correlation->r), 1.0);
    }
  }
}

TEST(DisparityReport, GreedyConflictCohortCorrelatesPositively) {
  CohortTemplate t;
  SimPlayer hi, lo;
  hi.baseline_steps = 11000;
  hi.noise_sd = 600;
  hi.sco = 0.9;
  hi.effect_size = 2000;
  hi.adherence_slope = 2.0;
  lo = hi;
  lo.baseline_steps = 5000;
  lo.sco = -0.9;
  t.team = {hi, lo};
  t.teams = 10;
  t.baseline_spread = 0.2;
  t.effect_spread = 0.5;
  std::vector<double> rs;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    StudyConfig c;
    c.condition = Condition::kGreedy;
    c.seed = seed;
    c.players = MaterializeCohort(t, seed);
    const DisparityReport r = disparity_report(run_study(c));
    if (r.correlation) rs.push_back(r.correlation->r);
  }
  ASSERT_GT(rs.size(), 150u);
  std::nth_element(rs.begin(), rs.begin() + rs.size() / 2, rs.end());
  EXPECT_GT(rs[rs.size() / 2], 0.0);
}

}  // namespace
}  // namespace shapbandit
