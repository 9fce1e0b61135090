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

// Post-hoc disparity analysis of study logs.
//
// For each player: effort E (mean attended steps over the intervention
// window), net top treatment T (days shown their predicted-best arm minus
// days shown their predicted-worst arm), and miss likelihood (missed /
// scheduled sessions). Disparity is PR(E) - PR(T), where PR is the
// percentile rank across the cohort, so it lies in [-1, 1].

#ifndef SHAPBANDIT_ANALYSIS_H_
#define SHAPBANDIT_ANALYSIS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "shapbandit/study_log.h"

namespace shapbandit {

struct AnalysisOptions {
  int intervention_start_day = 10;
};

// Mean steps over attended intervention days; nullopt when every such day
// was missed. Throws std::invalid_argument if the player has no rows in the
// intervention window.
std::optional<double> effort(const StudyLog& log, std::size_t player,
                             const AnalysisOptions& options = {});

std::int64_t net_top_treatment(const StudyLog& log, std::size_t player,
                               const AnalysisOptions& options = {});

// Missed sessions over scheduled sessions. Throws std::invalid_argument for
// a player with no rows.
double miss_likelihood(const StudyLog& log, std::size_t player);

// rank / (n - 1) with tied values sharing the mean of their positional
// ranks; a single value gets 0.5. Throws std::invalid_argument when empty.
std::vector<double> percentile_rank(std::span<const double> values);

// Product-moment correlation. Throws std::invalid_argument on length
// mismatch or fewer than 3 points, DegenerateInput on zero variance.
double pearson_r(std::span<const double> x, std::span<const double> y);

// Standard normal CDF, 0.5 * erfc(-x / sqrt(2)).
double NormalCdf(double x);

struct ZTest {
  double z = 0.0;
  double p = 1.0;  // two-sided
};

// Fisher-z difference of two independent correlations:
//   z = (atanh r1 - atanh r2) / sqrt(1/(n1-3) + 1/(n2-3)).
// Throws DegenerateInput for n < 4 or |r| >= 1.
ZTest correlation_diff_test(double r1, std::size_t n1, double r2,
                            std::size_t n2);

// Regression slope difference (b1 - b2) / sqrt(se1^2 + se2^2).
ZTest slope_diff_test(double b1, double se1, double b2, double se2);

struct PlayerMetrics {
  std::size_t source = 0;  // index of the log the player came from
  std::size_t team = 0;
  std::size_t player = 0;
  double effort = 0.0;
  std::int64_t net_top_treatment = 0;
  double miss_likelihood = 0.0;
  double effort_rank = 0.0;
  double treatment_rank = 0.0;
  double disparity = 0.0;
};

struct CorrelationReport {
  double r = 0.0;
  std::size_t n = 0;
  double fisher_z = 0.0;
  std::optional<ZTest> comparison;
};

struct DisparityReport {
  std::vector<PlayerMetrics> players;  // ascending by disparity
  std::optional<CorrelationReport> correlation;  // r(disparity, miss)
  std::string correlation_note;  // why correlation is absent, if it is
  double mean_signed_disparity = 0.0;
  double mean_abs_disparity = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> excluded;  // (source, player)
};

// Cohort analysis over all players of all logs. Players whose intervention
// days were all missed are excluded. Throws DegenerateInput with fewer than
// 3 analyzable players.
DisparityReport disparity_report(std::span<const StudyLog> logs,
                                 const AnalysisOptions& options = {});
DisparityReport disparity_report(const StudyLog& log,
                                 const AnalysisOptions& options = {});

// Columns: player,disparity,miss_likelihood,effort,treatment (plus source
// and team when more than one log was analyzed, prepended).
std::string DisparityReportCsv(const DisparityReport& report,
                               bool with_source = false);
nlohmann::ordered_json DisparityReportJson(const DisparityReport& report);

}  // namespace shapbandit

#endif  // SHAPBANDIT_ANALYSIS_H_
