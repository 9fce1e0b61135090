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

// Per player-day record of a study run and its CSV form.
//
// CSV header (fixed order, see docs/schemas.md):
//   condition,team,player,day,missed,steps,baseline_steps,pre_motivation,
//   post_motivation,arm,mode,catered_player,artificial_steps,best_arm,
//   worst_arm,csv,tc,running_disparity
// Empty cells mean "absent" (steps and motivation on missed days,
// catered_player when no player was catered).

#ifndef SHAPBANDIT_STUDY_LOG_H_
#define SHAPBANDIT_STUDY_LOG_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shapbandit/arm.h"
#include "shapbandit/strategy.h"

namespace shapbandit {

struct SessionRow {
  std::string condition;
  std::size_t team = 0;
  std::size_t player = 0;  // cohort-wide index
  int day = 0;             // 1-based session number
  bool missed = false;
  std::optional<double> steps;
  double baseline_steps = 0.0;  // mean of the unexposed baseline days
  std::optional<int> pre_motivation;
  std::optional<int> post_motivation;
  Arm arm = Arm::kAboveHigher;
  DecisionMode mode = DecisionMode::kForced;
  std::optional<std::size_t> catered_player;  // cohort-wide index
  double artificial_steps = 0.0;
  Arm best_arm = Arm::kAboveHigher;   // model prediction at decision time
  Arm worst_arm = Arm::kAboveHigher;  // model prediction at decision time
  double csv = 0.0;                   // after this session's update
  std::int64_t tc = 0;                // after this session's update
  double running_disparity = 0.0;     // input to the miss decision

  bool operator==(const SessionRow&) const = default;
};

struct TeamState {
  std::vector<std::size_t> players;  // cohort-wide indices
  std::vector<double> csv;
  std::vector<std::int64_t> tc;
};

struct StudyLog {
  std::string condition;
  int total_sessions = 0;
  std::vector<SessionRow> rows;  // ordered by player, then day
  std::vector<DecisionRecord> decisions;  // ordered by day, then team
  std::vector<TeamState> final_states;

  std::vector<std::size_t> players() const;  // ascending, distinct
  std::vector<const SessionRow*> rows_for(std::size_t player) const;
};

extern const std::vector<std::string_view> kStudyLogColumns;

// Shortest round-trip decimal form.
std::string FormatNumber(double value);

void WriteStudyLogCsv(const StudyLog& log, std::ostream& out);
std::string StudyLogCsv(const StudyLog& log);

// Parses rows written by WriteStudyLogCsv. Throws SchemaError naming the
// line and column of the first problem. Final team states come from each
// player's last row; decision records are not rebuilt.
StudyLog ReadStudyLogCsv(std::istream& in);
StudyLog ReadStudyLogCsv(std::string_view text);

}  // namespace shapbandit

#endif  // SHAPBANDIT_STUDY_LOG_H_
