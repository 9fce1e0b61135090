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

// Decision strategies over the three-arm environment: uniform random
// control, the Greedy Bandit, and the Shapley Bandit.
//
// The Shapley Bandit keeps, per human player, a Cumulative Shapley Value
// (CSV, summed per-round Shapley attributions of steps) and a Treatment
// Counter (TC, exploit rounds in which the bandit catered to that player's
// best arm). With shares CSVR_i = CSV_i / sum(CSV) and TCR_i = TC_i / sum(TC)
// the Shapley Disparity is SD_i = |CSVR_i - TCR_i|. On exploit it caters to
// the player whose extra treatment minimizes sum_j SD_j, then plays that
// player's best arm.

#ifndef SHAPBANDIT_STRATEGY_H_
#define SHAPBANDIT_STRATEGY_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shapbandit/arm.h"
#include "shapbandit/characteristic_function.h"
#include "shapbandit/reward_model.h"
#include "shapbandit/rng.h"

namespace shapbandit {

enum class DecisionMode { kExplore, kExploit, kForced };

std::string_view ModeLabel(DecisionMode mode);
DecisionMode ModeFromLabel(std::string_view label);

struct Decision {
  Arm arm = Arm::kAboveHigher;
  std::optional<PlayerId> catered_player;
  DecisionMode mode = DecisionMode::kExplore;

  bool operator==(const Decision&) const = default;
};

class ShapleyBanditState {
 public:
  ShapleyBanditState(std::size_t players, double epsilon);
  // Throws std::invalid_argument on size mismatch, non-finite CSV or
  // epsilon outside [0, 1].
  ShapleyBanditState(std::vector<double> csv, std::vector<std::int64_t> tc,
                     double epsilon);

  std::size_t num_players() const { return csv_.size(); }
  double epsilon() const { return epsilon_; }
  const std::vector<double>& csv() const { return csv_; }
  const std::vector<std::int64_t>& tc() const { return tc_; }
  double total_csv() const;
  std::int64_t total_tc() const;

  // Throws ZeroTotalCsv when every CSV is zero.
  double csv_ratio(PlayerId player) const;
  // 1/|N| while no treatment has been counted.
  double tc_ratio(PlayerId player) const;

  // sum_j |CSVR_j - TCR_j| after a hypothetical extra treatment of `player`.
  double hypothetical_disparity_sum(PlayerId player) const;
  double disparity_sum() const;

  void add_csv(PlayerId player, double value);
  void add_treatment(PlayerId player);

 private:
  void check_player(PlayerId player) const;
  double disparity_sum_with(std::span<const std::int64_t> tc) const;

  std::vector<double> csv_;
  std::vector<std::int64_t> tc_;
  double epsilon_;
};

// |CSVR_i - TCR_i|. Throws ZeroTotalCsv when every CSV is zero.
double shapley_disparity(const ShapleyBanditState& state, PlayerId player);

// Arm maximizing the sum over players of the per-player mean reward.
Decision greedy_select(const RewardModel& model, const Coalition& players,
                       TieBreak tie_break = TieBreak::kLowestOrdinal,
                       Rng* rng = nullptr);

// One uniform draw decides explore (< epsilon) vs exploit; an explore draws
// a uniform arm. Candidates are the members of `players`; tied candidates go
// to the lowest PlayerId under kLowestOrdinal.
Decision shapley_select(const ShapleyBanditState& state,
                        const RewardModel& model, const Coalition& players,
                        Rng& rng,
                        TieBreak tie_break = TieBreak::kLowestOrdinal);

Decision random_select(Rng& rng);

// Builds the round's characteristic function from per-player steps (missed
// players carry 0).
using CharacteristicFunctionBuilder =
    std::function<CharacteristicFunction(std::span<const double>)>;
CharacteristicFunctionBuilder AdditiveStepsBuilder();

// Adds each observed player's Shapley value (over the coalition of players
// observed this round) to their CSV. Players with no observation keep their
// CSV. An exploit decision also increments the catered player's TC. Throws
// std::invalid_argument on negative or non-finite steps.
void shapley_update(ShapleyBanditState& state, const Decision& decision,
                    std::span<const std::optional<double>> step_rewards,
                    const CharacteristicFunctionBuilder& v_builder =
                        AdditiveStepsBuilder());

// One line of the per-session decision log (JSON lines).
struct DecisionRecord {
  int day = 0;
  std::optional<std::size_t> team;
  Decision decision;
  std::vector<double> csv;
  std::vector<std::int64_t> tc;
  // Combined scalar reward per player; empty for a missed session.
  std::vector<std::optional<double>> reward;
};

std::string ToJsonLine(const DecisionRecord& record);
DecisionRecord DecisionRecordFromJson(std::string_view line);

}  // namespace shapbandit

#endif  // SHAPBANDIT_STRATEGY_H_
