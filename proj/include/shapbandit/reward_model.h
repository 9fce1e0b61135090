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

#ifndef SHAPBANDIT_REWARD_MODEL_H_
#define SHAPBANDIT_REWARD_MODEL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "shapbandit/arm.h"
#include "shapbandit/characteristic_function.h"
#include "shapbandit/rng.h"

namespace shapbandit {

// Combined reward = step_delta / step_scale + motivation_weight * motivation.
// With the defaults one Likert point weighs about as much as 1000 steps.
struct RewardConfig {
  double step_scale = 1000.0;
  double motivation_weight = 1.0;
};

struct Reward {
  double step_delta = 0.0;        // steps relative to the player's baseline
  double motivation_delta = 0.0;  // post - pre session motivation

  double combined(const RewardConfig& config) const {
    return step_delta / config.step_scale +
           config.motivation_weight * motivation_delta;
  }
};

struct ArmStats {
  std::int64_t count = 0;
  double sum = 0.0;

  // Unobserved cells report 0, i.e. "no expected effect".
  double mean() const {
    return count > 0 ? sum / static_cast<double>(count) : 0.0;
  }
};

// Per-(player, arm) sample means of the combined scalar reward.
class RewardModel {
 public:
  explicit RewardModel(std::size_t players, RewardConfig config = {});

  std::size_t num_players() const { return cells_.size(); }
  const RewardConfig& config() const { return config_; }

  // Throws std::invalid_argument on a non-finite reward or unknown player.
  void observe(PlayerId player, Arm arm, const Reward& reward);
  void observe_scalar(PlayerId player, Arm arm, double reward);

  const ArmStats& stats(PlayerId player, Arm arm) const;
  double mean(PlayerId player, Arm arm) const {
    return stats(player, arm).mean();
  }
  std::array<double, kNumArms> means(PlayerId player) const;

 private:
  void check_player(PlayerId player) const;

  RewardConfig config_;
  std::vector<std::array<ArmStats, kNumArms>> cells_;
};

enum class TieBreak {
  kLowestOrdinal,  // deterministic default
  kSeededUniform,  // uniform over tied candidates; requires an Rng
};

// Index of the maximum (or minimum) with the given tie rule. Exact float
// equality defines a tie. Throws std::invalid_argument when kSeededUniform is
// given without an Rng.
std::size_t ArgBest(std::span<const double> scores, bool maximize,
                    TieBreak tie_break, Rng* rng);

Arm predict_best_arm(const RewardModel& model, PlayerId player,
                     TieBreak tie_break = TieBreak::kLowestOrdinal,
                     Rng* rng = nullptr);
Arm predict_worst_arm(const RewardModel& model, PlayerId player,
                      TieBreak tie_break = TieBreak::kLowestOrdinal,
                      Rng* rng = nullptr);

}  // namespace shapbandit

#endif  // SHAPBANDIT_REWARD_MODEL_H_
