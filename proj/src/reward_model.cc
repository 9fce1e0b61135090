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

#include "shapbandit/reward_model.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace shapbandit {

RewardModel::RewardModel(std::size_t players, RewardConfig config)
    : config_(config), cells_(players) {
  if (!(config_.step_scale > 0.0)) {
    throw std::invalid_argument("reward step_scale must be positive");
  }
}

void RewardModel::check_player(PlayerId player) const {
  if (player.index() >= cells_.size()) {
    throw std::invalid_argument("reward model has no player " +
                                std::to_string(player.index()));
  }
}

void RewardModel::observe(PlayerId player, Arm arm, const Reward& reward) {
  observe_scalar(player, arm, reward.combined(config_));
}

void RewardModel::observe_scalar(PlayerId player, Arm arm, double reward) {
  check_player(player);
  if (!std::isfinite(reward)) {
    throw std::invalid_argument("reward must be finite");
  }
  ArmStats& cell = cells_[player.index()][Ordinal(arm)];
  ++cell.count;
  cell.sum += reward;
}

const ArmStats& RewardModel::stats(PlayerId player, Arm arm) const {
  check_player(player);
  return cells_[player.index()][Ordinal(arm)];
}

std::array<double, kNumArms> RewardModel::means(PlayerId player) const {
  std::array<double, kNumArms> out{};
  for (Arm arm : kAllArms) out[Ordinal(arm)] = mean(player, arm);
  return out;
}

std::size_t ArgBest(std::span<const double> scores, bool maximize,
                    TieBreak tie_break, Rng* rng) {
  if (scores.empty()) throw std::invalid_argument("ArgBest: no candidates");
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (maximize ? scores[k] > scores[best] : scores[k] < scores[best]) {
      best = k;
    }
  }
  if (tie_break == TieBreak::kLowestOrdinal) return best;
  if (rng == nullptr) {
    throw std::invalid_argument("seeded-uniform tie-break needs an Rng");
  }
  std::vector<std::size_t> tied;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (scores[k] == scores[best]) tied.push_back(k);
  }
  return tied[rng->uniform_int(tied.size())];
}

Arm predict_best_arm(const RewardModel& model, PlayerId player,
                     TieBreak tie_break, Rng* rng) {
  const auto m = model.means(player);
  return ArmFromOrdinal(ArgBest(m, true, tie_break, rng));
}

Arm predict_worst_arm(const RewardModel& model, PlayerId player,
                      TieBreak tie_break, Rng* rng) {
  const auto m = model.means(player);
  return ArmFromOrdinal(ArgBest(m, false, tie_break, rng));
}

}  // namespace shapbandit
