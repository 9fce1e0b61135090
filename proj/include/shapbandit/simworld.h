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

// Seeded agent-based simulation of the multi-session social-comparison
// study.
//
// Protocol: `baseline_days` unexposed days establish each player's baseline
// mean, then `total_sessions` sessions follow. The first
// `forced_exploration_days` sessions pull every arm equally often in a
// shuffled order; the rest use the configured strategy. Each session the
// artificial teammate's steps are placed from the previous day's shown human
// steps, every player compares their own shown steps with the artificial
// teammate and the other humans, and then either misses the session or walks
// and reports motivation.
//
// Players are grouped into consecutive teams of `team_size`. Each team owns
// its reward model and Shapley state; the cohort (all teams) is the
// reference population for the running disparity that drives misses.
//
// Random streams are derived per purpose and player (see Rng::Derive), so
// the step, motivation and miss draws of a player do not depend on the
// strategy under test.

#ifndef SHAPBANDIT_SIMWORLD_H_
#define SHAPBANDIT_SIMWORLD_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "shapbandit/arm.h"
#include "shapbandit/reward_model.h"
#include "shapbandit/rng.h"
#include "shapbandit/study_log.h"

namespace shapbandit {

enum class Condition { kControl, kGreedy, kShapley };

std::string_view ConditionLabel(Condition c);
// "control", "greedy" or "shapley".
Condition ConditionFromLabel(std::string_view label);

enum class Direction { kUpward, kDownward, kLateral };

struct SimPlayer {
  double baseline_steps = 8000.0;  // steps/day, > 0
  double noise_sd = 0.0;           // steps, >= 0
  double sco = 0.0;                // +1 upward responder, -1 downward
  double effect_size = 0.0;        // max expected boost in steps, >= 0
  double adherence_intercept = -1.1;  // log-odds of missing
  double adherence_slope = 0.0;       // log-odds per unit disparity

  // Throws InvalidConfig.
  void validate() const;
};

// One direction per comparison target.
struct Exposure {
  std::vector<Direction> directions;
};

// Direction of each target relative to the player: more steps is upward,
// fewer is downward, equal is lateral. Throws std::invalid_argument on
// negative steps.
Exposure exposure_direction(double player_steps, double artificial_steps,
                            double teammate_steps);
Exposure exposure_direction(double player_steps,
                            std::span<const double> target_steps);

// Mean over targets of +sco (upward), -sco (downward) or 0 (lateral).
double alignment(const SimPlayer& player, const Exposure& exposure);

// max(0, baseline + alignment * effect + N(0, noise_sd)), rounded to whole
// steps.
double step_response(const SimPlayer& player, const Exposure& exposure,
                     Rng& rng);

struct MotivationConfig {
  // P(pre = 1..5).
  std::array<double, 5> pre_weights = {0.05, 0.20, 0.45, 0.25, 0.05};
};

struct MotivationPair {
  int pre = 3;
  int post = 3;
};

// Draws pre from the base distribution, then moves post one point in the
// direction of the alignment with probability |alignment|, clamped to 1..5.
MotivationPair motivation_response(const SimPlayer& player,
                                   const Exposure& exposure, Rng& rng,
                                   const MotivationConfig& config = {});
// Same, with a supplied pre score.
MotivationPair motivation_response_from(int pre, double alignment_value,
                                        Rng& rng);

double Logistic(double x);
double MissProbability(const SimPlayer& player, double running_disparity);
// Throws std::invalid_argument if running_disparity is outside [-1, 1].
bool miss_decision(const SimPlayer& player, double running_disparity,
                   Rng& rng);

struct StudyConfig {
  Condition condition = Condition::kShapley;
  int baseline_days = 3;
  int forced_exploration_days = 9;
  int total_sessions = 21;
  double epsilon = 0.01;
  std::uint64_t seed = 1;
  std::vector<SimPlayer> players;
  std::size_t team_size = 2;
  RewardConfig reward;
  PlacementOptions placement;
  bool jitter = false;
  TieBreak tie_break = TieBreak::kLowestOrdinal;
  MotivationConfig motivation;

  // Throws InvalidConfig.
  void validate() const;
};

// Reads every StudyConfig key present in `j`, keeping `base` for the rest.
// Unknown keys are rejected. Throws InvalidConfig.
StudyConfig StudyConfigFromJson(const nlohmann::json& j,
                                const StudyConfig& base = {});
nlohmann::ordered_json StudyConfigToJson(const StudyConfig& config);
SimPlayer SimPlayerFromJson(const nlohmann::json& j,
                            const SimPlayer& base = {});
nlohmann::ordered_json SimPlayerToJson(const SimPlayer& p);

// A team template repeated `teams` times, each copy perturbed by uniform
// relative spreads drawn from a seeded stream.
struct CohortTemplate {
  std::vector<SimPlayer> team;
  std::size_t teams = 1;
  double baseline_spread = 0.0;   // baseline *= U[1 - s, 1 + s]
  double effect_spread = 0.0;     // effect_size *= U[1 - s, 1 + s]
  double sco_spread = 0.0;        // sco += U[-s, s], clamped to [-1, 1]
  double intercept_spread = 0.0;  // intercept += U[-s, s]
};

std::vector<SimPlayer> MaterializeCohort(const CohortTemplate& cohort,
                                         std::uint64_t seed);
CohortTemplate CohortTemplateFromJson(const nlohmann::json& j);
nlohmann::ordered_json CohortTemplateToJson(const CohortTemplate& c);

// Throws InvalidConfig for an invalid config.
StudyLog run_study(const StudyConfig& config);

}  // namespace shapbandit

#endif  // SHAPBANDIT_SIMWORLD_H_
