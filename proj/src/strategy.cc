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

#include "shapbandit/strategy.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "shapbandit/error.h"
#include "shapbandit/shapley.h"

namespace shapbandit {
namespace {

// Disparity sums closer than this are treated as tied.
constexpr double kSumTieTolerance = 1e-12;

}  // namespace

std::string_view ModeLabel(DecisionMode mode) {
  switch (mode) {
    case DecisionMode::kExplore:
      return "explore";
    case DecisionMode::kExploit:
      return "exploit";
    case DecisionMode::kForced:
      return "forced";
  }
  return "?";
}

DecisionMode ModeFromLabel(std::string_view label) {
  if (label == "explore") return DecisionMode::kExplore;
  if (label == "exploit") return DecisionMode::kExploit;
  if (label == "forced") return DecisionMode::kForced;
  throw std::invalid_argument("unknown decision mode \"" + std::string(label) +
                              "\"");
}

ShapleyBanditState::ShapleyBanditState(std::size_t players, double epsilon)
    : ShapleyBanditState(std::vector<double>(players, 0.0),
                         std::vector<std::int64_t>(players, 0), epsilon) {}

ShapleyBanditState::ShapleyBanditState(std::vector<double> csv,
                                       std::vector<std::int64_t> tc,
                                       double epsilon)
    : csv_(std::move(csv)), tc_(std::move(tc)), epsilon_(epsilon) {
  if (csv_.size() != tc_.size()) {
    throw std::invalid_argument("csv and tc must have one entry per player");
  }
  if (csv_.empty()) throw std::invalid_argument("state needs players");
  if (!(epsilon_ >= 0.0 && epsilon_ <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  }
  for (double c : csv_) {
    if (!std::isfinite(c)) throw std::invalid_argument("csv must be finite");
  }
  for (std::int64_t t : tc_) {
    if (t < 0) throw std::invalid_argument("tc must be non-negative");
  }
}

void ShapleyBanditState::check_player(PlayerId player) const {
  if (player.index() >= csv_.size()) {
    throw std::invalid_argument("state has no player " +
                                std::to_string(player.index()));
  }
}

double ShapleyBanditState::total_csv() const {
  return std::accumulate(csv_.begin(), csv_.end(), 0.0);
}

std::int64_t ShapleyBanditState::total_tc() const {
  return std::accumulate(tc_.begin(), tc_.end(), std::int64_t{0});
}

double ShapleyBanditState::csv_ratio(PlayerId player) const {
  check_player(player);
  const double total = total_csv();
  if (total == 0.0) {
    throw ZeroTotalCsv("CSV ratio undefined: total cumulative Shapley value "
                       "is zero");
  }
  return csv_[player.index()] / total;
}

double ShapleyBanditState::tc_ratio(PlayerId player) const {
  check_player(player);
  const std::int64_t total = total_tc();
  if (total == 0) return 1.0 / static_cast<double>(tc_.size());
  return static_cast<double>(tc_[player.index()]) / static_cast<double>(total);
}

double ShapleyBanditState::disparity_sum_with(
    std::span<const std::int64_t> tc) const {
  const double csv_total = total_csv();
  if (csv_total == 0.0) {
    throw ZeroTotalCsv("Shapley disparity undefined: total cumulative "
                       "Shapley value is zero");
  }
  const std::int64_t tc_total =
      std::accumulate(tc.begin(), tc.end(), std::int64_t{0});
  const double n = static_cast<double>(tc.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < tc.size(); ++j) {
    const double tcr = tc_total == 0 ? 1.0 / n
                                     : static_cast<double>(tc[j]) /
                                           static_cast<double>(tc_total);
    sum += std::abs(csv_[j] / csv_total - tcr);
  }
  return sum;
}

double ShapleyBanditState::disparity_sum() const {
  return disparity_sum_with(tc_);
}

double ShapleyBanditState::hypothetical_disparity_sum(PlayerId player) const {
  check_player(player);
  std::vector<std::int64_t> tc = tc_;
  ++tc[player.index()];
  return disparity_sum_with(tc);
}

void ShapleyBanditState::add_csv(PlayerId player, double value) {
  check_player(player);
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite CSV");
  csv_[player.index()] += value;
}

void ShapleyBanditState::add_treatment(PlayerId player) {
  check_player(player);
  ++tc_[player.index()];
}

double shapley_disparity(const ShapleyBanditState& state, PlayerId player) {
  return std::abs(state.csv_ratio(player) - state.tc_ratio(player));
}

Decision greedy_select(const RewardModel& model, const Coalition& players,
                       TieBreak tie_break, Rng* rng) {
  if (players.empty()) throw std::invalid_argument("greedy_select: no players");
  std::array<double, kNumArms> totals{};
  for (PlayerId p : players.members()) {
    const auto m = model.means(p);
    for (std::size_t a = 0; a < kNumArms; ++a) totals[a] += m[a];
  }
  Decision d;
  d.arm = ArmFromOrdinal(ArgBest(totals, true, tie_break, rng));
  d.mode = DecisionMode::kExploit;
  return d;
}

Decision shapley_select(const ShapleyBanditState& state,
                        const RewardModel& model, const Coalition& players,
                        Rng& rng, TieBreak tie_break) {
  if (players.empty()) {
    throw std::invalid_argument("shapley_select: no players");
  }
  if (state.total_csv() == 0.0) {
    throw ZeroTotalCsv("shapley_select: no contribution observed yet; use "
                       "forced exploration first");
  }
  if (rng.uniform() < state.epsilon()) {
    Decision d = random_select(rng);
    return d;
  }

  const auto candidates = players.members();
  std::vector<double> sums;
  sums.reserve(candidates.size());
  for (PlayerId p : candidates) {
    sums.push_back(state.hypothetical_disparity_sum(p));
  }
  double lowest = sums[0];
  for (double s : sums) lowest = std::min(lowest, s);
  std::vector<PlayerId> tied;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (sums[k] - lowest <= kSumTieTolerance) tied.push_back(candidates[k]);
  }
  PlayerId chosen = tied.front();
  if (tie_break == TieBreak::kSeededUniform && tied.size() > 1) {
    chosen = tied[rng.uniform_int(tied.size())];
  }

  Decision d;
  d.arm = predict_best_arm(model, chosen, tie_break, &rng);
  d.catered_player = chosen;
  d.mode = DecisionMode::kExploit;
  return d;
}

Decision random_select(Rng& rng) {
  Decision d;
  d.arm = ArmFromOrdinal(rng.uniform_int(kNumArms));
  d.mode = DecisionMode::kExplore;
  return d;
}

CharacteristicFunctionBuilder AdditiveStepsBuilder() {
  return [](std::span<const double> steps) {
    return CharacteristicFunction::AdditiveSteps(
        std::vector<double>(steps.begin(), steps.end()));
  };
}

void shapley_update(ShapleyBanditState& state, const Decision& decision,
                    std::span<const std::optional<double>> step_rewards,
                    const CharacteristicFunctionBuilder& v_builder) {
  if (step_rewards.size() != state.num_players()) {
    throw std::invalid_argument("shapley_update: one step entry per player");
  }
  std::vector<double> steps(step_rewards.size(), 0.0);
  std::vector<PlayerId> observed;
  for (std::size_t j = 0; j < step_rewards.size(); ++j) {
    if (!step_rewards[j]) continue;
    const double s = *step_rewards[j];
    if (!std::isfinite(s) || s < 0.0) {
      throw std::invalid_argument("shapley_update: steps must be finite and "
                                  "non-negative");
    }
    steps[j] = s;
    observed.emplace_back(j);
  }
  if (!observed.empty()) {
    const CharacteristicFunction v = v_builder(steps);
    const Coalition round(observed);
    const ShapleyAttribution phi = shapley_all(v, round);
    for (std::size_t k = 0; k < phi.players.size(); ++k) {
      state.add_csv(phi.players[k], phi.values[k]);
    }
  }
  if (decision.mode == DecisionMode::kExploit) {
    if (!decision.catered_player) {
      throw std::invalid_argument("exploit decision without a catered player");
    }
    state.add_treatment(*decision.catered_player);
  }
}

std::string ToJsonLine(const DecisionRecord& record) {
  nlohmann::ordered_json j;
  j["day"] = record.day;
  if (record.team) j["team"] = *record.team;
  j["mode"] = ModeLabel(record.decision.mode);
  j["arm"] = ArmLabel(record.decision.arm);
  if (record.decision.catered_player) {
    j["catered_player"] = record.decision.catered_player->index();
  } else {
    j["catered_player"] = nullptr;
  }
  j["csv"] = record.csv;
  j["tc"] = record.tc;
  auto rewards = nlohmann::ordered_json::array();
  for (const auto& r : record.reward) {
    if (r) {
      rewards.push_back(*r);
    } else {
      rewards.push_back(nullptr);
    }
  }
  j["reward"] = rewards;
  return j.dump();
}

DecisionRecord DecisionRecordFromJson(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
    DecisionRecord r;
    r.day = j.at("day").get<int>();
    if (j.contains("team")) r.team = j["team"].get<std::size_t>();
    r.decision.mode = ModeFromLabel(j.at("mode").get<std::string>());
    r.decision.arm = ArmFromLabel(j.at("arm").get<std::string>());
    if (!j.at("catered_player").is_null()) {
      r.decision.catered_player = PlayerId(j["catered_player"].get<std::size_t>());
    }
    r.csv = j.at("csv").get<std::vector<double>>();
    r.tc = j.at("tc").get<std::vector<std::int64_t>>();
    for (const auto& x : j.at("reward")) {
      if (x.is_null()) {
        r.reward.emplace_back(std::nullopt);
      } else {
        r.reward.emplace_back(x.get<double>());
      }
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("decision record: ") + e.what(), 0, 0);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("decision record: ") + e.what(), 0, 0);
  }
}

}  // namespace shapbandit
