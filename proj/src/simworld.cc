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

#include "shapbandit/simworld.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "shapbandit/analysis.h"
#include "shapbandit/error.h"
#include "shapbandit/strategy.h"

namespace shapbandit {
namespace {

// Stream purposes for Rng::Derive.
enum StreamKey : std::uint64_t {
  kBaselineStream = 1,
  kStepStream = 2,
  kMotivationStream = 3,
  kMissStream = 4,
  kDecisionStream = 5,
  kForcedStream = 6,
  kJitterStream = 7,
  kCohortStream = 8,
};

void Require(bool ok, const std::string& what) {
  if (!ok) throw InvalidConfig(what);
}

}  // namespace

std::string_view ConditionLabel(Condition c) {
  switch (c) {
    case Condition::kControl:
      return "control";
    case Condition::kGreedy:
      return "greedy";
    case Condition::kShapley:
      return "shapley";
  }
  return "?";
}

Condition ConditionFromLabel(std::string_view label) {
  if (label == "control") return Condition::kControl;
  if (label == "greedy") return Condition::kGreedy;
  if (label == "shapley") return Condition::kShapley;
  throw InvalidConfig("unknown condition \"" + std::string(label) +
                      "\" (expected control, greedy or shapley)");
}

void SimPlayer::validate() const {
  Require(std::isfinite(baseline_steps) && baseline_steps > 0.0,
          "player baseline_steps must be positive");
  Require(std::isfinite(noise_sd) && noise_sd >= 0.0,
          "player noise_sd must be non-negative");
  Require(sco >= -1.0 && sco <= 1.0, "player sco must lie in [-1, 1]");
  Require(std::isfinite(effect_size) && effect_size >= 0.0,
          "player effect_size must be non-negative");
  Require(std::isfinite(adherence_intercept) && std::isfinite(adherence_slope),
          "player adherence coefficients must be finite");
}

Exposure exposure_direction(double player_steps, double artificial_steps,
                            double teammate_steps) {
  const double targets[] = {artificial_steps, teammate_steps};
  return exposure_direction(player_steps, targets);
}

Exposure exposure_direction(double player_steps,
                            std::span<const double> target_steps) {
  if (player_steps < 0.0) {
    throw std::invalid_argument("exposure_direction: negative steps");
  }
  Exposure e;
  e.directions.reserve(target_steps.size());
  for (double t : target_steps) {
    if (t < 0.0) throw std::invalid_argument("exposure_direction: negative steps");
    if (t > player_steps) {
      e.directions.push_back(Direction::kUpward);
    } else if (t < player_steps) {
      e.directions.push_back(Direction::kDownward);
    } else {
      e.directions.push_back(Direction::kLateral);
    }
  }
  return e;
}

double alignment(const SimPlayer& player, const Exposure& exposure) {
  if (exposure.directions.empty()) return 0.0;
  double sum = 0.0;
  for (Direction d : exposure.directions) {
    if (d == Direction::kUpward) sum += player.sco;
    if (d == Direction::kDownward) sum -= player.sco;
  }
  return sum / static_cast<double>(exposure.directions.size());
}

double step_response(const SimPlayer& player, const Exposure& exposure,
                     Rng& rng) {
  const double noise = rng.normal(0.0, 1.0) * player.noise_sd;
  const double steps = player.baseline_steps +
                       alignment(player, exposure) * player.effect_size + noise;
  return std::max(0.0, std::round(steps));
}

MotivationPair motivation_response_from(int pre, double alignment_value,
                                        Rng& rng) {
  MotivationPair m;
  m.pre = std::clamp(pre, 1, 5);
  m.post = m.pre;
  // The draw is always taken so stream positions do not depend on alignment.
  const bool moves = rng.uniform() < std::abs(alignment_value);
  if (moves && alignment_value != 0.0) {
    m.post = std::clamp(m.pre + (alignment_value > 0.0 ? 1 : -1), 1, 5);
  }
  return m;
}

MotivationPair motivation_response(const SimPlayer& player,
                                   const Exposure& exposure, Rng& rng,
                                   const MotivationConfig& config) {
  const double total = std::accumulate(config.pre_weights.begin(),
                                       config.pre_weights.end(), 0.0);
  double u = rng.uniform() * total;
  int pre = 5;
  for (int k = 0; k < 5; ++k) {
    if (u < config.pre_weights[k]) {
      pre = k + 1;
      break;
    }
    u -= config.pre_weights[k];
  }
  return motivation_response_from(pre, alignment(player, exposure), rng);
}

double Logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double MissProbability(const SimPlayer& player, double running_disparity) {
  return Logistic(player.adherence_intercept +
                  player.adherence_slope * running_disparity);
}

bool miss_decision(const SimPlayer& player, double running_disparity,
                   Rng& rng) {
  if (!(running_disparity >= -1.0 && running_disparity <= 1.0)) {
    throw std::invalid_argument("running disparity must lie in [-1, 1]");
  }
  return rng.uniform() < MissProbability(player, running_disparity);
}

void StudyConfig::validate() const {
  Require(baseline_days >= 0, "baseline_days must be non-negative");
  Require(total_sessions >= 1, "total_sessions must be positive");
  Require(forced_exploration_days >= 0 &&
              forced_exploration_days <= total_sessions,
          "forced_exploration_days must lie in [0, total_sessions]");
  Require(forced_exploration_days % static_cast<int>(kNumArms) == 0,
          "forced_exploration_days must divide evenly among the 3 arms");
  Require(epsilon >= 0.0 && epsilon <= 1.0, "epsilon must lie in [0, 1]");
  Require(!players.empty(), "study needs at least one player");
  Require(team_size >= 2, "team_size must be at least 2");
  Require(team_size <= 16, "team_size must be at most 16");
  Require(players.size() % team_size == 0,
          "player count must be a multiple of team_size");
  Require(reward.step_scale > 0.0, "reward step_scale must be positive");
  Require(std::isfinite(reward.motivation_weight),
          "reward motivation_weight must be finite");
  Require(placement.above_factor >= 0.0 && placement.below_factor >= 0.0 &&
              placement.jitter >= 0.0 && placement.jitter < 1.0,
          "placement factors must be non-negative and jitter below 1");
  double weight_total = 0.0;
  for (double w : motivation.pre_weights) {
    Require(w >= 0.0, "motivation weights must be non-negative");
    weight_total += w;
  }
  Require(weight_total > 0.0, "motivation weights must not all be zero");
  for (const SimPlayer& p : players) p.validate();
}

namespace {

template <typename T>
void ReadKey(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("config key \"") + key + "\": " + e.what());
  }
}

void RejectUnknown(const nlohmann::json& j,
                   std::initializer_list<const char*> known,
                   const std::string& where) {
  if (!j.is_object()) throw InvalidConfig(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw InvalidConfig("unknown key \"" + key + "\" in " + where);
  }
}

}  // namespace

SimPlayer SimPlayerFromJson(const nlohmann::json& j, const SimPlayer& base) {
  RejectUnknown(j,
                {"baseline_steps", "noise_sd", "sco", "effect_size",
                 "adherence_intercept", "adherence_slope"},
                "player");
  SimPlayer p = base;
  ReadKey(j, "baseline_steps", p.baseline_steps);
  ReadKey(j, "noise_sd", p.noise_sd);
  ReadKey(j, "sco", p.sco);
  ReadKey(j, "effect_size", p.effect_size);
  ReadKey(j, "adherence_intercept", p.adherence_intercept);
  ReadKey(j, "adherence_slope", p.adherence_slope);
  return p;
}

nlohmann::ordered_json SimPlayerToJson(const SimPlayer& p) {
  return {{"baseline_steps", p.baseline_steps},
          {"noise_sd", p.noise_sd},
          {"sco", p.sco},
          {"effect_size", p.effect_size},
          {"adherence_intercept", p.adherence_intercept},
          {"adherence_slope", p.adherence_slope}};
}

StudyConfig StudyConfigFromJson(const nlohmann::json& j,
                                const StudyConfig& base) {
  RejectUnknown(j,
                {"condition", "baseline_days", "forced_exploration_days",
                 "total_sessions", "epsilon", "seed", "players", "team_size",
                 "reward", "placement", "jitter", "tie_break",
                 "motivation_pre_weights"},
                "study config");
  StudyConfig c = base;
  if (j.contains("condition")) {
    if (!j["condition"].is_string()) throw InvalidConfig("condition must be a string");
    c.condition = ConditionFromLabel(j["condition"].get<std::string>());
  }
  ReadKey(j, "baseline_days", c.baseline_days);
  ReadKey(j, "forced_exploration_days", c.forced_exploration_days);
  ReadKey(j, "total_sessions", c.total_sessions);
  ReadKey(j, "epsilon", c.epsilon);
  ReadKey(j, "seed", c.seed);
  ReadKey(j, "team_size", c.team_size);
  ReadKey(j, "jitter", c.jitter);
  if (j.contains("players")) {
    if (!j["players"].is_array()) throw InvalidConfig("players must be an array");
    c.players.clear();
    for (const auto& p : j["players"]) c.players.push_back(SimPlayerFromJson(p));
  }
  if (j.contains("reward")) {
    RejectUnknown(j["reward"], {"step_scale", "motivation_weight"}, "reward");
    ReadKey(j["reward"], "step_scale", c.reward.step_scale);
    ReadKey(j["reward"], "motivation_weight", c.reward.motivation_weight);
  }
  if (j.contains("placement")) {
    RejectUnknown(j["placement"],
                  {"above_factor", "below_factor", "jitter_amplitude"},
                  "placement");
    ReadKey(j["placement"], "above_factor", c.placement.above_factor);
    ReadKey(j["placement"], "below_factor", c.placement.below_factor);
    ReadKey(j["placement"], "jitter_amplitude", c.placement.jitter);
  }
  if (j.contains("tie_break")) {
    const auto t = j["tie_break"].get<std::string>();
    if (t == "lowest") {
      c.tie_break = TieBreak::kLowestOrdinal;
    } else if (t == "uniform") {
      c.tie_break = TieBreak::kSeededUniform;
    } else {
      throw InvalidConfig("tie_break must be \"lowest\" or \"uniform\"");
    }
  }
  if (j.contains("motivation_pre_weights")) {
    std::vector<double> w;
    ReadKey(j, "motivation_pre_weights", w);
    if (w.size() != 5) {
      throw InvalidConfig("motivation_pre_weights needs 5 entries");
    }
    std::copy(w.begin(), w.end(), c.motivation.pre_weights.begin());
  }
  return c;
}

nlohmann::ordered_json StudyConfigToJson(const StudyConfig& c) {
  nlohmann::ordered_json j;
  j["condition"] = ConditionLabel(c.condition);
  j["baseline_days"] = c.baseline_days;
  j["forced_exploration_days"] = c.forced_exploration_days;
  j["total_sessions"] = c.total_sessions;
  j["epsilon"] = c.epsilon;
  j["seed"] = c.seed;
  j["team_size"] = c.team_size;
  j["reward"] = {{"step_scale", c.reward.step_scale},
                 {"motivation_weight", c.reward.motivation_weight}};
  j["placement"] = {{"above_factor", c.placement.above_factor},
                    {"below_factor", c.placement.below_factor},
                    {"jitter_amplitude", c.placement.jitter}};
  j["jitter"] = c.jitter;
  j["tie_break"] =
      c.tie_break == TieBreak::kLowestOrdinal ? "lowest" : "uniform";
  j["motivation_pre_weights"] = c.motivation.pre_weights;
  auto players = nlohmann::ordered_json::array();
  for (const auto& p : c.players) players.push_back(SimPlayerToJson(p));
  j["players"] = players;
  return j;
}

std::vector<SimPlayer> MaterializeCohort(const CohortTemplate& cohort,
                                         std::uint64_t seed) {
  Rng rng = Rng::Stream(seed, {kCohortStream});
  std::vector<SimPlayer> out;
  out.reserve(cohort.team.size() * cohort.teams);
  for (std::size_t t = 0; t < cohort.teams; ++t) {
    for (const SimPlayer& base : cohort.team) {
      SimPlayer p = base;
      // Four draws per player, always taken in this order.
      const double b = rng.uniform(-1.0, 1.0);
      const double e = rng.uniform(-1.0, 1.0);
      const double s = rng.uniform(-1.0, 1.0);
      const double i = rng.uniform(-1.0, 1.0);
      p.baseline_steps *= 1.0 + cohort.baseline_spread * b;
      p.effect_size *= 1.0 + cohort.effect_spread * e;
      p.sco = std::clamp(p.sco + cohort.sco_spread * s, -1.0, 1.0);
      p.adherence_intercept += cohort.intercept_spread * i;
      out.push_back(p);
    }
  }
  return out;
}

CohortTemplate CohortTemplateFromJson(const nlohmann::json& j) {
  RejectUnknown(j,
                {"team", "teams", "baseline_spread", "effect_spread",
                 "sco_spread", "intercept_spread"},
                "cohort");
  CohortTemplate c;
  if (!j.contains("team") || !j["team"].is_array() || j["team"].empty()) {
    throw InvalidConfig("cohort.team must be a non-empty array of players");
  }
  for (const auto& p : j["team"]) c.team.push_back(SimPlayerFromJson(p));
  ReadKey(j, "teams", c.teams);
  ReadKey(j, "baseline_spread", c.baseline_spread);
  ReadKey(j, "effect_spread", c.effect_spread);
  ReadKey(j, "sco_spread", c.sco_spread);
  ReadKey(j, "intercept_spread", c.intercept_spread);
  Require(c.teams >= 1, "cohort.teams must be positive");
  Require(c.baseline_spread >= 0.0 && c.baseline_spread < 1.0 &&
              c.effect_spread >= 0.0 && c.effect_spread <= 1.0 &&
              c.sco_spread >= 0.0 && c.intercept_spread >= 0.0,
          "cohort spreads out of range");
  return c;
}

nlohmann::ordered_json CohortTemplateToJson(const CohortTemplate& c) {
  nlohmann::ordered_json j;
  auto team = nlohmann::ordered_json::array();
  for (const auto& p : c.team) team.push_back(SimPlayerToJson(p));
  j["team"] = team;
  j["teams"] = c.teams;
  j["baseline_spread"] = c.baseline_spread;
  j["effect_spread"] = c.effect_spread;
  j["sco_spread"] = c.sco_spread;
  j["intercept_spread"] = c.intercept_spread;
  return j;
}

namespace {

struct PlayerTrack {
  double baseline_mean = 0.0;
  double shown_steps = 0.0;  // last observed steps, shown to teammates
  // Strategy-phase history used by the running disparity.
  double effort_sum = 0.0;
  std::size_t effort_days = 0;
  std::int64_t net_treatment = 0;
};

struct Team {
  std::vector<std::size_t> members;  // cohort-wide indices
  RewardModel model;
  ShapleyBanditState state;
  std::vector<Arm> forced;
  Rng decision_rng;
  Rng jitter_rng;
};

// PR(effort-to-date) - PR(treatment-to-date) across the cohort; zero until a
// strategy decision has been observed.
std::vector<double> RunningDisparity(const std::vector<PlayerTrack>& tracks,
                                     bool any_strategy_day) {
  std::vector<double> out(tracks.size(), 0.0);
  if (!any_strategy_day || tracks.size() < 2) return out;
  std::vector<double> e(tracks.size()), t(tracks.size());
  for (std::size_t p = 0; p < tracks.size(); ++p) {
    const auto& tr = tracks[p];
    e[p] = tr.effort_days > 0 ? tr.effort_sum / static_cast<double>(tr.effort_days)
                              : tr.baseline_mean;
    t[p] = static_cast<double>(tr.net_treatment);
  }
  const auto pe = percentile_rank(e);
  const auto pt = percentile_rank(t);
  for (std::size_t p = 0; p < tracks.size(); ++p) {
    out[p] = std::clamp(pe[p] - pt[p], -1.0, 1.0);
  }
  return out;
}

}  // namespace

StudyLog run_study(const StudyConfig& config) {
  config.validate();
  const std::size_t n = config.players.size();
  const std::size_t k = config.team_size;
  const std::string label(ConditionLabel(config.condition));

  std::vector<Rng> step_rng, motivation_rng, miss_rng;
  std::vector<PlayerTrack> tracks(n);
  for (std::size_t p = 0; p < n; ++p) {
    step_rng.push_back(Rng::Stream(config.seed, {kStepStream, p}));
    motivation_rng.push_back(Rng::Stream(config.seed, {kMotivationStream, p}));
    miss_rng.push_back(Rng::Stream(config.seed, {kMissStream, p}));

    const SimPlayer& sp = config.players[p];
    Rng baseline = Rng::Stream(config.seed, {kBaselineStream, p});
    double sum = 0.0;
    double last = sp.baseline_steps;
    for (int d = 0; d < config.baseline_days; ++d) {
      last = std::max(0.0, std::round(sp.baseline_steps +
                                      baseline.normal(0.0, 1.0) * sp.noise_sd));
      sum += last;
    }
    tracks[p].baseline_mean = config.baseline_days > 0
                                  ? sum / config.baseline_days
                                  : sp.baseline_steps;
    tracks[p].shown_steps = last;
  }

  std::vector<Team> teams;
  for (std::size_t t = 0; t * k < n; ++t) {
    Team team{{},
              RewardModel(k, config.reward),
              ShapleyBanditState(k, config.epsilon),
              {},
              Rng::Stream(config.seed, {kDecisionStream, t}),
              Rng::Stream(config.seed, {kJitterStream, t})};
    for (std::size_t j = 0; j < k; ++j) team.members.push_back(t * k + j);
    const int per_arm = config.forced_exploration_days / static_cast<int>(kNumArms);
    for (Arm a : kAllArms) team.forced.insert(team.forced.end(), per_arm, a);
    Rng forced_rng = Rng::Stream(config.seed, {kForcedStream, t});
    forced_rng.shuffle(std::span<Arm>(team.forced));
    teams.push_back(std::move(team));
  }

  StudyLog log;
  log.condition = label;
  log.total_sessions = config.total_sessions;
  std::vector<std::vector<SessionRow>> rows(n);
  const Coalition local_players = Coalition::FirstN(k);

  for (int day = 1; day <= config.total_sessions; ++day) {
    const bool forced_day = day <= config.forced_exploration_days;
    const auto disparity =
        RunningDisparity(tracks, day - 1 > config.forced_exploration_days);

    for (std::size_t t = 0; t < teams.size(); ++t) {
      Team& team = teams[t];

      std::vector<Arm> best(k), worst(k);
      for (std::size_t j = 0; j < k; ++j) {
        best[j] = predict_best_arm(team.model, PlayerId(j));
        worst[j] = predict_worst_arm(team.model, PlayerId(j));
      }

      Decision decision;
      if (forced_day) {
        decision.arm = team.forced[static_cast<std::size_t>(day - 1)];
        decision.mode = DecisionMode::kForced;
      } else {
        switch (config.condition) {
          case Condition::kControl:
            decision = random_select(team.decision_rng);
            break;
          case Condition::kGreedy:
            decision = greedy_select(team.model, local_players,
                                     config.tie_break, &team.decision_rng);
            break;
          case Condition::kShapley:
            // A team that missed every session so far has no contribution
            // to balance against; keep exploring until one is observed.
            if (team.state.total_csv() == 0.0) {
              decision = random_select(team.decision_rng);
            } else {
              decision = shapley_select(team.state, team.model, local_players,
                                        team.decision_rng, config.tie_break);
            }
            break;
        }
      }

      std::vector<double> shown(k);
      for (std::size_t j = 0; j < k; ++j) {
        shown[j] = tracks[team.members[j]].shown_steps;
      }
      const double artificial = place_artificial_steps(
          decision.arm, shown, config.jitter ? &team.jitter_rng : nullptr,
          config.placement);

      std::vector<std::optional<double>> observed(k);
      std::vector<std::optional<double>> rewards(k);
      std::vector<MotivationPair> motivation(k);
      std::vector<bool> missed(k);
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t p = team.members[j];
        const SimPlayer& sp = config.players[p];
        std::vector<double> targets = {artificial};
        for (std::size_t o = 0; o < k; ++o) {
          if (o != j) targets.push_back(shown[o]);
        }
        const Exposure exposure = exposure_direction(shown[j], targets);
        missed[j] = miss_decision(sp, disparity[p], miss_rng[p]);
        // Responses are drawn on missed days too, keeping streams aligned.
        const double steps = step_response(sp, exposure, step_rng[p]);
        motivation[j] = motivation_response(sp, exposure, motivation_rng[p],
                                            config.motivation);
        if (missed[j]) continue;
        observed[j] = steps;
        const Reward reward{steps - tracks[p].baseline_mean,
                            static_cast<double>(motivation[j].post -
                                                motivation[j].pre)};
        rewards[j] = reward.combined(config.reward);
        team.model.observe(PlayerId(j), decision.arm, reward);
      }

      if (config.condition == Condition::kShapley) {
        shapley_update(team.state, decision, observed);
      } else {
        // Non-Shapley conditions track the same quantities for comparison;
        // a non-forced pull counts as treatment for every player whose
        // predicted-best arm it matches.
        Decision shadow = decision;
        shadow.mode = DecisionMode::kExplore;
        shadow.catered_player.reset();
        shapley_update(team.state, shadow, observed);
        if (!forced_day) {
          for (std::size_t j = 0; j < k; ++j) {
            if (best[j] == decision.arm) team.state.add_treatment(PlayerId(j));
          }
        }
      }

      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t p = team.members[j];
        PlayerTrack& tr = tracks[p];
        if (observed[j]) tr.shown_steps = *observed[j];
        if (!forced_day) {
          if (observed[j]) {
            tr.effort_sum += *observed[j];
            ++tr.effort_days;
          }
          if (decision.arm == best[j]) ++tr.net_treatment;
          if (decision.arm == worst[j]) --tr.net_treatment;
        }

        SessionRow r;
        r.condition = label;
        r.team = t;
        r.player = p;
        r.day = day;
        r.missed = missed[j];
        r.steps = observed[j];
        r.baseline_steps = tr.baseline_mean;
        if (!missed[j]) {
          r.pre_motivation = motivation[j].pre;
          r.post_motivation = motivation[j].post;
        }
        r.arm = decision.arm;
        r.mode = decision.mode;
        if (decision.catered_player) {
          r.catered_player = team.members[decision.catered_player->index()];
        }
        r.artificial_steps = artificial;
        r.best_arm = best[j];
        r.worst_arm = worst[j];
        r.csv = team.state.csv()[j];
        r.tc = team.state.tc()[j];
        r.running_disparity = disparity[p];
        rows[p].push_back(std::move(r));
      }

      DecisionRecord rec;
      rec.day = day;
      rec.team = t;
      rec.decision = decision;
      if (decision.catered_player) {
        rec.decision.catered_player =
            PlayerId(team.members[decision.catered_player->index()]);
      }
      rec.csv = team.state.csv();
      rec.tc = team.state.tc();
      rec.reward = rewards;
      log.decisions.push_back(std::move(rec));
    }
  }

  for (auto& player_rows : rows) {
    for (auto& r : player_rows) log.rows.push_back(std::move(r));
  }
  for (const Team& team : teams) {
    log.final_states.push_back(
        TeamState{team.members, team.state.csv(), team.state.tc()});
  }
  return log;
}

}  // namespace shapbandit
