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

#include "shapbandit/experiment.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "shapbandit/error.h"
#include "shapbandit/strategy.h"

#ifndef SHAPBANDIT_VERSION
#define SHAPBANDIT_VERSION "dev"
#endif

#ifndef SHAPBANDIT_SCENARIO_DIR
#define SHAPBANDIT_SCENARIO_DIR "scenarios"
#endif

namespace shapbandit {
namespace fs = std::filesystem;

namespace {

std::optional<double> Median(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

bool ValidName(const std::string& name) {
  if (name.empty() || name == "." || name == "..") return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
           c == '_' || c == '.';
  });
}

void WriteFile(const fs::path& path, const std::string& contents) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T>
void ReadKey(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("spec key \"") + key + "\": " + e.what());
  }
}

std::string RepDir(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "rep_%04zu", k);
  return buf;
}

}  // namespace

std::string Fnv1aHex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

fs::path BundledScenarioDir() { return SHAPBANDIT_SCENARIO_DIR; }

void ExperimentSpec::validate() const {
  if (replications < 1) throw InvalidConfig("replications must be at least 1");
  if (conditions.empty()) throw InvalidConfig("spec needs at least one condition");
  std::set<std::string> names;
  for (const ConditionSpec& c : conditions) {
    if (!ValidName(c.name)) {
      throw InvalidConfig("condition name \"" + c.name +
                          "\" must be non-empty [A-Za-z0-9._-]");
    }
    if (!names.insert(c.name).second) {
      throw InvalidConfig("duplicate condition name \"" + c.name + "\"");
    }
    StudyConfig probe = c.study;
    if (cohort) probe.players = MaterializeCohort(*cohort, base_seed);
    probe.validate();
  }
  if (analysis.intervention_start_day < 1) {
    throw InvalidConfig("analysis.intervention_start_day must be positive");
  }
}

ExperimentSpec ExperimentSpecFromJson(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(e.what(), 0, 0);
  }
  if (!j.is_object()) throw InvalidConfig("spec must be a JSON object");
  static const std::set<std::string> known = {
      "scenario", "replications", "base_seed", "output_dir", "study",
      "cohort",   "conditions",   "analysis",  "description"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw InvalidConfig("unknown spec key \"" + key + "\"");
  }

  ExperimentSpec spec;
  ReadKey(j, "scenario", spec.scenario);
  if (j.contains("replications")) {
    if (!j["replications"].is_number_integer() ||
        j["replications"].get<long long>() < 0) {
      throw InvalidConfig("replications must be a non-negative integer");
    }
    spec.replications = j["replications"].get<std::size_t>();
  }
  ReadKey(j, "base_seed", spec.base_seed);
  if (j.contains("output_dir")) {
    spec.output_dir = j["output_dir"].get<std::string>();
  }
  const StudyConfig base =
      j.contains("study") ? StudyConfigFromJson(j["study"]) : StudyConfig{};
  if (j.contains("cohort")) spec.cohort = CohortTemplateFromJson(j["cohort"]);
  if (j.contains("analysis")) {
    ReadKey(j["analysis"], "intervention_start_day",
            spec.analysis.intervention_start_day);
  } else {
    spec.analysis.intervention_start_day = base.forced_exploration_days + 1;
  }
  if (!j.contains("conditions") || !j["conditions"].is_array()) {
    throw InvalidConfig("spec needs a \"conditions\" array");
  }
  for (const auto& c : j["conditions"]) {
    ConditionSpec cs;
    if (c.is_string()) {
      cs.name = c.get<std::string>();
      cs.study = base;
      cs.study.condition = ConditionFromLabel(cs.name);
    } else if (c.is_object()) {
      for (const auto& [key, value] : c.items()) {
        if (key != "name" && key != "condition" && key != "study") {
          throw InvalidConfig("unknown condition key \"" + key + "\"");
        }
      }
      if (!c.contains("condition") || !c["condition"].is_string()) {
        throw InvalidConfig("condition entry needs a \"condition\" string");
      }
      cs.study = c.contains("study") ? StudyConfigFromJson(c["study"], base) : base;
      cs.study.condition = ConditionFromLabel(c["condition"].get<std::string>());
      cs.name = c.value("name", std::string(ConditionLabel(cs.study.condition)));
    } else {
      throw InvalidConfig("conditions entries must be strings or objects");
    }
    spec.conditions.push_back(std::move(cs));
  }
  spec.validate();
  return spec;
}

nlohmann::ordered_json ExperimentSpecToJson(const ExperimentSpec& spec) {
  nlohmann::ordered_json j;
  j["scenario"] = spec.scenario;
  j["replications"] = spec.replications;
  j["base_seed"] = spec.base_seed;
  j["output_dir"] = spec.output_dir.string();
  if (spec.cohort) j["cohort"] = CohortTemplateToJson(*spec.cohort);
  j["analysis"] = {{"intervention_start_day",
                    spec.analysis.intervention_start_day}};
  auto conds = nlohmann::ordered_json::array();
  for (const auto& c : spec.conditions) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["condition"] = ConditionLabel(c.study.condition);
    cj["study"] = StudyConfigToJson(c.study);
    conds.push_back(cj);
  }
  j["conditions"] = conds;
  return j;
}

ExperimentSpec LoadExperimentSpec(const std::string& path_or_name) {
  fs::path path(path_or_name);
  if (!fs::exists(path)) {
    const fs::path bundled = BundledScenarioDir() / (path_or_name + ".json");
    if (path_or_name.find('/') == std::string::npos && fs::exists(bundled)) {
      path = bundled;
    } else {
      throw InvalidConfig("spec file not found: " + path_or_name);
    }
  }
  return ExperimentSpecFromJson(ReadFile(path));
}

namespace {

struct ReplicationOutput {
  ReplicationResult result;
  std::vector<std::string> files;
};

ReplicationOutput RunReplication(const ExperimentSpec& spec,
                                 const ConditionSpec& cond, std::size_t k,
                                 bool write) {
  ReplicationOutput out;
  StudyConfig config = cond.study;
  config.seed = spec.seed_for(k);
  if (spec.cohort) config.players = MaterializeCohort(*spec.cohort, config.seed);
  const StudyLog log = run_study(config);

  ReplicationResult& r = out.result;
  r.replication = k;
  r.seed = config.seed;

  std::vector<double> step_delta, post, team_sd;
  std::size_t missed = 0;
  for (const SessionRow& row : log.rows) {
    if (row.missed) ++missed;
    if (row.day < spec.analysis.intervention_start_day || row.missed) continue;
    step_delta.push_back(*row.steps - row.baseline_steps);
    if (row.post_motivation) post.push_back(*row.post_motivation);
  }
  r.steps_vs_baseline = Mean(step_delta);
  r.post_motivation = Mean(post);
  r.miss_rate = log.rows.empty() ? 0.0
                                 : static_cast<double>(missed) /
                                       static_cast<double>(log.rows.size());
  for (const TeamState& t : log.final_states) {
    const ShapleyBanditState s(t.csv, t.tc, 0.0);
    if (s.total_csv() > 0.0) team_sd.push_back(s.disparity_sum());
  }
  r.mean_sum_sd = Mean(team_sd);

  std::optional<DisparityReport> report;
  try {
    report = disparity_report(log, spec.analysis);
  } catch (const DegenerateInput&) {
    // Fewer than 3 analyzable players: no cohort statistics.
  }
  if (report) {
    r.analyzed_players = report->players.size();
    if (report->correlation) r.r = report->correlation->r;
    r.mean_signed_disparity = report->mean_signed_disparity;
    r.mean_abs_disparity = report->mean_abs_disparity;
    for (const PlayerMetrics& m : report->players) {
      r.disparity.push_back(m.disparity);
      r.miss.push_back(m.miss_likelihood);
    }
  }

  if (write) {
    const std::string rel = cond.name + "/" + RepDir(k) + "/";
    WriteFile(spec.output_dir / (rel + "study_log.csv"), StudyLogCsv(log));
    out.files.push_back(rel + "study_log.csv");
    std::string jsonl;
    for (const DecisionRecord& d : log.decisions) jsonl += ToJsonLine(d) + "\n";
    WriteFile(spec.output_dir / (rel + "decisions.jsonl"), jsonl);
    out.files.push_back(rel + "decisions.jsonl");
    if (report) {
      WriteFile(spec.output_dir / (rel + "disparity_report.csv"),
                DisparityReportCsv(*report));
      out.files.push_back(rel + "disparity_report.csv");
      WriteFile(spec.output_dir / (rel + "disparity_summary.json"),
                DisparityReportJson(*report).dump(2) + "\n");
      out.files.push_back(rel + "disparity_summary.json");
    }
  }
  return out;
}

ConditionSummary Summarize(const ConditionSpec& cond,
                           std::vector<ReplicationResult> reps) {
  ConditionSummary s;
  s.name = cond.name;
  s.condition = cond.study.condition;
  std::vector<double> rs, sd, steps, post, miss, signed_d, abs_d, pooled_d,
      pooled_m;
  for (const auto& r : reps) {
    if (r.r) rs.push_back(*r.r);
    sd.push_back(r.mean_sum_sd);
    steps.push_back(r.steps_vs_baseline);
    post.push_back(r.post_motivation);
    miss.push_back(r.miss_rate);
    signed_d.push_back(r.mean_signed_disparity);
    abs_d.push_back(r.mean_abs_disparity);
    pooled_d.insert(pooled_d.end(), r.disparity.begin(), r.disparity.end());
    pooled_m.insert(pooled_m.end(), r.miss.begin(), r.miss.end());
  }
  s.median_r = Median(rs);
  s.replications_with_r = rs.size();
  s.pooled_n = pooled_d.size();
  if (pooled_d.size() >= 3) {
    try {
      s.pooled_r = pearson_r(pooled_d, pooled_m);
    } catch (const DegenerateInput&) {
    }
  }
  s.mean_sum_sd = Mean(sd);
  s.steps_vs_baseline = Mean(steps);
  s.post_motivation = Mean(post);
  s.miss_rate = Mean(miss);
  s.mean_signed_disparity = Mean(signed_d);
  s.mean_abs_disparity = Mean(abs_d);
  s.replications = std::move(reps);
  return s;
}

nlohmann::ordered_json OptionalNumber(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string SummaryCsv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "condition,strategy,replications,steps_vs_baseline,post_motivation,"
         "miss_rate,mean_sum_sd,median_r,pooled_r,pooled_n,"
         "mean_signed_disparity,mean_abs_disparity\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? FormatNumber(*v) : std::string();
  };
  for (const auto& c : result.conditions) {
    out << c.name << ',' << ConditionLabel(c.condition) << ','
        << c.replications.size() << ',' << FormatNumber(c.steps_vs_baseline)
        << ',' << FormatNumber(c.post_motivation) << ','
        << FormatNumber(c.miss_rate) << ',' << FormatNumber(c.mean_sum_sd)
        << ',' << opt(c.median_r) << ',' << opt(c.pooled_r) << ','
        << c.pooled_n << ',' << FormatNumber(c.mean_signed_disparity) << ','
        << FormatNumber(c.mean_abs_disparity) << '\n';
  }
  return out.str();
}

}  // namespace

nlohmann::ordered_json ExperimentSummaryJson(const ExperimentSpec& spec,
                                             const ExperimentResult& result) {
  nlohmann::ordered_json j;
  j["scenario"] = spec.scenario;
  j["replications"] = spec.replications;
  j["base_seed"] = spec.base_seed;
  j["intervention_start_day"] = spec.analysis.intervention_start_day;
  auto conds = nlohmann::ordered_json::array();
  for (const auto& c : result.conditions) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["strategy"] = ConditionLabel(c.condition);
    cj["steps_vs_baseline"] = c.steps_vs_baseline;
    cj["post_motivation"] = c.post_motivation;
    cj["miss_rate"] = c.miss_rate;
    cj["mean_sum_sd"] = c.mean_sum_sd;
    cj["median_r"] = OptionalNumber(c.median_r);
    cj["replications_with_r"] = c.replications_with_r;
    cj["pooled_r"] = OptionalNumber(c.pooled_r);
    cj["pooled_n"] = c.pooled_n;
    cj["mean_signed_disparity"] = c.mean_signed_disparity;
    cj["mean_abs_disparity"] = c.mean_abs_disparity;
    conds.push_back(cj);
  }
  j["conditions"] = conds;
  if (result.comparison) {
    const auto& cmp = *result.comparison;
    nlohmann::ordered_json cj;
    cj["greedy"] = cmp.greedy;
    cj["shapley"] = cmp.shapley;
    if (cmp.pooled_r_test) {
      cj["fisher_z"] = cmp.pooled_r_test->z;
      cj["p"] = cmp.pooled_r_test->p;
    } else {
      cj["fisher_z"] = nullptr;
      cj["p"] = nullptr;
    }
    cj["median_r_greedy_exceeds_shapley"] = cmp.median_r_greedy_exceeds_shapley;
    cj["shapley_lower_sum_sd_fraction"] = cmp.shapley_lower_sum_sd_fraction;
    j["greedy_vs_shapley"] = cj;
  } else {
    j["greedy_vs_shapley"] = nullptr;
  }
  return j;
}

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const RunOptions& options) {
  spec.validate();
  const std::size_t nc = spec.conditions.size();
  const std::size_t nr = spec.replications;
  std::vector<ReplicationOutput> outputs(nc * nr);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= outputs.size()) return;
      try {
        outputs[task] = RunReplication(spec, spec.conditions[task / nr],
                                       task % nr, options.write_artifacts);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(outputs.size());
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  for (std::size_t k = 0; k < nr; ++k) result.manifest.seeds.push_back(spec.seed_for(k));
  for (std::size_t c = 0; c < nc; ++c) {
    std::vector<ReplicationResult> reps;
    for (std::size_t k = 0; k < nr; ++k) {
      auto& o = outputs[c * nr + k];
      reps.push_back(std::move(o.result));
      for (auto& f : o.files) result.manifest.files.push_back(std::move(f));
    }
    result.conditions.push_back(Summarize(spec.conditions[c], std::move(reps)));
  }

  const ConditionSummary* greedy = nullptr;
  const ConditionSummary* shapley = nullptr;
  for (const auto& c : result.conditions) {
    if (c.condition == Condition::kGreedy && !greedy) greedy = &c;
    if (c.condition == Condition::kShapley && !shapley) shapley = &c;
  }
  if (greedy && shapley) {
    GreedyShapleyComparison cmp;
    cmp.greedy = greedy->name;
    cmp.shapley = shapley->name;
    if (greedy->pooled_r && shapley->pooled_r) {
      try {
        cmp.pooled_r_test = correlation_diff_test(
            *greedy->pooled_r, greedy->pooled_n, *shapley->pooled_r,
            shapley->pooled_n);
      } catch (const DegenerateInput&) {
      }
    }
    std::size_t lower = 0;
    for (std::size_t k = 0; k < nr; ++k) {
      if (shapley->replications[k].mean_sum_sd <
          greedy->replications[k].mean_sum_sd) {
        ++lower;
      }
    }
    cmp.shapley_lower_sum_sd_fraction =
        static_cast<double>(lower) / static_cast<double>(nr);
    cmp.median_r_greedy_exceeds_shapley =
        greedy->median_r && shapley->median_r &&
        *greedy->median_r > *shapley->median_r;
    result.comparison = cmp;
  }

  result.manifest.tool_version = SHAPBANDIT_VERSION;
  ExperimentSpec hashed = spec;
  hashed.output_dir.clear();
  result.manifest.spec_hash = Fnv1aHex(ExperimentSpecToJson(hashed).dump());

  if (options.write_artifacts) {
    WriteFile(spec.output_dir / "summary.json",
              ExperimentSummaryJson(spec, result).dump(2) + "\n");
    result.manifest.files.push_back("summary.json");
    WriteFile(spec.output_dir / "summary.csv", SummaryCsv(result));
    result.manifest.files.push_back("summary.csv");
    nlohmann::ordered_json mj;
    mj["spec_hash"] = result.manifest.spec_hash;
    mj["tool_version"] = result.manifest.tool_version;
    mj["seeds"] = result.manifest.seeds;
    mj["files"] = result.manifest.files;
    WriteFile(spec.output_dir / "manifest.json", mj.dump(2) + "\n");
  }
  return result;
}

WorkedExampleReport cmd_worked_example(double tolerance,
                                       const WorkedExampleInputs& inputs) {
  WorkedExampleReport report;
  auto add = [&](std::string name, double expected, double actual, double tol) {
    report.checks.push_back(
        {std::move(name), expected, actual, tol,
         std::isfinite(actual) && std::abs(actual - expected) <= tol});
  };
  std::ostringstream text;
  try {
    const ShapleyBanditState state(inputs.csv, inputs.tc, 0.0);
    if (state.num_players() != 2) {
      throw std::invalid_argument("worked example needs exactly 2 players");
    }
    RewardModel model(2);
    model.observe_scalar(PlayerId(0), Arm::kAboveHigher, 1.0);
    model.observe_scalar(PlayerId(1), Arm::kBelowLower, 1.0);
    Rng rng(0);
    const Decision d =
        shapley_select(state, model, Coalition::FirstN(2), rng);

    add("CSVR_1", 0.456, state.csv_ratio(PlayerId(0)), tolerance);
    add("TCR_1", 0.556, state.tc_ratio(PlayerId(0)), tolerance);
    add("SD_1", 0.1, shapley_disparity(state, PlayerId(0)), tolerance);
    add("SD_2", 0.1, shapley_disparity(state, PlayerId(1)), tolerance);
    add("sum_if_cater_player_1", 0.288,
        state.hypothetical_disparity_sum(PlayerId(0)), tolerance);
    add("sum_if_cater_player_2", 0.088,
        state.hypothetical_disparity_sum(PlayerId(1)), tolerance);
    add("catered_player", 2.0,
        d.catered_player ? static_cast<double>(d.catered_player->index() + 1)
                         : NAN,
        0.0);
    add("arm (A=0, B=1, C=2)", 2.0, static_cast<double>(Ordinal(d.arm)), 0.0);
  } catch (const std::exception& e) {
    text << "[FAIL] worked example could not be evaluated: " << e.what()
         << "\n";
    report.pass = false;
    report.text = text.str();
    return report;
  }

  report.pass = true;
  for (const Check& c : report.checks) {
    char line[256];
    std::snprintf(line, sizeof(line),
                  "[%s] %-22s expected %.3f  actual %.6f  diff %+.6f  tol %g\n",
                  c.pass ? "PASS" : "FAIL", c.name.c_str(), c.expected,
                  c.actual, c.actual - c.expected, c.tolerance);
    text << line;
    report.pass = report.pass && c.pass;
  }
  text << (report.pass ? "worked example: PASS\n" : "worked example: FAIL\n");
  report.text = text.str();
  return report;
}

AxiomSuiteReport cmd_axioms(std::size_t trials, std::size_t max_n,
                            std::uint64_t seed,
                            const AttributionFn& attribution) {
  if (max_n < 1 || max_n > kMaxOracleCoalition) {
    throw std::invalid_argument("max_n must lie in [1, 8]");
  }
  AxiomSuiteReport report;
  report.trials = trials;
  if (trials == 0) report.warnings.push_back("no trials requested; vacuous pass");

  auto random_table = [](Rng& rng, std::size_t m) {
    std::vector<double> t(std::size_t{1} << m, 0.0);
    for (std::size_t s = 1; s < t.size(); ++s) t[s] = rng.uniform(-100.0, 100.0);
    return t;
  };

  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng = Rng::Stream(seed, {trial});
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform_int(max_n));
    const std::size_t kind = trial % 3;
    std::vector<double> table = random_table(rng, m);
    if (kind == 1 && m >= 2) {
      // Last player is null: v(S) ignores them.
      const std::size_t last = std::size_t{1} << (m - 1);
      for (std::size_t s = 0; s < table.size(); ++s) {
        if (s & last) table[s] = table[s & ~last];
      }
    } else if (kind == 2) {
      // Symmetric: v depends only on |S|.
      std::vector<double> by_size(m + 1, 0.0);
      for (std::size_t k = 1; k <= m; ++k) by_size[k] = rng.uniform(-100.0, 100.0);
      for (std::size_t s = 0; s < table.size(); ++s) {
        table[s] = by_size[static_cast<std::size_t>(std::popcount(s))];
      }
    }
    const auto v = CharacteristicFunction::TableBacked(m, table);
    const std::vector<CharacteristicFunction> partners = {
        CharacteristicFunction::TableBacked(m, random_table(rng, m))};
    const Coalition n = Coalition::FirstN(m);

    std::vector<std::string> problems;
    AxiomReport axioms;
    try {
      axioms = check_axioms(v, n, partners, attribution);
    } catch (const std::exception& e) {
      problems.push_back(std::string("check_axioms threw: ") + e.what());
    }
    problems.insert(problems.end(), axioms.failures.begin(),
                    axioms.failures.end());
    if (kind == 1 && m >= 2 &&
        std::find(axioms.null_players.begin(), axioms.null_players.end(),
                  PlayerId(m - 1)) == axioms.null_players.end()) {
      problems.push_back("null player not detected");
    }
    if (kind == 2 && axioms.interchangeable_pairs.size() != m * (m - 1) / 2) {
      problems.push_back("symmetric players not all detected");
    }
    try {
      const auto phi = attribution(v, n);
      const auto oracle = shapley_oracle_permutations(v, n);
      bool same = phi.values.size() == oracle.values.size();
      for (std::size_t i = 0; same && i < oracle.values.size(); ++i) {
        same = WithinTolerance(phi.values[i], oracle.values[i]);
      }
      if (!same) problems.push_back("differs from the permutation oracle");
    } catch (const std::exception& e) {
      problems.push_back(std::string("oracle comparison threw: ") + e.what());
    }

    if (problems.empty()) {
      ++report.passed;
    } else {
      for (const auto& p : problems) {
        report.failures.push_back("trial " + std::to_string(trial) + " (n=" +
                                  std::to_string(m) + "): " + p);
      }
    }
  }
  return report;
}

AnalyzeResult cmd_analyze(const std::vector<fs::path>& logs,
                          const fs::path& out_dir,
                          const AnalysisOptions& options) {
  if (logs.empty()) throw std::invalid_argument("analyze: no logs given");
  std::map<std::string, std::vector<StudyLog>> by_condition;
  std::vector<std::string> order;
  for (const fs::path& path : logs) {
    StudyLog log;
    try {
      log = ReadStudyLogCsv(ReadFile(path));
    } catch (const SchemaError& e) {
      throw SchemaError(path.string() + ": " + e.detail(), e.line(), e.column());
    }
    const std::string cond = log.condition.empty() ? "unknown" : log.condition;
    if (!by_condition.count(cond)) order.push_back(cond);
    by_condition[cond].push_back(std::move(log));
  }

  AnalyzeResult result;
  nlohmann::ordered_json conds = nlohmann::ordered_json::object();
  std::map<std::string, DisparityReport> reports;
  for (const std::string& cond : order) {
    const auto& group = by_condition[cond];
    DisparityReport report = disparity_report(group, options);
    const std::string file = "disparity_report_" + cond + ".csv";
    WriteFile(out_dir / file, DisparityReportCsv(report, group.size() > 1));
    result.files.push_back(file);
    nlohmann::ordered_json cj = DisparityReportJson(report);
    cj["logs"] = group.size();
    conds[cond] = cj;
    reports.emplace(cond, std::move(report));
  }
  result.summary["conditions"] = conds;
  auto g = reports.find("greedy");
  auto s = reports.find("shapley");
  if (g != reports.end() && s != reports.end() && g->second.correlation &&
      s->second.correlation) {
    try {
      const ZTest t = correlation_diff_test(
          g->second.correlation->r, g->second.correlation->n,
          s->second.correlation->r, s->second.correlation->n);
      result.summary["greedy_vs_shapley"] = {{"z", t.z}, {"p", t.p}};
    } catch (const DegenerateInput& e) {
      result.summary["greedy_vs_shapley"] = {{"note", e.what()}};
    }
  }
  WriteFile(out_dir / "disparity_summary.json", result.summary.dump(2) + "\n");
  result.files.push_back("disparity_summary.json");
  return result;
}

}  // namespace shapbandit
