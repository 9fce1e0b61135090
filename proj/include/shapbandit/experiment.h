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

// Experiment orchestration behind the `shapbandit` command line tool.

#ifndef SHAPBANDIT_EXPERIMENT_H_
#define SHAPBANDIT_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "shapbandit/analysis.h"
#include "shapbandit/shapley.h"
#include "shapbandit/simworld.h"

namespace shapbandit {

struct ConditionSpec {
  std::string name;  // unique; also the output directory name
  StudyConfig study;
};

struct ExperimentSpec {
  std::string scenario;
  std::vector<ConditionSpec> conditions;
  std::size_t replications = 1;
  std::uint64_t base_seed = 1;
  std::filesystem::path output_dir = "out";
  // When present, players are drawn per replication from the template using
  // the replication seed; otherwise every condition's study.players is used.
  std::optional<CohortTemplate> cohort;
  AnalysisOptions analysis;

  // Throws InvalidConfig.
  void validate() const;
  std::uint64_t seed_for(std::size_t replication) const {
    return base_seed + replication;
  }
};

// Throws InvalidConfig (bad content) or SchemaError (unparsable JSON).
ExperimentSpec ExperimentSpecFromJson(std::string_view text);
nlohmann::ordered_json ExperimentSpecToJson(const ExperimentSpec& spec);
// Reads a spec file; a bare name such as "conflict-cohort" resolves to the
// bundled scenario of that name.
ExperimentSpec LoadExperimentSpec(const std::string& path_or_name);
std::filesystem::path BundledScenarioDir();

// 64-bit FNV-1a, hex encoded.
std::string Fnv1aHex(std::string_view bytes);

struct ReplicationResult {
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  std::optional<double> r;  // r(disparity, miss likelihood)
  std::size_t analyzed_players = 0;
  double mean_sum_sd = 0.0;  // mean over teams of sum_i SD_i at the end
  double steps_vs_baseline = 0.0;
  double post_motivation = 0.0;
  double miss_rate = 0.0;
  double mean_signed_disparity = 0.0;
  double mean_abs_disparity = 0.0;
  std::vector<double> disparity;  // per analyzed player, report order
  std::vector<double> miss;
};

struct ConditionSummary {
  std::string name;
  Condition condition = Condition::kShapley;
  std::vector<ReplicationResult> replications;
  std::optional<double> median_r;
  std::size_t replications_with_r = 0;
  std::optional<double> pooled_r;
  std::size_t pooled_n = 0;
  double mean_sum_sd = 0.0;
  double steps_vs_baseline = 0.0;
  double post_motivation = 0.0;
  double miss_rate = 0.0;
  double mean_signed_disparity = 0.0;
  double mean_abs_disparity = 0.0;
};

struct GreedyShapleyComparison {
  std::string greedy;
  std::string shapley;
  std::optional<ZTest> pooled_r_test;  // Fisher-z, greedy vs shapley
  double shapley_lower_sum_sd_fraction = 0.0;  // over paired replications
  bool median_r_greedy_exceeds_shapley = false;
};

struct RunManifest {
  std::string spec_hash;
  std::string tool_version;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> files;  // relative to the output directory
};

struct ExperimentResult {
  std::vector<ConditionSummary> conditions;
  std::optional<GreedyShapleyComparison> comparison;
  RunManifest manifest;
};

struct RunOptions {
  std::size_t jobs = 1;
  bool write_artifacts = true;
};

// Runs every condition x replication; writes per-replication logs and
// reports plus summary.json, summary.csv and manifest.json under
// spec.output_dir.
ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const RunOptions& options = {});
nlohmann::ordered_json ExperimentSummaryJson(const ExperimentSpec& spec,
                                             const ExperimentResult& result);

// --- worked example -------------------------------------------------------

struct Check {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct WorkedExampleInputs {
  std::vector<double> csv = {27500.0, 32800.0};
  std::vector<std::int64_t> tc = {5, 4};
};

struct WorkedExampleReport {
  std::vector<Check> checks;
  bool pass = false;
  std::string text;  // printable verification report
};

// Replays the two-player CSV/TC example: player 1 prefers A, player 2
// prefers C. Expected values are fixed; `inputs` allows negative controls.
WorkedExampleReport cmd_worked_example(double tolerance = 0.005,
                                       const WorkedExampleInputs& inputs = {});

// --- axiom suite -----------------------------------------------------------

struct AxiomSuiteReport {
  std::size_t trials = 0;
  std::size_t passed = 0;
  std::vector<std::string> failures;
  std::vector<std::string> warnings;
  bool pass() const { return failures.empty(); }
};

// Random characteristic functions over 1..max_n players. Each trial checks
// the four axioms and equivalence with the permutation oracle. Throws
// std::invalid_argument for max_n outside [1, 8].
AxiomSuiteReport cmd_axioms(std::size_t trials, std::size_t max_n,
                            std::uint64_t seed,
                            const AttributionFn& attribution = shapley_all);

// --- analysis --------------------------------------------------------------

struct AnalyzeResult {
  std::vector<std::string> files;
  nlohmann::ordered_json summary;
};

// Groups the logs by condition and writes disparity_report_<condition>.csv
// and disparity_summary.json into out_dir. Throws SchemaError for logs that
// do not match the documented CSV schema (the message names the file).
AnalyzeResult cmd_analyze(const std::vector<std::filesystem::path>& logs,
                          const std::filesystem::path& out_dir,
                          const AnalysisOptions& options = {});

}  // namespace shapbandit

#endif  // SHAPBANDIT_EXPERIMENT_H_
