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

// shapbandit run <spec> | worked-example | axioms | analyze <logs...>

#include <cstdint>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "shapbandit/error.h"
#include "shapbandit/experiment.h"

namespace {

using namespace shapbandit;

std::vector<double> ParseDoubles(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t end = s.find(',', pos);
    if (end == std::string::npos) end = s.size();
    out.push_back(std::stod(s.substr(pos, end - pos)));
    pos = end + 1;
  }
  return out;
}

int RunCommand(const std::string& spec_path, const std::string& out,
               std::optional<std::uint64_t> seed,
               std::optional<std::size_t> replications, std::size_t jobs) {
  ExperimentSpec spec = LoadExperimentSpec(spec_path);
  if (!out.empty()) spec.output_dir = out;
  if (seed) spec.base_seed = *seed;
  if (replications) spec.replications = *replications;
  spec.validate();
  const ExperimentResult result = run_experiment(spec, {jobs, true});
  std::cout << ExperimentSummaryJson(spec, result).dump(2) << "\n";
  std::cerr << "wrote " << result.manifest.files.size() + 1 << " files to "
            << spec.output_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shapley Bandit experiment harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SHAPBANDIT_VERSION);

  auto* run = app.add_subcommand("run", "Run every condition x replication of a spec");
  std::string spec_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t replications = 0;
  std::size_t jobs = 1;
  run->add_option("spec", spec_path,
                  "Spec file, or a bundled scenario name (null-cohort, "
                  "conflict-cohort, study-protocol)")
      ->required();
  run->add_option("-o,--out", out_dir, "Output directory (overrides the spec)");
  auto* seed_opt = run->add_option("-s,--seed", seed, "Base seed (overrides the spec)");
  auto* reps_opt = run->add_option("-n,--replications", replications,
                                   "Replication count (overrides the spec)");
  run->add_option("-j,--jobs", jobs, "Parallel replications")
      ->check(CLI::Range(std::size_t{1}, std::size_t{256}));

  auto* worked = app.add_subcommand("worked-example",
                                    "Verify the two-player CSV/TC worked example");
  double tolerance = 0.005;
  std::string csv_override;
  std::string tc_override;
  worked->add_option("-t,--tolerance", tolerance, "Absolute tolerance on ratios")
      ->check(CLI::NonNegativeNumber);
  worked->add_option("--csv", csv_override, "Override CSVs, e.g. 27500,32800");
  worked->add_option("--tc", tc_override, "Override TCs, e.g. 5,4");

  auto* axioms = app.add_subcommand("axioms", "Shapley axiom and oracle suite");
  std::size_t trials = 100;
  std::size_t max_n = 6;
  std::uint64_t axiom_seed = 1;
  axioms->add_option("--trials", trials, "Random characteristic functions");
  axioms->add_option("--max-n", max_n, "Largest coalition (<= 8)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{8}));
  axioms->add_option("-s,--seed", axiom_seed, "Seed");

  auto* analyze = app.add_subcommand("analyze", "Disparity analysis of study log CSVs");
  std::vector<std::string> log_paths;
  std::string analyze_out = ".";
  int start_day = 10;
  analyze->add_option("logs", log_paths, "Study log CSV files")->required();
  analyze->add_option("-o,--out", analyze_out, "Output directory");
  analyze->add_option("--intervention-start", start_day,
                      "First session of the intervention window")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::optional<std::uint64_t> s;
      std::optional<std::size_t> r;
      if (*seed_opt) s = seed;
      if (*reps_opt) r = replications;
      return RunCommand(spec_path, out_dir, s, r, jobs);
    }
    if (*worked) {
      WorkedExampleInputs inputs;
      if (!csv_override.empty()) inputs.csv = ParseDoubles(csv_override);
      if (!tc_override.empty()) {
        inputs.tc.clear();
        for (double t : ParseDoubles(tc_override)) {
          inputs.tc.push_back(static_cast<std::int64_t>(t));
        }
      }
      const WorkedExampleReport report = cmd_worked_example(tolerance, inputs);
      std::cout << report.text;
      return report.pass ? 0 : 1;
    }
    if (*axioms) {
      const AxiomSuiteReport report = cmd_axioms(trials, max_n, axiom_seed);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
      for (const auto& f : report.failures) std::cout << "[FAIL] " << f << "\n";
      std::cout << "axioms: " << report.passed << "/" << report.trials
                << " trials passed (max_n=" << max_n << ")\n";
      return report.pass() ? 0 : 1;
    }
    if (*analyze) {
      std::vector<std::filesystem::path> paths(log_paths.begin(), log_paths.end());
      AnalysisOptions options;
      options.intervention_start_day = start_day;
      const AnalyzeResult result = cmd_analyze(paths, analyze_out, options);
      std::cout << result.summary.dump(2) << "\n";
      return 0;
    }
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const InvalidConfig& e) {
    std::cerr << "error: invalid spec: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
