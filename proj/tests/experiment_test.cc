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


#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "shapbandit/error.h"
#include "shapbandit/experiment.h"
#include "shapbandit/study_log.h"

namespace shapbandit {
namespace {

namespace fs = std::filesystem;

const fs::path kGolden = SHAPBANDIT_GOLDEN_DIR;

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void Spit(const fs::path& p, const std::string& s) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << s;
}

// Set SHAPBANDIT_UPDATE_GOLDEN=1 to rewrite the expected files.
void ExpectGolden(const std::string& name, const std::string& actual) {
  const fs::path path = kGolden / name;
  if (std::getenv("SHAPBANDIT_UPDATE_GOLDEN")) {
    Spit(path, actual);
    return;
  }
  ASSERT_TRUE(fs::exists(path)) << "missing golden file " << path;
  EXPECT_EQ(Slurp(path), actual) << "golden mismatch: " << name;
}

fs::path ScratchDir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "shapbandit_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct CliResult {
  int code = -1;
  std::string output;
};

CliResult Cli(const std::string& args) {
  const std::string cmd = std::string(SHAPBANDIT_CLI) + " " + args + " 2>&1";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

ExperimentSpec TinySpec(const fs::path& out) {
  ExperimentSpec spec = ExperimentSpecFromJson(Slurp(kGolden / "tiny_spec.json"));
  spec.output_dir = out;
  return spec;
}

TEST(ExperimentSpec, Validation) {
  EXPECT_THROW(ExperimentSpecFromJson(R"({"replications": 0, "conditions": ["greedy"]})"),
               InvalidConfig);
  EXPECT_THROW(ExperimentSpecFromJson(R"({"conditions": ["greedy"], "colour": 1})"),
               InvalidConfig);
  EXPECT_THROW(ExperimentSpecFromJson(R"({"conditions": ["greedy", "greedy"]})"),
               InvalidConfig);
  EXPECT_THROW(ExperimentSpecFromJson(R"({"replications": 2})"), InvalidConfig);
  EXPECT_THROW(ExperimentSpecFromJson(R"({"conditions": ["bandit"]})"), InvalidConfig);
  EXPECT_THROW(ExperimentSpecFromJson(R"({"conditions": [{"name": "x"}]})"),
               InvalidConfig);
  EXPECT_THROW(ExperimentSpecFromJson(R"({"conditions": ["greedy"]})"), InvalidConfig)
      << "no players and no cohort";
  EXPECT_THROW(ExperimentSpecFromJson("{"), SchemaError);
  ExperimentSpec ok = TinySpec("x");
  EXPECT_NO_THROW(ok.validate());
  EXPECT_EQ(ok.conditions.size(), 3u);
  EXPECT_EQ(ok.conditions[2].name, "shapley-eps0");
  EXPECT_EQ(ok.conditions[2].study.epsilon, 0.0);
  EXPECT_EQ(ok.conditions[1].study.epsilon, 0.1);
  EXPECT_EQ(ok.analysis.intervention_start_day, 10);
  ok.replications = 0;
  EXPECT_THROW(ok.validate(), InvalidConfig);
}

TEST(ExperimentSpec, BundledScenariosLoad) {
  for (const char* name : {"null-cohort", "conflict-cohort", "study-protocol"}) {
    const ExperimentSpec spec = LoadExperimentSpec(name);
    EXPECT_EQ(spec.scenario, name);
  }
  const ExperimentSpec conflict = LoadExperimentSpec("conflict-cohort");
  EXPECT_GE(conflict.replications, 200u);
  const ExperimentSpec protocol = LoadExperimentSpec("study-protocol");
  ASSERT_EQ(protocol.conditions.size(), 3u);
  for (const auto& c : protocol.conditions) {
    EXPECT_EQ(c.study.baseline_days, 3);
    EXPECT_EQ(c.study.forced_exploration_days, 9);
    EXPECT_EQ(c.study.total_sessions - c.study.forced_exploration_days, 12);
  }
  EXPECT_THROW(LoadExperimentSpec("no-such-scenario"), InvalidConfig);
}

TEST(RunExperiment, ByteIdenticalReruns) {
  const fs::path a = ScratchDir("rerun_a");
  const fs::path b = ScratchDir("rerun_b");
  const ExperimentResult ra = run_experiment(TinySpec(a));
  ExperimentSpec sb = TinySpec(b);
  const ExperimentResult rb = run_experiment(sb, {3, true});
  EXPECT_EQ(ra.manifest.spec_hash, rb.manifest.spec_hash);
  ASSERT_EQ(ra.manifest.files, rb.manifest.files);
  for (const std::string& f : ra.manifest.files) {
    EXPECT_EQ(Slurp(a / f), Slurp(b / f)) << f;
  }
  EXPECT_EQ(Slurp(a / "manifest.json"), Slurp(b / "manifest.json"));
}

TEST(RunExperiment, ManifestIsComplete) {
  const fs::path out = ScratchDir("manifest");
  const ExperimentSpec spec = TinySpec(out);
  const ExperimentResult r = run_experiment(spec);
  std::set<std::string> listed(r.manifest.files.begin(), r.manifest.files.end());
  for (const auto& c : spec.conditions) {
    for (const char* rep : {"rep_0000", "rep_0001"}) {
      for (const char* f : {"study_log.csv", "decisions.jsonl",
                            "disparity_report.csv", "disparity_summary.json"}) {
        const std::string rel = c.name + "/" + rep + "/" + f;
        EXPECT_TRUE(listed.count(rel)) << rel;
      }
    }
  }
  EXPECT_TRUE(listed.count("summary.json"));
  EXPECT_TRUE(listed.count("summary.csv"));
  for (const auto& f : listed) EXPECT_TRUE(fs::exists(out / f)) << f;
  std::size_t on_disk = 0;
  for (const auto& e : fs::recursive_directory_iterator(out)) {
    if (e.is_regular_file()) ++on_disk;
  }
  EXPECT_EQ(on_disk, listed.size() + 1);  // plus manifest.json
  const auto manifest = nlohmann::json::parse(Slurp(out / "manifest.json"));
  EXPECT_EQ(manifest["seeds"], nlohmann::json::array({11, 12}));
  EXPECT_EQ(manifest["tool_version"], SHAPBANDIT_VERSION);
  EXPECT_EQ(manifest["spec_hash"].get<std::string>().size(), 16u);

  ExperimentSpec moved = spec;
  moved.output_dir = ScratchDir("manifest_moved");
  EXPECT_EQ(run_experiment(moved, {1, false}).manifest.spec_hash, r.manifest.spec_hash);
  moved.base_seed = 99;
  EXPECT_NE(run_experiment(moved, {1, false}).manifest.spec_hash, r.manifest.spec_hash);
}

TEST(RunExperiment, GoldenArtifacts) {
  const fs::path out = ScratchDir("golden");
  run_experiment(TinySpec(out));
  ExpectGolden("tiny/summary.csv", Slurp(out / "summary.csv"));
  ExpectGolden("tiny/summary.json", Slurp(out / "summary.json"));
  ExpectGolden("tiny/study_log.csv", Slurp(out / "shapley-eps0/rep_0000/study_log.csv"));
  ExpectGolden("tiny/decisions.jsonl", Slurp(out / "shapley-eps0/rep_0000/decisions.jsonl"));
  ExpectGolden("tiny/disparity_report.csv",
               Slurp(out / "shapley-eps0/rep_0000/disparity_report.csv"));
  ExpectGolden("tiny/disparity_summary.json",
               Slurp(out / "shapley-eps0/rep_0000/disparity_summary.json"));
}

TEST(StudyLogCsv, RoundTrip) {
  const fs::path out = ScratchDir("roundtrip");
  run_experiment(TinySpec(out));
  const std::string text = Slurp(out / "greedy/rep_0001/study_log.csv");
  const StudyLog log = ReadStudyLogCsv(text);
  EXPECT_EQ(StudyLogCsv(log), text);
  EXPECT_EQ(log.condition, "greedy");
  EXPECT_EQ(log.total_sessions, 21);
  EXPECT_EQ(log.rows.size(), 4u * 21u);
  EXPECT_EQ(DisparityReportCsv(disparity_report(log)),
            Slurp(out / "greedy/rep_0001/disparity_report.csv"));
}

TEST(StudyLogCsv, HeaderErrorsNameTheColumn) {
  std::string text = Slurp(kGolden / "three_player_log.csv");
  std::string renamed = text;
  renamed.replace(renamed.find("best_arm"), 8, "best_arn");
  try {
    ReadStudyLogCsv(renamed);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_EQ(e.column(), 14u);
    EXPECT_NE(std::string(e.what()).find("best_arm"), std::string::npos) << e.what();
  }
  std::string missing = text;
  missing.replace(missing.find(",running_disparity"), 18, "");
  EXPECT_THROW(ReadStudyLogCsv(missing), SchemaError);
  EXPECT_THROW(ReadStudyLogCsv(""), SchemaError);
}

TEST(StudyLogCsv, CellErrorsCarryPosition) {
  std::string text = Slurp(kGolden / "three_player_log.csv");
  const std::size_t row3 = text.find("greedy,0,0,2,0,11500");
  text.replace(row3, 20, "greedy,0,0,2,0,lots!");
  try {
    ReadStudyLogCsv(text);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 6u);
  }
  std::string arm = Slurp(kGolden / "three_player_log.csv");
  arm.replace(arm.find(",C,forced"), 9, ",Z,forced");
  EXPECT_THROW(ReadStudyLogCsv(arm), SchemaError);
  std::string ragged = Slurp(kGolden / "three_player_log.csv") + "greedy,0,0\n";
  EXPECT_THROW(ReadStudyLogCsv(ragged), SchemaError);
}

TEST(CmdAnalyze, HandCraftedLog) {
  const fs::path out = ScratchDir("analyze");
  AnalysisOptions opts;
  opts.intervention_start_day = 3;
  const AnalyzeResult r = cmd_analyze({kGolden / "three_player_log.csv"}, out, opts);
  ExpectGolden("three_player_report.csv", Slurp(out / "disparity_report_greedy.csv"));
  const auto& g = r.summary["conditions"]["greedy"];
  EXPECT_NEAR(g["r"].get<double>(), std::sqrt(3.0) / 2.0, 1e-12);
  EXPECT_EQ(g["players"], 3);
}

TEST(CmdAnalyze, GroupsByConditionAndCompares) {
  const fs::path out = ScratchDir("analyze_groups");
  run_experiment(TinySpec(out));
  std::vector<fs::path> logs;
  for (const char* c : {"greedy", "shapley-eps0"}) {
    for (const char* rep : {"rep_0000", "rep_0001"}) {
      logs.push_back(out / c / rep / "study_log.csv");
    }
  }
  const AnalyzeResult r = cmd_analyze(logs, out / "analysis");
  EXPECT_TRUE(fs::exists(out / "analysis/disparity_report_greedy.csv"));
  EXPECT_TRUE(fs::exists(out / "analysis/disparity_report_shapley.csv"));
  EXPECT_TRUE(r.summary.contains("greedy_vs_shapley"));
  const auto& cmp = r.summary["greedy_vs_shapley"];
  EXPECT_TRUE(cmp["z"].is_number());
  EXPECT_TRUE(cmp["p"].is_number());
  const std::string report = Slurp(out / "analysis/disparity_report_greedy.csv");
  EXPECT_EQ(report.substr(0, report.find('\n')),
            "source,team,player,disparity,miss_likelihood,effort,treatment");
}

TEST(CmdAnalyze, SchemaErrorNamesFile) {
  const fs::path dir = ScratchDir("analyze_bad");
  std::string text = Slurp(kGolden / "three_player_log.csv");
  text.replace(text.find("catered_player"), 14, "catered");
  Spit(dir / "bad.csv", text);
  try {
    cmd_analyze({dir / "bad.csv"}, dir);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("bad.csv"), std::string::npos) << what;
    EXPECT_NE(what.find("catered_player"), std::string::npos) << what;
  }
}

TEST(CmdWorkedExample, PassesAtPublishedPrecision) {
  const WorkedExampleReport r = cmd_worked_example(0.001);
  EXPECT_TRUE(r.pass) << r.text;
  EXPECT_EQ(r.checks.size(), 8u);
  ExpectGolden("worked_example.txt", cmd_worked_example().text);
}

TEST(CmdWorkedExample, NegativeControl) {
  WorkedExampleInputs wrong;
  wrong.csv = {30000, 30000};
  const WorkedExampleReport r = cmd_worked_example(0.001, wrong);
  EXPECT_FALSE(r.pass);
  WorkedExampleInputs bad;
  bad.tc = {1};
  EXPECT_FALSE(cmd_worked_example(0.001, bad).pass);
}

TEST(CmdAxioms, PassesAndCatchesBrokenHook) {
  const AxiomSuiteReport ok = cmd_axioms(100, 6, 1);
  EXPECT_TRUE(ok.pass());
  EXPECT_EQ(ok.trials, 100u);
  EXPECT_EQ(ok.passed, 100u);
  const AttributionFn broken = [](const CharacteristicFunction& v, const Coalition& n) {
    ShapleyAttribution a = shapley_all(v, n);
    if (!a.values.empty()) a.values.back() *= 1.01;
    return a;
  };
  const AxiomSuiteReport bad = cmd_axioms(30, 5, 1, broken);
  EXPECT_FALSE(bad.pass());
  EXPECT_LT(bad.passed, 30u);
  const AxiomSuiteReport none = cmd_axioms(0, 4, 1);
  EXPECT_FALSE(none.warnings.empty());
  EXPECT_THROW(cmd_axioms(10, 9, 1), std::invalid_argument);
  EXPECT_THROW(cmd_axioms(10, 0, 1), std::invalid_argument);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(Cli("worked-example").code, 0);
  EXPECT_EQ(Cli("worked-example -t 0.001").code, 0);
  const CliResult neg = Cli("worked-example --csv 30000,30000");
  EXPECT_EQ(neg.code, 1);
  EXPECT_NE(neg.output.find("[FAIL]"), std::string::npos);
  EXPECT_EQ(Cli("axioms --trials 20 --max-n 5").code, 0);
  EXPECT_NE(Cli("axioms --max-n 12").code, 0);
  EXPECT_NE(Cli("").code, 0);

  const fs::path dir = ScratchDir("cli");
  std::string text = Slurp(kGolden / "three_player_log.csv");
  text.replace(text.find("worst_arm"), 9, "worst");
  Spit(dir / "bad.csv", text);
  const CliResult bad = Cli("analyze " + (dir / "bad.csv").string() + " -o " + dir.string());
  EXPECT_EQ(bad.code, 3);
  EXPECT_NE(bad.output.find("worst_arm"), std::string::npos) << bad.output;

  Spit(dir / "zero.json", R"({"replications": 0, "conditions": ["greedy"]})");
  EXPECT_EQ(Cli("run " + (dir / "zero.json").string()).code, 2);
  EXPECT_EQ(Cli("run " + (kGolden / "tiny_spec.json").string() + " -n 0 -o " +
                (dir / "x").string()).code, 2);
}

TEST(Cli, RunAndAnalyzeEndToEnd) {
  const fs::path dir = ScratchDir("cli_run");
  const CliResult run = Cli("run " + (kGolden / "tiny_spec.json").string() + " -o " +
                            (dir / "a").string() + " -j 2");
  ASSERT_EQ(run.code, 0) << run.output;
  EXPECT_NE(run.output.find("\"greedy_vs_shapley\""), std::string::npos);
  const CliResult again = Cli("run " + (kGolden / "tiny_spec.json").string() + " -o " +
                              (dir / "b").string());
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(Slurp(dir / "a/summary.csv"), Slurp(dir / "b/summary.csv"));
  EXPECT_EQ(Slurp(dir / "a/greedy/rep_0000/study_log.csv"),
            Slurp(dir / "b/greedy/rep_0000/study_log.csv"));
  const CliResult an = Cli("analyze " + (dir / "a/greedy/rep_0000/study_log.csv").string() +
                           " -o " + (dir / "an").string());
  EXPECT_EQ(an.code, 0) << an.output;
  EXPECT_TRUE(fs::exists(dir / "an/disparity_summary.json"));
  const CliResult seeded = Cli("run " + (kGolden / "tiny_spec.json").string() + " -o " +
                               (dir / "c").string() + " -s 500 -n 1");
  ASSERT_EQ(seeded.code, 0);
  const auto m = nlohmann::json::parse(Slurp(dir / "c/manifest.json"));
  EXPECT_EQ(m["seeds"], nlohmann::json::array({500}));
}

}  // namespace
}  // namespace shapbandit
