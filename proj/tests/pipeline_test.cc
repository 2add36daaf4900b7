// Copyright 2026 The MSTemp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mstemp/pipeline.h"

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "mstemp/attacks.h"
#include "mstemp/errors.h"
#include "mstemp/run_config.h"
#include "test_util.h"

namespace mstemp {
namespace {

using ::mstemp::testing::MockRunConfig;
using ::mstemp::testing::Slurp;
using ::mstemp::testing::TempDir;
using ::mstemp::testing::TestDataDir;
using nlohmann::json;

RunConfig Config(const json& j, const CliOverrides& o = {}) {
  return LoadRunConfigJson(j, TestDataDir(), o);
}

json Seeds10(const TempDir& dir) {
  return MockRunConfig(TestDataDir() / "seeds_10.tsv", dir / "run");
}

json WithoutRuntime(const std::filesystem::path& manifest) {
  json j = json::parse(Slurp(manifest));
  j.erase("runtime");
  return j;
}

std::vector<json> Lines(const std::filesystem::path& path) {
  std::vector<json> out;
  std::ifstream in(path);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

int RunCli(const std::string& args) {
  std::string cmd = std::string(MSTEMP_CLI_PATH) + " " + args +
                    " --quiet > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(PipelineTest, MockRunProducesReportAndReconciles) {
  TempDir dir;
  Pipeline p(Config(Seeds10(dir)));
  EvalReport report = p.Run();
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_EQ(report.baseline_count, 10u);
  EXPECT_DOUBLE_EQ(report.rows[0].baseline_accuracy, 1.0);
  for (const auto& cell : report.rows[0].cells) {
    EXPECT_DOUBLE_EQ(cell.accuracy, 1.0) << cell.evaluator;
  }
  auto manifest = nlohmann::ordered_json::parse(Slurp(p.ManifestPath()));
  EXPECT_TRUE(manifest["reconciliation"]["ok"].get<bool>())
      << manifest["reconciliation"].dump();
  EXPECT_EQ(manifest.begin().key(), "tool");
  EXPECT_EQ((--manifest.end()).key(), "runtime");
  EXPECT_FALSE(Slurp(p.ReportTextPath()).empty());
  EXPECT_EQ(p.LoadReport().ToJson(), report.ToJson());
}

TEST(PipelineTest, StageByStageMatchesRun) {
  TempDir a, b;
  Pipeline whole(Config(Seeds10(a)));
  whole.Run();
  Pipeline staged(Config(Seeds10(b)));
  for (Stage s : {Stage::kParaphrase, Stage::kFilter, Stage::kTemplates,
                  Stage::kFill, Stage::kAttack, Stage::kEvaluate,
                  Stage::kReport}) {
    staged.RunStage(s);
  }
  for (const auto& ev : whole.config().evaluators) {
    EXPECT_EQ(Slurp(whole.ArtifactPath(ev.name, Stage::kAttack)),
              Slurp(staged.ArtifactPath(ev.name, Stage::kAttack)));
  }
  EXPECT_EQ(Slurp(whole.ReportJsonPath()), Slurp(staged.ReportJsonPath()));
  EXPECT_EQ(WithoutRuntime(whole.ManifestPath()),
            WithoutRuntime(staged.ManifestPath()));
}

TEST(PipelineTest, SameSeedIsByteIdenticalDifferentSeedIsNot) {
  TempDir a, b, c;
  Pipeline p1(Config(Seeds10(a)));
  Pipeline p2(Config(Seeds10(b)));
  CliOverrides other;
  other.seed = 7;
  Pipeline p3(Config(Seeds10(c), other));
  p1.Run();
  p2.Run();
  p3.Run();
  EXPECT_EQ(p1.config().Hash(), p2.config().Hash());
  EXPECT_NE(p1.config().Hash(), p3.config().Hash());
  EXPECT_EQ(Slurp(p1.ArtifactPath("para-a", Stage::kAttack)),
            Slurp(p2.ArtifactPath("para-a", Stage::kAttack)));
  EXPECT_NE(Slurp(p1.ArtifactPath("para-a", Stage::kAttack)),
            Slurp(p3.ArtifactPath("para-a", Stage::kAttack)));
  EXPECT_EQ(Slurp(p1.ReportJsonPath()), Slurp(p2.ReportJsonPath()));
}

TEST(PipelineTest, ReportBeforeEvaluateIsStageOrderError) {
  TempDir dir;
  Pipeline p(Config(Seeds10(dir)));
  for (Stage s : {Stage::kParaphrase, Stage::kFilter, Stage::kTemplates,
                  Stage::kFill, Stage::kAttack}) {
    p.RunStage(s);
  }
  EXPECT_THROW(p.RunStage(Stage::kReport), StageOrderError);
}

TEST(PipelineTest, DownstreamStageOnFreshDirIsStageOrderError) {
  for (Stage s : {Stage::kFilter, Stage::kTemplates, Stage::kFill,
                  Stage::kAttack, Stage::kEvaluate, Stage::kReport}) {
    TempDir dir;
    Pipeline p(Config(Seeds10(dir)));
    EXPECT_THROW(p.RunStage(s), StageOrderError) << StageName(s);
  }
}

TEST(PipelineTest, ErrorMessageNamesTheMissingStage) {
  TempDir dir;
  Pipeline p(Config(Seeds10(dir)));
  try {
    p.RunStage(Stage::kTemplates);
    FAIL() << "expected StageOrderError";
  } catch (const StageOrderError& e) {
    EXPECT_NE(std::string(e.what()).find("filter"), std::string::npos)
        << e.what();
  }
}

TEST(PipelineTest, CountLawWithoutDedupAtTauZero) {
  TempDir dir;
  json j = Seeds10(dir);
  j["fill"] = {{"dedup", false}};
  j["filter"] = {{"tau", 0.0}};
  Pipeline p(Config(j));
  p.Run();
  json manifest = json::parse(Slurp(p.ManifestPath()));
  for (const auto& ev : p.config().evaluators) {
    std::size_t templates = Lines(p.ArtifactPath(ev.name, Stage::kTemplates)).size();
    std::size_t samples = Lines(p.ArtifactPath(ev.name, Stage::kAttack)).size();
    EXPECT_EQ(samples, templates * 5) << ev.name;
    // Every seed in the fixture has a person or pronoun slot in each
    // paraphrase, so nothing is dropped: 10 seeds x 5 x 5.
    EXPECT_EQ(samples, 250u) << ev.name;
    for (const auto& row : manifest["per_seed"][ev.name]) {
      EXPECT_EQ(row["kept"], 5) << row.dump();
      EXPECT_EQ(row["realized"], row["requested"]) << row.dump();
    }
  }
  EXPECT_TRUE(manifest["reconciliation"]["ok"].get<bool>());
}

TEST(PipelineTest, TauOneShrinksSetAndManifestExplainsIt) {
  TempDir loose_dir, strict_dir;
  json loose = Seeds10(loose_dir);
  loose["filter"] = {{"tau", 0.0}};
  json strict = Seeds10(strict_dir);
  strict["filter"] = {{"tau", 1.0}};
  Pipeline pl(Config(loose));
  Pipeline ps(Config(strict));
  pl.Run();
  ps.Run();
  json ml = json::parse(Slurp(pl.ManifestPath()));
  json ms = json::parse(Slurp(ps.ManifestPath()));
  for (const auto& ev : ps.config().evaluators) {
    std::size_t nl = Lines(pl.ArtifactPath(ev.name, Stage::kAttack)).size();
    std::size_t ns = Lines(ps.ArtifactPath(ev.name, Stage::kAttack)).size();
    EXPECT_LT(ns, nl) << ev.name;
    const json& fs = ms["stages"]["filter"][ev.name];
    EXPECT_EQ(fs["accepted"].get<std::size_t>() + fs["rejected"].get<std::size_t>(),
              fs["candidates"].get<std::size_t>());
    EXPECT_GT(fs["rejected"].get<std::size_t>(), 0u);
    std::size_t realized = 0;
    for (const auto& row : ms["per_seed"][ev.name]) {
      realized += row["realized"].get<std::size_t>();
      EXPECT_LE(row["kept"].get<std::size_t>(), row["accepted"].get<std::size_t>());
    }
    EXPECT_EQ(realized, ns);
    for (const auto& row : Lines(ps.ArtifactPath(ev.name, Stage::kFilter))) {
      for (const auto& c : row["candidates"]) {
        EXPECT_EQ(c["accepted"].get<bool>(), c["score"].get<double>() >= 1.0)
            << c.dump();
      }
    }
  }
  EXPECT_TRUE(ms["reconciliation"]["ok"].get<bool>());
}

TEST(PipelineTest, AttackedSamplesReplayFromFilledOnes) {
  TempDir dir;
  json j = Seeds10(dir);
  j["attacks"] = {{"enabled", true},
                  {"kinds", {"typo", "synonym"}},
                  {"rate", 0.5}};
  Pipeline p(Config(j));
  p.Run();
  std::size_t attacked = 0;
  for (const auto& ev : p.config().evaluators) {
    std::vector<json> filled = Lines(p.ArtifactPath(ev.name, Stage::kFill));
    std::vector<json> out = Lines(p.ArtifactPath(ev.name, Stage::kAttack));
    ASSERT_EQ(filled.size(), out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      GeneratedSample before = SampleFromJson(filled[i]);
      GeneratedSample after = SampleFromJson(out[i]);
      EXPECT_EQ(before.id, after.id);
      EXPECT_EQ(before.label, after.label);
      attacked += after.attacks.size();
      EXPECT_EQ(ReplayAttacks(before.text, after.attacks), after.text);
      EXPECT_EQ(UndoAttacks(after.text, after.attacks), before.text);
    }
  }
  EXPECT_GT(attacked, 0u);
}

TEST(PipelineTest, PredictionsMatchDPrimeOrder) {
  TempDir dir;
  Pipeline p(Config(Seeds10(dir)));
  p.Run();
  std::vector<json> samples = Lines(p.ArtifactPath("para-b", Stage::kAttack));
  std::vector<json> preds = Lines(p.PredictionsPath("para-b", "oracle"));
  ASSERT_EQ(samples.size(), preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    EXPECT_EQ(preds[i]["sample_id"], samples[i]["id"]);
  }
  EXPECT_EQ(Lines(p.PredictionsPath("baseline", "oracle")).size(), 10u);
}

TEST(PipelineTest, ResumesFromTruncatedPredictions) {
  TempDir a, b;
  Pipeline fresh(Config(Seeds10(a)));
  fresh.Run();
  Pipeline resumed(Config(Seeds10(b)));
  resumed.Run();
  std::filesystem::path preds = resumed.PredictionsPath("para-a", "oracle");
  std::string full = Slurp(preds);
  std::size_t cut = 0;
  for (int lines = 0; lines < 7; ++lines) cut = full.find('\n', cut) + 1;
  {
    std::ofstream out(preds, std::ios::trunc);
    out << full.substr(0, cut);
  }
  resumed.RunStage(Stage::kEvaluate);
  resumed.RunStage(Stage::kReport);
  EXPECT_EQ(Slurp(preds), full);
  json manifest = json::parse(Slurp(resumed.ManifestPath()));
  EXPECT_EQ(manifest["runtime"]["resumed"]["para-a/oracle"], 7);
  EXPECT_EQ(Slurp(fresh.ReportJsonPath()), Slurp(resumed.ReportJsonPath()));
}

TEST(PipelineTest, FairnessNullWhenSubsetExceedsSet) {
  TempDir dir;
  json j = Seeds10(dir);
  j["evaluation"] = {{"fairness", {{"n", 100000}, {"k", 3}}}};
  Pipeline p(Config(j));
  EvalReport report = p.Run();
  for (const auto& cell : report.rows[0].cells) {
    EXPECT_FALSE(cell.fairness.has_value());
    EXPECT_FALSE(cell.fairness_note.empty());
  }
  EXPECT_NE(Slurp(p.ReportTextPath()).find("n/a"), std::string::npos);
}

TEST(PipelineTest, FlipModelScoresZeroEverywhere) {
  TempDir dir;
  json j = Seeds10(dir);
  j["evaluated"] = json::array(
      {{{"name", "flip"}, {"kind", "mock"}, {"mock_mode", "flip"}}});
  EvalReport report = Pipeline(Config(j)).Run();
  EXPECT_DOUBLE_EQ(report.rows[0].baseline_accuracy, 0.0);
  EXPECT_FALSE(report.rows[0].reduction_percent.has_value());
  for (const auto& cell : report.rows[0].cells) {
    EXPECT_DOUBLE_EQ(cell.accuracy, 0.0);
  }
}

TEST(RunConfigTest, OverridesApply) {
  TempDir dir;
  CliOverrides o;
  o.tau = 0.5;
  o.n = 3;
  o.m = 2;
  o.attack_kinds = "typo-swap";
  o.attack_rate = 0.25;
  o.workers = 2;
  o.output = dir / "elsewhere";
  RunConfig c = Config(Seeds10(dir), o);
  EXPECT_DOUBLE_EQ(c.tau, 0.5);
  EXPECT_EQ(c.n, 3u);
  EXPECT_EQ(c.m, 2u);
  EXPECT_TRUE(c.attacks.enabled);
  EXPECT_EQ(c.attacks.kinds, std::set<AttackKind>{AttackKind::kTypoSwap});
  EXPECT_DOUBLE_EQ(c.attacks.rate, 0.25);
  EXPECT_EQ(c.workers, 2u);
  EXPECT_EQ(c.output_dir, dir / "elsewhere");
}

TEST(RunConfigTest, HashIgnoresOutputAndWorkers) {
  TempDir dir;
  CliOverrides o;
  o.workers = 1;
  o.output = dir / "other";
  EXPECT_EQ(Config(Seeds10(dir)).Hash(), Config(Seeds10(dir), o).Hash());
  CliOverrides t;
  t.tau = 0.5;
  EXPECT_NE(Config(Seeds10(dir)).Hash(), Config(Seeds10(dir), t).Hash());
}

TEST(RunConfigTest, InvalidConfigsAreConfigErrors) {
  TempDir dir;
  auto expect_bad = [&](const std::function<void(json&)>& edit) {
    json j = Seeds10(dir);
    edit(j);
    EXPECT_THROW(Config(j), ConfigError) << j.dump();
  };
  expect_bad([](json& j) { j.erase("master_seed"); });
  expect_bad([](json& j) { j["filter"] = {{"tau", 1.5}}; });
  expect_bad([](json& j) { j["evaluators"] = json::array(); });
  expect_bad([](json& j) { j["evaluated"] = json::array(); });
  expect_bad([](json& j) { j["fill"] = {{"m", 0}}; });
  expect_bad([](json& j) { j["attacks"] = {{"rate", 2.0}}; });
  expect_bad([](json& j) { j["evaluated"][0]["api_key"] = "sk-secret"; });
  expect_bad([](json& j) { j["evaluators"][1]["name"] = "para-a"; });
}

TEST(RunConfigTest, MissingDatasetFailsAtPipelineConstruction) {
  TempDir dir;
  json j = Seeds10(dir);
  j["dataset"]["path"] = "/nonexistent/seeds.tsv";
  RunConfig c = Config(j);
  EXPECT_THROW(Pipeline p(c), ConfigError);
}

TEST(RunConfigTest, BundledConfigsLoad) {
  std::filesystem::path configs = DataDir() / "configs";
  RunConfig mock = LoadRunConfig(configs / "mock_example.json");
  EXPECT_EQ(mock.evaluators.size(), 2u);
  RunConfig live = LoadRunConfig(configs / "live_sst2.json");
  EXPECT_FALSE(live.evaluators.empty());
  for (const auto& ev : live.evaluators) EXPECT_NE(ev.kind, "mock");
}

TEST(CliTest, ExitCodes) {
  TempDir dir;
  std::filesystem::path cfg = dir / "config.json";
  {
    std::ofstream out(cfg);
    out << Seeds10(dir).dump(2);
  }
  EXPECT_EQ(RunCli("paraphrase --config " + cfg.string()), 0);
  EXPECT_EQ(RunCli("report --config " + cfg.string()), 4);
  EXPECT_EQ(RunCli("run --config " + cfg.string()), 0);
  EXPECT_EQ(RunCli("run --config " + cfg.string() + " --tau 3"), 2);
  EXPECT_EQ(RunCli("run --config " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(RunCli("run"), 2);
  EXPECT_TRUE(std::filesystem::exists(dir / "run" / "report.txt"));
}

}  // namespace
}  // namespace mstemp
