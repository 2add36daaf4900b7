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

// mstemp run|paraphrase|filter|templates|fill|attack|evaluate|report
//     --config <file> [--seed <u64>] [--tau <f>] [--n <k>] [--m <k>]
//     [--attack-kinds <csv>] [--attack-rate <f>] [--output <dir>]
//     [--workers <k>] [--quiet]
//
// Exit codes: 0 ok, 2 config, 3 transport, 4 stage order, 1 anything else.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mstemp/errors.h"
#include "mstemp/pipeline.h"
#include "mstemp/run_config.h"
#include "mstemp/text_util.h"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> tau;
  std::optional<std::size_t> n;
  std::optional<std::size_t> m;
  std::optional<std::string> attack_kinds;
  std::optional<double> attack_rate;
  std::optional<std::string> output;
  std::optional<std::size_t> workers;
  bool quiet = false;
};

void AddFlags(CLI::App* cmd, Flags* f) {
  cmd->add_option("--config", f->config, "Run config (JSON)")->required();
  cmd->add_option("--seed", f->seed, "Master seed");
  cmd->add_option("--tau", f->tau, "Filter threshold in [0, 1]");
  cmd->add_option("--n", f->n, "Paraphrases per seed");
  cmd->add_option("--m", f->m, "Fillings per template");
  cmd->add_option("--attack-kinds", f->attack_kinds,
                  "typo,typo-swap,typo-delete,typo-insert,typo-substitute,"
                  "synonym");
  cmd->add_option("--attack-rate", f->attack_rate,
                  "Fraction of eligible tokens attacked");
  cmd->add_option("--output", f->output, "Output directory");
  cmd->add_option("--workers", f->workers, "Parallel workers");
  cmd->add_flag("--quiet", f->quiet, "No progress output");
}

int Execute(const std::string& command, const Flags& f) {
  mstemp::CliOverrides o;
  o.seed = f.seed;
  o.tau = f.tau;
  o.n = f.n;
  o.m = f.m;
  o.attack_kinds = f.attack_kinds;
  o.attack_rate = f.attack_rate;
  if (f.output) o.output = *f.output;
  o.workers = f.workers;
  mstemp::RunConfig config = mstemp::LoadRunConfig(f.config, o);

  mstemp::PipelineOptions po;
  if (!f.quiet) po.log = &std::cerr;
  mstemp::Pipeline pipeline(std::move(config), po);

  if (command == "run") {
    pipeline.Run();
  } else {
    pipeline.RunStage(*mstemp::ParseStage(command));
  }
  if (command == "run" || command == "report") {
    std::cout << mstemp::ReadFile(pipeline.ReportTextPath());
  }
  return mstemp::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate out-of-distribution evaluation sets from seed data "
               "and score models on them"};
  app.set_version_flag("--version", MSTEMP_VERSION);
  app.require_subcommand(1);

  Flags flags;
  const char* commands[][2] = {
      {"run", "Run every stage and print the report"},
      {"paraphrase", "Ask each evaluator model for paraphrases"},
      {"filter", "Score paraphrases and keep those above tau"},
      {"templates", "Turn kept paraphrases into slot templates"},
      {"fill", "Fill templates from the lexicon"},
      {"attack", "Apply typo and synonym attacks"},
      {"evaluate", "Query the evaluated models"},
      {"report", "Compute accuracies and write the report"},
  };
  for (const auto& [name, help] : commands) {
    AddFlags(app.add_subcommand(name, help), &flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? mstemp::kExitOk : mstemp::kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return Execute(command, flags);
  } catch (const mstemp::Error& e) {
    std::cerr << "mstemp " << command << ": " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "mstemp " << command << ": " << e.what() << '\n';
    return mstemp::kExitFailure;
  }
}
