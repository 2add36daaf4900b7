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

#include <algorithm>
#include <chrono>
#include <ctime>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>

#include "mstemp/attacks.h"
#include "mstemp/errors.h"
#include "mstemp/hashing.h"
#include "mstemp/sample_generator.h"
#include "mstemp/semantic_filter.h"
#include "mstemp/tagger.h"
#include "mstemp/template_parser.h"
#include "mstemp/text_util.h"

#ifndef MSTEMP_VERSION
#define MSTEMP_VERSION "0.0.0"
#endif

namespace mstemp {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::pair<Stage, std::string_view> kStageNames[] = {
    {Stage::kParaphrase, "paraphrase"}, {Stage::kFilter, "filter"},
    {Stage::kTemplates, "templates"},   {Stage::kFill, "fill"},
    {Stage::kAttack, "attack"},         {Stage::kEvaluate, "evaluate"},
    {Stage::kReport, "report"},
};

std::string UtcNow() {
  std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Per-seed memo so re-scoring after a re-prompt does not embed twice.
class MemoEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit MemoEmbeddingProvider(EmbeddingProvider& inner) : inner_(inner) {}

  EmbeddingVector Embed(std::string_view text) override {
    auto it = memo_.find(std::string(text));
    if (it != memo_.end()) return it->second;
    EmbeddingVector v = inner_.Embed(text);
    memo_.emplace(std::string(text), v);
    return v;
  }
  const std::string& name() const override { return inner_.name(); }

 private:
  EmbeddingProvider& inner_;
  std::unordered_map<std::string, EmbeddingVector> memo_;
};

void WriteRows(const std::vector<ordered_json>& rows,
               const std::filesystem::path& path) {
  std::string body;
  for (const auto& r : rows) {
    body += r.dump();
    body += '\n';
  }
  WriteFileAtomic(path, body);
}

template <typename Json>
std::size_t Int(const Json& j, const char* key) {
  return j.at(key).template get<std::size_t>();
}

}  // namespace

std::string_view StageName(Stage s) {
  for (const auto& [stage, name] : kStageNames) {
    if (stage == s) return name;
  }
  return "unknown";
}

std::optional<Stage> ParseStage(std::string_view name) {
  for (const auto& [stage, n] : kStageNames) {
    if (n == name) return stage;
  }
  return std::nullopt;
}

Pipeline::Pipeline(RunConfig config, PipelineOptions options)
    : config_(std::move(config)),
      options_(std::move(options)),
      dataset_(LoadSeedDataset(config_.dataset.path, config_.dataset.format,
                               config_.label_space, config_.dataset.tsv)),
      dataset_sha256_(Sha256Hex(ReadFile(config_.dataset.path))),
      answer_key_(std::make_shared<AnswerKey>(config_.label_space)) {
  config_.Validate();
  if (!options_.transport) options_.transport = std::make_shared<HttplibTransport>();
  if (!options_.clock) options_.clock = SystemClock::Instance();
}

std::filesystem::path Pipeline::EvaluatorDir(std::string_view evaluator) const {
  return config_.output_dir / std::string(evaluator);
}

std::filesystem::path Pipeline::ArtifactPath(std::string_view evaluator,
                                             Stage stage) const {
  switch (stage) {
    case Stage::kParaphrase: return EvaluatorDir(evaluator) / "paraphrases.jsonl";
    case Stage::kFilter: return EvaluatorDir(evaluator) / "filtered.jsonl";
    case Stage::kTemplates: return EvaluatorDir(evaluator) / "templates.jsonl";
    case Stage::kFill: return EvaluatorDir(evaluator) / "samples.jsonl";
    case Stage::kAttack: return EvaluatorDir(evaluator) / "d_prime.jsonl";
    case Stage::kEvaluate:
    case Stage::kReport: break;
  }
  throw Error("stage " + std::string(StageName(stage)) +
              " has no per-evaluator artifact");
}

std::filesystem::path Pipeline::PredictionsPath(
    std::string_view evaluator_or_baseline, std::string_view model) const {
  return config_.output_dir / std::string(evaluator_or_baseline) /
         "predictions" / (std::string(model) + ".jsonl");
}

std::filesystem::path Pipeline::ManifestPath() const {
  return config_.output_dir / "manifest.json";
}
std::filesystem::path Pipeline::ReportJsonPath() const {
  return config_.output_dir / "report.json";
}
std::filesystem::path Pipeline::ReportTextPath() const {
  return config_.output_dir / "report.txt";
}

void Pipeline::Log(const std::string& line) const {
  if (options_.log) *options_.log << line << '\n';
}

void Pipeline::RequireArtifact(const std::filesystem::path& path,
                               Stage producer) const {
  if (!std::filesystem::exists(path)) {
    throw StageOrderError("missing " + path.string() + "; run the '" +
                          std::string(StageName(producer)) + "' stage first");
  }
}

std::unique_ptr<LanguageModel> Pipeline::MakeModel(
    const LmBackend& backend) const {
  ModelFactoryOptions o;
  o.cache_dir = config_.cache_dir;
  o.answer_key = answer_key_;
  o.transport = options_.transport;
  o.clock = options_.clock;
  return MakeLanguageModel(backend, o);
}

ordered_json Pipeline::LoadManifest() const {
  if (!std::filesystem::exists(ManifestPath())) {
    throw StageOrderError("missing " + ManifestPath().string() +
                          "; run the 'paraphrase' stage first");
  }
  try {
    return ordered_json::parse(ReadFile(ManifestPath()));
  } catch (const json::parse_error& e) {
    throw SchemaError(ManifestPath().string() + ": " + e.what());
  }
}

void Pipeline::SaveManifest(ordered_json manifest, Stage stage) const {
  manifest["config_hash"] = config_.Hash();
  std::vector<std::string> violations = ReconcileManifest(manifest);
  manifest["reconciliation"] = ordered_json{{"ok", violations.empty()},
                                            {"violations", violations}};
  // Keep runtime last so a reader can drop it without reordering.
  ordered_json runtime = manifest.contains("runtime") ? manifest["runtime"]
                                                      : ordered_json::object();
  manifest.erase("runtime");
  runtime["timestamps"][std::string(StageName(stage))] = UtcNow();
  manifest["runtime"] = std::move(runtime);
  std::filesystem::create_directories(config_.output_dir);
  WriteFileAtomic(ManifestPath(), manifest.dump(2) + "\n");
  if (!violations.empty()) {
    std::string msg = "manifest reconciliation failed:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw Error(msg);
  }
}

void Pipeline::RunStage(Stage stage) {
  Log("[" + std::string(StageName(stage)) + "]");
  switch (stage) {
    case Stage::kParaphrase: Paraphrase(); break;
    case Stage::kFilter: Filter(); break;
    case Stage::kTemplates: Templates(); break;
    case Stage::kFill: Fill(); break;
    case Stage::kAttack: Attack(); break;
    case Stage::kEvaluate: EvaluateModels(); break;
    case Stage::kReport: Report(); break;
  }
}

EvalReport Pipeline::Run() {
  for (Stage s : {Stage::kParaphrase, Stage::kFilter, Stage::kTemplates,
                  Stage::kFill, Stage::kAttack, Stage::kEvaluate}) {
    RunStage(s);
  }
  Log("[report]");
  return Report();
}

// ---------------------------------------------------------------------------

void Pipeline::Paraphrase() {
  const auto& seeds = dataset_.examples();
  ordered_json manifest;
  manifest["tool"] = "mstemp";
  manifest["version"] = MSTEMP_VERSION;
  manifest["config_hash"] = config_.Hash();
  manifest["master_seed"] = config_.master_seed;
  manifest["dataset"] = ordered_json{{"sha256", dataset_sha256_},
                                     {"seeds", seeds.size()}};
  manifest["stages"] = ordered_json::object();
  manifest["per_seed"] = ordered_json::object();

  for (const auto& ev : config_.evaluators) {
    std::unique_ptr<LanguageModel> model = MakeModel(ev);
    std::vector<ordered_json> rows(seeds.size());
    ParallelFor(seeds.size(), config_.workers, [&](std::size_t i) {
      CompletionRequest req;
      req.prompt = BuildParaphrasePrompt(seeds[i].text, config_.n,
                                         config_.paraphrase_prompt);
      req.draw = 0;
      req.temperature = kParaphraseTemperature;
      Completion c = model->Complete(req);
      ordered_json row;
      row["seed_index"] = i;
      row["seed_id"] = seeds[i].id;
      row["draw"] = 0;
      row["prompt_sha256"] = Sha256Hex(req.prompt);
      row["response"] = c.text;
      row["candidates"] = ParseCandidates(c.text, config_.n);
      rows[i] = std::move(row);
    });
    std::filesystem::create_directories(EvaluatorDir(ev.name));
    WriteRows(rows, ArtifactPath(ev.name, Stage::kParaphrase));

    std::size_t total = 0, empty = 0;
    ordered_json per_seed = ordered_json::array();
    for (const auto& r : rows) {
      std::size_t k = r["candidates"].size();
      total += k;
      empty += k == 0 ? 1 : 0;
      per_seed.push_back(ordered_json{{"seed_id", r["seed_id"]},
                                      {"parsed", k}});
    }
    manifest["stages"]["paraphrase"][ev.name] =
        ordered_json{{"seeds", seeds.size()},
                     {"n", config_.n},
                     {"candidates_parsed", total},
                     {"empty_replies", empty}};
    manifest["per_seed"][ev.name] = std::move(per_seed);
    if (auto* cached = dynamic_cast<CachedModel*>(model.get())) {
      manifest["runtime"]["cache"]["paraphrase/" + ev.name] =
          ordered_json{{"hits", cached->hits()}, {"misses", cached->misses()}};
    }
    Log("  " + ev.name + ": " + std::to_string(total) + " candidates from " +
        std::to_string(seeds.size()) + " seeds");
  }
  SaveManifest(std::move(manifest), Stage::kParaphrase);
}

void Pipeline::Filter() {
  for (const auto& ev : config_.evaluators) {
    RequireArtifact(ArtifactPath(ev.name, Stage::kParaphrase), Stage::kParaphrase);
  }
  ordered_json manifest = LoadManifest();
  const auto& seeds = dataset_.examples();
  std::unique_ptr<EmbeddingProvider> provider = MakeEmbeddingProvider(
      config_.filter_provider, config_.cache_dir, options_.transport,
      options_.clock);

  for (const auto& ev : config_.evaluators) {
    std::vector<json> para = ReadJsonl(ArtifactPath(ev.name, Stage::kParaphrase));
    if (para.size() != seeds.size()) {
      throw StageOrderError(ArtifactPath(ev.name, Stage::kParaphrase).string() +
                            " does not match the seed dataset; rerun paraphrase");
    }
    std::unique_ptr<LanguageModel> model = MakeModel(ev);
    std::vector<ordered_json> rows(seeds.size());
    ParallelFor(seeds.size(), config_.workers, [&](std::size_t i) {
      const SeedExample& seed = seeds[i];
      if (para[i].at("seed_id").get<std::string>() != seed.id) {
        throw StageOrderError("paraphrase artifact row " + std::to_string(i) +
                              " is for seed " +
                              para[i].at("seed_id").get<std::string>());
      }
      std::vector<std::string> texts;
      std::vector<std::size_t> draw_of;
      std::set<std::string> seen;
      auto add = [&](const std::vector<std::string>& cands, std::size_t draw) {
        for (const auto& c : cands) {
          if (seen.insert(c).second) {
            texts.push_back(c);
            draw_of.push_back(draw);
          }
        }
      };
      add(para[i].at("candidates").get<std::vector<std::string>>(), 0);

      MemoEmbeddingProvider memo(*provider);
      ordered_json replies = ordered_json::array();
      std::vector<ScoredCandidate> scored;
      std::size_t draws = 1;
      auto accepted_count = [&] {
        return static_cast<std::size_t>(std::count_if(
            scored.begin(), scored.end(),
            [](const ScoredCandidate& c) { return c.accepted; }));
      };
      scored = FilterCandidates(seed.text, texts, config_.tau, memo);
      while (accepted_count() < config_.n && draws <= config_.max_reprompts) {
        CompletionRequest req;
        req.prompt = BuildParaphrasePrompt(seed.text, config_.n,
                                           config_.paraphrase_prompt);
        req.draw = draws;
        req.temperature = kParaphraseTemperature;
        Completion c = model->Complete(req);
        replies.push_back(ordered_json{{"draw", draws}, {"response", c.text}});
        add(ParseCandidates(c.text, config_.n), draws);
        ++draws;
        scored = FilterCandidates(seed.text, texts, config_.tau, memo);
      }

      ordered_json row;
      row["seed_index"] = i;
      row["seed_id"] = seed.id;
      row["label"] = seed.label;
      row["seed_text"] = seed.text;
      row["tau"] = config_.tau;
      row["draws"] = draws;
      row["reprompt_replies"] = std::move(replies);
      ordered_json cands = ordered_json::array();
      std::vector<std::string> kept;
      for (const auto& sc : scored) {
        bool keep = sc.accepted && kept.size() < config_.n;
        if (keep) kept.push_back(sc.text);
        cands.push_back(ordered_json{{"text", sc.text},
                                     {"draw", draw_of[sc.index]},
                                     {"score", sc.score},
                                     {"rank", sc.rank},
                                     {"accepted", sc.accepted},
                                     {"kept", keep}});
      }
      row["candidates"] = std::move(cands);
      row["accepted"] = accepted_count();
      row["kept"] = kept;
      rows[i] = std::move(row);
    });
    WriteRows(rows, ArtifactPath(ev.name, Stage::kFilter));

    std::size_t candidates = 0, accepted = 0, kept = 0, reprompts = 0, short_ = 0;
    auto& per_seed = manifest["per_seed"][ev.name];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      std::size_t c = r["candidates"].size();
      std::size_t a = r["accepted"].get<std::size_t>();
      std::size_t k = r["kept"].size();
      std::size_t d = r["draws"].get<std::size_t>();
      candidates += c;
      accepted += a;
      kept += k;
      reprompts += d - 1;
      short_ += k < config_.n ? 1 : 0;
      per_seed[i]["candidates"] = c;
      per_seed[i]["accepted"] = a;
      per_seed[i]["kept"] = k;
      per_seed[i]["draws"] = d;
    }
    manifest["stages"]["filter"][ev.name] =
        ordered_json{{"provider", config_.filter_provider.name},
                     {"tau", config_.tau},
                     {"max_reprompts", config_.max_reprompts},
                     {"candidates", candidates},
                     {"accepted", accepted},
                     {"rejected", candidates - accepted},
                     {"kept", kept},
                     {"reprompts", reprompts},
                     {"seeds_below_n", short_}};
    if (auto* cached = dynamic_cast<CachedModel*>(model.get())) {
      manifest["runtime"]["cache"]["filter/" + ev.name] =
          ordered_json{{"hits", cached->hits()}, {"misses", cached->misses()}};
    }
    Log("  " + ev.name + ": kept " + std::to_string(kept) + " of " +
        std::to_string(candidates) + " candidates (tau " +
        std::to_string(config_.tau) + ")");
  }
  SaveManifest(std::move(manifest), Stage::kFilter);
}

void Pipeline::Templates() {
  for (const auto& ev : config_.evaluators) {
    RequireArtifact(ArtifactPath(ev.name, Stage::kFilter), Stage::kFilter);
  }
  ordered_json manifest = LoadManifest();
  std::optional<TagLexicon> custom;
  if (!config_.tag_lexicon.empty()) custom = TagLexicon::Load(config_.tag_lexicon);
  const TagLexicon& tags = custom ? *custom : TagLexicon::Default();
  for (const auto& ev : config_.evaluators) {
    std::vector<json> rows = ReadJsonl(ArtifactPath(ev.name, Stage::kFilter));
    std::vector<Template> templates;
    std::size_t total_kept = 0, dropped = 0;
    auto& per_seed = manifest["per_seed"][ev.name];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string seed_id = rows[i].at("seed_id").get<std::string>();
      std::size_t made = 0, lost = 0;
      for (const auto& text : rows[i].at("kept")) {
        ++total_kept;
        auto tpl = ParseTemplate(text.get<std::string>(), seed_id, tags,
                                 config_.slot_policy);
        if (tpl) {
          templates.push_back(std::move(*tpl));
          ++made;
        } else {
          ++lost;
        }
      }
      dropped += lost;
      per_seed[i]["templates"] = made;
      per_seed[i]["templates_dropped"] = lost;
    }
    WriteTemplates(templates, ArtifactPath(ev.name, Stage::kTemplates));
    manifest["stages"]["templates"][ev.name] =
        ordered_json{{"slot_policy", config_.slot_policy.ToJson()},
                     {"paraphrases", total_kept},
                     {"templates", templates.size()},
                     {"dropped_no_slot", dropped}};
    Log("  " + ev.name + ": " + std::to_string(templates.size()) +
        " templates, " + std::to_string(dropped) + " paraphrases without slots");
  }
  SaveManifest(std::move(manifest), Stage::kTemplates);
}

void Pipeline::Fill() {
  for (const auto& ev : config_.evaluators) {
    RequireArtifact(ArtifactPath(ev.name, Stage::kTemplates), Stage::kTemplates);
  }
  ordered_json manifest = LoadManifest();
  const Lexicon lexicon = Lexicon::Load(config_.lexicon);
  SeedLabels labels;
  for (const auto& s : dataset_.examples()) labels.emplace(s.id, s.label);
  FillOptions fo;
  fo.dedup = config_.dedup;
  fo.pronouns_from_person = config_.pronouns_from_person;

  for (const auto& ev : config_.evaluators) {
    std::vector<Template> templates =
        ReadTemplates(ArtifactPath(ev.name, Stage::kTemplates));
    GeneratedSet set =
        GenerateSet(templates, labels, lexicon, config_.m, config_.master_seed, fo);
    WriteSamples(set.samples, ArtifactPath(ev.name, Stage::kFill));

    std::size_t requested = 0, realized = 0;
    auto& per_seed = manifest["per_seed"][ev.name];
    for (std::size_t i = 0; i < dataset_.size(); ++i) {
      const std::string& id = dataset_.examples()[i].id;
      auto it = set.per_seed.find(id);
      GenerationCounts c = it == set.per_seed.end() ? GenerationCounts{} : it->second;
      per_seed[i]["requested"] = c.requested;
      per_seed[i]["realized"] = c.realized;
      requested += c.requested;
      realized += c.realized;
    }
    manifest["stages"]["fill"][ev.name] =
        ordered_json{{"m", config_.m},
                     {"dedup", config_.dedup},
                     {"requested", requested},
                     {"realized", realized},
                     {"duplicates_dropped", requested - realized},
                     {"samples", set.samples.size()}};
    Log("  " + ev.name + ": " + std::to_string(realized) + " samples");
  }
  SaveManifest(std::move(manifest), Stage::kFill);
}

void Pipeline::Attack() {
  for (const auto& ev : config_.evaluators) {
    RequireArtifact(ArtifactPath(ev.name, Stage::kFill), Stage::kFill);
  }
  ordered_json manifest = LoadManifest();
  const bool active = config_.attacks.enabled && config_.attacks.rate > 0.0;
  AttackConfig ac;
  if (active) {
    ac.kinds = config_.attacks.kinds;
    ac.rate = config_.attacks.rate;
    ac.min_token_length = config_.attacks.min_token_length;
    if (!config_.attacks.synonyms.empty()) {
      ac.synonyms = LoadSynonymTable(config_.attacks.synonyms);
    }
    if (!config_.attacks.keyboard.empty()) {
      ac.keyboard = LoadKeyboardMap(config_.attacks.keyboard);
    }
    ac.exempt_fills = config_.attacks.exempt_fills;
    ac.Validate();
  }
  for (const auto& ev : config_.evaluators) {
    std::vector<GeneratedSample> samples =
        ReadSamples(ArtifactPath(ev.name, Stage::kFill));
    std::size_t attacked = 0, edits = 0;
    if (active) {
      std::map<std::string, Template> by_id;
      if (ac.exempt_fills) {
        RequireArtifact(ArtifactPath(ev.name, Stage::kTemplates),
                        Stage::kTemplates);
        for (auto& t : ReadTemplates(ArtifactPath(ev.name, Stage::kTemplates))) {
          std::string id = t.template_id;
          by_id.emplace(std::move(id), std::move(t));
        }
      }
      std::vector<GeneratedSample> out(samples.size());
      ParallelFor(samples.size(), config_.workers, [&](std::size_t i) {
        const Template* tpl = nullptr;
        if (ac.exempt_fills) {
          auto it = by_id.find(samples[i].template_id);
          if (it == by_id.end()) {
            throw StageOrderError("sample " + samples[i].id +
                                  " names unknown template " +
                                  samples[i].template_id);
          }
          tpl = &it->second;
        }
        out[i] = AttackSample(samples[i], ac, config_.master_seed, tpl);
      });
      for (std::size_t i = 0; i < out.size(); ++i) {
        std::size_t added = out[i].attacks.size() - samples[i].attacks.size();
        edits += added;
        attacked += added > 0 ? 1 : 0;
      }
      samples = std::move(out);
    }
    WriteSamples(samples, ArtifactPath(ev.name, Stage::kAttack));
    ordered_json kinds = ordered_json::array();
    for (AttackKind k : config_.attacks.kinds) kinds.push_back(AttackKindName(k));
    manifest["stages"]["attack"][ev.name] =
        ordered_json{{"enabled", active},
                     {"kinds", active ? kinds : ordered_json::array()},
                     {"rate", active ? config_.attacks.rate : 0.0},
                     {"samples", samples.size()},
                     {"attacked_samples", attacked},
                     {"edits", edits}};
    Log("  " + ev.name + ": " + std::to_string(edits) + " edits over " +
        std::to_string(attacked) + " samples");
  }
  SaveManifest(std::move(manifest), Stage::kAttack);
}

void Pipeline::EvaluateModels() {
  for (const auto& ev : config_.evaluators) {
    RequireArtifact(ArtifactPath(ev.name, Stage::kAttack), Stage::kAttack);
  }
  ordered_json manifest = LoadManifest();

  std::vector<EvalItem> baseline;
  for (const auto& s : dataset_.examples()) {
    baseline.push_back(EvalItem{s.id, s.text, s.label});
  }
  std::map<std::string, std::vector<EvalItem>> generated;
  for (const auto& ev : config_.evaluators) {
    auto& items = generated[ev.name];
    for (const auto& s : ReadSamples(ArtifactPath(ev.name, Stage::kAttack))) {
      items.push_back(EvalItem{s.id, s.text, s.label});
    }
  }

  for (const auto& target : config_.evaluated) {
    std::unique_ptr<LanguageModel> model = MakeModel(target);
    ordered_json section;
    auto run = [&](const std::string& where, const std::vector<EvalItem>& items) {
      ordered_json entry{{"count", items.size()}};
      if (items.empty()) {
        // Nothing survived upstream; there is no accuracy to report.
        WriteFileAtomic(PredictionsPath(where, target.name), "");
        entry["correct"] = 0;
        entry["accuracy"] = nullptr;
      } else {
        EvalOptions eo;
        eo.prompt_template = config_.task_prompt;
        eo.workers = config_.workers;
        eo.checkpoint = PredictionsPath(where, target.name);
        EvalResult r = Evaluate(*model, items, config_.label_space,
                                answer_key_.get(), eo);
        entry["correct"] = r.correct;
        entry["accuracy"] = r.accuracy;
        manifest["runtime"]["resumed"][where + "/" + target.name] = r.resumed;
      }
      section[where] = std::move(entry);
    };
    run("baseline", baseline);
    for (const auto& ev : config_.evaluators) run(ev.name, generated[ev.name]);
    manifest["stages"]["evaluate"][target.name] = std::move(section);
    if (auto* cached = dynamic_cast<CachedModel*>(model.get())) {
      manifest["runtime"]["cache"]["evaluate/" + target.name] =
          ordered_json{{"hits", cached->hits()}, {"misses", cached->misses()}};
    }
    Log("  " + target.name + ": done");
  }
  SaveManifest(std::move(manifest), Stage::kEvaluate);
}

EvalReport Pipeline::Report() {
  ordered_json manifest = LoadManifest();
  EvalReport report;
  report.task = config_.label_space.task_name();
  report.baseline_count = dataset_.size();
  report.manifest = ManifestPath().filename().string();
  const std::size_t fairness_n = config_.fairness.n.value_or(dataset_.size());

  std::map<std::string, std::size_t> d_prime_size;
  for (const auto& ev : config_.evaluators) {
    RequireArtifact(ArtifactPath(ev.name, Stage::kAttack), Stage::kAttack);
    report.evaluators.push_back(ev.name);
    std::size_t count = ReadSamples(ArtifactPath(ev.name, Stage::kAttack)).size();
    d_prime_size[ev.name] = count;
    report.generated_counts.push_back(count);
  }

  auto load = [&](const std::string& where, const std::string& model,
                  std::size_t expected) {
    std::filesystem::path path = PredictionsPath(where, model);
    RequireArtifact(path, Stage::kEvaluate);
    std::vector<Prediction> preds;
    for (const auto& j : ReadJsonl(path)) preds.push_back(PredictionFromJson(j));
    if (preds.size() != expected) {
      throw StageOrderError(path.string() + " holds " +
                            std::to_string(preds.size()) + " of " +
                            std::to_string(expected) +
                            " predictions; rerun the 'evaluate' stage");
    }
    return preds;
  };
  auto accuracy = [](const std::vector<Prediction>& preds) {
    std::size_t ok = 0;
    for (const auto& p : preds) ok += p.correct ? 1 : 0;
    return preds.empty() ? 0.0
                         : static_cast<double>(ok) /
                               static_cast<double>(preds.size());
  };

  for (const auto& target : config_.evaluated) {
    ModelRow row;
    row.evaluated_model = target.name;
    row.baseline_accuracy =
        accuracy(load("baseline", target.name, dataset_.size()));
    std::vector<double> accs;
    for (const auto& ev : config_.evaluators) {
      std::vector<Prediction> preds =
          load(ev.name, target.name, d_prime_size[ev.name]);
      EvaluatorCell cell;
      cell.evaluator = ev.name;
      cell.accuracy = accuracy(preds);
      if (preds.size() >= fairness_n && fairness_n > 0) {
        std::vector<bool> correct;
        for (const auto& p : preds) correct.push_back(p.correct);
        cell.fairness =
            EstimateFairness(correct, fairness_n, config_.fairness.k,
                             DeriveSeed(config_.master_seed, {"fairness", ev.name}));
      } else {
        cell.fairness_note = "subset size N=" + std::to_string(fairness_n) +
                             " exceeds the " + std::to_string(preds.size()) +
                             " generated samples";
      }
      if (!preds.empty()) accs.push_back(cell.accuracy);
      row.cells.push_back(std::move(cell));
    }
    if (row.baseline_accuracy > 0.0 && !accs.empty()) {
      row.reduction_percent = ReductionPercent(row.baseline_accuracy, accs);
    }
    report.rows.push_back(std::move(row));
  }

  ordered_json rj = report.ToJson();
  rj["config_hash"] = config_.Hash();
  WriteFileAtomic(ReportJsonPath(), rj.dump(2) + "\n");
  WriteFileAtomic(ReportTextPath(), report.RenderTable());
  manifest["stages"]["report"] =
      ordered_json{{"fairness", ordered_json{{"n", fairness_n},
                                              {"k", config_.fairness.k}}},
                   {"report", "report.json"}};
  SaveManifest(std::move(manifest), Stage::kReport);
  return report;
}

EvalReport Pipeline::LoadReport() const {
  RequireArtifact(ReportJsonPath(), Stage::kReport);
  return EvalReport::FromJson(json::parse(ReadFile(ReportJsonPath())));
}

// ---------------------------------------------------------------------------

std::vector<std::string> ReconcileManifest(const ordered_json& m) {
  std::vector<std::string> out;
  if (!m.contains("per_seed")) return out;
  const ordered_json& stages = m.contains("stages") ? m.at("stages")
                                                    : ordered_json::object();
  std::optional<std::size_t> n, mm;
  bool dedup = true;
  for (const auto& [ev, seeds] : m.at("per_seed").items()) {
    if (stages.contains("paraphrase") && stages["paraphrase"].contains(ev)) {
      n = Int(stages["paraphrase"][ev], "n");
    }
    if (stages.contains("fill") && stages["fill"].contains(ev)) {
      mm = Int(stages["fill"][ev], "m");
      dedup = stages["fill"][ev].at("dedup").get<bool>();
    }
    std::size_t realized_total = 0;
    bool have_fill = false;
    for (const auto& s : seeds) {
      const std::string where = ev + "/" + s.at("seed_id").get<std::string>();
      if (s.contains("accepted")) {
        if (Int(s, "accepted") > Int(s, "candidates")) {
          out.push_back(where + ": accepted > candidates");
        }
        if (Int(s, "kept") > Int(s, "accepted") || (n && Int(s, "kept") > *n)) {
          out.push_back(where + ": kept exceeds min(accepted, n)");
        }
      }
      if (s.contains("templates") &&
          Int(s, "templates") + Int(s, "templates_dropped") != Int(s, "kept")) {
        out.push_back(where + ": templates + dropped != kept paraphrases");
      }
      if (s.contains("realized")) {
        have_fill = true;
        realized_total += Int(s, "realized");
        if (mm && Int(s, "requested") != Int(s, "templates") * *mm) {
          out.push_back(where + ": requested != templates * m");
        }
        if (Int(s, "realized") > Int(s, "requested")) {
          out.push_back(where + ": realized > requested");
        }
        if (!dedup && Int(s, "realized") != Int(s, "requested")) {
          out.push_back(where + ": realized != requested with dedup disabled");
        }
      }
    }
    if (have_fill && stages.contains("fill") && stages["fill"].contains(ev) &&
        Int(stages["fill"][ev], "samples") != realized_total) {
      out.push_back(ev + ": sample count != sum of realized per seed");
    }
    if (stages.contains("attack") && stages["attack"].contains(ev) &&
        stages.contains("fill") && stages["fill"].contains(ev) &&
        Int(stages["attack"][ev], "samples") != Int(stages["fill"][ev], "samples")) {
      out.push_back(ev + ": attack stage changed the sample count");
    }
  }
  return out;
}

}  // namespace mstemp
