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

#include "mstemp/harness.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <unordered_map>

#include "mstemp/errors.h"
#include "mstemp/hashing.h"
#include "mstemp/text_util.h"

namespace mstemp {

using nlohmann::json;
using nlohmann::ordered_json;

std::string FormatLabelList(const LabelSpace& space) {
  const auto& labels = space.labels();
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i > 0) out += i + 1 == labels.size() ? " or " : ", ";
    out += space.verbalizers(labels[i]).front();
  }
  return out;
}

std::string BuildTaskPrompt(std::string_view text, const LabelSpace& space,
                            std::string_view tmpl) {
  const std::string labels = FormatLabelList(space);
  return RenderPlaceholders(tmpl, [&](std::string_view name, std::string* out) {
    if (name == "text") {
      *out = std::string(text);
    } else if (name == "labels") {
      *out = labels;
    } else {
      return false;
    }
    return true;
  });
}

namespace {

// Bytes of multi-byte UTF-8 sequences count as word characters, so a
// verbalizer never matches inside an accented word.
bool IsWordByte(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) || c == '_';
}

}  // namespace

std::string ParsePrediction(std::string_view raw, const LabelSpace& space) {
  const std::string hay = ToLower(raw);
  std::size_t best_pos = std::string::npos;
  std::size_t best_len = 0;
  std::string best_label;
  for (const auto& label : space.labels()) {
    for (const auto& verbalizer : space.verbalizers(label)) {
      const std::string needle = ToLower(verbalizer);
      if (needle.empty()) continue;
      for (std::size_t pos = hay.find(needle); pos != std::string::npos;
           pos = hay.find(needle, pos + 1)) {
        const std::size_t end = pos + needle.size();
        bool left_ok = pos == 0 || !IsWordByte(hay[pos - 1]) ||
                       !IsWordByte(needle.front());
        bool right_ok = end == hay.size() || !IsWordByte(hay[end]) ||
                        !IsWordByte(needle.back());
        if (!left_ok || !right_ok) continue;
        if (pos < best_pos || (pos == best_pos && needle.size() > best_len)) {
          best_pos = pos;
          best_len = needle.size();
          best_label = label;
        }
        break;  // later occurrences of this verbalizer cannot be earlier
      }
    }
  }
  return best_pos == std::string::npos ? std::string(kUnparseable) : best_label;
}

ordered_json PredictionToJson(const Prediction& p) {
  ordered_json j;
  j["sample_id"] = p.sample_id;
  j["raw_response"] = p.raw_response;
  j["parsed_label"] = p.parsed_label;
  j["gold_label"] = p.gold_label;
  j["correct"] = p.correct;
  j["prompt_sha256"] = p.prompt_sha256;
  return j;
}

Prediction PredictionFromJson(const json& j) {
  try {
    Prediction p;
    p.sample_id = j.at("sample_id").get<std::string>();
    p.raw_response = j.at("raw_response").get<std::string>();
    p.parsed_label = j.at("parsed_label").get<std::string>();
    p.gold_label = j.at("gold_label").get<std::string>();
    p.correct = j.at("correct").get<bool>();
    p.prompt_sha256 = j.value("prompt_sha256", std::string());
    return p;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("prediction: ") + e.what());
  }
}

EvalResult Evaluate(LanguageModel& model, const std::vector<EvalItem>& items,
                    const LabelSpace& space, AnswerKey* answer_key,
                    const EvalOptions& options) {
  if (items.empty()) throw ConfigError("evaluate: no samples");
  std::set<std::string_view> ids;
  for (const auto& item : items) {
    if (!ids.insert(item.sample_id).second) {
      throw ConfigError("evaluate: duplicate sample id " + item.sample_id);
    }
    if (!space.Contains(item.gold_label)) {
      throw ConfigError("evaluate: sample " + item.sample_id +
                        " has unknown label '" + item.gold_label + "'");
    }
  }

  std::vector<std::string> prompts(items.size());
  std::vector<std::string> prompt_hashes(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    prompts[i] = BuildTaskPrompt(items[i].text, space, options.prompt_template);
    prompt_hashes[i] = Sha256Hex(prompts[i]);
    if (answer_key) {
      answer_key->Register(prompts[i], items[i].gold_label, items[i].sample_id);
    }
  }

  std::unordered_map<std::string, Prediction> previous;
  if (options.checkpoint && std::filesystem::exists(*options.checkpoint)) {
    for (const auto& line : SplitLines(ReadFile(*options.checkpoint))) {
      if (Trim(line).empty()) continue;
      try {
        Prediction p = PredictionFromJson(json::parse(line));
        previous[p.sample_id] = std::move(p);
      } catch (const json::exception&) {
        continue;  // torn trailing line from an interrupted run
      }
    }
  }

  EvalResult result;
  result.predictions.resize(items.size());
  std::vector<bool> done(items.size(), false);
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto it = previous.find(items[i].sample_id);
    if (it != previous.end() && it->second.prompt_sha256 == prompt_hashes[i] &&
        it->second.gold_label == items[i].gold_label) {
      result.predictions[i] = it->second;
      done[i] = true;
      ++result.resumed;
    }
  }

  std::ofstream checkpoint;
  std::mutex checkpoint_mu;
  if (options.checkpoint) {
    if (options.checkpoint->has_parent_path()) {
      std::filesystem::create_directories(options.checkpoint->parent_path());
    }
    checkpoint.open(*options.checkpoint, std::ios::app | std::ios::binary);
    if (!checkpoint) {
      throw Error("cannot open checkpoint " + options.checkpoint->string());
    }
  }

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!done[i]) todo.push_back(i);
  }
  ParallelFor(todo.size(), std::max<std::size_t>(1, options.workers),
              [&](std::size_t t) {
                const std::size_t i = todo[t];
                CompletionRequest req{prompts[i], 0, kTaskTemperature,
                                      items[i].sample_id};
                Completion c = model.Complete(req);
                Prediction p;
                p.sample_id = items[i].sample_id;
                p.raw_response = c.text;
                p.parsed_label = ParsePrediction(c.text, space);
                p.gold_label = items[i].gold_label;
                p.correct = p.parsed_label == p.gold_label;
                p.prompt_sha256 = prompt_hashes[i];
                if (checkpoint.is_open()) {
                  std::lock_guard<std::mutex> lock(checkpoint_mu);
                  checkpoint << PredictionToJson(p).dump() << '\n';
                  checkpoint.flush();
                }
                result.predictions[i] = std::move(p);
              });

  for (const auto& p : result.predictions) result.correct += p.correct ? 1 : 0;
  result.accuracy =
      static_cast<double>(result.correct) / static_cast<double>(items.size());

  if (options.checkpoint) {
    checkpoint.close();
    std::string body;
    for (const auto& p : result.predictions) {
      body += PredictionToJson(p).dump();
      body += '\n';
    }
    WriteFileAtomic(*options.checkpoint, body);
  }
  return result;
}

std::vector<std::vector<std::size_t>> FairnessSample(std::size_t population,
                                                     std::size_t n,
                                                     std::size_t k,
                                                     std::uint64_t seed) {
  if (k == 0) throw ConfigError("fairness repeats K must be >= 1");
  if (n == 0) throw ConfigError("fairness subset size N must be >= 1");
  if (n > population) {
    throw ConfigError("fairness subset size N=" + std::to_string(n) +
                      " exceeds the " + std::to_string(population) +
                      " available samples");
  }
  std::vector<std::vector<std::size_t>> subsets;
  subsets.reserve(k);
  std::vector<std::size_t> perm(population);
  for (std::size_t s = 0; s < k; ++s) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(DeriveSeed(seed, {"fairness", std::to_string(s)}));
    for (std::size_t i = 0; i < n; ++i) {
      std::swap(perm[i], perm[i + rng.Uniform(population - i)]);
    }
    std::vector<std::size_t> subset(perm.begin(), perm.begin() + n);
    std::sort(subset.begin(), subset.end());
    subsets.push_back(std::move(subset));
  }
  return subsets;
}

ordered_json FairnessEstimate::ToJson() const {
  ordered_json j;
  j["n"] = n;
  j["k"] = k;
  j["mean"] = mean;
  j["min"] = min;
  j["max"] = max;
  j["subset_accuracies"] = subset_accuracies;
  return j;
}

FairnessEstimate EstimateFairness(const std::vector<bool>& correct,
                                  std::size_t n, std::size_t k,
                                  std::uint64_t seed) {
  FairnessEstimate est;
  est.n = n;
  est.k = k;
  for (const auto& subset : FairnessSample(correct.size(), n, k, seed)) {
    std::size_t hits = 0;
    for (std::size_t i : subset) hits += correct[i] ? 1 : 0;
    est.subset_accuracies.push_back(static_cast<double>(hits) /
                                    static_cast<double>(n));
  }
  est.mean = std::accumulate(est.subset_accuracies.begin(),
                             est.subset_accuracies.end(), 0.0) /
             static_cast<double>(k);
  auto [lo, hi] = std::minmax_element(est.subset_accuracies.begin(),
                                      est.subset_accuracies.end());
  est.min = *lo;
  est.max = *hi;
  return est;
}

double RoundTo(double x, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(x * scale) / scale;
}

double ReductionPercent(double baseline, const std::vector<double>& accuracies) {
  if (!(baseline > 0.0)) throw ConfigError("baseline accuracy must be > 0");
  if (accuracies.empty()) {
    throw DegenerateInputError("reduction needs at least one accuracy");
  }
  double mean = std::accumulate(accuracies.begin(), accuracies.end(), 0.0) /
                static_cast<double>(accuracies.size());
  return RoundTo(100.0 * (baseline - mean) / baseline, 1);
}

double Multiplier(std::size_t generated, std::size_t baseline_count) {
  if (baseline_count == 0) {
    throw DegenerateInputError("multiplier with an empty baseline set");
  }
  return RoundTo(static_cast<double>(generated) /
                     static_cast<double>(baseline_count),
                 2);
}

// ---------------------------------------------------------------------------

ordered_json EvalReport::ToJson() const {
  ordered_json j;
  j["task"] = task;
  j["evaluators"] = evaluators;
  ordered_json counts;
  counts["baseline"] = baseline_count;
  ordered_json gen = ordered_json::array();
  for (std::size_t e = 0; e < evaluators.size(); ++e) {
    ordered_json c;
    c["evaluator"] = evaluators[e];
    c["count"] = generated_counts.at(e);
    c["multiplier"] = Multiplier(generated_counts.at(e), baseline_count);
    gen.push_back(std::move(c));
  }
  counts["generated"] = std::move(gen);
  j["sample_counts"] = std::move(counts);
  ordered_json rows_json = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json r;
    r["evaluated_model"] = row.evaluated_model;
    r["baseline_accuracy"] = row.baseline_accuracy;
    ordered_json cells_json = ordered_json::array();
    for (const auto& cell : row.cells) {
      ordered_json c;
      c["evaluator"] = cell.evaluator;
      c["accuracy"] = cell.accuracy;
      if (cell.fairness) {
        c["fairness"] = cell.fairness->ToJson();
      } else {
        c["fairness"] = nullptr;
        c["fairness_note"] = cell.fairness_note;
      }
      cells_json.push_back(std::move(c));
    }
    r["evaluators"] = std::move(cells_json);
    if (row.reduction_percent) {
      r["reduction_percent"] = *row.reduction_percent;
    } else {
      r["reduction_percent"] = nullptr;
    }
    rows_json.push_back(std::move(r));
  }
  j["rows"] = std::move(rows_json);
  j["manifest"] = manifest;
  return j;
}

EvalReport EvalReport::FromJson(const json& j) {
  try {
    EvalReport r;
    r.task = j.at("task").get<std::string>();
    r.evaluators = j.at("evaluators").get<std::vector<std::string>>();
    r.baseline_count = j.at("sample_counts").at("baseline").get<std::size_t>();
    for (const auto& c : j.at("sample_counts").at("generated")) {
      r.generated_counts.push_back(c.at("count").get<std::size_t>());
    }
    for (const auto& rj : j.at("rows")) {
      ModelRow row;
      row.evaluated_model = rj.at("evaluated_model").get<std::string>();
      row.baseline_accuracy = rj.at("baseline_accuracy").get<double>();
      if (!rj.at("reduction_percent").is_null()) {
        row.reduction_percent = rj.at("reduction_percent").get<double>();
      }
      for (const auto& cj : rj.at("evaluators")) {
        EvaluatorCell cell;
        cell.evaluator = cj.at("evaluator").get<std::string>();
        cell.accuracy = cj.at("accuracy").get<double>();
        if (cj.contains("fairness") && !cj.at("fairness").is_null()) {
          const json& f = cj.at("fairness");
          FairnessEstimate est;
          est.n = f.at("n").get<std::size_t>();
          est.k = f.at("k").get<std::size_t>();
          est.mean = f.at("mean").get<double>();
          est.min = f.at("min").get<double>();
          est.max = f.at("max").get<double>();
          est.subset_accuracies =
              f.at("subset_accuracies").get<std::vector<double>>();
          cell.fairness = std::move(est);
        } else {
          cell.fairness_note = cj.value("fairness_note", std::string());
        }
        row.cells.push_back(std::move(cell));
      }
      r.rows.push_back(std::move(row));
    }
    r.manifest = j.value("manifest", std::string());
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("report: ") + e.what());
  }
}

namespace {

std::string Fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, RoundTo(x, decimals));
  return buf;
}

std::string RenderGrid(const std::vector<std::vector<std::string>>& grid,
                       std::size_t rule_after_row) {
  std::vector<std::size_t> widths;
  for (const auto& row : grid) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::size_t total = 0;
  for (std::size_t w : widths) total += w + 2;
  std::string out;
  for (std::size_t r = 0; r < grid.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < grid[r].size(); ++c) {
      std::string cell = grid[r][c];
      cell.resize(widths[c], ' ');
      line += cell;
      if (c + 1 < grid[r].size()) line += "  ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
    if (r == 0 || r == rule_after_row) out += std::string(total - 2, '-') + '\n';
  }
  return out;
}

}  // namespace

std::string EvalReport::RenderTable() const {
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{"Evaluated LLM", "Baseline"};
  for (const auto& e : evaluators) header.push_back(e);
  header.push_back("Reduction (%)");
  grid.push_back(header);
  for (const auto& row : rows) {
    std::vector<std::string> line{row.evaluated_model,
                                  Fixed(row.baseline_accuracy, 3)};
    for (const auto& cell : row.cells) line.push_back(Fixed(cell.accuracy, 3));
    line.push_back(row.reduction_percent ? Fixed(*row.reduction_percent, 1)
                                         : "n/a");
    grid.push_back(line);
  }
  std::vector<std::string> examples{"#Examples", std::to_string(baseline_count)};
  for (std::size_t e = 0; e < evaluators.size(); ++e) {
    examples.push_back(std::to_string(generated_counts.at(e)) + "(" +
                       Fixed(Multiplier(generated_counts.at(e), baseline_count),
                             2) +
                       "x)");
  }
  examples.push_back("");
  grid.push_back(examples);
  std::string out = RenderGrid(grid, rows.size());

  // The subsampled block is shown whenever fairness was attempted, so a
  // skipped estimate reads as n/a rather than silently vanishing.
  bool any_fairness = false;
  for (const auto& row : rows) {
    for (const auto& cell : row.cells) {
      any_fairness |= cell.fairness.has_value() || !cell.fairness_note.empty();
    }
  }
  if (!any_fairness) return out;

  std::vector<std::vector<std::string>> fgrid;
  std::vector<std::string> fheader{"Subsampled", ""};
  for (const auto& e : evaluators) fheader.push_back(e);
  fgrid.push_back(fheader);
  for (const auto& row : rows) {
    std::vector<std::string> line{row.evaluated_model, ""};
    for (const auto& cell : row.cells) {
      if (!cell.fairness) {
        line.push_back("n/a");
        continue;
      }
      const FairnessEstimate& f = *cell.fairness;
      line.push_back(Fixed(f.mean, 3) + " [" + Fixed(f.min, 3) + ", " +
                     Fixed(f.max, 3) + "] K=" + std::to_string(f.k) +
                     " N=" + std::to_string(f.n));
    }
    fgrid.push_back(line);
  }
  out += '\n';
  out += RenderGrid(fgrid, fgrid.size());
  return out;
}

}  // namespace mstemp
