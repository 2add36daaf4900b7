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

#include "mstemp/mock_lm.h"

#include <algorithm>
#include <array>
#include <regex>
#include <set>
#include <utility>

#include "mstemp/errors.h"
#include "mstemp/hashing.h"
#include "mstemp/text_util.h"
#include "mstemp/tokenizer.h"

namespace mstemp {

namespace {

struct SynonymEntry {
  std::string_view word;
  std::array<std::string_view, 2> alternatives;
};

constexpr SynonymEntry kSynonyms[] = {
    {"happy", {"glad", "cheerful"}},
    {"joy", {"delight", "happiness"}},
    {"sad", {"unhappy", "gloomy"}},
    {"good", {"fine", "decent"}},
    {"great", {"excellent", "terrific"}},
    {"bad", {"poor", "awful"}},
    {"terrible", {"dreadful", "awful"}},
    {"awful", {"dreadful", "terrible"}},
    {"movie", {"film", "picture"}},
    {"film", {"movie", "picture"}},
    {"funny", {"amusing", "hilarious"}},
    {"boring", {"dull", "tedious"}},
    {"dull", {"tedious", "boring"}},
    {"love", {"adore", "cherish"}},
    {"loved", {"adored", "enjoyed"}},
    {"hate", {"detest", "loathe"}},
    {"hated", {"detested", "loathed"}},
    {"beautiful", {"lovely", "gorgeous"}},
    {"wonderful", {"marvelous", "superb"}},
    {"nice", {"pleasant", "lovely"}},
    {"really", {"truly", "genuinely"}},
    {"very", {"really", "extremely"}},
    {"story", {"tale", "plot"}},
    {"enjoyed", {"liked", "relished"}},
    {"liked", {"enjoyed", "appreciated"}},
    {"smart", {"clever", "bright"}},
    {"brilliant", {"superb", "outstanding"}},
    {"interesting", {"engaging", "intriguing"}},
    {"annoying", {"irritating", "grating"}},
    {"charming", {"delightful", "endearing"}},
    {"worst", {"poorest", "weakest"}},
    {"best", {"finest", "greatest"}},
    {"fun", {"enjoyable", "entertaining"}},
    {"weak", {"feeble", "flimsy"}},
    {"mess", {"muddle", "shambles"}},
    {"slow", {"sluggish", "plodding"}},
    {"friends", {"pals", "buddies"}},
    {"filled", {"packed", "brimming"}},
    {"immense", {"enormous", "huge"}},
};

constexpr std::string_view kTrailingTimeAdverbs[] = {
    "today", "tonight", "yesterday", "lately", "recently", "now"};

constexpr std::string_view kOpeners[] = {"Honestly, ", "Frankly, ",
                                         "To be fair, ", "In short, "};

constexpr std::string_view kFrames[] = {"I think ", "It seems to me that "};

constexpr std::string_view kSuffix = ", if you ask me";

// First words that lose their capital when something is put in front.
constexpr std::string_view kLowerableStarters[] = {
    "the", "a", "an", "this", "that", "these", "those", "it", "we", "they",
    "he", "she", "you", "my", "our", "his", "her", "their", "its", "your",
    "there", "what", "everyone", "nobody", "nothing", "everything", "some",
    "all", "no", "one", "today", "tonight", "yesterday"};

constexpr std::string_view kDriftSentences[] = {
    "She said the weather report would come on at noon.",
    "We took the bus to the museum after lunch.",
    "He keeps his old bicycle in the garage.",
    "They moved the meeting to Thursday afternoon.",
    "Maria bought a new lamp for her desk.",
    "You can find the train schedule near the station door.",
    "I need to water the plants before I leave.",
    "David parked his car behind the library.",
    "We counted the chairs in the hall twice.",
    "They painted the fence green last spring.",
};

// Two-token contractions: (first, second) <-> contracted surface.
struct Contraction {
  std::string_view first;
  std::string_view second;
  std::string_view contracted_stem;   // token before the clitic
  std::string_view contracted_clitic;
};

constexpr Contraction kContractions[] = {
    {"is", "not", "is", "n't"},     {"are", "not", "are", "n't"},
    {"was", "not", "was", "n't"},   {"were", "not", "were", "n't"},
    {"do", "not", "do", "n't"},     {"does", "not", "does", "n't"},
    {"did", "not", "did", "n't"},   {"has", "not", "has", "n't"},
    {"have", "not", "have", "n't"}, {"could", "not", "could", "n't"},
    {"would", "not", "would", "n't"}, {"should", "not", "should", "n't"},
    {"will", "not", "wo", "n't"},   {"can", "not", "ca", "n't"},
    {"i", "am", "I", "'m"},         {"it", "is", "it", "'s"},
    {"that", "is", "that", "'s"},   {"there", "is", "there", "'s"},
    {"we", "are", "we", "'re"},     {"they", "are", "they", "'re"},
    {"you", "are", "you", "'re"},   {"i", "have", "I", "'ve"},
};

std::string MatchCase(std::string_view like, std::string_view word) {
  if (like.size() > 1 && IsAllUpper(like)) return ToUpper(word);
  if (StartsWithUpper(like)) return CapitalizeFirst(word);
  return std::string(word);
}

// Splits "<body><final punctuation>" so rewrites can work on the body.
std::pair<std::string, std::string> SplitFinalPunct(std::string_view s) {
  std::size_t end = s.size();
  while (end > 0 && (s[end - 1] == '.' || s[end - 1] == '!' ||
                     s[end - 1] == '?')) {
    --end;
  }
  return {std::string(Trim(s.substr(0, end))), std::string(s.substr(end))};
}

// Lowercases the first word when it is a common starter, so that
// "The film ..." becomes "Honestly, the film ...".
std::string DecapitalizeStart(std::string_view s) {
  std::vector<Token> tokens = Tokenize(s);
  if (tokens.empty() || tokens[0].begin != 0) return std::string(s);
  std::string lower = ToLower(tokens[0].text);
  bool lowerable = std::find(std::begin(kLowerableStarters),
                             std::end(kLowerableStarters),
                             lower) != std::end(kLowerableStarters);
  if (!lowerable || (IsAllUpper(tokens[0].text) && tokens[0].text.size() > 1)) {
    return std::string(s);
  }
  return lower + std::string(s.substr(tokens[0].end));
}

std::string ReplaceSpan(std::string_view s, std::size_t begin, std::size_t end,
                        std::string_view with) {
  std::string out(s.substr(0, begin));
  out += with;
  out += s.substr(end);
  return out;
}

void AddSynonymSwaps(std::string_view s, const std::vector<Token>& tokens,
                     std::vector<std::string>* out) {
  for (const Token& t : tokens) {
    if (!IsWordToken(t.text)) continue;
    std::string lower = ToLower(t.text);
    for (const SynonymEntry& e : kSynonyms) {
      if (e.word != lower) continue;
      for (std::string_view alt : e.alternatives) {
        out->push_back(ReplaceSpan(s, t.begin, t.end, MatchCase(t.text, alt)));
      }
    }
  }
}

void AddContractionToggles(std::string_view s, const std::vector<Token>& tokens,
                           std::vector<std::string>* out) {
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    const Token& a = tokens[i];
    const Token& b = tokens[i + 1];
    std::string la = ToLower(a.text);
    std::string lb = ToLower(b.text);
    for (const Contraction& c : kContractions) {
      if (b.begin == a.end && lb == c.contracted_clitic &&
          la == ToLower(c.contracted_stem)) {
        // Expand: "isn't" -> "is not", "I'm" -> "I am".
        std::string first = MatchCase(a.text, c.first);
        if (c.first == "i") first = "I";
        out->push_back(ReplaceSpan(s, a.begin, b.end,
                                   first + " " + std::string(c.second)));
      } else if (b.begin == a.end + 1 && s[a.end] == ' ' && la == c.first &&
                 lb == c.second) {
        // Contract: "is not" -> "isn't".
        std::string stem = MatchCase(a.text, c.contracted_stem);
        out->push_back(ReplaceSpan(s, a.begin, b.end,
                                   stem + std::string(c.contracted_clitic)));
      }
    }
  }
}

void AddTimeAdverbFronting(std::string_view body, std::string_view punct,
                           std::vector<std::string>* out) {
  std::vector<Token> tokens = Tokenize(body);
  if (tokens.size() < 3) return;
  const Token& last = tokens.back();
  std::string lower = ToLower(last.text);
  if (std::find(std::begin(kTrailingTimeAdverbs), std::end(kTrailingTimeAdverbs),
                lower) == std::end(kTrailingTimeAdverbs)) {
    return;
  }
  std::string rest(Trim(body.substr(0, last.begin)));
  while (!rest.empty() && rest.back() == ',') rest.pop_back();
  rest = std::string(Trim(rest));
  if (rest.empty()) return;
  out->push_back(CapitalizeFirst(lower) + ", " + DecapitalizeStart(rest) +
                 std::string(punct));
}

}  // namespace

std::vector<std::string> MockRewrites(std::string_view sentence) {
  std::string s(Trim(sentence));
  std::vector<std::string> raw;
  if (s.empty()) return raw;
  std::vector<Token> tokens = Tokenize(s);
  auto [body, punct] = SplitFinalPunct(s);
  const std::string end_punct = punct.empty() ? "." : punct;

  AddTimeAdverbFronting(body, end_punct, &raw);
  AddSynonymSwaps(s, tokens, &raw);
  AddContractionToggles(s, tokens, &raw);
  for (std::string_view opener : kOpeners) {
    raw.push_back(std::string(opener) + DecapitalizeStart(s));
  }
  for (std::string_view frame : kFrames) {
    raw.push_back(std::string(frame) + DecapitalizeStart(s));
  }
  if (!body.empty()) raw.push_back(body + std::string(kSuffix) + end_punct);

  std::vector<std::string> out;
  std::set<std::string> seen{s};
  for (auto& r : raw) {
    if (seen.insert(r).second) out.push_back(std::move(r));
  }
  return out;
}

MockLanguageModel::MockLanguageModel(LmBackend backend,
                                     std::shared_ptr<const AnswerKey> key)
    : backend_(std::move(backend)), key_(std::move(key)) {
  if (backend_.kind != "mock") {
    throw ConfigError("MockLanguageModel needs a mock backend, got " +
                      backend_.kind);
  }
  if (backend_.mock_mode != "paraphrase" && !key_) {
    throw ConfigError("mock classifier " + backend_.name +
                      " needs an answer key");
  }
}

Completion MockLanguageModel::Complete(const CompletionRequest& request) {
  Completion c;
  c.prompt = request.prompt;
  c.backend = backend_.name;
  c.text = backend_.mock_mode == "paraphrase" ? Paraphrase(request)
                                              : Classify(request);
  return c;
}

std::string MockLanguageModel::Paraphrase(
    const CompletionRequest& request) const {
  std::vector<std::string> lines = SplitLines(request.prompt);
  std::string sentence;
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    if (!Trim(*it).empty()) {
      sentence = std::string(Trim(*it));
      break;
    }
  }
  std::size_t n = 5;
  static const std::regex kCount(R"((\d+) sentence)");
  std::smatch m;
  if (std::regex_search(request.prompt, m, kCount)) {
    n = std::min<std::size_t>(std::stoul(m[1].str()), 50);
  }

  Rng rng(DeriveSeed(backend_.mock_seed,
                     {"paraphrase", request.prompt,
                      std::to_string(request.draw)}));
  std::vector<std::string> pool = MockRewrites(sentence);
  for (std::size_t i = pool.size(); i > 1; --i) {
    std::swap(pool[i - 1], pool[rng.Uniform(i)]);
  }
  std::vector<std::size_t> drift_order(std::size(kDriftSentences));
  for (std::size_t i = 0; i < drift_order.size(); ++i) drift_order[i] = i;
  for (std::size_t i = drift_order.size(); i > 1; --i) {
    std::swap(drift_order[i - 1], drift_order[rng.Uniform(i)]);
  }

  std::vector<std::string> picked;
  std::size_t next_pool = 0;
  std::size_t next_drift = 0;
  while (picked.size() < n) {
    bool drift = rng.Uniform(6) == 0 || next_pool >= pool.size();
    if (drift) {
      if (next_drift >= drift_order.size()) break;
      picked.emplace_back(kDriftSentences[drift_order[next_drift++]]);
    } else {
      picked.push_back(pool[next_pool++]);
    }
  }

  const std::size_t style = rng.Uniform(4);
  const bool preamble = style != 3 && rng.Uniform(2) == 0;
  const bool quoted = rng.Uniform(4) == 0;
  std::string out;
  if (preamble) {
    out += "Here are " + std::to_string(picked.size()) +
           " sentences with the same meaning:\n\n";
  }
  for (std::size_t i = 0; i < picked.size(); ++i) {
    switch (style) {
      case 0: out += std::to_string(i + 1) + ". "; break;
      case 1: out += std::to_string(i + 1) + ") "; break;
      case 2: out += "- "; break;
      default: break;
    }
    out += quoted ? "\"" + picked[i] + "\"" : picked[i];
    out += '\n';
  }
  return out;
}

std::string MockLanguageModel::Classify(const CompletionRequest& request) const {
  std::optional<std::string> gold = key_->Lookup(request.prompt, request.item_id);
  if (!gold) return "I cannot decide.";
  const LabelSpace& space = key_->label_space();
  const auto& labels = space.labels();
  auto it = std::find(labels.begin(), labels.end(), *gold);
  if (it == labels.end()) return "I cannot decide.";
  const std::size_t gi = static_cast<std::size_t>(it - labels.begin());
  const std::size_t wrong = (gi + 1) % labels.size();

  std::size_t answer = gi;
  if (backend_.mock_mode == "flip") {
    answer = wrong;
  } else if (backend_.mock_mode == "accuracy") {
    Rng rng(DeriveSeed(backend_.mock_seed, {"classify", request.prompt}));
    if (!(rng.UniformReal() < backend_.mock_accuracy)) answer = wrong;
  }
  return CapitalizeFirst(space.verbalizers(labels[answer]).front()) + ".";
}

}  // namespace mstemp
