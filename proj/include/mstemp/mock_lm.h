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

// Offline stand-in for both model roles. Every reply is a pure function of
// (mock_seed, prompt, draw).
//
// Paraphrase mode reads the sentence from the last non-empty prompt line and
// n from the first "<digits> sentence" in the prompt (default 5), then
// answers with up to n distinct single-edit rewrites drawn from a bundled
// table: synonym swaps, fronting a trailing time adverb, discourse openers,
// opinion frames and contraction toggles. About one candidate in six is an
// unrelated "drift" sentence, which a semantic filter should reject.
//
// Classifier modes answer with the capitalized first verbalizer of a label
// followed by ".". The gold label comes from the AnswerKey; a prompt that
// was never registered gets "I cannot decide."

#ifndef MSTEMP_MOCK_LM_H_
#define MSTEMP_MOCK_LM_H_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mstemp/lm_client.h"

namespace mstemp {

class MockLanguageModel : public LanguageModel {
 public:
  MockLanguageModel(LmBackend backend, std::shared_ptr<const AnswerKey> key);

  Completion Complete(const CompletionRequest& request) override;
  const LmBackend& backend() const override { return backend_; }

 private:
  std::string Paraphrase(const CompletionRequest& request) const;
  std::string Classify(const CompletionRequest& request) const;

  LmBackend backend_;
  std::shared_ptr<const AnswerKey> key_;
};

// All single-edit rewrites the mock paraphraser knows for `sentence`, in a
// fixed order, excluding the sentence itself and duplicates.
std::vector<std::string> MockRewrites(std::string_view sentence);

}  // namespace mstemp

#endif  // MSTEMP_MOCK_LM_H_
