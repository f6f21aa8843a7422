// Copyright 2026 The gner Authors.
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

// Entity-level scoring with conlleval semantics and the majority-vote label
// propagation baseline.

#ifndef GNER_EVAL_H_
#define GNER_EVAL_H_

#include <functional>
#include <map>
#include <string>

#include "json.hpp"

#include "gner/corpus.h"

namespace gner {

struct Scores {
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t correct = 0;
  // Percentages.
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  void Finalize();
};

struct EvalReport {
  Scores overall;
  std::map<std::string, Scores> per_type;
  std::size_t tokens = 0;
  std::size_t correct_tokens = 0;
  double token_accuracy = 0.0;  // percentage

  double f1() const { return overall.f1; }
  nlohmann::json ToJson() const;
  // Summary in the layout of the conlleval script.
  std::string ToConllevalText() const;
};

// Restricts scoring to sentences for which the filter returns true.
using SentenceFilter = std::function<bool(std::size_t doc, std::size_t sent)>;

// An entity is correct iff its span and type match a gold entity exactly.
// Throws ArgumentError when `pred` is not aligned with `gold`.
EvalReport Evaluate(const TagTable& pred, const Corpus& gold,
                    const SentenceFilter& filter = nullptr);
// Also requires identical surfaces.
EvalReport Evaluate(const Corpus& pred, const Corpus& gold);

enum class PropagationLevel { kDocument, kCorpus };

// Within each scope, every occurrence of a surface gets the label held by
// the most of its occurrences; a tie for the top count leaves them unchanged.
TagTable MajorityVotePropagate(const Corpus& corpus, const TagTable& pred,
                               PropagationLevel level);

}  // namespace gner

#endif  // GNER_EVAL_H_
