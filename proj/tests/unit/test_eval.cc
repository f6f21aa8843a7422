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

#include "doctest.h"
#include "gner/errors.h"
#include "gner/eval.h"
#include "support/fixtures.h"

namespace gner {
namespace {

using testing::FromCompact;

TEST_CASE("identical prediction scores 100") {
  const Corpus gold = FromCompact("EU B-ORG|rejects O|German B-MISC|call O#Peter B-PER|Blackburn I-PER");
  const EvalReport r = Evaluate(GoldTags(gold), gold);
  CHECK(r.overall.precision == 100.0);
  CHECK(r.overall.recall == 100.0);
  CHECK(r.f1() == 100.0);
  CHECK(r.token_accuracy == 100.0);
  CHECK(r.per_type.at("PER").f1 == 100.0);
  CHECK(r.per_type.at("LOC").gold == 0);
  CHECK(r.per_type.at("LOC").f1 == 0.0);
}

TEST_CASE("one of two entities correct scores 50") {
  const Corpus gold = FromCompact("a B-PER|b O|c B-LOC");
  const Corpus pred = FromCompact("a B-PER|b B-ORG|c O");
  const EvalReport r = Evaluate(pred, gold);
  CHECK(r.overall.gold == 2);
  CHECK(r.overall.predicted == 2);
  CHECK(r.overall.correct == 1);
  CHECK(r.overall.precision == 50.0);
  CHECK(r.overall.recall == 50.0);
  CHECK(r.f1() == 50.0);
  CHECK(r.token_accuracy == doctest::Approx(100.0 / 3.0));
}

TEST_CASE("a boundary error is both a false positive and a false negative") {
  const Corpus gold = FromCompact("New B-LOC|York I-LOC|City I-LOC|is O");
  const Corpus pred = FromCompact("New B-LOC|York I-LOC|City O|is O");
  const EvalReport r = Evaluate(pred, gold);
  CHECK(r.overall.correct == 0);
  CHECK(r.overall.predicted == 1);
  CHECK(r.overall.gold == 1);
  CHECK(r.f1() == 0.0);
}

TEST_CASE("f1 is the harmonic mean") {
  const Corpus gold = FromCompact("a B-PER|b O|c B-LOC|d O|e B-ORG");
  const Corpus pred = FromCompact("a B-PER|b B-PER|c O|d O|e O");
  const EvalReport r = Evaluate(pred, gold);
  const double p = r.overall.precision;
  const double rc = r.overall.recall;
  CHECK(p == 50.0);
  CHECK(rc == doctest::Approx(100.0 / 3.0));
  CHECK(r.f1() == doctest::Approx(2 * p * rc / (p + rc)));
  // No predictions: P = R = 0 and F1 falls back to 0.
  const EvalReport empty = Evaluate(FromCompact("a O|b O"), FromCompact("a B-PER|b O"));
  CHECK(empty.overall.precision == 0.0);
  CHECK(empty.f1() == 0.0);
}

TEST_CASE("sentence filter restricts the scored subset") {
  const Corpus gold = FromCompact("a B-PER;b B-LOC");
  const Corpus pred = FromCompact("a B-PER;b O");
  const EvalReport first = Evaluate(GoldTags(pred), gold,
                                    [](std::size_t, std::size_t s) { return s == 0; });
  CHECK(first.f1() == 100.0);
  CHECK(first.tokens == 1);
  const EvalReport second = Evaluate(GoldTags(pred), gold,
                                     [](std::size_t, std::size_t s) { return s == 1; });
  CHECK(second.f1() == 0.0);
}

TEST_CASE("misaligned predictions are rejected") {
  const Corpus gold = FromCompact("a O|b O;c O");
  TagTable pred = GoldTags(gold);
  pred[0][0].pop_back();
  CHECK_THROWS_AS(Evaluate(pred, gold), ArgumentError);
  pred = GoldTags(gold);
  pred[0].pop_back();
  CHECK_THROWS_AS(Evaluate(pred, gold), ArgumentError);
  pred = GoldTags(gold);
  pred.emplace_back();
  CHECK_THROWS_AS(Evaluate(pred, gold), ArgumentError);
  CHECK_THROWS_AS(Evaluate(FromCompact("a O|x O;c O"), gold), ArgumentError);
}

TEST_CASE("majority vote relabels to the majority label") {
  const Corpus c = FromCompact("Bank B-ORG;the O|Bank B-ORG;Bank B-PER");
  const TagTable out = MajorityVotePropagate(c, GoldTags(c), PropagationLevel::kDocument);
  const int org = c.tag_set.Id("B-ORG");
  CHECK(out[0][0][0] == org);
  CHECK(out[0][1][1] == org);
  CHECK(out[0][2][0] == org);
  CHECK(out[0][1][0] == TagScheme::kOutside);
}

TEST_CASE("majority vote ties keep the original labels") {
  const Corpus c = FromCompact("Jordan B-PER;Jordan B-LOC");
  const TagTable gold = GoldTags(c);
  CHECK(MajorityVotePropagate(c, gold, PropagationLevel::kDocument) == gold);
}

TEST_CASE("document scope and corpus scope differ") {
  const Corpus c = FromCompact("Jordan B-PER;Jordan B-PER#Jordan B-LOC");
  const TagTable gold = GoldTags(c);
  CHECK(MajorityVotePropagate(c, gold, PropagationLevel::kDocument) == gold);
  const TagTable corpus_level = MajorityVotePropagate(c, gold, PropagationLevel::kCorpus);
  CHECK(corpus_level[1][0][0] == c.tag_set.Id("B-PER"));
  CHECK(Evaluate(corpus_level, c).f1() < 100.0);
}

TEST_CASE("majority vote is idempotent") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::string spec;
    for (int d = 0; d < 3; ++d) {
      if (d > 0) spec += '#';
      for (int s = 0; s < 4; ++s) {
        if (s > 0) spec += ';';
        for (int t = 0; t < 4; ++t) {
          if (t > 0) spec += '|';
          spec += "w" + std::to_string(rng.Index(3)) + " O";
        }
      }
    }
    const Corpus c = FromCompact(spec);
    TagTable pred = GoldTags(c);
    for (auto& doc : pred)
      for (auto& sent : doc)
        for (int& tag : sent) tag = static_cast<int>(rng.Index(9));
    for (PropagationLevel level : {PropagationLevel::kDocument, PropagationLevel::kCorpus}) {
      const TagTable once = MajorityVotePropagate(c, pred, level);
      CHECK(MajorityVotePropagate(c, once, level) == once);
    }
  }
}

TEST_CASE("report serialization") {
  const Corpus gold = FromCompact("a B-PER|b O|c B-LOC");
  const Corpus pred = FromCompact("a B-PER|b B-ORG|c O");
  const EvalReport r = Evaluate(pred, gold);
  const nlohmann::json j = r.ToJson();
  CHECK(j["overall"]["f1"].get<double>() == 50.0);
  CHECK(j["per_type"]["PER"]["correct"].get<int>() == 1);
  CHECK(j["tokens"].get<int>() == 3);
  const std::string text = r.ToConllevalText();
  CHECK(text.find("processed 3 tokens with 2 phrases; found: 2 phrases; correct: 1.") !=
        std::string::npos);
  CHECK(text.find("FB1:  50.00") != std::string::npos);
  CHECK(text.find("              PER: precision: 100.00%") != std::string::npos);
}

}  // namespace
}  // namespace gner
