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
#include "gner/tagger.h"
#include "support/fixtures.h"
#include "support/gradcheck.h"

namespace gner {
namespace {

using testing::FromCompact;
using testing::TinyModel;

struct Fixture {
  Corpus corpus = FromCompact("EU B-ORG|rejects O|German B-MISC;Peter B-PER|call O");
  ModelConfig config = TinyModel();
  Tagger tagger{config, corpus.tag_set, corpus.word_vocab.size(), corpus.char_vocab.size()};
  Rng rng{5};

  Fixture() { tagger.Init(rng); }

  const Sentence& sentence() const { return corpus.sentence(0, 0); }
  std::vector<int> gold() const {
    std::vector<int> g;
    for (const Token& t : sentence().tokens) g.push_back(t.gold_tag);
    return g;
  }
  Matrix Emissions(const SentenceEvidence& ev = {}) {
    Tape tape(false);
    const Var local = tape.Constant(tagger.encoder().EncodeConstant(sentence()));
    return tagger.Forward(local, ev).emissions.value();
  }
};

TEST_CASE("mode names round-trip") {
  for (Mode m : {Mode::kBaseline, Mode::kDocument, Mode::kCorpus, Mode::kBoth}) {
    CHECK(ParseMode(ModeName(m)) == m);
  }
  CHECK(ParseMode("+doc") == Mode::kDocument);
  CHECK(ParseMode("document") == Mode::kDocument);
  CHECK_THROWS_AS(ParseMode("everything"), ArgumentError);
  CHECK(UsesDocumentLevel(Mode::kBoth));
  CHECK(!UsesCorpusLevel(Mode::kDocument));
}

TEST_CASE("emissions have one row per token and one column per tag") {
  Fixture f;
  const Matrix e = f.Emissions();
  CHECK(e.rows() == 3);
  CHECK(e.cols() == 9);
  CHECK(f.tagger.Decode(SentenceOutput{Tape(false).Constant(e), {}, {}}).size() == 3);
}

TEST_CASE("attaching attention creates the requested levels only") {
  Fixture f;
  const std::size_t base = f.tagger.params().size();
  f.tagger.AttachAttention(Mode::kBaseline, f.rng);
  CHECK(f.tagger.params().size() == base);
  f.tagger.AttachAttention(Mode::kDocument, f.rng);
  CHECK(f.tagger.has_document_level());
  CHECK(!f.tagger.has_corpus_level());
  const std::size_t with_doc = f.tagger.params().size();
  CHECK(with_doc == base + 13);
  f.tagger.AttachAttention(Mode::kBoth, f.rng);
  CHECK(f.tagger.params().size() == with_doc + 13);
  for (Parameter* p : f.tagger.doc_level()->params()) CHECK(p->name.rfind("doc", 0) == 0);
}

TEST_CASE("baseline ignores the upper weights reading the attention slots") {
  Fixture f;
  const Matrix before = f.Emissions();
  for (Lstm* l : {&f.tagger.upper().forward_lstm(), &f.tagger.upper().backward_lstm()}) {
    Matrix& w = l->params()[0]->value;
    w.bottomRows(2 * f.tagger.dim()).array() += 3.0;
  }
  CHECK((f.Emissions() - before).norm() == 0.0);
}

TEST_CASE("without evidence the attention and evidence-side gate weights are inert") {
  Fixture f;
  f.tagger.AttachAttention(Mode::kBoth, f.rng);
  const Matrix before = f.Emissions();
  for (GatedAttention* level : {f.tagger.doc_level(), f.tagger.corpus_level()}) {
    AttentionParams& a = level->attention();
    GateParams& g = level->gate();
    for (Parameter* p : {&a.w_query, &a.w_evidence, &a.bias, &a.v, &g.w_evidence_r,
                         &g.w_evidence_z, &g.w_evidence_g}) {
      p->value.array() += 0.7;
    }
  }
  CHECK((f.Emissions() - before).norm() == 0.0);
  // The local-side weights do matter.
  f.tagger.doc_level()->gate().w_local_g.value.array() += 0.7;
  CHECK((f.Emissions() - before).norm() > 0.0);
}

TEST_CASE("evidence changes the emissions of its token") {
  Fixture f;
  f.tagger.AttachAttention(Mode::kDocument, f.rng);
  const Matrix before = f.Emissions();
  Tape tape(false);
  Matrix ev(2, f.tagger.dim());
  testing::FillUniform(ev, f.rng);
  SentenceEvidence evidence;
  evidence.doc = {Var{}, tape.Constant(ev), Var{}};
  Tape t2(false);
  const Var local = t2.Constant(f.tagger.encoder().EncodeConstant(f.sentence()));
  const SentenceOutput out = f.tagger.Forward(local, evidence);
  CHECK((out.emissions.value() - before).norm() > 0.0);
  REQUIRE(out.doc_alphas.size() == 3);
  CHECK(out.doc_alphas[0].empty());
  CHECK(out.doc_alphas[1].size() == 2);
  CHECK(out.doc_alphas[1][0] + out.doc_alphas[1][1] == doctest::Approx(1.0));
  CHECK(out.corpus_alphas.empty());
}

TEST_CASE("evidence count must match the sentence length") {
  Fixture f;
  f.tagger.AttachAttention(Mode::kDocument, f.rng);
  Tape tape(false);
  const Var local = tape.Constant(f.tagger.encoder().EncodeConstant(f.sentence()));
  SentenceEvidence evidence;
  evidence.doc = {Var{}, Var{}};
  CHECK_THROWS_AS(f.tagger.Forward(local, evidence), DimensionError);
  CHECK_THROWS_AS(f.tagger.Forward(tape.Constant(Matrix::Zero(3, 5)), {}), DimensionError);
}

TEST_CASE("full model gradients match finite differences") {
  for (int seed = 0; seed < 10; ++seed) {
    Fixture f;
    Rng rng(900 + static_cast<std::uint64_t>(seed));
    f.tagger.AttachAttention(Mode::kBoth, rng);
    for (Parameter* p : f.tagger.params()) testing::FillUniform(p->value, rng, -0.5, 0.5);
    Matrix doc_ev(2, f.tagger.dim()), corpus_ev(1, f.tagger.dim());
    testing::FillUniform(doc_ev, rng);
    testing::FillUniform(corpus_ev, rng);
    const std::vector<int> gold = f.gold();
    const bool train = seed % 2 == 0;
    const auto r = testing::CheckGradients(
        [&](Tape& t) {
          Rng dropout(static_cast<std::uint64_t>(seed));
          const Var local = f.tagger.encoder().Encode(t, f.sentence(), train, dropout);
          SentenceEvidence ev;
          ev.doc = {t.Constant(doc_ev), Var{}, t.Constant(doc_ev.topRows(1))};
          ev.corpus = {Var{}, t.Constant(corpus_ev), t.Constant(corpus_ev)};
          return f.tagger.Loss(f.tagger.Forward(local, ev), gold);
        },
        f.tagger.params());
    INFO(r.worst);
    CHECK(r.ok);
  }
}

TEST_CASE("bio mask yields legal sequences") {
  Fixture f;
  f.config.bio_mask = true;
  Tagger masked(f.config, f.corpus.tag_set, f.corpus.word_vocab.size(),
                f.corpus.char_vocab.size());
  Rng rng(3);
  masked.Init(rng);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix e(6, 9);
    testing::FillUniform(e, rng, -3.0, 3.0);
    Tape tape(false);
    const std::vector<int> tags = masked.Decode(SentenceOutput{tape.Constant(e), {}, {}});
    int prev = f.corpus.tag_set.start_id();
    for (int t : tags) {
      CHECK(f.corpus.tag_set.Allowed(prev, t));
      prev = t;
    }
  }
}

TEST_CASE("config validation") {
  ModelConfig c = TinyModel();
  c.attention_dim = 0;
  CHECK_THROWS_AS(c.Validate(), ArgumentError);
  c = TinyModel();
  c.upper_hidden = -1;
  CHECK_THROWS_AS(c.Validate(), ArgumentError);
}

}  // namespace
}  // namespace gner
