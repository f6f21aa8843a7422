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

#include <algorithm>

#include "doctest.h"
#include "gner/encoder.h"
#include "gner/errors.h"
#include "gner/lstm.h"
#include "support/fixtures.h"
#include "support/gradcheck.h"

namespace gner {
namespace {

using testing::FromCompact;
using testing::TinyEncoder;

void CopyParams(Lstm& from, Lstm& to) {
  auto src = from.params();
  auto dst = to.params();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i]->value = src[i]->value;
}

TEST_CASE("default encoder dimensions") {
  const EncoderConfig c;
  CHECK(c.char_feature_dim() == 75);
  CHECK(c.output_dim() == 200);
}

TEST_CASE("sentence of n tokens encodes to n rows of width 2 * hidden") {
  Corpus corpus = FromCompact("EU B-ORG|rejects O|German B-MISC|call O");
  EncoderConfig config;
  Encoder enc(config, corpus.word_vocab.size(), corpus.char_vocab.size());
  Rng rng(1);
  enc.Init(rng);
  const Matrix h = enc.EncodeConstant(corpus.sentence(0, 0));
  CHECK(h.rows() == 4);
  CHECK(h.cols() == 200);
}

TEST_CASE("one-character tokens get a full char feature vector") {
  Corpus corpus = FromCompact("a O|bb O|a O");
  EncoderConfig config;
  Encoder enc(config, corpus.word_vocab.size(), corpus.char_vocab.size());
  Rng rng(2);
  enc.Init(rng);
  Tape tape(false);
  const Sentence& s = corpus.sentence(0, 0);
  const Matrix a = enc.CharFeatures(tape, s.tokens[0]).value();
  const Matrix b = enc.CharFeatures(tape, s.tokens[1]).value();
  const Matrix a2 = enc.CharFeatures(tape, s.tokens[2]).value();
  CHECK(a.rows() == 1);
  CHECK(a.cols() == 75);
  CHECK(a == a2);
  CHECK(a != b);
}

TEST_CASE("eval-mode encoding is deterministic") {
  Corpus corpus = FromCompact("Peter B-PER|Blackburn I-PER|spoke O");
  Encoder enc(TinyEncoder(), corpus.word_vocab.size(), corpus.char_vocab.size());
  Rng rng(3);
  enc.Init(rng);
  const Matrix a = enc.EncodeConstant(corpus.sentence(0, 0));
  Rng other(99);
  Tape tape(false);
  const Matrix b = enc.Encode(tape, corpus.sentence(0, 0), false, other).value();
  CHECK(a == b);
}

TEST_CASE("weight-tied Bi-LSTM mirrors its outputs on reversed input") {
  Corpus corpus = FromCompact("a O|bc O|def O|gh O;gh O|def O|bc O|a O;x O|yz O|yz O|x O");
  EncoderConfig config = TinyEncoder();
  config.lstm_hidden = 3;
  Encoder enc(config, corpus.word_vocab.size(), corpus.char_vocab.size());
  Rng rng(4);
  enc.Init(rng);
  CopyParams(enc.lstm().forward_lstm(), enc.lstm().backward_lstm());
  const Eigen::Index h = 3;

  const Matrix fwd = enc.EncodeConstant(corpus.sentence(0, 0));
  const Matrix rev = enc.EncodeConstant(corpus.sentence(0, 1));
  const Eigen::Index n = fwd.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    CHECK((fwd.row(i).head(h) - rev.row(n - 1 - i).tail(h)).norm() <= 1e-12);
    CHECK((fwd.row(i).tail(h) - rev.row(n - 1 - i).head(h)).norm() <= 1e-12);
  }
  const Matrix pal = enc.EncodeConstant(corpus.sentence(0, 2));
  for (Eigen::Index i = 0; i < pal.rows(); ++i) {
    CHECK((pal.row(i).head(h) - pal.row(pal.rows() - 1 - i).tail(h)).norm() <= 1e-12);
  }
}

TEST_CASE("every token's representation depends on every other token") {
  Corpus corpus = FromCompact("w1 O|w2 O|w3 O|w4 O|w5 O");
  Encoder enc(TinyEncoder(), corpus.word_vocab.size(), corpus.char_vocab.size());
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    enc.Init(rng);
    const Sentence& s = corpus.sentence(0, 0);
    const Matrix base = enc.EncodeConstant(s);
    for (std::size_t other = 0; other < s.tokens.size(); ++other) {
      Parameter& table = enc.word_embedding();
      const int row = s.tokens[other].word_id;
      const Eigen::RowVectorXd saved = table.value.row(row);
      table.value.row(row).array() += 0.1;
      const Matrix moved = enc.EncodeConstant(s);
      table.value.row(row) = saved;
      for (Eigen::Index i = 0; i < base.rows(); ++i) {
        CHECK((moved.row(i) - base.row(i)).norm() > 0.0);
      }
    }
  }
}

TEST_CASE("encoder gradients match finite differences") {
  Corpus corpus = FromCompact("ab O|c O|ab O|defg O;xyz O|q O");
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(700 + static_cast<std::uint64_t>(seed));
    EncoderConfig config = TinyEncoder();
    config.lstm_hidden = 1 + static_cast<int>(rng.Index(6));
    Encoder enc(config, corpus.word_vocab.size(), corpus.char_vocab.size());
    enc.Init(rng);
    // Random biases so no gradient vanishes by construction.
    for (Parameter* p : enc.params()) testing::FillUniform(p->value, rng, -0.5, 0.5);
    const Sentence& s = corpus.sentence(0, seed % 2);
    Matrix weights(static_cast<Eigen::Index>(s.tokens.size()), config.output_dim());
    testing::FillUniform(weights, rng);
    const bool train = seed % 3 == 0;
    const auto r = testing::CheckGradients(
        [&](Tape& t) {
          Rng dropout_rng(static_cast<std::uint64_t>(seed));
          Var h = enc.Encode(t, s, train, dropout_rng);
          return Sum(Mul(Tanh(h), t.Constant(weights)));
        },
        enc.params());
    INFO(r.worst);
    CHECK(r.ok);
  }
}

TEST_CASE("config validation") {
  EncoderConfig c;
  c.char_widths = {};
  CHECK_THROWS_AS(c.Validate(), ArgumentError);
  c = EncoderConfig();
  c.lstm_hidden = 0;
  CHECK_THROWS_AS(c.Validate(), ArgumentError);
  c = EncoderConfig();
  c.dropout = 1.0;
  CHECK_THROWS_AS(c.Validate(), ArgumentError);
}

TEST_CASE("lstm initialization sets the forget bias to one") {
  Lstm lstm("l", 3, 4);
  Rng rng(1);
  lstm.Init(rng);
  const Matrix& b = lstm.params()[2]->value;
  CHECK(b.middleCols(0, 4).isZero(0.0));
  CHECK(b.middleCols(4, 4).isOnes(0.0));
  CHECK(b.middleCols(8, 8).isZero(0.0));
}

}  // namespace
}  // namespace gner
