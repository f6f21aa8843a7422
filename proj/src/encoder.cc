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

#include "gner/encoder.h"

#include <algorithm>
#include <cmath>

#include "gner/errors.h"

namespace gner {

int EncoderConfig::max_width() const {
  return char_widths.empty() ? 0 : *std::max_element(char_widths.begin(), char_widths.end());
}

void EncoderConfig::Validate() const {
  if (word_dim <= 0 || char_dim <= 0 || char_filters <= 0 || lstm_hidden <= 0 ||
      char_widths.empty()) {
    throw ArgumentError("encoder: all dimensions must be positive");
  }
  for (int w : char_widths) {
    if (w <= 0) throw ArgumentError("encoder: char widths must be positive");
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    throw ArgumentError("encoder: dropout must lie in [0, 1)");
  }
}

Encoder::Encoder(const EncoderConfig& config, int word_vocab_size, int char_vocab_size)
    : config_(config),
      word_embedding_("encoder/word_embedding", word_vocab_size, config.word_dim),
      char_embedding_("encoder/char_embedding", char_vocab_size, config.char_dim),
      lstm_("encoder/lstm", config.word_dim + config.char_feature_dim(),
            config.lstm_hidden) {
  config_.Validate();
  for (int w : config_.char_widths) {
    const std::string name = "encoder/char_conv" + std::to_string(w);
    conv_weights_.emplace_back(name + "/weight", w * config_.char_dim,
                               config_.char_filters);
    conv_biases_.emplace_back(name + "/bias", 1, config_.char_filters);
  }
}

void Encoder::Init(Rng& rng, const Matrix* pretrained) {
  if (pretrained != nullptr) {
    if (pretrained->rows() != word_embedding_.value.rows() ||
        pretrained->cols() != word_embedding_.value.cols()) {
      throw DimensionError("encoder: pretrained table " + ShapeString(*pretrained) +
                           " vs " + ShapeString(word_embedding_.value));
    }
    word_embedding_.value = *pretrained;
  } else {
    const double bound = std::sqrt(3.0 / config_.word_dim);
    for (Eigen::Index i = 0; i < word_embedding_.value.size(); ++i) {
      word_embedding_.value.data()[i] = rng.Uniform(-bound, bound);
    }
  }
  const double bound = std::sqrt(3.0 / config_.char_dim);
  for (Eigen::Index i = 0; i < char_embedding_.value.size(); ++i) {
    char_embedding_.value.data()[i] = rng.Uniform(-bound, bound);
  }
  for (Parameter& w : conv_weights_) XavierUniform(w.value, rng);
  for (Parameter& b : conv_biases_) b.value.setZero();
  lstm_.Init(rng);
}

Var Encoder::CharFeatures(Tape& tape, const Token& token) {
  std::vector<int> ids = token.char_ids;
  if (ids.empty()) ids.push_back(kUnkChar);
  const std::size_t width = static_cast<std::size_t>(config_.max_width());
  if (ids.size() < width) ids.resize(width, kPadChar);
  Var chars = Lookup(tape, char_embedding_, ids);
  std::vector<Var> pooled;
  for (std::size_t k = 0; k < config_.char_widths.size(); ++k) {
    Var windows = UnfoldRows(chars, config_.char_widths[k]);
    Var conv = AddRow(MatMul(windows, tape.Param(conv_weights_[k])),
                      tape.Param(conv_biases_[k]));
    pooled.push_back(MaxRows(conv));
  }
  return ConcatCols(pooled);
}

Var Encoder::Encode(Tape& tape, const Sentence& sentence, bool train, Rng& rng) {
  std::vector<int> word_ids;
  std::vector<Var> char_rows;
  for (const Token& t : sentence.tokens) {
    word_ids.push_back(t.word_id);
    char_rows.push_back(CharFeatures(tape, t));
  }
  Var words = Lookup(tape, word_embedding_, word_ids);
  Var inputs = ConcatCols({words, ConcatRows(char_rows)});
  if (config_.dropout_input) inputs = Dropout(inputs, config_.dropout, train, rng);
  Var out = lstm_.Forward(inputs);
  if (config_.dropout_output) out = Dropout(out, config_.dropout, train, rng);
  return out;
}

Matrix Encoder::EncodeConstant(const Sentence& sentence) {
  Tape tape(/*record=*/false);
  Rng unused(0);
  return Encode(tape, sentence, /*train=*/false, unused).value();
}

std::vector<Parameter*> Encoder::params() {
  std::vector<Parameter*> out = {&word_embedding_, &char_embedding_};
  for (std::size_t k = 0; k < conv_weights_.size(); ++k) {
    out.push_back(&conv_weights_[k]);
    out.push_back(&conv_biases_[k]);
  }
  for (Parameter* p : lstm_.params()) out.push_back(p);
  return out;
}

}  // namespace gner
