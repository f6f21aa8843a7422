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

// Local contextual representations: word embedding concatenated with a
// character CNN feature, run through the lower Bi-LSTM.

#ifndef GNER_ENCODER_H_
#define GNER_ENCODER_H_

#include <vector>

#include "gner/corpus.h"
#include "gner/lstm.h"
#include "gner/tensor.h"

namespace gner {

struct EncoderConfig {
  int word_dim = 100;
  int char_dim = 25;
  int char_filters = 25;
  std::vector<int> char_widths = {2, 3, 4};
  int lstm_hidden = 100;
  double dropout = 0.5;
  // Where the lower Bi-LSTM dropout is applied.
  bool dropout_input = true;
  bool dropout_output = true;

  int char_feature_dim() const {
    return char_filters * static_cast<int>(char_widths.size());
  }
  int output_dim() const { return 2 * lstm_hidden; }
  int max_width() const;
  // Throws ArgumentError on non-positive sizes.
  void Validate() const;
};

class Encoder {
 public:
  Encoder(const EncoderConfig& config, int word_vocab_size, int char_vocab_size);

  // `pretrained`, when given, must be word_vocab_size x word_dim.
  void Init(Rng& rng, const Matrix* pretrained = nullptr);

  // 1 x char_feature_dim: per width, convolution over char embeddings and
  // max over positions. Tokens shorter than the widest filter are right
  // padded with the PAD char.
  Var CharFeatures(Tape& tape, const Token& token);

  // n x output_dim for an n-token sentence.
  Var Encode(Tape& tape, const Sentence& sentence, bool train, Rng& rng);

  // Eval-mode encoding on a throwaway tape.
  Matrix EncodeConstant(const Sentence& sentence);

  const EncoderConfig& config() const { return config_; }
  std::vector<Parameter*> params();
  Parameter& word_embedding() { return word_embedding_; }
  Parameter& char_embedding() { return char_embedding_; }
  BiLstm& lstm() { return lstm_; }

 private:
  EncoderConfig config_;
  Parameter word_embedding_;
  Parameter char_embedding_;
  std::vector<Parameter> conv_weights_;
  std::vector<Parameter> conv_biases_;
  BiLstm lstm_;
};

}  // namespace gner

#endif  // GNER_ENCODER_H_
