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

#ifndef GNER_LSTM_H_
#define GNER_LSTM_H_

#include <string>
#include <vector>

#include "gner/tensor.h"

namespace gner {

// Single-direction LSTM. Gate blocks in the fused weights are ordered
// input, forget, candidate, output.
class Lstm {
 public:
  Lstm(const std::string& prefix, int input_dim, int hidden);

  // Xavier-uniform weights, zero biases except forget gate = 1.
  void Init(Rng& rng);

  // inputs: n x input_dim -> n x hidden, row i aligned with input row i.
  Var Forward(Var inputs, bool reverse);

  int hidden() const { return hidden_; }
  int input_dim() const { return input_dim_; }
  std::vector<Parameter*> params() { return {&w_input_, &w_hidden_, &bias_}; }

 private:
  int input_dim_;
  int hidden_;
  Parameter w_input_;
  Parameter w_hidden_;
  Parameter bias_;
};

// Forward and backward LSTMs; output row i is [fw_i, bw_i].
class BiLstm {
 public:
  BiLstm(const std::string& prefix, int input_dim, int hidden);

  void Init(Rng& rng);
  Var Forward(Var inputs);

  int output_dim() const { return 2 * forward_.hidden(); }
  std::vector<Parameter*> params();
  Lstm& forward_lstm() { return forward_; }
  Lstm& backward_lstm() { return backward_; }

 private:
  Lstm forward_;
  Lstm backward_;
};

}  // namespace gner

#endif  // GNER_LSTM_H_
