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

#include "gner/lstm.h"

#include "gner/errors.h"

namespace gner {

Lstm::Lstm(const std::string& prefix, int input_dim, int hidden)
    : input_dim_(input_dim),
      hidden_(hidden),
      w_input_(prefix + "/w_input", input_dim, 4 * hidden),
      w_hidden_(prefix + "/w_hidden", hidden, 4 * hidden),
      bias_(prefix + "/bias", 1, 4 * hidden) {}

void Lstm::Init(Rng& rng) {
  XavierUniform(w_input_.value, rng);
  XavierUniform(w_hidden_.value, rng);
  bias_.value.setZero();
  bias_.value.middleCols(hidden_, hidden_).setOnes();
}

Var Lstm::Forward(Var inputs, bool reverse) {
  if (inputs.cols() != input_dim_) {
    throw DimensionError("lstm: input " + ShapeString(inputs.value()) +
                         " vs expected width " + std::to_string(input_dim_));
  }
  Tape& tape = *inputs.tape;
  const Eigen::Index n = inputs.rows();
  const Eigen::Index h = hidden_;
  Var projected = AddRow(MatMul(inputs, tape.Param(w_input_)), tape.Param(bias_));
  Var w_hidden = tape.Param(w_hidden_);

  Var state = tape.Constant(Matrix::Zero(1, h));
  Var cell = tape.Constant(Matrix::Zero(1, h));
  std::vector<Var> outputs(static_cast<std::size_t>(n));
  for (Eigen::Index step = 0; step < n; ++step) {
    const Eigen::Index i = reverse ? n - 1 - step : step;
    Var z = Add(SliceRows(projected, i, 1), MatMul(state, w_hidden));
    Var in_gate = Sigmoid(SliceCols(z, 0, h));
    Var forget = Sigmoid(SliceCols(z, h, h));
    Var candidate = Tanh(SliceCols(z, 2 * h, h));
    Var out_gate = Sigmoid(SliceCols(z, 3 * h, h));
    cell = Add(Mul(forget, cell), Mul(in_gate, candidate));
    state = Mul(out_gate, Tanh(cell));
    outputs[static_cast<std::size_t>(i)] = state;
  }
  return ConcatRows(outputs);
}

BiLstm::BiLstm(const std::string& prefix, int input_dim, int hidden)
    : forward_(prefix + "/fw", input_dim, hidden),
      backward_(prefix + "/bw", input_dim, hidden) {}

void BiLstm::Init(Rng& rng) {
  forward_.Init(rng);
  backward_.Init(rng);
}

Var BiLstm::Forward(Var inputs) {
  return ConcatCols({forward_.Forward(inputs, false), backward_.Forward(inputs, true)});
}

std::vector<Parameter*> BiLstm::params() {
  std::vector<Parameter*> out = forward_.params();
  for (Parameter* p : backward_.params()) out.push_back(p);
  return out;
}

}  // namespace gner
