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

#include "gner/attention.h"

#include "gner/errors.h"

namespace gner {

AttentionParams::AttentionParams(const std::string& prefix, int dim, int attention_dim)
    : w_query(prefix + "/w_query", dim, attention_dim),
      w_evidence(prefix + "/w_evidence", dim, attention_dim),
      bias(prefix + "/bias", 1, attention_dim),
      v(prefix + "/v", attention_dim, 1) {}

GateParams::GateParams(const std::string& prefix, int dim)
    : w_evidence_r(prefix + "/w_evidence_r", dim, dim),
      w_local_r(prefix + "/w_local_r", dim, dim),
      b_r(prefix + "/b_r", 1, dim),
      w_evidence_z(prefix + "/w_evidence_z", dim, dim),
      w_local_z(prefix + "/w_local_z", dim, dim),
      b_z(prefix + "/b_z", 1, dim),
      w_local_g(prefix + "/w_local_g", dim, dim),
      w_evidence_g(prefix + "/w_evidence_g", dim, dim),
      b_g(prefix + "/b_g", 1, dim) {}

GatedAttention::GatedAttention(const std::string& prefix, int dim, int attention_dim)
    : dim_(dim),
      attention_(prefix + "/attention", dim, attention_dim),
      gate_(prefix + "/gate", dim) {}

void GatedAttention::Init(Rng& rng) {
  for (Parameter* p : params()) XavierUniform(p->value, rng);
  for (Parameter* b : {&attention_.bias, &gate_.b_r, &gate_.b_z, &gate_.b_g}) {
    b->value.setZero();
  }
}

Attended GatedAttention::Attend(Var query, Var evidence) {
  if (query.rows() != 1 || query.cols() != dim_) {
    throw DimensionError("attend: query " + ShapeString(query.value()) +
                         " vs width " + std::to_string(dim_));
  }
  Tape& tape = *query.tape;
  Attended out;
  if (evidence.tape == nullptr || evidence.rows() == 0) {
    out.summary = tape.Constant(Matrix::Zero(1, dim_));
    return out;
  }
  if (evidence.cols() != dim_) {
    throw DimensionError("attend: evidence " + ShapeString(evidence.value()) +
                         " vs query " + ShapeString(query.value()));
  }
  Var q = MatMul(query, tape.Param(attention_.w_query));
  Var s = MatMul(evidence, tape.Param(attention_.w_evidence));
  Var hidden = Tanh(AddRow(AddRow(s, q), tape.Param(attention_.bias)));
  Var scores = Transpose(MatMul(hidden, tape.Param(attention_.v)));  // 1 x k
  Var alphas = Softmax(scores, 1);
  out.summary = MatMul(alphas, evidence);
  const Matrix& a = alphas.value();
  out.alphas.assign(a.data(), a.data() + a.size());
  return out;
}

Var GatedAttention::Gate(Var local, Var summary) {
  const Matrix& h = local.value();
  const Matrix& s = summary.value();
  if (h.rows() != s.rows() || h.cols() != dim_ || s.cols() != dim_) {
    throw DimensionError("gate: local " + ShapeString(h) + " vs summary " +
                         ShapeString(s));
  }
  Tape& tape = *local.tape;
  GateParams& g = gate_;
  Var r = Sigmoid(AddRow(Add(MatMul(summary, tape.Param(g.w_evidence_r)),
                             MatMul(local, tape.Param(g.w_local_r))),
                         tape.Param(g.b_r)));
  Var z = Sigmoid(AddRow(Add(MatMul(summary, tape.Param(g.w_evidence_z)),
                             MatMul(local, tape.Param(g.w_local_z))),
                         tape.Param(g.b_z)));
  Var mixed = Tanh(Add(MatMul(local, tape.Param(g.w_local_g)),
                       Mul(z, AddRow(MatMul(summary, tape.Param(g.w_evidence_g)),
                                     tape.Param(g.b_g)))));
  return Add(Mul(r, local), Mul(OneMinus(r), mixed));
}

std::vector<Parameter*> GatedAttention::params() {
  return {&attention_.w_query, &attention_.w_evidence, &attention_.bias,
          &attention_.v,       &gate_.w_evidence_r,    &gate_.w_local_r,
          &gate_.b_r,          &gate_.w_evidence_z,    &gate_.w_local_z,
          &gate_.b_z,          &gate_.w_local_g,       &gate_.w_evidence_g,
          &gate_.b_g};
}

}  // namespace gner
