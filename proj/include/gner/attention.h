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

// Attention over supporting representations followed by a gate that mixes
// the attended summary into the local representation.
//
// For a query h and supporting rows s_1..s_k:
//
//   e_k   = v . tanh(h W_h + s_k W_s + b_e)
//   alpha = softmax(e)
//   H     = sum_k alpha_k s_k              (zero when k = 0)
//
//   r = sigmoid(H W_Hr + h W_hr + b_r)
//   z = sigmoid(H W_Hz + h W_hz + b_z)
//   g = tanh(h W_hg + z * (H W_Hg + b_g))
//   out = r * h + (1 - r) * g

#ifndef GNER_ATTENTION_H_
#define GNER_ATTENTION_H_

#include <string>
#include <vector>

#include "gner/tensor.h"

namespace gner {

struct AttentionParams {
  AttentionParams(const std::string& prefix, int dim, int attention_dim);

  Parameter w_query;     // dim x attention_dim
  Parameter w_evidence;  // dim x attention_dim
  Parameter bias;        // 1 x attention_dim
  Parameter v;           // attention_dim x 1
};

struct GateParams {
  GateParams(const std::string& prefix, int dim);

  Parameter w_evidence_r, w_local_r, b_r;
  Parameter w_evidence_z, w_local_z, b_z;
  Parameter w_local_g, w_evidence_g, b_g;
};

struct Attended {
  Var summary;                // 1 x dim
  std::vector<double> alphas;  // empty when there was no evidence
};

// One level (document or corpus) of attention plus gate.
class GatedAttention {
 public:
  GatedAttention(const std::string& prefix, int dim, int attention_dim);

  // Xavier-uniform matrices, zero biases.
  void Init(Rng& rng);

  // `query` is 1 x dim. `evidence` is k x dim, or a default Var (tape null)
  // for no evidence, in which case the summary is the zero vector.
  Attended Attend(Var query, Var evidence);

  // Row-wise gate: `local` and `summary` are both n x dim.
  Var Gate(Var local, Var summary);

  int dim() const { return dim_; }
  AttentionParams& attention() { return attention_; }
  GateParams& gate() { return gate_; }
  std::vector<Parameter*> params();

 private:
  int dim_;
  AttentionParams attention_;
  GateParams gate_;
};

}  // namespace gner

#endif  // GNER_ATTENTION_H_
