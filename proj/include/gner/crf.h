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

// Linear-chain CRF over T tags.
//
// Emissions are n x T. Transitions are (T+2) x (T+2) indexed [from][to];
// index T is START and T+1 is STOP. A path y_1..y_n scores
//
//   trans[START][y_1] + sum_i emis[i][y_i] + sum_i trans[y_{i-1}][y_i]
//     + trans[y_n][STOP].
//
// Column START and row STOP are never read.

#ifndef GNER_CRF_H_
#define GNER_CRF_H_

#include <span>
#include <string>
#include <vector>

#include "gner/corpus.h"
#include "gner/tensor.h"

namespace gner {

double CrfPathScore(const Matrix& emissions, const Matrix& transitions,
                    std::span<const int> path);

// log Z by the log-space forward algorithm.
double CrfLogPartition(const Matrix& emissions, const Matrix& transitions);

struct ViterbiResult {
  std::vector<int> tags;
  double score = 0.0;
};

// Highest-scoring path; ties go to the lower tag id. Transitions may hold
// -infinity entries.
ViterbiResult ViterbiDecode(const Matrix& emissions, const Matrix& transitions);

// 0 for legal BIO bigrams, -infinity for I-X after anything but B-X/I-X.
Matrix BioTransitionMask(const TagScheme& scheme);

// log Z - score(gold) as a 1x1 tape node with analytic gradients (node
// marginals for emissions, edge marginals for transitions).
Var CrfNegLogLikelihood(Var emissions, Var transitions, std::span<const int> gold);

// Affine emission layer plus transition scores.
class CrfModel {
 public:
  CrfModel(const std::string& prefix, int input_dim, const TagScheme& scheme);

  void Init(Rng& rng);

  Var Emissions(Var features);
  Var Loss(Var emissions, std::span<const int> gold);
  // Masks illegal BIO bigrams at decode time when `use_mask`.
  ViterbiResult Decode(const Matrix& emissions, bool use_mask) const;

  int num_tags() const { return num_tags_; }
  std::vector<Parameter*> params() { return {&weight_, &bias_, &transitions_}; }
  Parameter& transitions() { return transitions_; }

 private:
  int num_tags_;
  Matrix mask_;
  Parameter weight_;
  Parameter bias_;
  Parameter transitions_;
};

}  // namespace gner

#endif  // GNER_CRF_H_
