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

#include "gner/sgd.h"

#include <cmath>

namespace gner {

double GlobalGradNorm(std::span<Parameter* const> params) {
  double sq = 0.0;
  for (const Parameter* p : params) sq += p->grad.squaredNorm();
  return std::sqrt(sq);
}

double SgdStep(std::span<Parameter* const> params, const SgdOptimizer& opt) {
  const double norm = GlobalGradNorm(params);
  double scale = opt.learning_rate;
  if (opt.clip_norm > 0.0 && norm > opt.clip_norm) {
    scale *= opt.clip_norm / norm;
  }
  for (Parameter* p : params) {
    if (scale != 0.0) p->value -= scale * p->grad;
    p->ZeroGrad();
  }
  return norm;
}

}  // namespace gner
