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

#ifndef GNER_SGD_H_
#define GNER_SGD_H_

#include <span>

#include "gner/tensor.h"

namespace gner {

struct SgdOptimizer {
  double learning_rate = 0.005;
  // Global gradient norm cap; <= 0 disables clipping.
  double clip_norm = 5.0;
};

// Clips the global gradient norm to clip_norm, applies p -= lr * grad and
// zeroes the gradients. Returns the pre-clipping norm.
double SgdStep(std::span<Parameter* const> params, const SgdOptimizer& opt);

double GlobalGradNorm(std::span<Parameter* const> params);

}  // namespace gner

#endif  // GNER_SGD_H_
