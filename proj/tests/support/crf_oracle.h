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

// Exhaustive linear-chain CRF: scores every one of T^n paths directly.

#ifndef GNER_TESTS_CRF_ORACLE_H_
#define GNER_TESTS_CRF_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gner/tensor.h"

namespace gner::testing {

struct BruteForceResult {
  double log_z = 0.0;
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<int> best_path;
  std::size_t paths = 0;
};

// Paths are visited in lexicographic order and only a strictly better score
// replaces the incumbent, so ties resolve to the lexicographically smallest
// path.
inline BruteForceResult BruteForceCrf(const Matrix& e, const Matrix& tr) {
  const int n = static_cast<int>(e.rows());
  const int t = static_cast<int>(e.cols());
  const int start = t, stop = t + 1;
  std::vector<int> path(static_cast<std::size_t>(n), 0);
  std::vector<double> scores;
  BruteForceResult out;
  while (true) {
    double s = tr(start, path[0]) + tr(path[static_cast<std::size_t>(n - 1)], stop);
    for (int i = 0; i < n; ++i) {
      s += e(i, path[static_cast<std::size_t>(i)]);
      if (i > 0) s += tr(path[static_cast<std::size_t>(i - 1)], path[static_cast<std::size_t>(i)]);
    }
    scores.push_back(s);
    if (s > out.best_score) {
      out.best_score = s;
      out.best_path = path;
    }
    int k = n - 1;
    while (k >= 0 && path[static_cast<std::size_t>(k)] == t - 1) {
      path[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
    ++path[static_cast<std::size_t>(k)];
  }
  const double m = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - m);
  out.log_z = m + std::log(sum);
  out.paths = scores.size();
  return out;
}

}  // namespace gner::testing

#endif  // GNER_TESTS_CRF_ORACLE_H_
