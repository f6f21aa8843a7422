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

#include "gner/crf.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gner/errors.h"

namespace gner {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogSumExp(const Eigen::Ref<const Eigen::RowVectorXd>& v) {
  const double m = v.maxCoeff();
  if (m == kNegInf) return kNegInf;
  return m + std::log((v.array() - m).exp().sum());
}

void CheckShapes(const Matrix& emissions, const Matrix& transitions) {
  const Eigen::Index t = emissions.cols();
  if (emissions.rows() < 1) throw ArgumentError("crf: empty sequence");
  if (transitions.rows() != t + 2 || transitions.cols() != t + 2) {
    throw DimensionError("crf: emissions " + ShapeString(emissions) +
                         " need transitions of " + std::to_string(t + 2) +
                         "x" + std::to_string(t + 2) + ", got " +
                         ShapeString(transitions));
  }
}

// alpha[i][y]: log-sum of scores of prefixes ending in tag y at position i.
Matrix ForwardScores(const Matrix& e, const Matrix& tr) {
  const Eigen::Index n = e.rows();
  const Eigen::Index t = e.cols();
  Matrix alpha(n, t);
  alpha.row(0) = tr.row(t).head(t) + e.row(0);
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index y = 0; y < t; ++y) {
      Eigen::RowVectorXd cand = alpha.row(i - 1) + tr.col(y).head(t).transpose();
      alpha(i, y) = LogSumExp(cand) + e(i, y);
    }
  }
  return alpha;
}

// beta[i][y]: log-sum of scores of suffixes after tag y at position i.
Matrix BackwardScores(const Matrix& e, const Matrix& tr) {
  const Eigen::Index n = e.rows();
  const Eigen::Index t = e.cols();
  Matrix beta(n, t);
  beta.row(n - 1) = tr.col(t + 1).head(t).transpose();
  for (Eigen::Index i = n - 1; i-- > 0;) {
    for (Eigen::Index y = 0; y < t; ++y) {
      Eigen::RowVectorXd cand = tr.row(y).head(t) + e.row(i + 1) + beta.row(i + 1);
      beta(i, y) = LogSumExp(cand);
    }
  }
  return beta;
}

double PartitionFromAlpha(const Matrix& alpha, const Matrix& tr) {
  const Eigen::Index t = alpha.cols();
  Eigen::RowVectorXd fin =
      alpha.row(alpha.rows() - 1) + tr.col(t + 1).head(t).transpose();
  return LogSumExp(fin);
}

}  // namespace

double CrfPathScore(const Matrix& emissions, const Matrix& transitions,
                    std::span<const int> path) {
  CheckShapes(emissions, transitions);
  const Eigen::Index t = emissions.cols();
  if (static_cast<Eigen::Index>(path.size()) != emissions.rows()) {
    throw DimensionError("crf: path length " + std::to_string(path.size()) +
                         " vs emissions " + ShapeString(emissions));
  }
  double s = transitions(t, path[0]);
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] < 0 || path[i] >= t) {
      throw ArgumentError("crf: tag id " + std::to_string(path[i]) + " out of range");
    }
    s += emissions(static_cast<Eigen::Index>(i), path[i]);
    if (i > 0) s += transitions(path[i - 1], path[i]);
  }
  return s + transitions(path.back(), t + 1);
}

double CrfLogPartition(const Matrix& emissions, const Matrix& transitions) {
  CheckShapes(emissions, transitions);
  return PartitionFromAlpha(ForwardScores(emissions, transitions), transitions);
}

ViterbiResult ViterbiDecode(const Matrix& emissions, const Matrix& transitions) {
  CheckShapes(emissions, transitions);
  const Eigen::Index n = emissions.rows();
  const Eigen::Index t = emissions.cols();
  Matrix best(n, t);
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> back(n, t);
  for (Eigen::Index y = 0; y < t; ++y) best(0, y) = transitions(t, y) + emissions(0, y);
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index y = 0; y < t; ++y) {
      Eigen::Index arg = 0;
      double top = best(i - 1, 0) + transitions(0, y);
      for (Eigen::Index p = 1; p < t; ++p) {
        const double s = best(i - 1, p) + transitions(p, y);
        if (s > top) {
          top = s;
          arg = p;
        }
      }
      best(i, y) = top + emissions(i, y);
      back(i, y) = static_cast<int>(arg);
    }
  }
  Eigen::Index last = 0;
  double top = best(n - 1, 0) + transitions(0, t + 1);
  for (Eigen::Index y = 1; y < t; ++y) {
    const double s = best(n - 1, y) + transitions(y, t + 1);
    if (s > top) {
      top = s;
      last = y;
    }
  }
  ViterbiResult out;
  out.score = top;
  out.tags.assign(static_cast<std::size_t>(n), 0);
  out.tags[static_cast<std::size_t>(n - 1)] = static_cast<int>(last);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    out.tags[static_cast<std::size_t>(i - 1)] =
        back(i, out.tags[static_cast<std::size_t>(i)]);
  }
  return out;
}

Matrix BioTransitionMask(const TagScheme& scheme) {
  const int t = scheme.size();
  Matrix mask = Matrix::Zero(t + 2, t + 2);
  for (int prev = 0; prev <= t; ++prev) {
    for (int next = 0; next < t; ++next) {
      if (!scheme.Allowed(prev, next)) mask(prev, next) = kNegInf;
    }
  }
  return mask;
}

Var CrfNegLogLikelihood(Var emissions, Var transitions, std::span<const int> gold) {
  const Matrix& e = emissions.value();
  const Matrix& tr = transitions.value();
  CheckShapes(e, tr);
  const Eigen::Index t = e.cols();
  if (static_cast<Eigen::Index>(gold.size()) != e.rows()) {
    throw DimensionError("crf: gold length " + std::to_string(gold.size()) +
                         " vs emissions " + ShapeString(e));
  }
  for (int g : gold) {
    if (g < 0 || g >= t) {
      throw ArgumentError("crf: gold tag id " + std::to_string(g) + " out of range");
    }
  }
  const double log_z = CrfLogPartition(e, tr);
  Matrix out(1, 1);
  // Mathematically >= 0; the clamp removes roundoff when a path holds all mass.
  out(0, 0) = std::max(0.0, log_z - CrfPathScore(e, tr, gold));
  std::vector<int> path(gold.begin(), gold.end());
  return emissions.tape->Record(
      std::move(out), {emissions, transitions},
      [emissions, transitions, path = std::move(path)](Tape& tape, std::size_t self) {
        const double g = tape.grad(self)(0, 0);
        const Matrix& e = tape.value(emissions.id);
        const Matrix& tr = tape.value(transitions.id);
        const Eigen::Index n = e.rows();
        const Eigen::Index t = e.cols();
        const Matrix alpha = ForwardScores(e, tr);
        const Matrix beta = BackwardScores(e, tr);
        const double log_z = PartitionFromAlpha(alpha, tr);

        Matrix de = ((alpha + beta).array() - log_z).exp().matrix();
        Matrix dt = Matrix::Zero(t + 2, t + 2);
        dt.row(t).head(t) = de.row(0);
        dt.col(t + 1).head(t) = de.row(n - 1).transpose();
        for (Eigen::Index i = 1; i < n; ++i) {
          for (Eigen::Index p = 0; p < t; ++p) {
            for (Eigen::Index q = 0; q < t; ++q) {
              dt(p, q) += std::exp(alpha(i - 1, p) + tr(p, q) + e(i, q) +
                                   beta(i, q) - log_z);
            }
          }
        }
        for (Eigen::Index i = 0; i < n; ++i) de(i, path[static_cast<std::size_t>(i)]) -= 1.0;
        dt(t, path.front()) -= 1.0;
        dt(path.back(), t + 1) -= 1.0;
        for (std::size_t i = 1; i < path.size(); ++i) dt(path[i - 1], path[i]) -= 1.0;

        if (tape.requires_grad(emissions.id)) tape.Accumulate(emissions.id, g * de);
        if (tape.requires_grad(transitions.id)) tape.Accumulate(transitions.id, g * dt);
      },
      "crf_nll");
}

CrfModel::CrfModel(const std::string& prefix, int input_dim, const TagScheme& scheme)
    : num_tags_(scheme.size()),
      mask_(BioTransitionMask(scheme)),
      weight_(prefix + "/emission_weight", input_dim, scheme.size()),
      bias_(prefix + "/emission_bias", 1, scheme.size()),
      transitions_(prefix + "/transitions", scheme.size() + 2, scheme.size() + 2) {}

void CrfModel::Init(Rng& rng) {
  XavierUniform(weight_.value, rng);
  bias_.value.setZero();
  transitions_.value.setZero();
}

Var CrfModel::Emissions(Var features) {
  Tape& tape = *features.tape;
  return AddRow(MatMul(features, tape.Param(weight_)), tape.Param(bias_));
}

Var CrfModel::Loss(Var emissions, std::span<const int> gold) {
  return CrfNegLogLikelihood(emissions, emissions.tape->Param(transitions_), gold);
}

ViterbiResult CrfModel::Decode(const Matrix& emissions, bool use_mask) const {
  if (!use_mask) return ViterbiDecode(emissions, transitions_.value);
  Matrix masked = transitions_.value + mask_;
  return ViterbiDecode(emissions, masked);
}

}  // namespace gner
