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

// Dense float64 matrices with a reverse-mode gradient tape.
//
// Every value is a row-major matrix. Sequences are stored one time step per
// row, so a sentence of n tokens encoded to d dimensions is an n x d matrix
// and a single token vector is 1 x d. Linear maps are applied on the right:
// y = x W + b with W of shape in x out.
//
// A Tape records the ops of one forward computation. Trainable weights live
// in Parameter objects outside the tape; Tape::Param() references them
// without copying and gradients flow straight into Parameter::grad.

#ifndef GNER_TENSOR_H_
#define GNER_TENSOR_H_

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gner/rng.h"

namespace gner {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::string ShapeString(const Matrix& m);

// Throws NumericError naming `op` if any entry is NaN or Inf.
void CheckFinite(const Matrix& m, const char* op);

// A named trainable tensor and its accumulated gradient.
struct Parameter {
  Parameter() = default;
  Parameter(std::string name, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(name)),
        value(Matrix::Zero(rows, cols)),
        grad(Matrix::Zero(rows, cols)) {}

  void ZeroGrad() { grad.setZero(); }

  std::string name;
  Matrix value;
  Matrix grad;
};

// Fills with U(-a, a), a = sqrt(6 / (rows + cols)).
void XavierUniform(Matrix& m, Rng& rng);

class Tape;

// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
};

class Tape {
 public:
  // Called during Backward with the node's accumulated gradient.
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  // An inference tape records values only; Backward() is rejected.
  explicit Tape(bool record = true) : record_(record) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Constant(Matrix value);
  Var Param(Parameter& p);

  // Adds a node computed from `parents`. `backward` is kept only when
  // recording and some parent requires a gradient. Checks finiteness.
  Var Record(Matrix value, std::initializer_list<Var> parents,
             BackwardFn backward, const char* op);
  Var Record(Matrix value, std::span<const Var> parents, BackwardFn backward,
             const char* op);
  // A node with no tape parents whose backward sends its gradient somewhere
  // outside the tape (e.g. rows of an embedding table).
  Var RecordSource(Matrix value, BackwardFn backward, const char* op);

  // Populates gradients of every node reachable from `loss` (a 1x1 value),
  // visiting nodes in reverse creation order.
  void Backward(Var loss);

  const Matrix& value(std::size_t id) const;
  // Gradient accumulated so far; zero matrix if none arrived.
  const Matrix& grad(std::size_t id);
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  void Accumulate(std::size_t id, const Matrix& g);

  bool recording() const { return record_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix owned;
    const Matrix* ref = nullptr;
    Matrix grad;
    Matrix* grad_target = nullptr;
    bool has_grad = false;
    bool requires_grad = false;
    BackwardFn backward;
  };

  bool record_;
  std::deque<Node> nodes_;
};

// Forward ops. Shapes follow ordinary linear algebra; mismatches raise
// DimensionError naming both shapes.
Var MatMul(Var a, Var b);
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
// Adds the 1 x c row `b` to every row of `a`.
Var AddRow(Var a, Var b);
Var Mul(Var a, Var b);
Var Scale(Var a, double s);
Var OneMinus(Var a);
Var Tanh(Var a);
Var Sigmoid(Var a);
// axis 0 normalizes each column, axis 1 each row.
Var Softmax(Var a, int axis);
Var ConcatCols(std::span<const Var> parts);
Var ConcatCols(std::initializer_list<Var> parts);
Var ConcatRows(std::span<const Var> parts);
Var SliceCols(Var a, Eigen::Index begin, Eigen::Index count);
Var SliceRows(Var a, Eigen::Index begin, Eigen::Index count);
Var Transpose(Var a);
// Inverted dropout: identity when !train or rate == 0.
Var Dropout(Var a, double rate, bool train, Rng& rng);
// Max over rows (time): n x c -> 1 x c.
Var MaxRows(Var a);
// Row i of the result is concat(a[i], ..., a[i + width - 1]).
Var UnfoldRows(Var a, Eigen::Index width);
Var Sum(Var a);
// Rows of `table` selected by `ids`; gradients scatter back into its rows.
Var Lookup(Tape& tape, Parameter& table, std::span<const int> ids);

}  // namespace gner

#endif  // GNER_TENSOR_H_
