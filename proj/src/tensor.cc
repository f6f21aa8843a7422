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

#include "gner/tensor.h"

#include <cmath>
#include <limits>

#include "gner/errors.h"

namespace gner {

std::string ShapeString(const Matrix& m) {
  return "[" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + "]";
}

void CheckFinite(const Matrix& m, const char* op) {
  if (!m.allFinite()) {
    throw NumericError(std::string("non-finite value produced by ") + op);
  }
}

void XavierUniform(Matrix& m, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = rng.Uniform(-bound, bound);
  }
}

const Matrix& Var::value() const { return tape->value(id); }

Var Tape::Constant(Matrix value) {
  CheckFinite(value, "constant");
  Node& node = nodes_.emplace_back();
  node.owned = std::move(value);
  return Var{this, nodes_.size() - 1};
}

Var Tape::Param(Parameter& p) {
  Node& node = nodes_.emplace_back();
  node.ref = &p.value;
  if (record_) {
    node.requires_grad = true;
    node.grad_target = &p.grad;
  }
  return Var{this, nodes_.size() - 1};
}

Var Tape::Record(Matrix value, std::initializer_list<Var> parents,
                 BackwardFn backward, const char* op) {
  return Record(std::move(value),
                std::span<const Var>(parents.begin(), parents.size()),
                std::move(backward), op);
}

Var Tape::Record(Matrix value, std::span<const Var> parents,
                 BackwardFn backward, const char* op) {
  CheckFinite(value, op);
  Node& node = nodes_.emplace_back();
  node.owned = std::move(value);
  if (record_) {
    for (const Var& p : parents) {
      if (nodes_[p.id].requires_grad) {
        node.requires_grad = true;
        break;
      }
    }
    if (node.requires_grad) node.backward = std::move(backward);
  }
  return Var{this, nodes_.size() - 1};
}

Var Tape::RecordSource(Matrix value, BackwardFn backward, const char* op) {
  CheckFinite(value, op);
  Node& node = nodes_.emplace_back();
  node.owned = std::move(value);
  if (record_) {
    node.requires_grad = true;
    node.backward = std::move(backward);
  }
  return Var{this, nodes_.size() - 1};
}

const Matrix& Tape::value(std::size_t id) const {
  const Node& node = nodes_[id];
  return node.ref != nullptr ? *node.ref : node.owned;
}

const Matrix& Tape::grad(std::size_t id) {
  Node& node = nodes_[id];
  if (!node.has_grad) {
    const Matrix& v = value(id);
    node.grad = Matrix::Zero(v.rows(), v.cols());
    node.has_grad = true;
  }
  return node.grad;
}

void Tape::Accumulate(std::size_t id, const Matrix& g) {
  Node& node = nodes_[id];
  if (!node.requires_grad) return;
  if (node.grad_target != nullptr) {
    *node.grad_target += g;
    return;
  }
  if (!node.has_grad) {
    node.grad = g;
    node.has_grad = true;
  } else {
    node.grad += g;
  }
}

void Tape::Backward(Var loss) {
  if (!record_) throw ArgumentError("Backward on an inference tape");
  if (loss.tape != this) throw ArgumentError("loss belongs to another tape");
  const Matrix& v = value(loss.id);
  if (v.rows() != 1 || v.cols() != 1) {
    throw ArgumentError("Backward needs a scalar loss, got " + ShapeString(v));
  }
  Accumulate(loss.id, Matrix::Ones(1, 1));
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (node.has_grad && node.backward) node.backward(*this, i);
  }
}

namespace {

void RequireSameShape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         ShapeString(a) + " vs " + ShapeString(b));
  }
}

Tape& TapeOf(std::span<const Var> parts, const char* op) {
  if (parts.empty()) throw ArgumentError(std::string(op) + ": no inputs");
  return *parts.front().tape;
}

}  // namespace

Var MatMul(Var a, Var b) {
  const Matrix& x = a.value();
  const Matrix& y = b.value();
  if (x.cols() != y.rows()) {
    throw DimensionError("matmul: shape mismatch " + ShapeString(x) + " vs " +
                         ShapeString(y));
  }
  Matrix out = x * y;
  return a.tape->Record(
      std::move(out), {a, b},
      [a, b](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        if (t.requires_grad(a.id)) t.Accumulate(a.id, g * t.value(b.id).transpose());
        if (t.requires_grad(b.id)) t.Accumulate(b.id, t.value(a.id).transpose() * g);
      },
      "matmul");
}

Var Add(Var a, Var b) {
  RequireSameShape(a.value(), b.value(), "add");
  Matrix out = a.value() + b.value();
  return a.tape->Record(
      std::move(out), {a, b},
      [a, b](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        t.Accumulate(a.id, g);
        t.Accumulate(b.id, g);
      },
      "add");
}

Var Sub(Var a, Var b) {
  RequireSameShape(a.value(), b.value(), "sub");
  Matrix out = a.value() - b.value();
  return a.tape->Record(
      std::move(out), {a, b},
      [a, b](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        t.Accumulate(a.id, g);
        if (t.requires_grad(b.id)) t.Accumulate(b.id, -g);
      },
      "sub");
}

Var AddRow(Var a, Var b) {
  const Matrix& x = a.value();
  const Matrix& r = b.value();
  if (r.rows() != 1 || r.cols() != x.cols()) {
    throw DimensionError("add_row: shape mismatch " + ShapeString(x) + " vs " +
                         ShapeString(r));
  }
  Matrix out = x.rowwise() + r.row(0);
  return a.tape->Record(
      std::move(out), {a, b},
      [a, b](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        t.Accumulate(a.id, g);
        if (t.requires_grad(b.id)) t.Accumulate(b.id, g.colwise().sum());
      },
      "add_row");
}

Var Mul(Var a, Var b) {
  RequireSameShape(a.value(), b.value(), "mul");
  Matrix out = a.value().cwiseProduct(b.value());
  return a.tape->Record(
      std::move(out), {a, b},
      [a, b](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        if (t.requires_grad(a.id)) t.Accumulate(a.id, g.cwiseProduct(t.value(b.id)));
        if (t.requires_grad(b.id)) t.Accumulate(b.id, g.cwiseProduct(t.value(a.id)));
      },
      "mul");
}

Var Scale(Var a, double s) {
  Matrix out = a.value() * s;
  return a.tape->Record(
      std::move(out), {a},
      [a, s](Tape& t, std::size_t self) { t.Accumulate(a.id, t.grad(self) * s); },
      "scale");
}

Var OneMinus(Var a) {
  Matrix out = (1.0 - a.value().array()).matrix();
  return a.tape->Record(
      std::move(out), {a},
      [a](Tape& t, std::size_t self) { t.Accumulate(a.id, -t.grad(self)); },
      "one_minus");
}

Var Tanh(Var a) {
  Matrix out = a.value().array().tanh().matrix();
  return a.tape->Record(
      std::move(out), {a},
      [a](Tape& t, std::size_t self) {
        const Matrix& y = t.value(self);
        t.Accumulate(a.id,
                     (t.grad(self).array() * (1.0 - y.array().square())).matrix());
      },
      "tanh");
}

Var Sigmoid(Var a) {
  Matrix out = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  return a.tape->Record(
      std::move(out), {a},
      [a](Tape& t, std::size_t self) {
        const Matrix& y = t.value(self);
        t.Accumulate(a.id,
                     (t.grad(self).array() * y.array() * (1.0 - y.array())).matrix());
      },
      "sigmoid");
}

Var Softmax(Var a, int axis) {
  if (axis != 0 && axis != 1) throw ArgumentError("softmax: axis must be 0 or 1");
  const Matrix& x = a.value();
  Matrix out(x.rows(), x.cols());
  if (axis == 1) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      auto e = (x.row(i).array() - x.row(i).maxCoeff()).exp();
      out.row(i) = e / e.sum();
    }
  } else {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      auto e = (x.col(j).array() - x.col(j).maxCoeff()).exp();
      out.col(j) = e / e.sum();
    }
  }
  return a.tape->Record(
      std::move(out), {a},
      [a, axis](Tape& t, std::size_t self) {
        const Matrix& y = t.value(self);
        const Matrix& g = t.grad(self);
        Matrix gy = g.cwiseProduct(y);
        Matrix dx(y.rows(), y.cols());
        if (axis == 1) {
          Eigen::VectorXd dots = gy.rowwise().sum();
          for (Eigen::Index i = 0; i < y.rows(); ++i) {
            dx.row(i) = gy.row(i) - dots(i) * y.row(i);
          }
        } else {
          Eigen::RowVectorXd dots = gy.colwise().sum();
          for (Eigen::Index j = 0; j < y.cols(); ++j) {
            dx.col(j) = gy.col(j) - dots(j) * y.col(j);
          }
        }
        t.Accumulate(a.id, dx);
      },
      "softmax");
}

Var ConcatCols(std::initializer_list<Var> parts) {
  return ConcatCols(std::span<const Var>(parts.begin(), parts.size()));
}

Var ConcatCols(std::span<const Var> parts) {
  Tape& tape = TapeOf(parts, "concat_cols");
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) {
      throw DimensionError("concat_cols: shape mismatch " +
                           ShapeString(parts.front().value()) + " vs " +
                           ShapeString(p.value()));
    }
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return tape.Record(
      std::move(out), parts,
      [inputs](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        Eigen::Index offset = 0;
        for (const Var& p : inputs) {
          const Eigen::Index c = t.value(p.id).cols();
          if (t.requires_grad(p.id)) t.Accumulate(p.id, g.middleCols(offset, c));
          offset += c;
        }
      },
      "concat_cols");
}

Var ConcatRows(std::span<const Var> parts) {
  Tape& tape = TapeOf(parts, "concat_rows");
  const Eigen::Index cols = parts.front().cols();
  Eigen::Index rows = 0;
  for (const Var& p : parts) {
    if (p.cols() != cols) {
      throw DimensionError("concat_rows: shape mismatch " +
                           ShapeString(parts.front().value()) + " vs " +
                           ShapeString(p.value()));
    }
    rows += p.rows();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return tape.Record(
      std::move(out), parts,
      [inputs](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        Eigen::Index offset = 0;
        for (const Var& p : inputs) {
          const Eigen::Index r = t.value(p.id).rows();
          if (t.requires_grad(p.id)) t.Accumulate(p.id, g.middleRows(offset, r));
          offset += r;
        }
      },
      "concat_rows");
}

Var SliceCols(Var a, Eigen::Index begin, Eigen::Index count) {
  const Matrix& x = a.value();
  if (begin < 0 || count < 0 || begin + count > x.cols()) {
    throw DimensionError("slice_cols: [" + std::to_string(begin) + ", +" +
                         std::to_string(count) + ") out of " + ShapeString(x));
  }
  Matrix out = x.middleCols(begin, count);
  return a.tape->Record(
      std::move(out), {a},
      [a, begin, count](Tape& t, std::size_t self) {
        const Matrix& v = t.value(a.id);
        Matrix g = Matrix::Zero(v.rows(), v.cols());
        g.middleCols(begin, count) = t.grad(self);
        t.Accumulate(a.id, g);
      },
      "slice_cols");
}

Var SliceRows(Var a, Eigen::Index begin, Eigen::Index count) {
  const Matrix& x = a.value();
  if (begin < 0 || count < 0 || begin + count > x.rows()) {
    throw DimensionError("slice_rows: [" + std::to_string(begin) + ", +" +
                         std::to_string(count) + ") out of " + ShapeString(x));
  }
  Matrix out = x.middleRows(begin, count);
  return a.tape->Record(
      std::move(out), {a},
      [a, begin, count](Tape& t, std::size_t self) {
        const Matrix& v = t.value(a.id);
        Matrix g = Matrix::Zero(v.rows(), v.cols());
        g.middleRows(begin, count) = t.grad(self);
        t.Accumulate(a.id, g);
      },
      "slice_rows");
}

Var Transpose(Var a) {
  Matrix out = a.value().transpose();
  return a.tape->Record(
      std::move(out), {a},
      [a](Tape& t, std::size_t self) { t.Accumulate(a.id, t.grad(self).transpose()); },
      "transpose");
}

Var Dropout(Var a, double rate, bool train, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw ArgumentError("dropout: rate must lie in [0, 1)");
  }
  if (!train || rate == 0.0) return a;
  const Matrix& x = a.value();
  const double keep_scale = 1.0 / (1.0 - rate);
  Matrix mask(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng.Uniform() < rate ? 0.0 : keep_scale;
  }
  Matrix out = x.cwiseProduct(mask);
  return a.tape->Record(
      std::move(out), {a},
      [a, mask = std::move(mask)](Tape& t, std::size_t self) {
        t.Accumulate(a.id, t.grad(self).cwiseProduct(mask));
      },
      "dropout");
}

Var MaxRows(Var a) {
  const Matrix& x = a.value();
  if (x.rows() == 0) throw DimensionError("max_rows: empty input");
  Matrix out(1, x.cols());
  std::vector<Eigen::Index> argmax(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < x.rows(); ++i) {
      if (x(i, j) > x(best, j)) best = i;
    }
    argmax[static_cast<std::size_t>(j)] = best;
    out(0, j) = x(best, j);
  }
  return a.tape->Record(
      std::move(out), {a},
      [a, argmax = std::move(argmax)](Tape& t, std::size_t self) {
        const Matrix& v = t.value(a.id);
        const Matrix& g = t.grad(self);
        Matrix dx = Matrix::Zero(v.rows(), v.cols());
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
          dx(argmax[static_cast<std::size_t>(j)], j) = g(0, j);
        }
        t.Accumulate(a.id, dx);
      },
      "max_rows");
}

Var UnfoldRows(Var a, Eigen::Index width) {
  const Matrix& x = a.value();
  if (width <= 0 || width > x.rows()) {
    throw DimensionError("unfold_rows: width " + std::to_string(width) +
                         " does not fit " + ShapeString(x));
  }
  const Eigen::Index d = x.cols();
  const Eigen::Index windows = x.rows() - width + 1;
  Matrix out(windows, width * d);
  for (Eigen::Index i = 0; i < windows; ++i) {
    for (Eigen::Index k = 0; k < width; ++k) {
      out.block(i, k * d, 1, d) = x.row(i + k);
    }
  }
  return a.tape->Record(
      std::move(out), {a},
      [a, width](Tape& t, std::size_t self) {
        const Matrix& v = t.value(a.id);
        const Matrix& g = t.grad(self);
        const Eigen::Index d = v.cols();
        Matrix dx = Matrix::Zero(v.rows(), d);
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
          for (Eigen::Index k = 0; k < width; ++k) {
            dx.row(i + k) += g.block(i, k * d, 1, d);
          }
        }
        t.Accumulate(a.id, dx);
      },
      "unfold_rows");
}

Var Sum(Var a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape->Record(
      std::move(out), {a},
      [a](Tape& t, std::size_t self) {
        const Matrix& v = t.value(a.id);
        t.Accumulate(a.id, Matrix::Constant(v.rows(), v.cols(), t.grad(self)(0, 0)));
      },
      "sum");
}

Var Lookup(Tape& tape, Parameter& table, std::span<const int> ids) {
  const Eigen::Index d = table.value.cols();
  Matrix out(static_cast<Eigen::Index>(ids.size()), d);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= table.value.rows()) {
      throw DimensionError("lookup: id " + std::to_string(ids[i]) +
                           " out of table " + ShapeString(table.value));
    }
    out.row(static_cast<Eigen::Index>(i)) = table.value.row(ids[i]);
  }
  std::vector<int> rows(ids.begin(), ids.end());
  Parameter* target = &table;
  return tape.RecordSource(
      std::move(out),
      [rows = std::move(rows), target](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        for (std::size_t i = 0; i < rows.size(); ++i) {
          target->grad.row(rows[i]) += g.row(static_cast<Eigen::Index>(i));
        }
      },
      "lookup");
}

}  // namespace gner
