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

#include <cmath>
#include <limits>

#include "doctest.h"
#include "gner/errors.h"
#include "gner/sgd.h"
#include "gner/tensor.h"
#include "support/gradcheck.h"

namespace gner {
namespace {

using testing::CheckGradients;
using testing::FillUniform;

Eigen::Index Dim(Rng& rng) { return 1 + static_cast<Eigen::Index>(rng.Index(8)); }

Parameter RandomParam(const std::string& name, Eigen::Index r, Eigen::Index c, Rng& rng) {
  Parameter p(name, r, c);
  FillUniform(p.value, rng);
  return p;
}

// Weighted sum with fixed random weights, so every output entry matters.
struct Projector {
  Matrix weights;
  Var operator()(Var out) const {
    return Sum(Mul(out, out.tape->Constant(weights)));
  }
};

Projector MakeProjector(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Projector p{Matrix(r, c)};
  FillUniform(p.weights, rng);
  return p;
}

void ExpectOk(const testing::GradCheckResult& r) {
  INFO(r.worst);
  CHECK(r.ok);
  CHECK(r.checked > 0);
}

constexpr int kSeeds = 20;

TEST_CASE("matmul, add, sub and mul gradients match finite differences") {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    const Eigen::Index n = Dim(rng), k = Dim(rng), m = Dim(rng);
    Parameter a = RandomParam("a", n, k, rng);
    Parameter b = RandomParam("b", k, m, rng);
    Parameter c = RandomParam("c", n, m, rng);
    Parameter d = RandomParam("d", n, m, rng);
    const Projector proj = MakeProjector(n, m, rng);
    ExpectOk(CheckGradients(
        [&](Tape& t) {
          Var ab = MatMul(t.Param(a), t.Param(b));
          return proj(Mul(Sub(Add(ab, t.Param(c)), t.Param(d)), t.Param(c)));
        },
        {&a, &b, &c, &d}));
  }
}

TEST_CASE("elementwise nonlinearity gradients match finite differences") {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(100 + static_cast<std::uint64_t>(seed));
    const Eigen::Index n = Dim(rng), m = Dim(rng);
    Parameter a = RandomParam("a", n, m, rng);
    Parameter row = RandomParam("row", 1, m, rng);
    const Projector proj = MakeProjector(n, m, rng);
    ExpectOk(CheckGradients(
        [&](Tape& t) {
          Var x = AddRow(t.Param(a), t.Param(row));
          return proj(Add(Tanh(x), Mul(Sigmoid(Scale(x, 1.7)), OneMinus(Tanh(x)))));
        },
        {&a, &row}));
  }
}

TEST_CASE("softmax gradients match finite differences along both axes") {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(200 + static_cast<std::uint64_t>(seed));
    const Eigen::Index n = Dim(rng), m = Dim(rng);
    Parameter a = RandomParam("a", n, m, rng);
    const Projector proj = MakeProjector(n, m, rng);
    for (int axis : {0, 1}) {
      ExpectOk(CheckGradients([&](Tape& t) { return proj(Softmax(t.Param(a), axis)); }, {&a}));
    }
  }
}

TEST_CASE("softmax then dot on random 5-vectors") {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(250 + static_cast<std::uint64_t>(seed));
    Parameter x = RandomParam("x", 1, 5, rng);
    Parameter w = RandomParam("w", 5, 1, rng);
    ExpectOk(CheckGradients(
        [&](Tape& t) { return MatMul(Softmax(t.Param(x), 1), t.Param(w)); }, {&x, &w}));
  }
}

TEST_CASE("concat, slice and transpose gradients match finite differences") {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(300 + static_cast<std::uint64_t>(seed));
    const Eigen::Index n = Dim(rng), m1 = Dim(rng), m2 = Dim(rng);
    Parameter a = RandomParam("a", n, m1, rng);
    Parameter b = RandomParam("b", n, m2, rng);
    const Eigen::Index m = m1 + m2;
    const Eigen::Index begin = static_cast<Eigen::Index>(rng.Index(static_cast<std::size_t>(m)));
    const Eigen::Index count = 1 + static_cast<Eigen::Index>(
                                       rng.Index(static_cast<std::size_t>(m - begin)));
    const Projector proj_cols = MakeProjector(n, count, rng);
    const Projector proj_rows = MakeProjector(m, 2 * n, rng);
    ExpectOk(CheckGradients(
        [&](Tape& t) {
          Var cat = ConcatCols({t.Param(a), t.Param(b)});
          Var tr = Transpose(cat);
          std::vector<Var> stacked = {Transpose(SliceRows(tr, 0, m)), cat};
          Var rows = ConcatRows(stacked);  // 2n x m
          return Add(proj_cols(SliceCols(cat, begin, count)),
                     proj_rows(Transpose(rows)));
        },
        {&a, &b}));
  }
}

TEST_CASE("max pooling, unfolding and lookup gradients match finite differences") {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(400 + static_cast<std::uint64_t>(seed));
    const Eigen::Index vocab = 2 + Dim(rng), d = Dim(rng);
    Parameter table = RandomParam("table", vocab, d, rng);
    std::vector<int> ids;
    const std::size_t len = 2 + rng.Index(6);
    for (std::size_t i = 0; i < len; ++i) ids.push_back(static_cast<int>(rng.Index(static_cast<std::size_t>(vocab))));
    const Eigen::Index width = 1 + static_cast<Eigen::Index>(rng.Index(len));
    Parameter w = RandomParam("w", width * d, 3, rng);
    const Projector proj = MakeProjector(1, 3, rng);
    ExpectOk(CheckGradients(
        [&](Tape& t) {
          Var rows = Lookup(t, table, ids);
          return proj(MaxRows(MatMul(UnfoldRows(rows, width), t.Param(w))));
        },
        {&table, &w}));
  }
}

TEST_CASE("dropout gradient matches finite differences with a fixed mask") {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(500 + static_cast<std::uint64_t>(seed));
    const Eigen::Index n = Dim(rng), m = Dim(rng);
    Parameter a = RandomParam("a", n, m, rng);
    const Projector proj = MakeProjector(n, m, rng);
    ExpectOk(CheckGradients(
        [&](Tape& t) {
          Rng mask_rng(static_cast<std::uint64_t>(seed));
          return proj(Tanh(Dropout(t.Param(a), 0.3, true, mask_rng)));
        },
        {&a}));
  }
}

TEST_CASE("forward op identities") {
  Tape t;
  Var zero = t.Constant(Matrix::Zero(1, 2));
  Var s = Softmax(zero, 1);
  CHECK(s.value()(0, 0) == doctest::Approx(0.5));
  CHECK(s.value()(0, 1) == doctest::Approx(0.5));
  CHECK(Tanh(zero).value()(0, 0) == 0.0);
  CHECK(Sigmoid(zero).value()(0, 0) == 0.5);
  Rng rng(1);
  Var x = t.Constant(Matrix::Ones(3, 3));
  CHECK(Dropout(x, 0.5, false, rng).id == x.id);
}

TEST_CASE("softmax rows are distributions") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix m(Dim(rng), Dim(rng));
    FillUniform(m, rng, -30.0, 30.0);
    Tape t;
    for (int axis : {0, 1}) {
      const Matrix y = Softmax(t.Constant(m), axis).value();
      CHECK((y.array() >= 0.0).all());
      const Eigen::VectorXd sums =
          axis == 1 ? Eigen::VectorXd(y.rowwise().sum()) : Eigen::VectorXd(y.colwise().sum().transpose());
      for (Eigen::Index i = 0; i < sums.size(); ++i) CHECK(std::abs(sums(i) - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("train-mode dropout preserves the expected value") {
  Rng rng(11);
  Tape t(/*record=*/false);
  Var x = t.Constant(Matrix::Constant(100, 100, 2.0));  // 10^4 samples
  for (double rate : {0.2, 0.5, 0.7}) {
    const double mean = Dropout(x, rate, true, rng).value().mean();
    CHECK(std::abs(mean - 2.0) / 2.0 <= 0.02);
  }
}

TEST_CASE("shape errors name both shapes") {
  Tape t;
  Var a = t.Constant(Matrix::Zero(2, 3));
  Var b = t.Constant(Matrix::Zero(2, 3));
  try {
    MatMul(a, b);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string what = e.what();
    CHECK(what.find("[2x3]") != std::string::npos);
    CHECK(what.find("vs [2x3]") != std::string::npos);
  }
  CHECK_THROWS_AS(Add(a, t.Constant(Matrix::Zero(3, 2))), DimensionError);
  CHECK_THROWS_AS(ConcatCols({a, t.Constant(Matrix::Zero(1, 3))}), DimensionError);
}

TEST_CASE("backward rejects non-scalar losses and inference tapes") {
  Parameter p("p", 2, 2);
  Tape t;
  CHECK_THROWS_AS(t.Backward(t.Param(p)), ArgumentError);
  Tape inference(false);
  Var s = Sum(inference.Param(p));
  CHECK_THROWS_AS(inference.Backward(s), ArgumentError);
}

TEST_CASE("non-finite values are rejected") {
  Tape t;
  Matrix m = Matrix::Ones(1, 2);
  Var a = t.Constant(m);
  CHECK_THROWS_AS(Scale(a, std::numeric_limits<double>::infinity()), NumericError);
  m(0, 0) = std::nan("");
  CHECK_THROWS_AS(t.Constant(m), NumericError);
}

TEST_CASE("parameters the loss does not depend on get zero gradient") {
  Rng rng(3);
  Parameter used = RandomParam("used", 2, 2, rng);
  Parameter unused = RandomParam("unused", 2, 2, rng);
  Tape t;
  t.Param(unused);
  t.Backward(Sum(Tanh(t.Param(used))));
  CHECK(unused.grad.isZero(0.0));
  CHECK(!used.grad.isZero(0.0));
}

TEST_CASE("sum of W x has the outer-product gradient") {
  Rng rng(5);
  Parameter w = RandomParam("w", 3, 4, rng);
  Matrix x(4, 1);
  FillUniform(x, rng);
  Tape t;
  t.Backward(Sum(MatMul(t.Param(w), t.Constant(x))));
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) CHECK(w.grad(i, j) == doctest::Approx(x(j, 0)));
  }
}

TEST_CASE("sgd step on w^2") {
  Parameter w("w", 1, 1);
  w.value(0, 0) = 1.0;
  Tape t;
  Var v = t.Param(w);
  t.Backward(Sum(Mul(v, v)));
  std::vector<Parameter*> params = {&w};
  SgdStep(params, SgdOptimizer{});
  CHECK(w.value(0, 0) == doctest::Approx(0.99).epsilon(1e-12));
  CHECK(w.grad(0, 0) == 0.0);
}

TEST_CASE("sgd clips the global norm before updating") {
  Parameter a("a", 1, 2);
  a.grad << 6.0, 8.0;  // norm 10
  std::vector<Parameter*> params = {&a};
  const double norm = SgdStep(params, SgdOptimizer{1.0, 5.0});
  CHECK(norm == doctest::Approx(10.0));
  CHECK(a.value(0, 0) == doctest::Approx(-3.0));
  CHECK(a.value(0, 1) == doctest::Approx(-4.0));
}

TEST_CASE("sgd with zero learning rate leaves parameters unchanged") {
  Parameter a("a", 2, 2);
  a.value.setConstant(0.25);
  a.grad.setConstant(3.0);
  std::vector<Parameter*> params = {&a};
  SgdStep(params, SgdOptimizer{0.0, 5.0});
  CHECK(a.value.isApproxToConstant(0.25));
  CHECK(a.grad.isZero(0.0));
}

TEST_CASE("sgd changes parameters only where the gradient is non-zero") {
  Parameter a("a", 2, 2);
  a.value.setConstant(1.0);
  a.grad(0, 1) = 0.5;
  std::vector<Parameter*> params = {&a};
  SgdStep(params, SgdOptimizer{0.1, 5.0});
  CHECK(a.value(0, 0) == 1.0);
  CHECK(a.value(1, 0) == 1.0);
  CHECK(a.value(1, 1) == 1.0);
  CHECK(a.value(0, 1) == doctest::Approx(0.95));
}

}  // namespace
}  // namespace gner
