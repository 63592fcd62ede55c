#include <doctest.h>

#include "phasekd/ops.hpp"
#include "phasekd/rng.hpp"
#include "phasekd/tensor.hpp"

using namespace phasekd;

TEST_CASE("tensor construction enforces shape/value agreement") {
  CHECK_THROWS_AS(Tensor::from_values({2, 2}, {1.0, 2.0, 3.0}), ShapeError);
  CHECK_THROWS_AS(Tensor::zeros({0, 3}), ShapeError);

  Tensor t = Tensor::from_values({2, 3}, {1, 2, 3, 4, 5, 6});
  CHECK(t.size() == 6);
  CHECK(t.at(1, 2) == 6.0);
  CHECK(Tensor::scalar(2.5).item() == 2.5);
}

TEST_CASE("detach produces independent storage without gradient flow") {
  Tensor x = Tensor::from_values({2}, {1.0, 2.0});
  x.set_requires_grad(true);

  Tensor d = x.detach();
  CHECK_FALSE(d.requires_grad());
  d.values()(0) = 42.0;
  CHECK(x.values()(0) == 1.0);

  // No ops on detached tensors enter the tape.
  Tape::active().clear();
  Tensor y = sum(square(d));
  CHECK(Tape::active().size() == 0);
  CHECK_FALSE(y.requires_grad());
}

TEST_CASE("backward accumulates into leaves; zeroed leaves see one pass") {
  Tensor x = Tensor::from_values({3}, {1.0, -2.0, 3.0});
  x.set_requires_grad(true);

  Tape::active().clear();
  backward(sum(square(x)));
  CHECK(x.grad()(0) == doctest::Approx(2.0));
  CHECK(x.grad()(1) == doctest::Approx(-4.0));

  // Second pass accumulates on top of the first.
  backward(sum(square(x)));
  CHECK(x.grad()(1) == doctest::Approx(-8.0));

  // Clearing then running once gives exactly one pass.
  x.clear_grad();
  backward(sum(square(x)));
  CHECK(x.grad()(1) == doctest::Approx(-4.0));
}

TEST_CASE("backward requires a scalar root") {
  Tensor x = Tensor::from_values({2}, {1.0, 2.0});
  x.set_requires_grad(true);
  Tensor y = square(x);
  CHECK_THROWS_AS(backward(y), ShapeError);
  Tape::active().clear();
}

TEST_CASE("no-grad guard suspends recording") {
  Tensor x = Tensor::from_values({2}, {1.0, 2.0});
  x.set_requires_grad(true);
  Tape::active().clear();
  {
    NoGradGuard guard;
    Tensor y = square(x);
    CHECK_FALSE(y.requires_grad());
    CHECK(Tape::active().size() == 0);
  }
  Tensor z = square(x);
  CHECK(z.requires_grad());
  CHECK(Tape::active().size() == 1);
  Tape::active().clear();
}

TEST_CASE("gradients of leaves stay finite for finite inputs") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor x = Tensor::zeros({4, 3});
    for (Eigen::Index i = 0; i < x.values().size(); ++i) x.values()(i) = rng.uniform(-2.0, 2.0);
    x.set_requires_grad(true);
    Tape::active().clear();
    Tensor loss = mean(square(tanh(x)));
    backward(loss);
    CHECK(x.grad().allFinite());
  }
}

TEST_CASE("identical inputs produce bitwise-identical forward results") {
  Rng rng(11);
  Tensor a = Tensor::zeros({5, 4});
  for (Eigen::Index i = 0; i < a.values().size(); ++i) a.values()(i) = rng.normal();
  Tensor b = Tensor::zeros({4, 6});
  for (Eigen::Index i = 0; i < b.values().size(); ++i) b.values()(i) = rng.normal();

  Tensor y1 = softmax(matmul(a, b), 2.0);
  Tensor y2 = softmax(matmul(a, b), 2.0);
  CHECK((y1.values() == y2.values()).all());
}
