#include "anderkit/dense.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "support.hpp"

using namespace anderkit;
using test::vec;

TEST_CASE("reductions") {
  CHECK(norm2(vec({3, 4})) == 5.0);
  CHECK(dot(vec({1, 2}), vec({3, 4})) == 11.0);
  const Vector y = axpy(2.0, vec({1, 0}), vec({0, 1}));
  CHECK(y == vec({2, 1}));
  CHECK_THROWS_AS(dot(vec({1}), vec({1, 2})), std::invalid_argument);
  CHECK_THROWS_AS(axpy(1.0, vec({1}), vec({1, 2})), std::invalid_argument);
  CHECK(norm2(Vector(0)) == 0.0);
}

TEST_CASE("reductions accumulate left to right") {
  // 1e16 + 1 - 1e16 is 0 in left-to-right order, 1 in pairwise order.
  const Vector a = vec({1e16, 1.0, -1e16, 0.0});
  const Vector ones = vec({1, 1, 1, 1});
  CHECK(dot(a, ones) == 0.0);
}

TEST_CASE("finite check") {
  CHECK(all_finite(vec({1, 2})));
  CHECK_FALSE(all_finite(vec({1, NAN})));
  CHECK_FALSE(all_finite(vec({INFINITY})));
}

TEST_CASE("least squares small systems") {
  Matrix a(2, 1);
  a << 1, 0;
  CHECK(least_squares(a, vec({2, 0})) == vec({2}));

  const Matrix eye = Matrix::Identity(2, 2);
  const Vector w = least_squares(eye, vec({3, 4}));
  CHECK(w[0] == doctest::Approx(3.0));
  CHECK(w[1] == doctest::Approx(4.0));

  CHECK(least_squares(Matrix::Zero(3, 2), vec({1, 2, 3})) == Vector::Zero(2));
}

TEST_CASE("least squares with duplicate columns") {
  Matrix a(2, 2);
  a << 1, 1, 0, 0;
  const Vector rhs = vec({1, 0});
  const Vector w = least_squares(a, rhs);

  // Brute force over a coefficient grid: the best attainable residual is 0.
  double best = INFINITY;
  for (int i = -200; i <= 200; ++i) {
    for (int j = -200; j <= 200; ++j) {
      const Vector c = vec({i * 0.01, j * 0.01});
      best = std::min(best, norm2(rhs - a * c));
    }
  }
  CHECK(best == 0.0);
  CHECK(norm2(rhs - a * w) <= best + 1e-14);
  // One coefficient carries the solution, the pivoted-out one is zero.
  CHECK(std::min(std::abs(w[0]), std::abs(w[1])) == 0.0);
  CHECK(std::max(std::abs(w[0]), std::abs(w[1])) == doctest::Approx(1.0));
}

TEST_CASE("least squares argument checks") {
  CHECK_THROWS_AS(least_squares(Matrix::Zero(2, 1), vec({1, 2, 3})), std::invalid_argument);
  CHECK_THROWS_AS(least_squares(Matrix::Zero(2, 3), vec({1, 2})), std::invalid_argument);
  CHECK_THROWS_AS(least_squares(Matrix::Zero(0, 0), Vector(0)), std::invalid_argument);
}

TEST_CASE("least squares residual never exceeds the rhs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = test::random_matrix(8, 3, rng);
    const Vector b = test::random_vector(8, rng);
    CHECK(norm2(b - a * least_squares(a, b)) <= norm2(b) * (1 + 1e-14));
  }
}

TEST_CASE("least squares reproduces square solves") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = test::random_matrix(10, 10, rng);
    a += 10.0 * Matrix::Identity(10, 10);  // well conditioned
    const Vector x = test::random_vector(10, rng);
    const Vector w = least_squares(a, a * x);
    CHECK(norm2(w - x) / norm2(x) <= 1e-12);
  }
}
