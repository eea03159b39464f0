#include "doctest.h"
#include "support.hpp"

#include "starcons/lp.hpp"

using namespace starcons;
using namespace starcons::testing;

TEST_CASE("simplex solves a textbook program") {
  // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), value 36.
  const Matrix a = rows({{1, 0}, {0, 2}, {3, 2}});
  Vector b(3), c(2);
  b << 4, 12, 18;
  c << 3, 5;
  const lp::Result r = lp::maximize(c, a, b);
  CHECK(r.status == lp::Status::optimal);
  CHECK(r.value == doctest::Approx(36.0));
  CHECK(r.x[0] == doctest::Approx(2.0));
  CHECK(r.x[1] == doctest::Approx(6.0));
}

TEST_CASE("simplex detects unboundedness") {
  const Matrix a = rows({{1, -1}});
  Vector b(1), c(2);
  b << 1;
  c << 0, 1;
  CHECK(lp::maximize(c, a, b).status == lp::Status::unbounded);
}

TEST_CASE("simplex handles degenerate vertices") {
  // Every constraint passes through the origin except the box.
  const Matrix a = rows({{1, -1}, {-1, 1}, {1, 1}, {1, 0}});
  Vector b(4), c(2);
  b << 0, 0, 2, 5;
  c << 1, 1;
  const lp::Result r = lp::maximize(c, a, b);
  CHECK(r.status == lp::Status::optimal);
  CHECK(r.value == doctest::Approx(2.0));
  CHECK(r.x[0] == doctest::Approx(1.0));
}

TEST_CASE("simplex optimum matches a vertex enumeration oracle") {
  Rng rng = make_rng(21);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 3, n = 2;
    Matrix a(m + n, n);
    Vector b(m + n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = unif(rng) * 2 - 0.5;
      b[i] = unif(rng) * 3;
    }
    a.bottomRows(n) = Matrix::Identity(n, n);  // box keeps it bounded
    b.tail(n).setConstant(4.0);
    Vector c(n);
    c << unif(rng) - 0.3, unif(rng) - 0.3;
    const lp::Result r = lp::maximize(c, a, b);
    REQUIRE(r.status == lp::Status::optimal);
    CHECK(((a * r.x - b).array() <= 1e-9).all());
    CHECK((r.x.array() >= -1e-12).all());

    // Every feasible intersection of two active constraints (with x >= 0 rows).
    Matrix all(m + n + n, n);
    Vector rhs(m + n + n);
    all << a, -Matrix::Identity(n, n);
    rhs << b, Vector::Zero(n);
    double best = -1e300;
    for (int i = 0; i < all.rows(); ++i)
      for (int j = i + 1; j < all.rows(); ++j) {
        Eigen::Matrix2d s;
        s << all(i, 0), all(i, 1), all(j, 0), all(j, 1);
        if (std::abs(s.determinant()) < 1e-12) continue;
        const Eigen::Vector2d v = s.inverse() * Eigen::Vector2d(rhs[i], rhs[j]);
        if (((all * Vector(v) - rhs).array() <= 1e-9).all()) best = std::max(best, c.dot(Vector(v)));
      }
    CHECK(r.value == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("simplex input validation") {
  CHECK_THROWS_AS(lp::maximize(Vector::Ones(2), Matrix::Ones(1, 3), Vector::Ones(1)), DimensionMismatch);
  CHECK_THROWS_AS(lp::maximize(Vector::Ones(2), Matrix::Ones(1, 2), -Vector::Ones(1)), ContractViolation);
}
