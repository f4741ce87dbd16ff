#include <doctest.h>

#include <cmath>

#include "sparsenet/penalty.hpp"
#include "sparsenet/rng.hpp"

using namespace sparsenet;

namespace {

// params whose first layer is the given 2 x d0 matrix; everything else empty
NetworkParams params_with_columns(const Matrix& first) {
  NetworkParams p;
  p.first_weights = first;
  p.first_bias = Vector::Zero(first.rows());
  p.output_weights = Matrix::Zero(1, first.rows());
  p.output_bias = Vector::Zero(1);
  return p;
}

double prox_objective(const Vector& z, const Vector& u, double tau) {
  return 0.5 * (z - u).squaredNorm() + tau * z.norm();
}

}  // namespace

TEST_SUITE("penalty") {

TEST_CASE("penalty value sums weighted column norms") {
  Matrix first(2, 2);
  first << 3.0, 0.0, 4.0, 0.0;  // columns (3,4) and (0,0)
  const NetworkParams p = params_with_columns(first);

  SUBCASE("unit weights") {
    const PenaltySpec spec = PenaltySpec::group_lasso(2, 1.0);
    CHECK(penalty_value(spec, p) == 5.0);
  }
  SUBCASE("general weights") {
    Matrix f2(2, 2);
    f2 << 3.0, 0.0, 4.0, 1.0;  // columns (3,4) and (0,1)
    PenaltySpec spec;
    spec.group_weights = Vector(2);
    spec.group_weights << 0.5, 1.0;
    spec.lambda = 2.0;
    CHECK(penalty_value(spec, params_with_columns(f2)) ==
          doctest::Approx(7.0).epsilon(1e-15));
  }
  SUBCASE("all-zero columns give zero for any weights") {
    PenaltySpec spec;
    spec.group_weights = Vector(2);
    spec.group_weights << 123.0, 4.5;
    spec.lambda = 9.0;
    CHECK(penalty_value(spec, params_with_columns(Matrix::Zero(2, 2))) == 0.0);
  }
}

TEST_CASE("a frozen group with a nonzero column is a contract violation") {
  Matrix first(2, 2);
  first << 1.0, 0.5, 0.0, 0.0;
  PenaltySpec spec;
  spec.group_weights = Vector(2);
  spec.group_weights << 1.0, kFrozen;
  spec.lambda = 1.0;
  CHECK_THROWS_AS(penalty_value(spec, params_with_columns(first)), config_error);

  first.col(1).setZero();
  CHECK(penalty_value(spec, params_with_columns(first)) == 1.0);
}

TEST_CASE("penalty scales linearly in lambda") {
  SplitMix64 rng(3);
  Matrix first(3, 4);
  for (Eigen::Index i = 0; i < first.size(); ++i)
    first.data()[i] = rng.uniform(-1, 1);
  const NetworkParams p = params_with_columns(first);
  PenaltySpec spec = PenaltySpec::group_lasso(4, 0.3);
  const double v1 = penalty_value(spec, p);
  spec.lambda = 0.6;
  CHECK(penalty_value(spec, p) == doctest::Approx(2.0 * v1).epsilon(1e-14));
}

TEST_CASE("adaptive weights") {
  SUBCASE("norm 2 with gamma 2 gives 0.25") {
    Matrix first(2, 1);
    first << 2.0, 0.0;
    const Vector w = adaptive_weights(params_with_columns(first), 2.0);
    CHECK(w[0] == 0.25);
  }
  SUBCASE("exact-zero column freezes the group") {
    Matrix first(2, 2);
    first << 1.0, 0.0, 1.0, 0.0;
    const Vector w = adaptive_weights(params_with_columns(first), 2.0);
    CHECK(std::isinf(w[1]));
    CHECK(!std::isinf(w[0]));
  }
  SUBCASE("unit-norm columns give weight 1 for every gamma") {
    Matrix first(2, 2);
    first << 1.0, 0.0, 0.0, -1.0;
    for (const double gamma : {0.5, 1.0, 2.0, 7.0})
      CHECK(adaptive_weights(params_with_columns(first), gamma).isOnes());
  }
  SUBCASE("nonpositive gamma is rejected") {
    Matrix first = Matrix::Ones(2, 2);
    CHECK_THROWS_AS(adaptive_weights(params_with_columns(first), 0.0),
                    config_error);
    CHECK_THROWS_AS(adaptive_weights(params_with_columns(first), -1.0),
                    config_error);
  }
  SUBCASE("gamma 0 degenerates to unit weights on surviving groups") {
    Matrix first(2, 3);
    first << 0.7, 0.0, 2.0, -0.1, 0.0, 1.0;
    const Vector w =
        detail::adaptive_weights_unchecked(params_with_columns(first), 0.0);
    CHECK(w[0] == 1.0);
    CHECK(std::isinf(w[1]));
    CHECK(w[2] == 1.0);
  }
}

TEST_CASE("prox examples") {
  Vector u(2);
  u << 3.0, 4.0;
  SUBCASE("interior threshold shrinks radially") {
    const Vector z = prox_group(u, 2.5);
    CHECK(z[0] == 1.5);
    CHECK(z[1] == 2.0);
  }
  SUBCASE("threshold at the norm zeroes the block, bitwise") {
    const Vector z = prox_group(u, 5.0);
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 0.0);
    CHECK(z.norm() == 0.0);
  }
  SUBCASE("zero threshold is the identity") {
    const Vector z = prox_group(u, 0.0);
    CHECK(z[0] == u[0]);
    CHECK(z[1] == u[1]);
  }
  SUBCASE("negative threshold is rejected") {
    CHECK_THROWS_AS(prox_group(u, -0.1), config_error);
  }
}

TEST_CASE("prox output is exactly zero whenever the norm is under threshold") {
  SplitMix64 rng(17);
  for (int i = 0; i < 500; ++i) {
    Vector u(1 + static_cast<int>(rng.bounded(4)));
    for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = rng.uniform(-1, 1);
    const double tau = u.norm() * rng.uniform(1.0, 2.0);
    CHECK(prox_group(u, tau).norm() == 0.0);
  }
}

TEST_CASE("prox beats a grid search on the prox objective") {
  SplitMix64 rng(23);
  for (int i = 0; i < 40; ++i) {
    const bool three_d = i % 4 == 0;
    Vector u(three_d ? 3 : 2);
    const double scale = three_d ? 0.4 : 1.0;
    for (Eigen::Index j = 0; j < u.size(); ++j)
      u[j] = rng.uniform(-scale, scale);
    const double tau = rng.uniform(0.0, 1.2 * scale);
    const Vector z = prox_group(u, tau);
    const double fz = prox_objective(z, u, tau);

    const double radius = 2.0 * u.norm();
    const int steps = static_cast<int>(radius / 0.01);
    bool beaten = false;
    Vector c(u.size());
    if (u.size() == 2) {
      for (int a = -steps; a <= steps && !beaten; ++a)
        for (int b = -steps; b <= steps; ++b) {
          c << a * 0.01, b * 0.01;
          if (fz > prox_objective(c, u, tau) + 1e-9) {
            beaten = true;
            break;
          }
        }
    } else {
      for (int a = -steps; a <= steps && !beaten; ++a)
        for (int b = -steps; b <= steps && !beaten; ++b)
          for (int d = -steps; d <= steps; ++d) {
            c << a * 0.01, b * 0.01, d * 0.01;
            if (fz > prox_objective(c, u, tau) + 1e-9) {
              beaten = true;
              break;
            }
          }
    }
    CHECK(!beaten);
  }
}

TEST_CASE("prox is nonexpansive") {
  SplitMix64 rng(29);
  for (int i = 0; i < 300; ++i) {
    const int dim = 2 + static_cast<int>(rng.bounded(3));
    Vector u(dim), v(dim);
    for (int j = 0; j < dim; ++j) {
      u[j] = rng.uniform(-2, 2);
      v[j] = rng.uniform(-2, 2);
    }
    const double tau = rng.uniform(0.0, 2.0);
    CHECK((prox_group(u, tau) - prox_group(v, tau)).norm() <=
          (u - v).norm() + 1e-12);
  }
}

}  // TEST_SUITE
