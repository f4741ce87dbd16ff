#include <doctest.h>

#include <cmath>

#include "sparsenet/net.hpp"
#include "sparsenet/testing.hpp"

using namespace sparsenet;

namespace {

Dataset make_dataset(Matrix X, Vector Y) {
  Dataset d;
  d.X = std::move(X);
  d.Y = std::move(Y);
  for (Eigen::Index j = 0; j < d.X.cols(); ++j)
    d.feature_names.push_back("x" + std::to_string(j + 1));
  return d;
}

}  // namespace

TEST_SUITE("net") {

TEST_CASE("constant network returns its output bias for every input") {
  NetworkArch arch{{3, 2, 2, 1}, Activation::kTanh};
  NetworkParams p = NetworkParams::zeros(arch);
  p.output_bias[0] = 0.5;
  SplitMix64 rng(1);
  for (int i = 0; i < 10; ++i) {
    Vector x(3);
    x << rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5);
    const Vector out = forward(arch, p, x);
    CHECK(out.size() == 1);
    CHECK(out[0] == 0.5);
  }
}

TEST_CASE("1-1-1 tanh network evaluates the scalar composition") {
  NetworkArch arch{{1, 1, 1}, Activation::kTanh};
  NetworkParams p = NetworkParams::zeros(arch);
  p.first_weights(0, 0) = 1.0;
  p.output_weights(0, 0) = 1.0;
  Vector x(1);
  x << 1.0;
  // oracle: independent scalar evaluation of the composition
  const double expected = std::tanh(1.0);
  CHECK(forward(arch, p, x)[0] == doctest::Approx(expected).epsilon(1e-15));
  CHECK(forward(arch, p, x)[0] ==
        doctest::Approx(0.7615941559557649).epsilon(1e-12));
}

TEST_CASE("zero first-layer column makes the output independent of that input") {
  SplitMix64 rng(42);
  NetworkArch arch{{4, 3, 3, 1}, Activation::kTanh};
  NetworkParams p = testing::random_params(arch, rng);
  p.first_weights.col(2).setZero();
  for (int i = 0; i < 20; ++i) {
    Vector x(4), x2(4);
    for (int j = 0; j < 4; ++j) x[j] = rng.uniform(-2, 2);
    x2 = x;
    x2[2] = rng.uniform(-100, 100);
    const Vector a = forward(arch, p, x);
    const Vector b = forward(arch, p, x2);
    CHECK(a[0] == b[0]);  // bitwise
  }
}

TEST_CASE("shape mismatch is reported with the offending layer") {
  NetworkArch arch{{3, 2, 1}, Activation::kTanh};
  NetworkParams p = NetworkParams::zeros(arch);
  p.first_weights.resize(2, 4);
  p.first_weights.setZero();
  Vector x(3);
  x.setZero();
  try {
    forward(arch, p, x);
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(std::string(e.what()).find("first layer") != std::string::npos);
  }
}

TEST_CASE("empirical risk on constant-zero networks") {
  NetworkArch arch{{2, 2, 1}, Activation::kTanh};
  NetworkParams p = NetworkParams::zeros(arch);

  SUBCASE("all-zero responses give zero risk") {
    const Dataset d = make_dataset(Matrix::Random(3, 2), Vector::Zero(3));
    CHECK(empirical_risk(arch, p, d) == 0.0);
  }
  SUBCASE("responses (1, -1) give risk 1") {
    Vector y(2);
    y << 1.0, -1.0;
    const Dataset d = make_dataset(Matrix::Random(2, 2), y);
    CHECK(empirical_risk(arch, p, d) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("empty dataset is rejected") {
    const Dataset d = make_dataset(Matrix(0, 2), Vector(0));
    CHECK_THROWS_AS(empirical_risk(arch, p, d), config_error);
  }
}

TEST_CASE("empirical risk equals the mean of per-sample squared errors") {
  SplitMix64 rng(7);
  const NetworkArch arch = testing::random_arch(rng);
  const NetworkParams p = testing::random_params(arch, rng);
  const Dataset d = testing::random_dataset(333, arch.input_width(), rng);

  double ss = 0.0;
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    const double r = forward(arch, p, d.X.row(i).transpose())[0] - d.Y[i];
    ss += r * r;
  }
  const double risk = empirical_risk(arch, p, d);
  CHECK(risk >= 0.0);
  CHECK(risk == doctest::Approx(ss / static_cast<double>(d.n())).epsilon(1e-12));
}

TEST_CASE("gradient vanishes on perfectly fitted data") {
  NetworkArch arch{{2, 3, 1}, Activation::kTanh};
  NetworkParams p = NetworkParams::zeros(arch);
  p.output_bias[0] = 0.5;
  const Dataset d =
      make_dataset(Matrix::Random(5, 2), Vector::Constant(5, 0.5));
  const NetworkParams g = gradient(arch, p, d);
  CHECK(g.max_abs() == 0.0);
}

TEST_CASE("output-bias gradient is -2 times the mean residual") {
  // identity activation: f(x) = Q(Px + p) + q reduces to linear regression
  SplitMix64 rng(11);
  NetworkArch arch{{3, 2, 1}, Activation::kIdentity};
  const NetworkParams p = testing::random_params(arch, rng);
  const Dataset d = testing::random_dataset(40, 3, rng);

  double mean_residual = 0.0;  // residual in the y - f(x) sense
  for (Eigen::Index i = 0; i < d.n(); ++i)
    mean_residual += d.Y[i] - forward(arch, p, d.X.row(i).transpose())[0];
  mean_residual /= static_cast<double>(d.n());

  const NetworkParams g = gradient(arch, p, d);
  CHECK(g.output_bias[0] ==
        doctest::Approx(-2.0 * mean_residual).epsilon(1e-12));
}

TEST_CASE("gradient matches central finite differences on random instances") {
  SplitMix64 rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 30; ++i) {
    const NetworkArch arch = testing::random_arch(rng, 2, 5);
    const NetworkParams p = testing::random_params(arch, rng);
    const Dataset d = testing::random_dataset(
        2 + static_cast<int>(rng.bounded(18)), arch.input_width(), rng);
    worst = std::max(worst, testing::fd_relative_error(arch, p, d));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("permuting hidden nodes leaves the forward map unchanged") {
  SplitMix64 rng(5);
  NetworkArch arch{{3, 4, 5, 1}, Activation::kTanh};
  const NetworkParams p = testing::random_params(arch, rng);

  // swap nodes of the first activated stage: rows of incoming weights and
  // bias, columns of the outgoing weights
  NetworkParams q = p;
  q.first_weights.row(0).swap(q.first_weights.row(2));
  std::swap(q.first_bias[0], q.first_bias[2]);
  q.hidden[0].weights.col(0).swap(q.hidden[0].weights.col(2));

  for (int i = 0; i < 10; ++i) {
    Vector x(3);
    x << rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2);
    CHECK(forward(arch, p, x)[0] ==
          doctest::Approx(forward(arch, q, x)[0]).epsilon(1e-12));
  }
}

TEST_CASE("repeated evaluation returns identical values") {
  SplitMix64 rng(9);
  const NetworkArch arch = testing::random_arch(rng);
  const NetworkParams p = testing::random_params(arch, rng);
  const Dataset d = testing::random_dataset(50, arch.input_width(), rng);
  Vector x = d.X.row(3).transpose();

  CHECK(forward(arch, p, x) == forward(arch, p, x));
  CHECK(empirical_risk(arch, p, d) == empirical_risk(arch, p, d));
  const NetworkParams g1 = gradient(arch, p, d);
  const NetworkParams g2 = gradient(arch, p, d);
  CHECK((g1.first_weights.array() == g2.first_weights.array()).all());
  CHECK((g1.output_weights.array() == g2.output_weights.array()).all());
}

}  // TEST_SUITE
