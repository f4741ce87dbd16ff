#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "sparsenet/net.hpp"
#include "sparsenet/optimizer.hpp"
#include "sparsenet/testing.hpp"

using namespace sparsenet;

namespace {

Dataset small_synthetic(std::uint64_t seed, int n = 150) {
  SyntheticConfig gen;
  gen.arch = NetworkArch{{5, 4, 1}, Activation::kTanh};
  gen.n_features = 5;
  gen.n_significant = 3;
  gen.n_samples = n;
  gen.noise_sd = 0.3;
  gen.seed = seed;
  return gen_synthetic(gen).data;
}

// zero-mean columns with X^T X = n I, plus responses X * beta (noise-free,
// so the least-squares solution is exactly beta)
Dataset orthonormal_design(const Vector& beta, int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const int d = static_cast<int>(beta.size());
  Matrix M(n, d + 1);
  M.col(0).setOnes();
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n) * d; ++i)
    M.data()[n + i] = rng.normal();
  const Matrix Q = Eigen::HouseholderQR<Matrix>(M).householderQ() *
                   Matrix::Identity(n, d + 1);
  Dataset data;
  data.X = Q.rightCols(d) * std::sqrt(static_cast<double>(n));
  data.Y = data.X * beta;
  for (int j = 0; j < d; ++j)
    data.feature_names.push_back("x" + std::to_string(j + 1));
  return data;
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("config validation") {
  OptConfig c;
  c.epochs = 0;
  CHECK_THROWS_AS(c.validate(), config_error);
  c = OptConfig{};
  c.backtracking_factor = 1.0;
  CHECK_THROWS_AS(c.validate(), config_error);
  c = OptConfig{};
  c.backtracking_growth = 1.0;
  CHECK_THROWS_AS(c.validate(), config_error);
  c = OptConfig{};
  c.initial_step = 0.0;
  CHECK_THROWS_AS(c.validate(), config_error);
}

TEST_CASE("initialization is deterministic and fan-in scaled") {
  NetworkArch arch{{4, 5, 3, 1}, Activation::kTanh};
  const NetworkParams a = initialize_params(arch, 99);
  const NetworkParams b = initialize_params(arch, 99);
  CHECK((a.first_weights.array() == b.first_weights.array()).all());
  CHECK((a.output_weights.array() == b.output_weights.array()).all());
  CHECK((a.hidden[0].weights.array() == b.hidden[0].weights.array()).all());

  // first layer has fan-in 4, so every entry lies in [-0.5, 0.5]
  CHECK(a.first_weights.cwiseAbs().maxCoeff() <= 0.5);
  CHECK(a.first_bias.cwiseAbs().maxCoeff() <= 0.5);
  // the next stage has fan-in 5
  CHECK(a.hidden[0].weights.cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(5.0));

  const NetworkParams c = initialize_params(arch, 100);
  CHECK((a.first_weights.array() != c.first_weights.array()).any());
}

TEST_CASE("frozen columns are zeroed without disturbing the stream") {
  NetworkArch arch{{3, 4, 1}, Activation::kTanh};
  PenaltySpec spec = PenaltySpec::group_lasso(3, 0.1);
  spec.group_weights[1] = kFrozen;
  const NetworkParams plain = initialize_params(arch, 5);
  const NetworkParams frozen = initialize_params(arch, 5, &spec);
  CHECK(frozen.first_weights.col(1).norm() == 0.0);
  CHECK((frozen.first_weights.col(0).array() ==
         plain.first_weights.col(0).array())
            .all());
  CHECK((frozen.first_weights.col(2).array() ==
         plain.first_weights.col(2).array())
            .all());
  CHECK((frozen.output_weights.array() == plain.output_weights.array()).all());
}

TEST_CASE("unpenalized identity fit reaches the least-squares predictions") {
  SplitMix64 rng(12);
  const int n = 50, d = 3;
  Dataset data;
  data.X.resize(n, d);
  for (Eigen::Index i = 0; i < data.X.size(); ++i)
    data.X.data()[i] = rng.uniform(-1, 1);
  Vector beta(d);
  beta << 1.2, -0.7, 0.4;
  data.Y = data.X * beta + Vector::Constant(n, 0.3);
  for (Eigen::Index i = 0; i < n; ++i) data.Y[i] += 0.05 * rng.normal();
  for (int j = 0; j < d; ++j)
    data.feature_names.push_back("x" + std::to_string(j + 1));

  // oracle: normal equations with intercept
  Matrix Z(n, d + 1);
  Z.leftCols(d) = data.X;
  Z.col(d).setOnes();
  const Vector coef = (Z.transpose() * Z).ldlt().solve(Z.transpose() * data.Y);
  const Vector ls_pred = Z * coef;

  NetworkArch arch{{d, 1, 1}, Activation::kIdentity};
  OptConfig opt;
  opt.seed = 4;
  const FitResult fit_res =
      fit(arch, data, PenaltySpec::group_lasso(d, 0.0), opt);

  double sq = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pred = forward(arch, fit_res.params, data.X.row(i).transpose())[0];
    sq += (pred - ls_pred[i]) * (pred - ls_pred[i]);
  }
  CHECK(std::sqrt(sq / n) <= 1e-4);
}

TEST_CASE("a dominating lambda zeroes every group from the start") {
  const Dataset data = small_synthetic(3);
  NetworkArch arch{{5, 4, 1}, Activation::kTanh};
  OptConfig opt;
  opt.epochs = 200;
  opt.seed = 1;
  const FitResult res =
      fit(arch, data, PenaltySpec::group_lasso(5, 1e3), opt);
  for (int k = 0; k < 5; ++k) {
    CHECK(!res.support[k]);
    CHECK(res.group_norms[k] == 0.0);
  }
  // constant model: every prediction identical
  const Vector pred0 = forward(arch, res.params, data.X.row(0).transpose());
  const Vector pred1 = forward(arch, res.params, data.X.row(7).transpose());
  CHECK(pred0[0] == pred1[0]);
}

TEST_CASE("an all-frozen spec pins the whole first layer at zero") {
  const Dataset data = small_synthetic(4);
  NetworkArch arch{{5, 4, 1}, Activation::kTanh};
  PenaltySpec spec = PenaltySpec::group_lasso(5, 0.1);
  spec.group_weights.setConstant(kFrozen);
  OptConfig opt;
  opt.epochs = 300;
  const FitResult res = fit(arch, data, spec, opt);
  CHECK(res.params.first_weights.cwiseAbs().maxCoeff() == 0.0);
  for (int k = 0; k < 5; ++k) CHECK(!res.support[k]);
}

TEST_CASE("objective trace is nonincreasing even with a large initial step") {
  const Dataset data = small_synthetic(5);
  NetworkArch arch{{5, 4, 1}, Activation::kTanh};
  OptConfig opt;
  opt.epochs = 500;
  opt.initial_step = 10.0;  // forces backtracking
  opt.seed = 2;
  const FitResult res =
      fit(arch, data, PenaltySpec::group_lasso(5, 0.05), opt);
  REQUIRE(!res.objective_trace.empty());
  for (std::size_t t = 1; t < res.objective_trace.size(); ++t)
    CHECK(res.objective_trace[t] <= res.objective_trace[t - 1] + 1e-12);
}

TEST_CASE("identical inputs give bitwise-identical fits") {
  const Dataset data = small_synthetic(6);
  NetworkArch arch{{5, 3, 3, 1}, Activation::kTanh};
  OptConfig opt;
  opt.epochs = 400;
  opt.seed = 11;
  const PenaltySpec spec = PenaltySpec::group_lasso(5, 0.02);
  const FitResult a = fit(arch, data, spec, opt);
  const FitResult b = fit(arch, data, spec, opt);
  CHECK(a.objective_trace == b.objective_trace);
  CHECK((a.params.first_weights.array() == b.params.first_weights.array()).all());
  CHECK((a.params.output_weights.array() == b.params.output_weights.array()).all());
  CHECK(a.support == b.support);
  CHECK((a.group_norms.array() == b.group_norms.array()).all());
}

TEST_CASE("reported zero groups are bitwise zero") {
  const Dataset data = small_synthetic(7);
  NetworkArch arch{{5, 4, 1}, Activation::kTanh};
  OptConfig opt;
  opt.epochs = 2000;
  const FitResult res = fit(arch, data, PenaltySpec::group_lasso(5, 0.4), opt);
  for (int k = 0; k < 5; ++k) {
    CHECK(res.support[k] == (res.group_norms[k] > 0.0));
    if (!res.support[k]) {
      CHECK(res.group_norms[k] == 0.0);
      CHECK(res.params.first_weights.col(k).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("early stop triggers on a tolerance") {
  const Dataset data = small_synthetic(8);
  NetworkArch arch{{5, 4, 1}, Activation::kTanh};
  OptConfig opt;
  opt.epochs = 20000;
  opt.objective_tolerance = 1e-4;
  const FitResult res = fit(arch, data, PenaltySpec::group_lasso(5, 0.05), opt);
  CHECK(res.converged_early);
  CHECK(res.epochs_run < opt.epochs);
  CHECK(res.epochs_run == static_cast<int>(res.objective_trace.size()));
}

TEST_CASE("divergence guard reports the epoch") {
  const Dataset data = small_synthetic(9);
  NetworkArch arch{{5, 4, 1}, Activation::kTanh};
  OptConfig opt;
  opt.divergence_cap = 1e-9;  // everything trips it immediately
  try {
    fit(arch, data, PenaltySpec::group_lasso(5, 0.0), opt);
    FAIL("expected divergence_error");
  } catch (const divergence_error& e) {
    CHECK(e.epoch == 1);
  }
}

TEST_CASE("orthonormal-design fit matches the soft-threshold closed form") {
  Vector beta(6);
  beta << 0.05, 0.2, 0.4, 0.7, 1.2, 2.0;
  const Dataset data = orthonormal_design(beta, 64, 77);
  NetworkArch arch{{6, 1, 1}, Activation::kIdentity};

  // the degenerate linear model: output layer pinned at (1, 0)
  NetworkParams init = initialize_params(arch, 13);
  init.output_weights(0, 0) = 1.0;
  init.output_bias[0] = 0.0;
  OptConfig opt;
  opt.freeze_output_layer = true;

  const double lambda = 0.5;
  const FitResult res =
      fit(arch, data, PenaltySpec::group_lasso(6, lambda), opt, &init);

  const Vector b = data.X.transpose() * data.Y / static_cast<double>(data.n());
  for (int k = 0; k < 6; ++k) {
    const double closed = std::max(0.0, std::abs(b[k]) - lambda / 2.0);
    CHECK(res.group_norms[k] == doctest::Approx(closed).epsilon(1e-6));
    CHECK(std::abs(res.group_norms[k] - closed) <= 1e-4);
  }
}

}  // TEST_SUITE
