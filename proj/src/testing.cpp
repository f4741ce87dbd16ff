#include "sparsenet/testing.hpp"

#include <cmath>
#include <ostream>

#include "sparsenet/estimators.hpp"
#include "sparsenet/kernels.hpp"
#include "sparsenet/reference.hpp"

namespace sparsenet::testing {

NetworkArch random_arch(SplitMix64& rng, int max_hidden_stages, int max_width,
                        Activation activation) {
  NetworkArch arch;
  arch.activation = activation;
  const int stages = static_cast<int>(rng.bounded(max_hidden_stages + 1));
  auto width = [&] { return 1 + static_cast<int>(rng.bounded(max_width)); };
  arch.layer_widths.push_back(width());            // d0
  arch.layer_widths.push_back(width());            // d1
  for (int s = 0; s < stages; ++s) arch.layer_widths.push_back(width());
  arch.layer_widths.push_back(1);                  // single output
  return arch;
}

NetworkParams random_params(const NetworkArch& arch, SplitMix64& rng,
                            double scale) {
  NetworkParams p = NetworkParams::zeros(arch);
  auto fill = [&](auto& block) {
    for (Eigen::Index i = 0; i < block.size(); ++i)
      block.data()[i] = rng.uniform(-scale, scale);
  };
  fill(p.first_weights);
  fill(p.first_bias);
  for (auto& h : p.hidden) {
    fill(h.weights);
    fill(h.bias);
  }
  fill(p.output_weights);
  fill(p.output_bias);
  return p;
}

Dataset random_dataset(int n, int d0, SplitMix64& rng) {
  Dataset data;
  data.X.resize(n, d0);
  data.Y.resize(n);
  for (Eigen::Index i = 0; i < data.X.size(); ++i)
    data.X.data()[i] = rng.uniform(-1.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) data.Y[i] = rng.uniform(-1.0, 1.0);
  for (int j = 0; j < d0; ++j)
    data.feature_names.push_back("x" + std::to_string(j + 1));
  return data;
}

namespace {

// Visit every parameter coordinate as a mutable reference, fixed order.
template <typename Fn>
void for_each_coord(NetworkParams& p, Fn&& fn) {
  auto visit = [&](auto& block) {
    for (Eigen::Index i = 0; i < block.size(); ++i) fn(block.data()[i]);
  };
  visit(p.first_weights);
  visit(p.first_bias);
  for (auto& h : p.hidden) {
    visit(h.weights);
    visit(h.bias);
  }
  visit(p.output_weights);
  visit(p.output_bias);
}

}  // namespace

NetworkParams fd_gradient(const NetworkArch& arch, const NetworkParams& params,
                          const Dataset& data, double step) {
  NetworkParams probe = params;
  NetworkParams grad = NetworkParams::zeros(arch);

  std::vector<double*> coords, grads;
  for_each_coord(probe, [&](double& c) { coords.push_back(&c); });
  for_each_coord(grad, [&](double& g) { grads.push_back(&g); });

  for (std::size_t i = 0; i < coords.size(); ++i) {
    const double saved = *coords[i];
    *coords[i] = saved + step;
    const double up = empirical_risk(arch, probe, data);
    *coords[i] = saved - step;
    const double down = empirical_risk(arch, probe, data);
    *coords[i] = saved;
    *grads[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

double fd_relative_error(const NetworkArch& arch, const NetworkParams& params,
                         const Dataset& data, double fd_step) {
  const NetworkParams analytic = gradient(arch, params, data);
  NetworkParams fd = fd_gradient(arch, params, data, fd_step);

  double worst = 0.0;
  std::vector<const double*> a, b;
  NetworkParams ac = analytic, fc = fd;
  for_each_coord(ac, [&](double& v) { a.push_back(&v); });
  for_each_coord(fc, [&](double& v) { b.push_back(&v); });
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(*a[i] - *b[i]) / (1.0 + std::abs(*b[i])));
  return worst;
}

namespace {

bool report(std::ostream& out, const std::string& name, bool ok,
            const std::string& detail = "") {
  out << (ok ? "[PASS] " : "[FAIL] ") << name;
  if (!detail.empty()) out << " (" << detail << ")";
  out << '\n';
  return ok;
}

}  // namespace

bool selfcheck(std::ostream& out) {
  bool all = true;
  SplitMix64 rng(20240601);

  {  // gradients against central finite differences
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const NetworkArch arch = random_arch(rng);
      const NetworkParams params = random_params(arch, rng);
      const Dataset data =
          random_dataset(2 + static_cast<int>(rng.bounded(18)),
                         arch.input_width(), rng);
      worst = std::max(worst, fd_relative_error(arch, params, data));
    }
    all &= report(out, "gradient matches finite differences", worst <= 1e-5,
                  "max rel err " + std::to_string(worst));
  }

  {  // prox against grid search on the prox objective
    bool ok = true;
    for (int i = 0; i < 200 && ok; ++i) {
      Vector u(2);
      u << rng.uniform(-1, 1), rng.uniform(-1, 1);
      const double tau = rng.uniform(0.0, 1.2);
      const Vector z = prox_group(u, tau);
      const double fz = 0.5 * (z - u).squaredNorm() + tau * z.norm();
      const double radius = 2.0 * u.norm();
      for (double x = -radius; x <= radius && ok; x += 0.05)
        for (double y = -radius; y <= radius; y += 0.05) {
          Vector c(2);
          c << x, y;
          const double fc = 0.5 * (c - u).squaredNorm() + tau * c.norm();
          if (fz > fc + 1e-9) {
            ok = false;
            break;
          }
        }
      if (u.norm() <= tau && z.norm() != 0.0) ok = false;
    }
    all &= report(out, "block soft-threshold beats grid search", ok);
  }

  {  // blocked kernels against the serial reference
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const NetworkArch arch = random_arch(rng);
      const NetworkParams params = random_params(arch, rng);
      const Dataset data = random_dataset(
          300 + static_cast<int>(rng.bounded(300)), arch.input_width(), rng);
      const double fast = empirical_risk(arch, params, data);
      const double slow = reference::risk(arch, params, data.X, data.Y);
      worst = std::max(worst, std::abs(fast - slow) / (1.0 + std::abs(slow)));
    }
    all &= report(out, "blocked kernels match serial reference", worst <= 1e-12,
                  "max rel err " + std::to_string(worst));
  }

  {  // bitwise determinism of a small penalized fit
    NetworkArch arch{{4, 3, 3, 1}, Activation::kTanh};
    SyntheticConfig gen;
    gen.arch = arch;
    gen.n_features = 4;
    gen.n_significant = 2;
    gen.n_samples = 120;
    gen.seed = 7;
    const Dataset data = gen_synthetic(gen).data;
    const PenaltySpec spec = PenaltySpec::group_lasso(4, 0.05);
    OptConfig opt;
    opt.epochs = 500;
    opt.seed = 3;
    const FitResult a = fit(arch, data, spec, opt);
    const FitResult b = fit(arch, data, spec, opt);
    bool ok = a.objective_trace == b.objective_trace &&
              a.group_norms == b.group_norms && a.support == b.support;
    ok = ok && (a.params.first_weights.array() == b.params.first_weights.array())
                   .all();
    // monotone objective, and reported zero groups are bitwise zero
    for (std::size_t t = 1; t < a.objective_trace.size(); ++t)
      if (a.objective_trace[t] > a.objective_trace[t - 1] + 1e-12) ok = false;
    for (int k = 0; k < 4; ++k)
      if (!a.support[k] && a.group_norms[k] != 0.0) ok = false;
    all &= report(out, "fit is deterministic with exact-zero groups", ok);
  }

  return all;
}

}  // namespace sparsenet::testing
