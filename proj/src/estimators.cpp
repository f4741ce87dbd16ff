#include "sparsenet/estimators.hpp"

#include "sparsenet/net.hpp"
#include "sparsenet/rng.hpp"

namespace sparsenet {

std::string to_string(Method m) {
  return m == Method::kGroupLasso ? "gl" : "gl-agl";
}

Method method_from_string(const std::string& name) {
  if (name == "gl") return Method::kGroupLasso;
  if (name == "gl-agl" || name == "gl_agl") return Method::kGroupLassoAdaptive;
  throw config_error("unknown method '" + name + "' (expected gl or gl-agl)");
}

namespace {

void validate_grid(const std::vector<double>& grid, const std::string& name) {
  if (grid.empty()) throw config_error(name + " must be nonempty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0))
      throw config_error(name + " entries must be > 0");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw config_error(name + " must be strictly increasing");
  }
}

// Lowest mean error wins; ties break toward the larger (sparser) constant.
std::size_t argmin_prefer_larger(const std::vector<GridEntry>& table) {
  std::size_t best = table.size() - 1;
  for (std::size_t i = table.size(); i-- > 0;)
    if (table[i].mean_test_mse < table[best].mean_test_mse) best = i;
  return best;
}

// Seed streams: 0x100+i for split i, 0x200+s / 0x300+s for stage-1 / stage-2
// initializations on split s (shared across grid points so every constant is
// compared from the same start).
constexpr std::uint64_t kSplitStream = 0x100;
constexpr std::uint64_t kStage1InitStream = 0x200;
constexpr std::uint64_t kStage2InitStream = 0x300;
constexpr std::uint64_t kStage2FullFitStream = 1;

}  // namespace

void SelectConfig::validate() const {
  if (!(gamma > 0.0)) throw config_error("gamma must be > 0");
  validate_grid(lambda_grid, "lambda_grid");
  validate_grid(zeta_grid, "zeta_grid");
  if (n_splits < 1) throw config_error("n_splits must be >= 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw config_error("test_fraction must be in (0, 1)");
  opt.validate();
}

FitResult fit_group_lasso(const NetworkArch& arch, const Dataset& data,
                          double lambda, const SelectConfig& config) {
  config.validate();
  if (lambda < 0.0) throw config_error("lambda must be >= 0");
  const PenaltySpec spec =
      PenaltySpec::group_lasso(static_cast<int>(data.n_features()), lambda);
  const NetworkParams init = initialize_params(arch, config.seed, &spec);
  return fit(arch, data, spec, config.opt, &init);
}

TwoStageFit fit_gl_agl(const NetworkArch& arch, const Dataset& data,
                       double lambda, double zeta, const SelectConfig& config) {
  if (zeta < 0.0) throw config_error("zeta must be >= 0");
  TwoStageFit out;
  out.base = fit_group_lasso(arch, data, lambda, config);

  PenaltySpec spec;
  spec.group_weights = adaptive_weights(out.base.params, config.gamma);
  spec.lambda = zeta;
  const NetworkParams init = initialize_params(
      arch, derive_seed(config.seed, kStage2FullFitStream), &spec);
  out.final = fit(arch, data, spec, config.opt, &init);
  return out;
}

GridSelection grid_select(const NetworkArch& arch, const Dataset& data,
                          Method method, const SelectConfig& config) {
  config.validate();
  data.validate();

  std::vector<std::pair<Dataset, Dataset>> splits;
  splits.reserve(config.n_splits);
  for (int i = 0; i < config.n_splits; ++i)
    splits.push_back(train_test_split(data, config.test_fraction,
                                      derive_seed(config.seed, kSplitStream + i)));

  const int d0 = static_cast<int>(data.n_features());
  std::vector<NetworkParams> stage1_init;
  stage1_init.reserve(splits.size());
  for (std::size_t s = 0; s < splits.size(); ++s)
    stage1_init.push_back(
        initialize_params(arch, derive_seed(config.seed, kStage1InitStream + s)));

  GridSelection out;
  // lambda sweep; fits at each grid point are kept so the winning point's
  // split fits can seed the zeta sweep without refitting
  std::vector<std::vector<FitResult>> stage1_fits(config.lambda_grid.size());
  for (std::size_t li = 0; li < config.lambda_grid.size(); ++li) {
    const PenaltySpec spec =
        PenaltySpec::group_lasso(d0, config.lambda_grid[li]);
    double err_sum = 0.0;
    stage1_fits[li].reserve(splits.size());
    for (std::size_t s = 0; s < splits.size(); ++s) {
      stage1_fits[li].push_back(fit(arch, splits[s].first, spec, config.opt,
                                    &stage1_init[s]));
      err_sum += empirical_risk(arch, stage1_fits[li][s].params,
                                splits[s].second);
    }
    out.lambda_errors.push_back(
        {config.lambda_grid[li], err_sum / static_cast<double>(splits.size())});
  }
  const std::size_t best_li = argmin_prefer_larger(out.lambda_errors);
  out.lambda = config.lambda_grid[best_li];
  if (method == Method::kGroupLasso) return out;

  // zeta sweep with per-split adaptive weights from the chosen lambda's fits
  std::vector<PenaltySpec> stage2_spec(splits.size());
  std::vector<NetworkParams> stage2_init;
  stage2_init.reserve(splits.size());
  for (std::size_t s = 0; s < splits.size(); ++s) {
    stage2_spec[s].group_weights =
        adaptive_weights(stage1_fits[best_li][s].params, config.gamma);
    stage2_init.push_back(initialize_params(
        arch, derive_seed(config.seed, kStage2InitStream + s), &stage2_spec[s]));
  }
  for (const double zeta : config.zeta_grid) {
    double err_sum = 0.0;
    for (std::size_t s = 0; s < splits.size(); ++s) {
      PenaltySpec spec = stage2_spec[s];
      spec.lambda = zeta;
      const FitResult f =
          fit(arch, splits[s].first, spec, config.opt, &stage2_init[s]);
      err_sum += empirical_risk(arch, f.params, splits[s].second);
    }
    out.zeta_errors.push_back(
        {zeta, err_sum / static_cast<double>(splits.size())});
  }
  out.zeta = config.zeta_grid[argmin_prefer_larger(out.zeta_errors)];
  return out;
}

const std::vector<bool>& selected_support(const FitResult& fit) {
  return fit.support;
}

}  // namespace sparsenet
