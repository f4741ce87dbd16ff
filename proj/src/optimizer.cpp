#include "sparsenet/optimizer.hpp"

#include <cmath>

#include "sparsenet/kernels.hpp"
#include "sparsenet/rng.hpp"

namespace sparsenet {

void OptConfig::validate() const {
  if (epochs < 1) throw config_error("epochs must be >= 1");
  if (!(initial_step > 0.0)) throw config_error("initial_step must be > 0");
  if (!(backtracking_factor > 0.0 && backtracking_factor < 1.0))
    throw config_error("backtracking_factor must be in (0, 1)");
  if (!(backtracking_growth > 1.0))
    throw config_error("backtracking_growth must be > 1");
  if (!(divergence_cap > 0.0)) throw config_error("divergence_cap must be > 0");
  if (objective_tolerance < 0.0)
    throw config_error("objective_tolerance must be >= 0");
}

namespace {

void fill_uniform(SplitMix64& rng, double radius, Matrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = rng.uniform(-radius, radius);
}

void fill_uniform(SplitMix64& rng, double radius, Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = rng.uniform(-radius, radius);
}

// Gradient step on everything unpenalized, step + group prox on the first
// layer, frozen columns pinned at exact zero. `column` is a reusable buffer.
void apply_step(const NetworkArch& arch, const NetworkParams& params,
                const NetworkParams& grad, double step,
                const PenaltySpec& spec, bool freeze_output,
                NetworkParams& out, Vector& column) {
  for (int k = 0; k < params.n_groups(); ++k) {
    if (spec.frozen(k)) {
      out.first_weights.col(k).setZero();
      continue;
    }
    column = params.first_weights.col(k) - step * grad.first_weights.col(k);
    const double threshold = step * spec.lambda * spec.group_weights[k];
    const double norm = column.norm();
    if (norm <= threshold)
      out.first_weights.col(k).setZero();
    else
      out.first_weights.col(k) = (1.0 - threshold / norm) * column;
  }
  out.first_bias = params.first_bias - step * grad.first_bias;
  for (std::size_t i = 0; i < params.hidden.size(); ++i) {
    out.hidden[i].weights =
        params.hidden[i].weights - step * grad.hidden[i].weights;
    out.hidden[i].bias = params.hidden[i].bias - step * grad.hidden[i].bias;
  }
  if (freeze_output) {
    out.output_weights = params.output_weights;
    out.output_bias = params.output_bias;
  } else {
    out.output_weights = params.output_weights - step * grad.output_weights;
    out.output_bias = params.output_bias - step * grad.output_bias;
  }
}

}  // namespace

NetworkParams initialize_params(const NetworkArch& arch, std::uint64_t seed,
                                const PenaltySpec* spec) {
  arch.validate();
  NetworkParams p = NetworkParams::zeros(arch);
  SplitMix64 rng(seed);

  const auto& w = arch.layer_widths;
  double r = 1.0 / std::sqrt(static_cast<double>(w[0]));
  fill_uniform(rng, r, p.first_weights);
  fill_uniform(rng, r, p.first_bias);
  for (int s = 0; s < arch.n_hidden_stages(); ++s) {
    r = 1.0 / std::sqrt(static_cast<double>(w[s + 1]));
    fill_uniform(rng, r, p.hidden[s].weights);
    fill_uniform(rng, r, p.hidden[s].bias);
  }
  r = 1.0 / std::sqrt(static_cast<double>(w[w.size() - 2]));
  fill_uniform(rng, r, p.output_weights);
  fill_uniform(rng, r, p.output_bias);

  if (spec) {
    spec->validate(arch.input_width());
    for (int k = 0; k < arch.input_width(); ++k)
      if (spec->frozen(k)) p.first_weights.col(k).setZero();
  }
  return p;
}

FitResult fit(const NetworkArch& arch, const Dataset& data,
              const PenaltySpec& spec, const OptConfig& config,
              const NetworkParams* init) {
  arch.validate();
  config.validate();
  data.validate();
  spec.validate(static_cast<int>(data.n_features()));
  if (arch.input_width() != data.n_features())
    throw config_error("network expects " + std::to_string(arch.input_width()) +
                       " inputs, dataset has " + std::to_string(data.n_features()));
  if (arch.output_width() != 1)
    throw config_error("fit requires a single-output network");

  NetworkParams params =
      init ? *init : initialize_params(arch, config.seed, &spec);
  params.validate_shapes(arch);
  if (!params.all_finite())
    throw config_error("initial parameters contain non-finite entries");
  for (int k = 0; k < params.n_groups(); ++k)
    if (spec.frozen(k) && (params.first_weights.col(k).array() != 0.0).any())
      throw config_error("frozen group " + std::to_string(k) +
                         " has a nonzero initial column");

  kernels::BatchCache cache_cur, cache_cand;
  std::vector<kernels::BlockScratch> scratch;
  NetworkParams grad = NetworkParams::zeros(arch);
  NetworkParams cand = params;
  Vector column(arch.first_width());

  double objective = kernels::risk(arch, params, data.X, data.Y, &cache_cur) +
                     penalty_value(spec, params);
  if (!std::isfinite(objective))
    throw divergence_error("objective not finite at initialization", 0);

  FitResult result;
  result.objective_trace.reserve(config.epochs);
  double step = config.initial_step;
  bool early = false;

  // backtracking can only stall at a prox fixed point; past this many
  // halvings the move is below double resolution and is accepted as a no-op
  constexpr int kMaxHalvings = 120;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    kernels::gradient_from_cache(arch, params, data.X, data.Y, cache_cur,
                                 scratch, grad);
    double s = step;
    double objective_new = 0.0;
    for (int halvings = 0;; ++halvings) {
      apply_step(arch, params, grad, s, spec, config.freeze_output_layer,
                 cand, column);
      objective_new = kernels::risk(arch, cand, data.X, data.Y, &cache_cand) +
                      penalty_value(spec, cand);
      if (std::isfinite(objective_new) && objective_new <= objective) break;
      if (halvings >= kMaxHalvings) {
        if (!std::isfinite(objective_new))
          throw divergence_error("objective became non-finite at epoch " +
                                     std::to_string(epoch),
                                 epoch);
        break;
      }
      s *= config.backtracking_factor;
    }

    std::swap(params, cand);
    std::swap(cache_cur, cache_cand);
    const double decrease = objective - objective_new;
    objective = objective_new;
    result.objective_trace.push_back(objective);

    if (params.max_abs() > config.divergence_cap)
      throw divergence_error("parameter magnitude exceeded divergence_cap at epoch " +
                                 std::to_string(epoch),
                             epoch);

    step = std::min(s * config.backtracking_growth, config.initial_step);
    if (config.objective_tolerance > 0.0 &&
        decrease <= config.objective_tolerance) {
      early = true;
      break;
    }
  }

  result.params = std::move(params);
  result.group_norms = result.params.group_norms();
  result.support.resize(result.params.n_groups());
  for (int k = 0; k < result.params.n_groups(); ++k)
    result.support[k] = result.group_norms[k] > 0.0;
  result.epochs_run = static_cast<int>(result.objective_trace.size());
  result.converged_early = early;
  return result;
}

}  // namespace sparsenet
