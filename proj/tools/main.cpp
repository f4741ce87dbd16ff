#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparsenet/harness.hpp"
#include "sparsenet/net.hpp"
#include "sparsenet/testing.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

using json = nlohmann::ordered_json;
using namespace sparsenet;

namespace {

// ---------------------------------------------------------------------------
// run configuration: one JSON document mirroring the module configs, with
// unknown keys rejected and flag overrides applied afterwards

struct RunConfig {
  std::optional<std::vector<int>> arch_widths;
  Activation activation = Activation::kTanh;

  SyntheticConfig synth;
  OptConfig opt;
  SelectConfig select;

  std::string experiment_kind = "synth";
  int replicates = 100;
  std::string method = "both";
  int workers = 1;
  std::string out_dir = "out";
  std::uint64_t base_seed = 0;
  std::string data_path;
  std::string response = "y";
  int add_noise = 0;
  bool standardize = true;

  bool synth_seed_set = false;
  bool opt_seed_set = false;
  bool select_seed_set = false;
  bool base_seed_set = false;

  RunConfig() {
    synth.arch = NetworkArch{};  // resolved after the input width is known
    synth.n_features = 50;
    synth.n_significant = 10;
    synth.n_samples = 5000;
  }
};

void reject_unknown(const json& obj, const std::vector<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw config_error("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_into(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw config_error(std::string("bad value for '") + key + "'");
  }
}

void read_seed(const json& obj, const char* key, std::uint64_t& out, bool& set) {
  if (!obj.contains(key)) return;
  read_into(obj, key, out);
  set = true;
}

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw parse_error("config '" + path + "': " + e.what());
  }
  reject_unknown(doc, {"arch", "synthetic", "optimizer", "select", "experiment"},
                 "config");

  if (doc.contains("arch")) {
    const json& a = doc["arch"];
    reject_unknown(a, {"layer_widths", "activation"}, "arch");
    if (a.contains("layer_widths"))
      cfg.arch_widths = a.at("layer_widths").get<std::vector<int>>();
    if (a.contains("activation"))
      cfg.activation = activation_from_string(a.at("activation").get<std::string>());
  }
  if (doc.contains("synthetic")) {
    const json& s = doc["synthetic"];
    reject_unknown(s,
                   {"n_features", "n_significant", "n_samples", "noise_sd",
                    "input_low", "input_high", "seed"},
                   "synthetic");
    read_into(s, "n_features", cfg.synth.n_features);
    read_into(s, "n_significant", cfg.synth.n_significant);
    read_into(s, "n_samples", cfg.synth.n_samples);
    read_into(s, "noise_sd", cfg.synth.noise_sd);
    read_into(s, "input_low", cfg.synth.input_low);
    read_into(s, "input_high", cfg.synth.input_high);
    read_seed(s, "seed", cfg.synth.seed, cfg.synth_seed_set);
  }
  if (doc.contains("optimizer")) {
    const json& o = doc["optimizer"];
    reject_unknown(o,
                   {"epochs", "initial_step", "backtracking_factor",
                    "backtracking_growth", "divergence_cap",
                    "objective_tolerance", "seed", "freeze_output_layer"},
                   "optimizer");
    read_into(o, "epochs", cfg.opt.epochs);
    read_into(o, "initial_step", cfg.opt.initial_step);
    read_into(o, "backtracking_factor", cfg.opt.backtracking_factor);
    read_into(o, "backtracking_growth", cfg.opt.backtracking_growth);
    read_into(o, "divergence_cap", cfg.opt.divergence_cap);
    read_into(o, "objective_tolerance", cfg.opt.objective_tolerance);
    read_into(o, "freeze_output_layer", cfg.opt.freeze_output_layer);
    read_seed(o, "seed", cfg.opt.seed, cfg.opt_seed_set);
  }
  if (doc.contains("select")) {
    const json& s = doc["select"];
    reject_unknown(s,
                   {"gamma", "lambda_grid", "zeta_grid", "n_splits",
                    "test_fraction", "seed"},
                   "select");
    read_into(s, "gamma", cfg.select.gamma);
    read_into(s, "lambda_grid", cfg.select.lambda_grid);
    read_into(s, "zeta_grid", cfg.select.zeta_grid);
    read_into(s, "n_splits", cfg.select.n_splits);
    read_into(s, "test_fraction", cfg.select.test_fraction);
    read_seed(s, "seed", cfg.select.seed, cfg.select_seed_set);
  }
  if (doc.contains("experiment")) {
    const json& e = doc["experiment"];
    reject_unknown(e,
                   {"kind", "replicates", "method", "workers", "out_dir",
                    "base_seed", "data", "response", "add_noise", "standardize"},
                   "experiment");
    read_into(e, "kind", cfg.experiment_kind);
    read_into(e, "replicates", cfg.replicates);
    read_into(e, "method", cfg.method);
    read_into(e, "workers", cfg.workers);
    read_into(e, "out_dir", cfg.out_dir);
    read_into(e, "data", cfg.data_path);
    read_into(e, "response", cfg.response);
    read_into(e, "add_noise", cfg.add_noise);
    read_into(e, "standardize", cfg.standardize);
    read_seed(e, "base_seed", cfg.base_seed, cfg.base_seed_set);
  }
  return cfg;
}

// flag > config > SPARSE_NET_SEED > default
void resolve_seeds(RunConfig& cfg, const std::optional<std::uint64_t>& flag_seed) {
  std::optional<std::uint64_t> env_seed;
  if (const char* env = std::getenv("SPARSE_NET_SEED")) {
    try {
      env_seed = std::stoull(env);
    } catch (...) {
      throw config_error("SPARSE_NET_SEED is not an integer");
    }
  }
  auto apply = [&](std::uint64_t& seed, bool was_set) {
    if (flag_seed)
      seed = *flag_seed;
    else if (!was_set && env_seed)
      seed = *env_seed;
  };
  apply(cfg.synth.seed, cfg.synth_seed_set);
  apply(cfg.opt.seed, cfg.opt_seed_set);
  apply(cfg.select.seed, cfg.select_seed_set);
  apply(cfg.base_seed, cfg.base_seed_set);
}

NetworkArch resolve_arch(const RunConfig& cfg, int input_width,
                         const std::vector<int>& hidden_flag) {
  NetworkArch arch;
  arch.activation = cfg.activation;
  if (!hidden_flag.empty()) {
    arch.layer_widths.push_back(input_width);
    for (int w : hidden_flag) arch.layer_widths.push_back(w);
    arch.layer_widths.push_back(1);
  } else if (cfg.arch_widths) {
    arch.layer_widths = *cfg.arch_widths;
    if (arch.layer_widths.front() != input_width)
      throw config_error("config arch expects " +
                         std::to_string(arch.layer_widths.front()) +
                         " inputs but the data has " +
                         std::to_string(input_width));
  } else {
    arch.layer_widths = {input_width, 10, 10, 10, 1};
  }
  arch.validate();
  return arch;
}

json grid_table(const std::vector<GridEntry>& entries) {
  json t = json::array();
  for (const auto& e : entries)
    t.push_back({{"value", e.value}, {"mean_test_mse", e.mean_test_mse}});
  return t;
}

json fit_summary(const FitResult& fit, const std::vector<std::string>& names) {
  json j;
  j["support"] = fit.support;
  j["group_norms"] = std::vector<double>(
      fit.group_norms.data(), fit.group_norms.data() + fit.group_norms.size());
  json selected = json::array();
  for (std::size_t k = 0; k < names.size(); ++k)
    if (fit.support[k]) selected.push_back(names[k]);
  j["selected_features"] = selected;
  j["objective"] = fit.objective_trace.back();
  j["epochs_run"] = fit.epochs_run;
  j["converged_early"] = fit.converged_early;
  return j;
}

Dataset load_for_fit(const RunConfig& cfg) {
  if (cfg.data_path.empty())
    throw config_error("--data (or experiment.data in the config) is required");
  Dataset data = load_csv(cfg.data_path, cfg.response);
  if (cfg.add_noise > 0)
    data = augment_noise_features(data, cfg.add_noise, cfg.base_seed);
  if (cfg.standardize) data = standardize(data).first;
  return data;
}

json frequency_summary_json(const FrequencySummary& s) {
  return {{"mean_fpr", s.mean_fpr},
          {"mean_fnr", s.mean_fnr},
          {"exact_recovery_rate", s.exact_recovery_rate},
          {"n_ok", s.n_ok}};
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_gen(const RunConfig& cfg, const std::string& out,
            const std::string& meta_path) {
  SyntheticConfig gen = cfg.synth;
  if (cfg.arch_widths) {
    gen.arch.layer_widths = *cfg.arch_widths;
    gen.arch.activation = cfg.activation;
  } else {
    gen.arch.layer_widths = {gen.n_features, 20, 20, 20, 1};
    gen.arch.activation = cfg.activation;
  }
  gen.validate();

  const SyntheticData sd = gen_synthetic(gen);
  write_csv(sd.data, "y", out);

  json meta;
  meta["seed"] = gen.seed;
  meta["config"] = {{"arch",
                     {{"layer_widths", gen.arch.layer_widths},
                      {"activation", to_string(gen.arch.activation)}}},
                    {"n_features", gen.n_features},
                    {"n_significant", gen.n_significant},
                    {"n_samples", gen.n_samples},
                    {"noise_sd", gen.noise_sd},
                    {"input_low", gen.input_low},
                    {"input_high", gen.input_high}};
  meta["true_support"] = *sd.data.true_support;
  std::ofstream metaout(meta_path);
  if (!metaout) throw io_error("cannot write '" + meta_path + "'");
  metaout << meta.dump(2) << '\n';

  std::cerr << "wrote " << sd.data.n() << " rows to " << out << " (metadata: "
            << meta_path << ")\n";
  return 0;
}

int cmd_fit(const RunConfig& cfg, const std::string& method_name, double lambda,
            std::optional<double> zeta, const std::vector<int>& hidden_flag) {
  const Method method = method_from_string(method_name);
  const Dataset data = load_for_fit(cfg);
  const NetworkArch arch =
      resolve_arch(cfg, static_cast<int>(data.n_features()), hidden_flag);

  SelectConfig sel = cfg.select;
  sel.opt = cfg.opt;

  json out;
  out["method"] = method_name;
  out["lambda"] = lambda;
  if (method == Method::kGroupLasso) {
    const FitResult fit = fit_group_lasso(arch, data, lambda, sel);
    out.update(fit_summary(fit, data.feature_names));
  } else {
    if (!zeta) throw config_error("--zeta is required for method gl-agl");
    out["zeta"] = *zeta;
    const TwoStageFit two = fit_gl_agl(arch, data, lambda, *zeta, sel);
    out.update(fit_summary(two.final, data.feature_names));
    out["base_support"] = two.base.support;
    out["base_group_norms"] =
        std::vector<double>(two.base.group_norms.data(),
                            two.base.group_norms.data() + two.base.group_norms.size());
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_select(const RunConfig& cfg, const std::string& method_name,
               const std::vector<int>& hidden_flag) {
  const Method method = method_from_string(method_name);
  const Dataset data = load_for_fit(cfg);
  const NetworkArch arch =
      resolve_arch(cfg, static_cast<int>(data.n_features()), hidden_flag);

  SelectConfig sel = cfg.select;
  sel.opt = cfg.opt;

  const GridSelection choice = grid_select(arch, data, method, sel);
  json out;
  out["method"] = method_name;
  out["lambda"] = choice.lambda;
  out["lambda_errors"] = grid_table(choice.lambda_errors);
  if (method == Method::kGroupLasso) {
    const FitResult fit = fit_group_lasso(arch, data, choice.lambda, sel);
    out.update(fit_summary(fit, data.feature_names));
  } else {
    out["zeta"] = *choice.zeta;
    out["zeta_errors"] = grid_table(choice.zeta_errors);
    const TwoStageFit two = fit_gl_agl(arch, data, choice.lambda, *choice.zeta, sel);
    out.update(fit_summary(two.final, data.feature_names));
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_experiment(const RunConfig& cfg, const std::string& kind,
                   const std::vector<int>& hidden_flag) {
  ExperimentSpec ex;
  ex.run_gl = cfg.method == "gl" || cfg.method == "both";
  ex.run_agl = cfg.method == "gl-agl" || cfg.method == "both";
  if (!ex.run_gl && !ex.run_agl)
    throw config_error("method must be gl, gl-agl or both");
  ex.n_replicates = cfg.replicates;
  ex.base_seed = cfg.base_seed;
  ex.workers = cfg.workers;
  ex.select = cfg.select;
  ex.select.opt = cfg.opt;

  std::vector<std::string> feature_names;
  if (kind == "synth") {
    ex.kind = ExperimentKind::kSynthetic;
    ex.synth = cfg.synth;
    ex.synth.arch.layer_widths =
        cfg.arch_widths ? *cfg.arch_widths
                        : std::vector<int>{ex.synth.n_features, 20, 20, 20, 1};
    ex.synth.arch.activation = cfg.activation;
    ex.arch = ex.synth.arch;
    ex.synth.validate();
    for (int j = 0; j < ex.synth.n_features; ++j)
      feature_names.push_back("x" + std::to_string(j + 1));
  } else {
    ex.kind = ExperimentKind::kCsv;
    if (cfg.data_path.empty())
      throw config_error("--data (or experiment.data in the config) is required");
    ex.csv_base = load_csv(cfg.data_path, cfg.response);
    ex.add_noise = cfg.add_noise;
    ex.standardize = cfg.standardize;
    const int d0 = static_cast<int>(ex.csv_base.n_features()) + ex.add_noise;
    ex.arch = resolve_arch(cfg, d0, hidden_flag);
    feature_names = ex.csv_base.feature_names;
    for (int j = 0; j < ex.add_noise; ++j)
      feature_names.push_back("noise_" + std::to_string(j + 1));
  }

  std::filesystem::create_directories(cfg.out_dir);
  const auto rows = run_replicates(ex);

  const auto path = [&](const char* name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
  };
  write_metrics_csv(rows, path("metrics.csv"));
  write_metrics_json(rows, path("metrics.json"));

  std::vector<SelectionMetrics> gl_rows, agl_rows;
  for (const auto& r : rows)
    (r.method == Method::kGroupLasso ? gl_rows : agl_rows).push_back(r);
  std::optional<FrequencySummary> gl, agl;
  if (!gl_rows.empty()) gl = selection_frequency(gl_rows);
  if (!agl_rows.empty()) agl = selection_frequency(agl_rows);
  write_frequency_csv(feature_names, gl, agl, path("frequency.csv"));
  write_frequency_json(feature_names, gl, agl, path("frequency.json"));

  json out;
  out["replicates"] = ex.n_replicates;
  out["reports"] = {path("metrics.csv"), path("metrics.json"),
                    path("frequency.csv"), path("frequency.json")};
  if (gl) out["gl"] = frequency_summary_json(*gl);
  if (agl) out["gl_agl"] = frequency_summary_json(*agl);
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_check() {
  return testing::selfcheck(std::cout) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group-sparse input selection for feed-forward regression networks"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_flag;

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset (CSV + metadata)");
  std::string gen_out, gen_meta;
  gen->add_option("--config", config_path, "JSON run configuration");
  gen->add_option("--out", gen_out, "output CSV path")->required();
  gen->add_option("--meta", gen_meta, "metadata JSON path (default <out>.meta.json)");
  gen->add_option("--seed", seed_flag, "root seed (overrides config seeds)");

  // common fit/select/experiment options
  std::string data_path, response = "y", method = "gl";
  std::vector<int> hidden_flag;
  double lambda = 0.0;
  std::optional<double> zeta;
  std::optional<bool> standardize_flag;
  int add_noise = -1;

  auto add_data_opts = [&](CLI::App* cmd, bool with_method) {
    cmd->add_option("--config", config_path, "JSON run configuration");
    cmd->add_option("--data", data_path, "input CSV");
    cmd->add_option("--response", response, "response column name (default y)");
    if (with_method)
      cmd->add_option("--method", method, "gl | gl-agl (default gl)")
          ->check(CLI::IsMember({"gl", "gl-agl"}));
    cmd->add_option("--hidden", hidden_flag,
                    "hidden layer widths, e.g. --hidden 10,10,10")
        ->delimiter(',');
    cmd->add_option("--add-noise", add_noise,
                    "append K Gaussian noise predictors (default 0)");
    cmd->add_flag("--standardize,!--no-standardize", standardize_flag,
                  "standardize features (default on)");
    cmd->add_option("--seed", seed_flag,
                    "root seed (default 0; overrides config seeds)");
  };

  auto* fit_cmd = app.add_subcommand("fit", "one fit at fixed constants; prints support");
  add_data_opts(fit_cmd, true);
  fit_cmd->add_option("--lambda", lambda, "group-lasso constant")->required();
  fit_cmd->add_option("--zeta", zeta, "adaptive-stage constant (gl-agl)");

  auto* select_cmd =
      app.add_subcommand("select", "grid-select constants, then fit; prints the choice");
  add_data_opts(select_cmd, true);

  // experiment
  auto* exp = app.add_subcommand("experiment", "replicated selection studies");
  exp->require_subcommand(1);
  auto* exp_synth = exp->add_subcommand("synth", "synthetic support-recovery study");
  auto* exp_csv = exp->add_subcommand("csv", "real-data study with optional noise probes");
  int replicates = -1, workers = -1;
  std::string exp_method, out_dir;
  for (CLI::App* cmd : {exp_synth, exp_csv}) {
    cmd->add_option("--config", config_path, "JSON run configuration");
    cmd->add_option("--replicates", replicates, "number of replicates (default 100)");
    cmd->add_option("--method", exp_method, "gl | gl-agl | both (default both)")
        ->check(CLI::IsMember({"gl", "gl-agl", "both"}));
    cmd->add_option("--workers", workers, "parallel replicate workers (default 1)");
    cmd->add_option("--out-dir", out_dir, "report output directory (default out)");
    cmd->add_option("--seed", seed_flag,
                    "base seed (default 0; overrides config seeds)");
  }
  exp_csv->add_option("--data", data_path, "input CSV");
  exp_csv->add_option("--response", response, "response column name (default y)");
  exp_csv->add_option("--add-noise", add_noise,
                      "append K Gaussian noise predictors (default 0)");
  exp_csv->add_flag("--standardize,!--no-standardize", standardize_flag,
                    "standardize features (default on)");
  exp_csv->add_option("--hidden", hidden_flag,
                      "hidden layer widths, e.g. --hidden 10,10,10")
      ->delimiter(',');

  auto* check_cmd =
      app.add_subcommand("check", "run the invariant/oracle self-test suite");
  (void)check_cmd;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    RunConfig cfg = load_config(config_path);
    resolve_seeds(cfg, seed_flag);
    if (!data_path.empty()) cfg.data_path = data_path;
    if (!response.empty()) cfg.response = response;
    if (add_noise >= 0) cfg.add_noise = add_noise;
    if (standardize_flag) cfg.standardize = *standardize_flag;
    if (replicates > 0) cfg.replicates = replicates;
    if (workers > 0) cfg.workers = workers;
    if (!exp_method.empty()) cfg.method = exp_method;
    if (!out_dir.empty()) cfg.out_dir = out_dir;

    if (*gen) {
      if (gen_meta.empty()) gen_meta = gen_out + ".meta.json";
      return cmd_gen(cfg, gen_out, gen_meta);
    }
    if (*fit_cmd) return cmd_fit(cfg, method, lambda, zeta, hidden_flag);
    if (*select_cmd) return cmd_select(cfg, method, hidden_flag);
    if (*exp_synth) return cmd_experiment(cfg, "synth", hidden_flag);
    if (*exp_csv) return cmd_experiment(cfg, "csv", hidden_flag);
    if (*check_cmd) return cmd_check();
    return 1;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
