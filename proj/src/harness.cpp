#include "sparsenet/harness.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace sparsenet {

SelectionRates compute_metrics(const std::vector<bool>& selected,
                               const std::vector<bool>& true_support) {
  if (selected.size() != true_support.size())
    throw config_error("selected length " + std::to_string(selected.size()) +
                       " does not match true_support length " +
                       std::to_string(true_support.size()));
  int positives = 0, negatives = 0, false_pos = 0, false_neg = 0;
  for (std::size_t k = 0; k < selected.size(); ++k) {
    if (true_support[k]) {
      ++positives;
      if (!selected[k]) ++false_neg;
    } else {
      ++negatives;
      if (selected[k]) ++false_pos;
    }
  }
  SelectionRates rates;
  rates.false_positive_rate =
      negatives == 0 ? 0.0 : static_cast<double>(false_pos) / negatives;
  rates.false_negative_rate =
      positives == 0 ? 0.0 : static_cast<double>(false_neg) / positives;
  rates.exact_recovery = false_pos == 0 && false_neg == 0;
  return rates;
}

namespace {

SelectionMetrics make_row(int replicate, Method method, const FitResult& fit,
                          double lambda, std::optional<double> zeta,
                          const std::vector<bool>& truth) {
  SelectionMetrics row;
  row.replicate_id = replicate;
  row.method = method;
  row.lambda = lambda;
  row.zeta = zeta;
  row.selected = selected_support(fit);
  const SelectionRates rates = compute_metrics(row.selected, truth);
  row.false_positive_rate = rates.false_positive_rate;
  row.false_negative_rate = rates.false_negative_rate;
  row.exact_recovery = rates.exact_recovery;
  return row;
}

SelectionMetrics make_failure(int replicate, Method method,
                              const std::string& reason) {
  SelectionMetrics row;
  row.replicate_id = replicate;
  row.method = method;
  row.status = reason;
  return row;
}

// One replicate: build the data, select constants, fit, score. Both methods
// share the stage-1 sweep when requested together.
std::vector<SelectionMetrics> run_one(const ExperimentSpec& ex, int r) {
  Dataset data;
  if (ex.kind == ExperimentKind::kSynthetic) {
    SyntheticConfig gen = ex.synth;
    gen.seed = ex.base_seed + static_cast<std::uint64_t>(r);
    data = gen_synthetic(gen).data;
  } else {
    Dataset base = ex.csv_base;
    // real datasets without ground truth: originals count as significant, so
    // appended noise probes surface as false positives
    if (!base.true_support)
      base.true_support = std::vector<bool>(base.n_features(), true);
    data = augment_noise_features(base, ex.add_noise,
                                  ex.base_seed + static_cast<std::uint64_t>(r));
    if (ex.standardize) data = standardize(data).first;
  }
  const std::vector<bool> truth = *data.true_support;

  SelectConfig cfg = ex.select;
  cfg.seed = ex.base_seed + static_cast<std::uint64_t>(r);
  cfg.opt.seed = cfg.seed;

  std::vector<SelectionMetrics> rows;
  if (ex.run_agl) {
    const GridSelection sel =
        grid_select(ex.arch, data, Method::kGroupLassoAdaptive, cfg);
    const TwoStageFit two = fit_gl_agl(ex.arch, data, sel.lambda, *sel.zeta, cfg);
    if (ex.run_gl)
      rows.push_back(make_row(r, Method::kGroupLasso, two.base, sel.lambda,
                              std::nullopt, truth));
    rows.push_back(make_row(r, Method::kGroupLassoAdaptive, two.final,
                            sel.lambda, sel.zeta, truth));
  } else {
    const GridSelection sel = grid_select(ex.arch, data, Method::kGroupLasso, cfg);
    const FitResult f = fit_group_lasso(ex.arch, data, sel.lambda, cfg);
    rows.push_back(
        make_row(r, Method::kGroupLasso, f, sel.lambda, std::nullopt, truth));
  }
  return rows;
}

bool in_parallel() {
#if defined(_OPENMP)
  return omp_in_parallel() != 0;
#else
  return false;
#endif
}

}  // namespace

std::vector<SelectionMetrics> run_replicates(const ExperimentSpec& ex) {
  if (ex.n_replicates < 1) throw config_error("n_replicates must be >= 1");
  if (ex.workers < 1) throw config_error("workers must be >= 1");
  if (!ex.run_gl && !ex.run_agl)
    throw config_error("at least one method must run");
  ex.arch.validate();
  ex.select.validate();
  if (ex.kind == ExperimentKind::kSynthetic)
    ex.synth.validate();
  else
    ex.csv_base.validate();

  std::vector<std::vector<SelectionMetrics>> slots(ex.n_replicates);
#pragma omp parallel for schedule(dynamic, 1) num_threads(ex.workers) \
    if (ex.workers > 1 && !in_parallel())
  for (int r = 0; r < ex.n_replicates; ++r) {
    try {
      slots[r] = run_one(ex, r);
    } catch (const std::exception& e) {
      slots[r].clear();
      if (ex.run_gl)
        slots[r].push_back(make_failure(r, Method::kGroupLasso, e.what()));
      if (ex.run_agl)
        slots[r].push_back(
            make_failure(r, Method::kGroupLassoAdaptive, e.what()));
    }
#pragma omp critical
    {
      std::fprintf(stderr, "replicate %d/%d done\n", r + 1, ex.n_replicates);
      std::fflush(stderr);
    }
  }

  std::vector<SelectionMetrics> out;
  for (auto& rows : slots)
    for (auto& row : rows) out.push_back(std::move(row));
  return out;
}

FrequencySummary selection_frequency(
    const std::vector<SelectionMetrics>& metrics) {
  if (metrics.empty()) throw config_error("no metrics to summarize");
  std::size_t width = 0;
  for (const auto& m : metrics)
    if (m.ok()) {
      if (width == 0) width = m.selected.size();
      if (m.selected.size() != width)
        throw config_error("selection vectors have mismatched lengths");
    }
  if (width == 0) throw config_error("no successful replicates to summarize");

  FrequencySummary s;
  s.frequency = Vector::Zero(static_cast<Eigen::Index>(width));
  for (const auto& m : metrics) {
    if (!m.ok()) continue;
    ++s.n_ok;
    for (std::size_t k = 0; k < width; ++k)
      if (m.selected[k]) s.frequency[static_cast<Eigen::Index>(k)] += 1.0;
    s.mean_fpr += m.false_positive_rate;
    s.mean_fnr += m.false_negative_rate;
    s.exact_recovery_rate += m.exact_recovery ? 1.0 : 0.0;
  }
  s.frequency /= static_cast<double>(s.n_ok);
  s.mean_fpr /= static_cast<double>(s.n_ok);
  s.mean_fnr /= static_cast<double>(s.n_ok);
  s.exact_recovery_rate /= static_cast<double>(s.n_ok);
  return s;
}

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::ordered_json metrics_record(const SelectionMetrics& m) {
  nlohmann::ordered_json j;
  j["replicate_id"] = m.replicate_id;
  j["method"] = to_string(m.method);
  if (m.lambda)
    j["lambda"] = *m.lambda;
  else
    j["lambda"] = nullptr;
  if (m.zeta)
    j["zeta"] = *m.zeta;
  else
    j["zeta"] = nullptr;
  if (m.ok()) {
    j["fpr"] = m.false_positive_rate;
    j["fnr"] = m.false_negative_rate;
    j["exact_recovery"] = m.exact_recovery;
    j["selected"] = m.selected;
  } else {
    j["fpr"] = nullptr;
    j["fnr"] = nullptr;
    j["exact_recovery"] = nullptr;
    j["selected"] = nullptr;
  }
  j["status"] = m.status;
  return j;
}

std::string sanitize(const std::string& status) {
  std::string out = status;
  for (char& c : out)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  return out;
}

}  // namespace

void write_metrics_csv(const std::vector<SelectionMetrics>& metrics,
                       const std::string& path) {
  auto out = open_out(path);
  out << "replicate_id,method,lambda,zeta,fpr,fnr,exact_recovery,status\n";
  for (const auto& m : metrics) {
    out << m.replicate_id << ',' << to_string(m.method) << ',';
    if (m.lambda) out << fmt17(*m.lambda);
    out << ',';
    if (m.zeta) out << fmt17(*m.zeta);
    out << ',';
    if (m.ok())
      out << fmt17(m.false_positive_rate) << ',' << fmt17(m.false_negative_rate)
          << ',' << (m.exact_recovery ? 1 : 0);
    else
      out << ",,";
    out << ',' << sanitize(m.status) << '\n';
  }
  if (!out) throw io_error("failed while writing '" + path + "'");
}

void write_metrics_json(const std::vector<SelectionMetrics>& metrics,
                        const std::string& path) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& m : metrics) j.push_back(metrics_record(m));
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw io_error("failed while writing '" + path + "'");
}

void write_frequency_csv(const std::vector<std::string>& feature_names,
                         const std::optional<FrequencySummary>& gl,
                         const std::optional<FrequencySummary>& agl,
                         const std::string& path) {
  auto out = open_out(path);
  out << "feature_index,feature_name,frequency_gl,frequency_gl_agl\n";
  for (std::size_t k = 0; k < feature_names.size(); ++k) {
    out << (k + 1) << ',' << feature_names[k] << ',';
    if (gl) out << fmt17(gl->frequency[static_cast<Eigen::Index>(k)]);
    out << ',';
    if (agl) out << fmt17(agl->frequency[static_cast<Eigen::Index>(k)]);
    out << '\n';
  }
  if (!out) throw io_error("failed while writing '" + path + "'");
}

void write_frequency_json(const std::vector<std::string>& feature_names,
                          const std::optional<FrequencySummary>& gl,
                          const std::optional<FrequencySummary>& agl,
                          const std::string& path) {
  nlohmann::ordered_json j;
  j["features"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < feature_names.size(); ++k) {
    nlohmann::ordered_json row;
    row["feature_index"] = k + 1;
    row["feature_name"] = feature_names[k];
    row["frequency_gl"] =
        gl ? nlohmann::ordered_json(gl->frequency[static_cast<Eigen::Index>(k)])
           : nlohmann::ordered_json(nullptr);
    row["frequency_gl_agl"] =
        agl ? nlohmann::ordered_json(agl->frequency[static_cast<Eigen::Index>(k)])
            : nlohmann::ordered_json(nullptr);
    j["features"].push_back(row);
  }
  auto summary = [](const FrequencySummary& s) {
    nlohmann::ordered_json o;
    o["mean_fpr"] = s.mean_fpr;
    o["mean_fnr"] = s.mean_fnr;
    o["exact_recovery_rate"] = s.exact_recovery_rate;
    o["n_ok"] = s.n_ok;
    return o;
  };
  j["summary_gl"] = gl ? summary(*gl) : nlohmann::ordered_json(nullptr);
  j["summary_gl_agl"] = agl ? summary(*agl) : nlohmann::ordered_json(nullptr);
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw io_error("failed while writing '" + path + "'");
}

}  // namespace sparsenet
