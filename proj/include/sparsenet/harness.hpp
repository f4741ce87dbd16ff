#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sparsenet/estimators.hpp"

namespace sparsenet {

struct SelectionRates {
  double false_positive_rate = 0.0;  // selected insignificants / insignificants
  double false_negative_rate = 0.0;  // missed significants / significants
  bool exact_recovery = false;
};

// Empty denominators count as rate 0 (no negatives -> FPR 0, no positives ->
// FNR 0). Throws on length mismatch.
SelectionRates compute_metrics(const std::vector<bool>& selected,
                               const std::vector<bool>& true_support);

struct SelectionMetrics {
  int replicate_id = 0;
  Method method = Method::kGroupLasso;
  std::optional<double> lambda;
  std::optional<double> zeta;
  double false_positive_rate = 0.0;
  double false_negative_rate = 0.0;
  bool exact_recovery = false;
  std::vector<bool> selected;
  std::string status = "ok";  // "ok" or the failure reason

  bool ok() const { return status == "ok"; }
};

enum class ExperimentKind { kSynthetic, kCsv };

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kSynthetic;
  NetworkArch arch;  // fitting network

  SyntheticConfig synth;  // kind == kSynthetic; synth.seed is overridden per replicate

  Dataset csv_base;         // kind == kCsv; loaded, not yet augmented
  int add_noise = 0;        // appended Gaussian noise predictors per replicate
  bool standardize = true;  // standardize features after augmentation

  bool run_gl = true;
  bool run_agl = true;
  int n_replicates = 1;
  std::uint64_t base_seed = 0;  // replicate r uses seed base_seed + r
  SelectConfig select;
  int workers = 1;
};

// Per replicate: generate/augment data with seed base_seed + r, grid-select
// the regularization constants, fit at the chosen constants and record
// metrics. When both methods run, they share the stage-1 sweep. A failing
// replicate is recorded with its error message, never dropped. Results are
// ordered by (replicate_id, method) regardless of scheduling.
std::vector<SelectionMetrics> run_replicates(const ExperimentSpec& spec);

struct FrequencySummary {
  Vector frequency;  // per-feature selection frequency over ok replicates
  double mean_fpr = 0.0;
  double mean_fnr = 0.0;
  double exact_recovery_rate = 0.0;
  int n_ok = 0;
};

// Frequencies over the ok rows of `metrics` (which must agree in length).
FrequencySummary selection_frequency(const std::vector<SelectionMetrics>& metrics);

// Report files. CSV columns:
//   metrics:   replicate_id,method,lambda,zeta,fpr,fnr,exact_recovery,status
//   frequency: feature_index,feature_name,frequency_gl,frequency_gl_agl
// Floats are written with 17 significant digits; JSON mirrors the same
// records. Both are byte-stable for fixed inputs.
void write_metrics_csv(const std::vector<SelectionMetrics>& metrics,
                       const std::string& path);
void write_metrics_json(const std::vector<SelectionMetrics>& metrics,
                        const std::string& path);
void write_frequency_csv(const std::vector<std::string>& feature_names,
                         const std::optional<FrequencySummary>& gl,
                         const std::optional<FrequencySummary>& agl,
                         const std::string& path);
void write_frequency_json(const std::vector<std::string>& feature_names,
                          const std::optional<FrequencySummary>& gl,
                          const std::optional<FrequencySummary>& agl,
                          const std::string& path);

}  // namespace sparsenet
