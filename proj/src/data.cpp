#include "sparsenet/data.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "sparsenet/kernels.hpp"
#include "sparsenet/rng.hpp"

namespace sparsenet {

void Dataset::validate() const {
  if (X.rows() < 1) throw config_error("dataset is empty");
  if (X.cols() < 1) throw config_error("dataset has no features");
  if (Y.size() != X.rows())
    throw config_error("response length " + std::to_string(Y.size()) +
                       " does not match " + std::to_string(X.rows()) + " rows");
  if (feature_names.size() != static_cast<std::size_t>(X.cols()))
    throw config_error("feature_names length does not match feature count");
  if (true_support && true_support->size() != static_cast<std::size_t>(X.cols()))
    throw config_error("true_support length does not match feature count");
  if (!X.allFinite() || !Y.allFinite())
    throw config_error("dataset contains non-finite values");
}

void SyntheticConfig::validate() const {
  arch.validate();
  if (n_features < 1) throw config_error("n_features must be >= 1");
  if (n_significant < 0 || n_significant > n_features)
    throw config_error("n_significant must be in [0, n_features]");
  if (n_samples < 1) throw config_error("n_samples must be >= 1");
  if (noise_sd < 0.0) throw config_error("noise_sd must be >= 0");
  if (!(input_low < input_high))
    throw config_error("input_low must be < input_high");
  if (arch.input_width() != n_features)
    throw config_error("arch input width " + std::to_string(arch.input_width()) +
                       " does not match n_features " + std::to_string(n_features));
  if (arch.output_width() != 1)
    throw config_error("synthetic generation requires a single-output network");
}

namespace {

void fill_normal(SplitMix64& rng, Matrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
}

void fill_normal(SplitMix64& rng, Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
}

}  // namespace

SyntheticData gen_synthetic(const SyntheticConfig& config) {
  config.validate();
  SplitMix64 rng(config.seed);

  // generating weights, layer by layer, then the insignificant columns zeroed
  NetworkParams truth = NetworkParams::zeros(config.arch);
  fill_normal(rng, truth.first_weights);
  fill_normal(rng, truth.first_bias);
  for (auto& h : truth.hidden) {
    fill_normal(rng, h.weights);
    fill_normal(rng, h.bias);
  }
  fill_normal(rng, truth.output_weights);
  fill_normal(rng, truth.output_bias);
  for (int k = config.n_significant; k < config.n_features; ++k)
    truth.first_weights.col(k).setZero();

  Matrix X(config.n_samples, config.n_features);
  for (Eigen::Index i = 0; i < X.rows(); ++i)  // row by row: one sample at a time
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      X(i, j) = rng.uniform(config.input_low, config.input_high);

  Vector noise(config.n_samples);
  fill_normal(rng, noise);
  noise *= config.noise_sd;

  SyntheticData out;
  out.true_params = std::move(truth);
  out.noise = std::move(noise);
  out.data.X = std::move(X);
  out.data.Y = kernels::forward_batch(config.arch, out.true_params, out.data.X)
                   .col(0) +
               out.noise;
  out.data.feature_names.reserve(config.n_features);
  for (int j = 0; j < config.n_features; ++j)
    out.data.feature_names.push_back("x" + std::to_string(j + 1));
  std::vector<bool> support(config.n_features, false);
  for (int k = 0; k < config.n_significant; ++k) support[k] = true;
  out.data.true_support = std::move(support);
  out.data.validate();
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no,
                  const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw parse_error("line " + std::to_string(line_no) + ", column '" + column +
                      "': cannot parse '" + cell + "' as a number");
  return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& response_column) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw parse_error("'" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);

  std::ptrdiff_t response_idx = -1;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == response_column) response_idx = static_cast<std::ptrdiff_t>(j);
  if (response_idx < 0)
    throw config_error("response column '" + response_column + "' not found in '" +
                       path + "'");
  if (header.size() < 2)
    throw parse_error("'" + path + "' has no feature columns");

  std::vector<std::string> names;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (static_cast<std::ptrdiff_t>(j) != response_idx) names.push_back(header[j]);

  std::vector<std::vector<double>> rows;
  std::vector<double> responses;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == EOF) break;  // trailing newline
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw parse_error("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " cells, got " +
                        std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(header.size() - 1);
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const double v = parse_cell(cells[j], line_no, header[j]);
      if (static_cast<std::ptrdiff_t>(j) == response_idx)
        responses.push_back(v);
      else
        row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw parse_error("'" + path + "' has no data rows");

  Dataset data;
  data.X.resize(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(names.size()));
  data.Y.resize(static_cast<Eigen::Index>(responses.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < names.size(); ++j) data.X(i, j) = rows[i][j];
    data.Y[i] = responses[i];
  }
  data.feature_names = std::move(names);
  data.validate();
  return data;
}

void write_csv(const Dataset& data, const std::string& response_name,
               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  for (const auto& name : data.feature_names) out << name << ',';
  out << response_name << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.n_features(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", data.X(i, j));
      out << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", data.Y[i]);
    out << buf << '\n';
  }
  if (!out) throw io_error("failed while writing '" + path + "'");
}

Dataset augment_noise_features(const Dataset& data, int k, std::uint64_t seed) {
  data.validate();
  if (k < 0) throw config_error("noise feature count must be >= 0");
  if (k == 0) return data;

  Dataset out;
  out.X.resize(data.n(), data.n_features() + k);
  out.X.leftCols(data.n_features()) = data.X;
  SplitMix64 rng(seed);
  for (int j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < data.n(); ++i)
      out.X(i, data.n_features() + j) = rng.normal();

  out.Y = data.Y;
  out.feature_names = data.feature_names;
  for (int j = 0; j < k; ++j)
    out.feature_names.push_back("noise_" + std::to_string(j + 1));
  if (data.true_support) {
    std::vector<bool> support = *data.true_support;
    support.resize(support.size() + k, false);
    out.true_support = std::move(support);
  }
  return out;
}

Matrix StandardizeTransform::invert(const Matrix& standardized) const {
  Matrix original = standardized * scales.asDiagonal();
  original.rowwise() += means.transpose();
  return original;
}

std::pair<Dataset, StandardizeTransform> standardize(const Dataset& data) {
  data.validate();
  if (data.n() < 2) throw config_error("standardize needs at least 2 rows");

  StandardizeTransform t;
  t.means.resize(data.n_features());
  t.scales.resize(data.n_features());
  Dataset out = data;
  const double n = static_cast<double>(data.n());
  for (Eigen::Index j = 0; j < data.n_features(); ++j) {
    const auto col = data.X.col(j);
    if ((col.array() == col[0]).all()) {
      // exactly constant: center on the constant so the result is exact zero
      t.means[j] = col[0];
      t.scales[j] = 1.0;
      out.X.col(j).setZero();
      continue;
    }
    const double mean = col.mean();
    const Vector centered = col.array() - mean;
    const double sd = std::sqrt(centered.squaredNorm() / n);
    t.means[j] = mean;
    t.scales[j] = sd;
    out.X.col(j) = centered / sd;
  }
  return {std::move(out), std::move(t)};
}

namespace {

Dataset take_rows(const Dataset& data, const std::vector<Eigen::Index>& idx) {
  Dataset out;
  out.X.resize(static_cast<Eigen::Index>(idx.size()), data.n_features());
  out.Y.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.X.row(i) = data.X.row(idx[i]);
    out.Y[i] = data.Y[idx[i]];
  }
  out.feature_names = data.feature_names;
  out.true_support = data.true_support;
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> train_test_split(const Dataset& data,
                                             double test_fraction,
                                             std::uint64_t seed) {
  data.validate();
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw config_error("test_fraction must be in (0, 1)");

  const Eigen::Index n = data.n();
  const Eigen::Index n_test = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::floor(static_cast<double>(n) * test_fraction)));
  if (n - n_test < 1)
    throw config_error("split leaves an empty training set (n = " +
                       std::to_string(n) + ")");

  std::vector<Eigen::Index> perm(n);
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  SplitMix64 rng(seed);
  for (Eigen::Index i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.bounded(static_cast<std::uint64_t>(i) + 1)]);

  std::vector<Eigen::Index> test_idx(perm.begin(), perm.begin() + n_test);
  std::vector<Eigen::Index> train_idx(perm.begin() + n_test, perm.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  return {take_rows(data, train_idx), take_rows(data, test_idx)};
}

}  // namespace sparsenet
