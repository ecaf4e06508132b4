//
// Copyright 2026 The pobo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Benchmark harness: candidate grids, objective sources (sampled GP paths,
// the Branin-Hoo surface, CSV data), regret metrics, and the two-arm
// experiment driver that compares optimization on privately released inputs
// against optimization on the raw inputs.

#ifndef POBO_BENCH_HPP_
#define POBO_BENCH_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "pobo/analysis.hpp"
#include "pobo/curator.hpp"
#include "pobo/errors.hpp"
#include "pobo/gp.hpp"
#include "pobo/io.hpp"
#include "pobo/modeler.hpp"
#include "pobo/random.hpp"

namespace pobo::bench {

// Regular grid over an axis-aligned box, one candidate per grid node.
struct GridSpec {
  Eigen::Index dims = 2;
  Eigen::Index points_per_dim = 100;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index total() const {
    Eigen::Index n = 1;
    for (Eigen::Index j = 0; j < dims; ++j) {
      if (n > (1 << 24) / std::max<Eigen::Index>(points_per_dim, 1)) {
        throw InputError("grid is too large to enumerate");
      }
      n *= points_per_dim;
    }
    return n;
  }

  void validate() const {
    if (dims < 1) {
      throw InputError("grid needs at least one dimension");
    }
    if (points_per_dim < 2) {
      throw InputError("grid needs at least two points per dimension");
    }
    if (lower.size() != dims || upper.size() != dims) {
      throw InputError("grid bounds must have one entry per dimension");
    }
    if (!lower.allFinite() || !upper.allFinite()) {
      throw InputError("grid bounds must be finite");
    }
    for (Eigen::Index j = 0; j < dims; ++j) {
      if (!(lower(j) < upper(j))) {
        throw InputError("each grid lower bound must be below its upper");
      }
    }
    total();
  }
};

inline GridSpec symmetric_grid(Eigen::Index dims, Eigen::Index points_per_dim) {
  GridSpec spec;
  spec.dims = dims;
  spec.points_per_dim = points_per_dim;
  spec.lower = -5.0 * Eigen::VectorXd::Ones(std::max<Eigen::Index>(dims, 0));
  spec.upper = 5.0 * Eigen::VectorXd::Ones(std::max<Eigen::Index>(dims, 0));
  return spec;
}

// All grid nodes in odometer order with the last dimension advancing
// fastest, endpoints included.
inline Eigen::MatrixXd grid_points(const GridSpec& spec) {
  spec.validate();
  const Eigen::Index n = spec.total();
  Eigen::MatrixXd points(n, spec.dims);
  const double denom = static_cast<double>(spec.points_per_dim - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index rest = i;
    for (Eigen::Index j = spec.dims - 1; j >= 0; --j) {
      const Eigen::Index idx = rest % spec.points_per_dim;
      rest /= spec.points_per_dim;
      points(i, j) =
          spec.lower(j) +
          static_cast<double>(idx) * (spec.upper(j) - spec.lower(j)) / denom;
    }
  }
  return points;
}

// Lower Cholesky factor of the noise-free kernel matrix over the given
// points, with a small escalating jitter for numerical rank deficiency.
inline Eigen::MatrixXd prior_factor(const Eigen::MatrixXd& points,
                                    const gp::GpHyperparams& hyper) {
  hyper.validate();
  if (points.rows() < 1 || !points.allFinite()) {
    throw InputError("prior sampling needs a non-empty finite point matrix");
  }
  if (points.rows() > 20000) {
    throw InputError("prior sampling is limited to 20000 points");
  }
  const Eigen::MatrixXd k = gp::internal::covariance_matrix(points, points,
                                                             hyper);
  double jitter = 1e-10 * hyper.signal_variance;
  const double ceiling = 1e-6 * hyper.signal_variance;
  while (true) {
    Eigen::MatrixXd shifted = k;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      return llt.matrixL();
    }
    if (jitter >= ceiling) {
      throw NumericError("prior kernel matrix is not positive definite");
    }
    jitter *= 10.0;
  }
}

// One draw from the zero-mean GP prior on the given points.
inline Eigen::VectorXd sample_gp(const Eigen::MatrixXd& points,
                                 const gp::GpHyperparams& hyper,
                                 std::uint64_t seed) {
  const Eigen::MatrixXd factor = prior_factor(points, hyper);
  GaussianStream stream(seed);
  Eigen::VectorXd white(points.rows());
  for (Eigen::Index i = 0; i < white.size(); ++i) {
    white(i) = stream.next_gaussian();
  }
  return factor * white;
}

inline Eigen::VectorXd sample_gp_on_grid(const GridSpec& spec,
                                         const gp::GpHyperparams& hyper,
                                         std::uint64_t seed) {
  return sample_gp(grid_points(spec), hyper, seed);
}

// Draws many prior paths over a fixed point set while factoring the kernel
// only once. draw(seed) matches sample_gp(points, hyper, seed) bit for bit.
class GpSampler {
 public:
  GpSampler(const Eigen::MatrixXd& points, const gp::GpHyperparams& hyper)
      : factor_(prior_factor(points, hyper)) {}

  Eigen::VectorXd draw(std::uint64_t seed) const {
    GaussianStream stream(seed);
    Eigen::VectorXd white(factor_.rows());
    for (Eigen::Index i = 0; i < white.size(); ++i) {
      white(i) = stream.next_gaussian();
    }
    return factor_ * white;
  }

 private:
  Eigen::MatrixXd factor_;
};

// The Branin-Hoo test surface in its standard form; three global minima of
// about 0.397887 at (pi, 2.275), (-pi, 12.275) and (9.42478, 2.475).
inline double branin_hoo(double x1, double x2) {
  const double pi = std::numbers::pi;
  const double b = 5.1 / (4.0 * pi * pi);
  const double c = 5.0 / pi;
  const double t = 1.0 / (8.0 * pi);
  const double inner = x2 - b * x1 * x1 + c * x1 - 6.0;
  return inner * inner + 10.0 * (1.0 - t) * std::cos(x1) + 10.0;
}

namespace detail {

inline std::string trim_copy(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && (s[begin] == ' ' || s[begin] == '\t')) ++begin;
  while (end > begin && (s[end - 1] == ' ' || s[end - 1] == '\t')) --end;
  return std::string(s.substr(begin, end - begin));
}

}  // namespace detail

// Reads a headered CSV file into a dataset plus target vector. Feature and
// target columns are selected by header name; other columns are ignored.
inline std::pair<curator::InputDataset, Eigen::VectorXd> load_csv_dataset(
    const std::string& path, const std::vector<std::string>& feature_columns,
    const std::string& target_column) {
  if (feature_columns.empty()) {
    throw InputError("need at least one feature column");
  }
  const std::string text = io::read_file(path);
  const std::vector<std::string_view> lines = io::split_lines(text);
  if (lines.size() < 2) {
    throw SchemaError("file holds no data rows: " + path);
  }
  std::vector<std::string> header;
  for (std::string_view field : io::split_fields(lines[0])) {
    header.push_back(detail::trim_copy(field));
  }
  auto column_of = [&](const std::string& name) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == name) return j;
    }
    throw SchemaError("column '" + name + "' not found in " + path);
  };
  std::vector<std::size_t> feature_idx;
  for (const std::string& name : feature_columns) {
    feature_idx.push_back(column_of(name));
  }
  const std::size_t target_idx = column_of(target_column);

  const Eigen::Index n = static_cast<Eigen::Index>(lines.size()) - 1;
  const Eigen::Index d = static_cast<Eigen::Index>(feature_idx.size());
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::vector<std::string_view> fields =
        io::split_fields(lines[static_cast<std::size_t>(i) + 1]);
    if (fields.size() != header.size()) {
      throw SchemaError("row " + std::to_string(i + 1) + " of " + path +
                        " has " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(header.size()));
    }
    auto cell = [&](std::size_t j) {
      double value = 0.0;
      if (!io::try_parse_double(fields[j], value)) {
        throw ParseError("row " + std::to_string(i + 1) + " of " + path +
                         ": cannot parse '" + std::string(fields[j]) +
                         "' as a number");
      }
      return value;
    };
    for (Eigen::Index jj = 0; jj < d; ++jj) {
      x(i, jj) = cell(feature_idx[static_cast<std::size_t>(jj)]);
    }
    y(i) = cell(target_idx);
  }
  if (!y.allFinite()) {
    throw InputError("target column holds non-finite values");
  }
  return {curator::InputDataset(std::move(x)), std::move(y)};
}

// Optional log transform of the targets. Values at or below zero force a
// shift to y - min(y) + 1 first, which keeps the ordering.
inline Eigen::VectorXd transform_targets(const Eigen::VectorXd& y,
                                         bool log_transform) {
  if (!y.allFinite()) {
    throw InputError("targets must be finite");
  }
  if (!log_transform) {
    return y;
  }
  if ((y.array() <= 0.0).any()) {
    return (y.array() - y.minCoeff() + 1.0).log().matrix();
  }
  return y.array().log().matrix();
}

struct PreprocessResult {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd targets;
  double scale = 1.0;
};

// Divides columns by per-dimension lengthscales when given, then rescales all
// rows by one common factor so the largest row norm equals max_norm.
inline PreprocessResult preprocess_inputs(
    const Eigen::MatrixXd& x,
    const std::optional<Eigen::VectorXd>& lengthscales, double max_norm,
    const std::optional<Eigen::VectorXd>& y, bool log_transform) {
  if (x.rows() < 1 || x.cols() < 1 || !x.allFinite()) {
    throw InputError("inputs must be a non-empty finite matrix");
  }
  if (!(max_norm > 0.0) || !std::isfinite(max_norm)) {
    throw InputError("max_norm must be positive and finite");
  }
  PreprocessResult out;
  out.inputs = x;
  if (lengthscales.has_value()) {
    if (lengthscales->size() != x.cols()) {
      throw InputError("need one lengthscale per input dimension");
    }
    if (!((lengthscales->array() > 0.0).all()) || !lengthscales->allFinite()) {
      throw InputError("lengthscales must be positive and finite");
    }
    out.inputs.array().rowwise() /= lengthscales->transpose().array();
  }
  const double largest = out.inputs.rowwise().norm().maxCoeff();
  if (!(largest > 0.0)) {
    throw InputError("all rows are zero, so no rescaling can reach max_norm");
  }
  out.scale = max_norm / largest;
  out.inputs *= out.scale;
  if (y.has_value()) {
    if (y->size() != x.rows()) {
      throw InputError("target count must match the number of rows");
    }
    out.targets = transform_targets(*y, log_transform);
  }
  return out;
}

// Regret trajectory of one optimization run against the noiseless truth.
struct RegretTrace {
  Eigen::VectorXd instantaneous;
  double cumulative = 0.0;
  Eigen::VectorXd simple_by_t;

  void validate() const {
    if (instantaneous.size() != simple_by_t.size()) {
      throw InputError("regret trace vectors must have equal length");
    }
    if (!instantaneous.allFinite() || !simple_by_t.allFinite() ||
        !std::isfinite(cumulative)) {
      throw InputError("regret trace must be finite");
    }
    if (instantaneous.size() > 0 && instantaneous.minCoeff() < 0.0) {
      throw InputError("instantaneous regret cannot be negative");
    }
    for (Eigen::Index t = 1; t < simple_by_t.size(); ++t) {
      if (simple_by_t(t) > simple_by_t(t - 1)) {
        throw InputError("simple regret must be non-increasing");
      }
    }
    const double sum = instantaneous.sum();
    if (std::abs(sum - cumulative) >
        1e-9 * std::max(1.0, std::abs(cumulative))) {
      throw InputError("cumulative regret must equal the sum of the trace");
    }
  }
};

// Instantaneous, cumulative and simple regret of a query log, measured on
// the noiseless objective values rather than the noisy observations.
inline RegretTrace regret_metrics(const modeler::ObservationLog& log,
                                  const Eigen::VectorXd& truth) {
  log.validate();
  if (truth.size() < 1 || !truth.allFinite()) {
    throw InputError("truth vector must be non-empty and finite");
  }
  const double best = truth.maxCoeff();
  const Eigen::Index steps = static_cast<Eigen::Index>(log.entries.size());
  RegretTrace trace;
  trace.instantaneous.resize(steps);
  trace.simple_by_t.resize(steps);
  for (Eigen::Index t = 0; t < steps; ++t) {
    const Eigen::Index row = log.entries[static_cast<std::size_t>(t)].row_index;
    if (row < 0 || row >= truth.size()) {
      throw InputError("logged row index falls outside the truth vector");
    }
    trace.instantaneous(t) = best - truth(row);
    trace.simple_by_t(t) =
        t == 0 ? trace.instantaneous(t)
               : std::min(trace.simple_by_t(t - 1), trace.instantaneous(t));
  }
  trace.cumulative = trace.instantaneous.sum();
  return trace;
}

enum class ObjectiveKind { kSyntheticGp, kBranin, kCsv };

// Full description of one benchmark experiment. The synthetic objective
// resamples a fresh GP path per run and therefore requires explicit
// hyperparameters; data-backed objectives may instead ask for a fit by
// leaving hyper empty.
struct ExperimentConfig {
  ObjectiveKind objective = ObjectiveKind::kSyntheticGp;
  std::string csv_path;
  std::vector<std::string> csv_features;
  std::string csv_target;
  bool log_transform = false;
  std::optional<gp::GpHyperparams> hyper = gp::GpHyperparams{1.0, 1.25, 1e-5};
  curator::DpParams dp{3.0, 1e-5};
  Eigen::Index r = 10;
  Eigen::Index horizon = 50;
  int runs = 50;
  double delta_ucb = 0.05;
  std::uint64_t master_seed = 12345;
  bool exclude_observed = true;
  double max_norm = 25.0;
  GridSpec grid = symmetric_grid(2, 100);
  Eigen::Index branin_points_per_dim = 31;
  double eps_ucb = 0.1;
  std::optional<double> lipschitz;
  int jobs = 1;

  void validate() const {
    dp.validate();
    if (runs < 1) {
      throw InputError("runs must be at least one");
    }
    if (jobs < 1) {
      throw InputError("jobs must be at least one");
    }
    if (horizon < 1) {
      throw InputError("horizon must be at least one");
    }
    if (r < 1) {
      throw InputError("projection dimension must be at least one");
    }
    if (!(delta_ucb > 0.0) || !(delta_ucb < 1.0)) {
      throw InputError("delta_ucb must lie in (0, 1)");
    }
    if (!(eps_ucb > 0.0) || !std::isfinite(eps_ucb)) {
      throw InputError("eps_ucb must be positive and finite");
    }
    if (!(max_norm > 0.0) || !std::isfinite(max_norm)) {
      throw InputError("max_norm must be positive and finite");
    }
    if (lipschitz.has_value() &&
        (!(*lipschitz > 0.0) || !std::isfinite(*lipschitz))) {
      throw InputError("lipschitz must be positive and finite when given");
    }
    if (hyper.has_value()) {
      hyper->validate();
    }
    switch (objective) {
      case ObjectiveKind::kSyntheticGp:
        grid.validate();
        if (!hyper.has_value()) {
          throw InputError(
              "the synthetic objective needs explicit hyperparameters; "
              "there is no fixed data to fit them from");
        }
        break;
      case ObjectiveKind::kBranin:
        if (branin_points_per_dim < 2) {
          throw InputError("branin grid needs at least two points per side");
        }
        break;
      case ObjectiveKind::kCsv:
        if (csv_path.empty() || csv_features.empty() || csv_target.empty()) {
          throw InputError(
              "csv objective needs a path, feature columns and a target");
        }
        break;
    }
  }
};

// Candidate set, hyperparameters and (for data-backed objectives) the fixed
// noiseless truth that an experiment will optimize over.
struct ResolvedProblem {
  curator::InputDataset inputs;
  gp::GpHyperparams hyper;
  Eigen::VectorXd fixed_truth;
  bool synthetic = false;
};

namespace detail {

inline std::vector<Eigen::Index> even_subsample(Eigen::Index n,
                                                Eigen::Index cap) {
  const Eigen::Index stride = std::max<Eigen::Index>(1, (n + cap - 1) / cap);
  std::vector<Eigen::Index> picks;
  for (Eigen::Index i = 0; i < n; i += stride) {
    picks.push_back(i);
  }
  return picks;
}

inline double population_variance(const Eigen::VectorXd& y) {
  const double mean = y.mean();
  return (y.array() - mean).square().sum() / static_cast<double>(y.size());
}

}  // namespace detail

// Greedy per-dimension lengthscale search: one ascending pass over the
// dimensions, each picking the multiple of its coordinate range that gives
// the best marginal likelihood on an evenly spaced subsample after dividing
// all coordinates by the current lengthscales.
inline Eigen::VectorXd fit_per_dim_lengthscales(const Eigen::MatrixXd& x,
                                                const Eigen::VectorXd& y) {
  if (x.rows() < 2 || x.rows() != y.size()) {
    throw InputError("lengthscale fit needs matching inputs and targets");
  }
  const std::vector<Eigen::Index> picks = detail::even_subsample(x.rows(), 60);
  const Eigen::Index m = static_cast<Eigen::Index>(picks.size());
  Eigen::MatrixXd sub(m, x.cols());
  Eigen::VectorXd y_sub(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    sub.row(i) = x.row(picks[static_cast<std::size_t>(i)]);
    y_sub(i) = y(picks[static_cast<std::size_t>(i)]);
  }
  const double signal = std::max(detail::population_variance(y_sub), 1e-12);
  const gp::GpHyperparams unit{signal, 1.0, 1e-2 * signal};
  std::vector<Eigen::Index> all(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) all[static_cast<std::size_t>(i)] = i;

  Eigen::VectorXd ranges(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    ranges(j) = sub.col(j).maxCoeff() - sub.col(j).minCoeff();
  }
  Eigen::VectorXd scales = ranges.cwiseMax(1e-12);
  const double multiples[] = {0.125, 0.25, 0.5, 1.0, 2.0};
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (ranges(j) <= 0.0) {
      scales(j) = 1.0;
      continue;
    }
    double best_score = -std::numeric_limits<double>::infinity();
    double best_scale = scales(j);
    for (const double mult : multiples) {
      Eigen::VectorXd trial = scales;
      trial(j) = mult * ranges(j);
      const Eigen::MatrixXd scaled =
          (sub.array().rowwise() / trial.transpose().array()).matrix();
      const double score = gp::log_marginal_likelihood(
          gp::CandidateMatrix(scaled), all, y_sub, unit);
      if (score > best_score) {
        best_score = score;
        best_scale = trial(j);
      }
    }
    scales(j) = best_scale;
  }
  return scales;
}

// Isotropic grid-search fit on the already rescaled inputs: lengthscales
// spanning the norm budget, signal variances around the target variance, and
// three noise floors per signal level.
inline gp::GpHyperparams fit_isotropic(const Eigen::MatrixXd& x,
                                       const Eigen::VectorXd& y) {
  if (x.rows() < 2 || x.rows() != y.size()) {
    throw InputError("hyperparameter fit needs matching inputs and targets");
  }
  const std::vector<Eigen::Index> picks = detail::even_subsample(x.rows(), 60);
  const Eigen::Index m = static_cast<Eigen::Index>(picks.size());
  Eigen::MatrixXd sub(m, x.cols());
  Eigen::VectorXd y_sub(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    sub.row(i) = x.row(picks[static_cast<std::size_t>(i)]);
    y_sub(i) = y(picks[static_cast<std::size_t>(i)]);
  }
  std::vector<Eigen::Index> all(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) all[static_cast<std::size_t>(i)] = i;

  const double base = std::max(detail::population_variance(y_sub), 1e-12);
  std::vector<gp::GpHyperparams> grid;
  for (const double sv_mult : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    for (const double l : {0.625, 1.25, 2.5, 5.0, 10.0, 20.0}) {
      for (const double nv_mult : {1e-6, 1e-4, 1e-2}) {
        const double sv = sv_mult * base;
        grid.push_back(gp::GpHyperparams{sv, l, nv_mult * sv});
      }
    }
  }
  return gp::fit_hyperparams(gp::CandidateMatrix(sub), all, y_sub, grid);
}

namespace detail {

inline ResolvedProblem resolve_fixed(const Eigen::MatrixXd& raw,
                                     const Eigen::VectorXd& y_raw,
                                     const ExperimentConfig& config) {
  const Eigen::VectorXd y = transform_targets(y_raw, config.log_transform);
  if (config.hyper.has_value()) {
    PreprocessResult pre = preprocess_inputs(raw, std::nullopt,
                                             config.max_norm, std::nullopt,
                                             false);
    return ResolvedProblem{curator::InputDataset(std::move(pre.inputs)),
                           *config.hyper, y, false};
  }
  const Eigen::VectorXd lengthscales = fit_per_dim_lengthscales(raw, y);
  PreprocessResult pre = preprocess_inputs(raw, lengthscales, config.max_norm,
                                           std::nullopt, false);
  const gp::GpHyperparams hyper = fit_isotropic(pre.inputs, y);
  return ResolvedProblem{curator::InputDataset(std::move(pre.inputs)), hyper,
                         y, false};
}

}  // namespace detail

// Materializes the candidate set and objective for a config: grids are
// enumerated and rescaled to the norm budget, CSV data is loaded, and
// missing hyperparameters are fitted from the fixed targets.
inline ResolvedProblem resolve_problem(const ExperimentConfig& config) {
  config.validate();
  switch (config.objective) {
    case ObjectiveKind::kSyntheticGp: {
      PreprocessResult pre =
          preprocess_inputs(grid_points(config.grid), std::nullopt,
                            config.max_norm, std::nullopt, false);
      // The norm-budget rescaling is a change of coordinate units, so the
      // lengthscale rides along with it. The configured lengthscale is
      // therefore read in grid units, keeping the objective's smoothness
      // independent of the norm budget.
      gp::GpHyperparams hyper = *config.hyper;
      hyper.length_scale *= pre.scale;
      return ResolvedProblem{curator::InputDataset(std::move(pre.inputs)),
                             hyper, Eigen::VectorXd(), true};
    }
    case ObjectiveKind::kBranin: {
      GridSpec spec;
      spec.dims = 2;
      spec.points_per_dim = config.branin_points_per_dim;
      spec.lower = Eigen::Vector2d(-5.0, 0.0);
      spec.upper = Eigen::Vector2d(10.0, 15.0);
      const Eigen::MatrixXd raw = grid_points(spec);
      Eigen::VectorXd y_raw(raw.rows());
      for (Eigen::Index i = 0; i < raw.rows(); ++i) {
        y_raw(i) = -branin_hoo(raw(i, 0), raw(i, 1));
      }
      return detail::resolve_fixed(raw, y_raw, config);
    }
    case ObjectiveKind::kCsv: {
      auto [data, y_raw] = load_csv_dataset(config.csv_path,
                                            config.csv_features,
                                            config.csv_target);
      return detail::resolve_fixed(data.rows(), y_raw, config);
    }
  }
  throw InputError("unknown objective kind");
}

// Per-iteration mean and standard error of the simple regret across runs.
struct ArmSummary {
  Eigen::VectorXd mean_simple;
  Eigen::VectorXd stderr_simple;
};

struct ExperimentReport {
  ExperimentConfig config;
  ArmSummary po;
  ArmSummary baseline;
  double sigma_min = 0.0;
  double omega = 0.0;
  bool lifted = false;
  double dominance_fraction = 0.0;
  std::optional<analysis::TheoryConstants> constants;
  gp::GpHyperparams hyper;
  std::vector<double> po_final_simple;
  std::vector<double> baseline_final_simple;
};

namespace detail {

[[noreturn]] inline void rethrow_with_run_index(int run) {
  const std::string prefix = "run " + std::to_string(run) + ": ";
  try {
    throw;
  } catch (const ParseError& e) {
    throw ParseError(prefix + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(prefix + e.what());
  } catch (const IoError& e) {
    throw IoError(prefix + e.what());
  } catch (const InputError& e) {
    throw InputError(prefix + e.what());
  } catch (const NumericError& e) {
    throw NumericError(prefix + e.what());
  } catch (const ContractError& e) {
    throw ContractError(prefix + e.what());
  }
}

struct RunOutcome {
  Eigen::VectorXd po_simple;
  Eigen::VectorXd base_simple;
  double dominance = 0.0;
  double truth_absmax = 0.0;
};

inline ArmSummary summarize_arm(const std::vector<RunOutcome>& outcomes,
                                bool baseline, Eigen::Index horizon) {
  const Eigen::Index runs = static_cast<Eigen::Index>(outcomes.size());
  ArmSummary out;
  out.mean_simple = Eigen::VectorXd::Zero(horizon);
  out.stderr_simple = Eigen::VectorXd::Zero(horizon);
  for (const RunOutcome& o : outcomes) {
    out.mean_simple += baseline ? o.base_simple : o.po_simple;
  }
  out.mean_simple /= static_cast<double>(runs);
  if (runs > 1) {
    for (const RunOutcome& o : outcomes) {
      const Eigen::VectorXd& v = baseline ? o.base_simple : o.po_simple;
      out.stderr_simple += (v - out.mean_simple).cwiseAbs2();
    }
    out.stderr_simple =
        (out.stderr_simple / static_cast<double>(runs - 1)).cwiseSqrt() /
        std::sqrt(static_cast<double>(runs));
  }
  return out;
}

}  // namespace detail

// Runs the full two-arm comparison: per run, a fresh projection release and
// an optimization over it, plus a paired optimization on the raw centered
// inputs that shares the same measurement noise stream. Reports per-iteration
// simple-regret summaries, the release diagnostics, the fraction of
// iterations whose observed-prefix kernel passed the dominance margin, and
// the derived guarantee constants.
inline ExperimentReport run_experiment(const ExperimentConfig& config) {
  ResolvedProblem problem = resolve_problem(config);
  const Eigen::Index n = problem.inputs.n();
  if (config.exclude_observed && config.horizon > n) {
    throw InputError(
        "horizon exceeds the candidate count and repeat selection is off");
  }
  const gp::GpHyperparams hyper = problem.hyper;
  const Eigen::MatrixXd centered = curator::center_columns(problem.inputs);
  const double sigma_min = curator::min_singular_value(centered);
  const double omega = curator::compute_omega(config.r, config.dp);
  const bool lifted = sigma_min < omega;
  const gp::CandidateMatrix baseline_candidates(centered);
  std::optional<GpSampler> sampler;
  if (problem.synthetic) {
    sampler.emplace(problem.inputs.rows(), hyper);
  }

  std::vector<detail::RunOutcome> outcomes(
      static_cast<std::size_t>(config.runs));
  auto one_run = [&](int k) {
    const Eigen::VectorXd truth =
        problem.synthetic
            ? sampler->draw(derive_seed(config.master_seed, kObjectiveStream,
                                        static_cast<std::uint64_t>(k)))
            : problem.fixed_truth;
    const curator::TransformedDataset released = curator::dp_transform(
        problem.inputs, config.dp, config.r,
        derive_seed(config.master_seed, kProjectionStream,
                    static_cast<std::uint64_t>(k)));
    const std::uint64_t oracle_seed = derive_seed(
        config.master_seed, kOracleStream, static_cast<std::uint64_t>(k));
    const modeler::BoConfig bo{config.horizon, config.delta_ucb / 2.0,
                               config.exclude_observed, oracle_seed};

    curator::MeasurementOracle po_oracle(truth, hyper.noise_variance,
                                         oracle_seed);
    const modeler::ObservationLog po_log = modeler::run_bo(
        gp::CandidateMatrix(released.rows), po_oracle, hyper, bo);

    curator::MeasurementOracle base_oracle(truth, hyper.noise_variance,
                                           oracle_seed);
    const modeler::ObservationLog base_log =
        modeler::run_bo(baseline_candidates, base_oracle, hyper, bo);

    detail::RunOutcome outcome;
    outcome.po_simple = regret_metrics(po_log, truth).simple_by_t;
    outcome.base_simple = regret_metrics(base_log, truth).simple_by_t;

    Eigen::Index dominant = 0;
    for (Eigen::Index t = 1; t <= config.horizon; ++t) {
      const Eigen::Index m = t - 1;
      Eigen::MatrixXd prefix(m, centered.cols());
      for (Eigen::Index i = 0; i < m; ++i) {
        prefix.row(i) =
            centered.row(po_log.entries[static_cast<std::size_t>(i)].row_index);
      }
      const Eigen::MatrixXd k_prefix =
          gp::internal::covariance_matrix(prefix, prefix, hyper);
      if (gp::is_diagonally_dominant(k_prefix)) {
        ++dominant;
      }
    }
    outcome.dominance =
        static_cast<double>(dominant) / static_cast<double>(config.horizon);
    outcome.truth_absmax = truth.cwiseAbs().maxCoeff();
    outcomes[static_cast<std::size_t>(k)] = std::move(outcome);
  };

  const int workers = std::min<int>(config.jobs, config.runs);
  if (workers <= 1) {
    for (int k = 0; k < config.runs; ++k) {
      try {
        one_run(k);
      } catch (...) {
        detail::rethrow_with_run_index(k);
      }
    }
  } else {
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    int first_error_run = -1;
    auto drain = [&] {
      while (true) {
        const int k = next.fetch_add(1);
        if (k >= config.runs) return;
        try {
          one_run(k);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) {
            first_error = std::current_exception();
            first_error_run = k;
          }
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(drain);
    }
    for (std::thread& t : pool) {
      t.join();
    }
    if (first_error) {
      try {
        std::rethrow_exception(first_error);
      } catch (...) {
        detail::rethrow_with_run_index(first_error_run);
      }
    }
  }

  ExperimentReport report;
  report.config = config;
  report.hyper = hyper;
  report.sigma_min = sigma_min;
  report.omega = omega;
  report.lifted = lifted;
  report.po = detail::summarize_arm(outcomes, false, config.horizon);
  report.baseline = detail::summarize_arm(outcomes, true, config.horizon);
  double dominance_sum = 0.0;
  double absmax = 0.0;
  for (const detail::RunOutcome& o : outcomes) {
    report.po_final_simple.push_back(o.po_simple(config.horizon - 1));
    report.baseline_final_simple.push_back(o.base_simple(config.horizon - 1));
    dominance_sum += o.dominance;
    absmax = std::max(absmax, o.truth_absmax);
  }
  report.dominance_fraction = dominance_sum / static_cast<double>(config.runs);

  const double diam = analysis::diameter(problem.inputs.rows());
  if (sigma_min > 0.0 && diam > 0.0) {
    analysis::GuaranteeParams params;
    params.eps_ucb = config.eps_ucb;
    params.delta_ucb = config.delta_ucb;
    params.L = config.lipschitz.value_or(absmax > 0.0 ? absmax : 1.0);
    params.diameter_ratio = diam / hyper.length_scale;
    analysis::TheoryConstants constants = analysis::derive_guarantee(
        params, n, config.r, config.dp, sigma_min, hyper);
    constants.gamma_T =
        analysis::gamma_surrogate(config.horizon, problem.inputs.d());
    if (!lifted) {
      constants.regret_bound = analysis::regret_bound(
          constants, config.horizon, n, config.delta_ucb, hyper);
    }
    report.constants = constants;
  }
  return report;
}

// One cell of the projection-dimension / privacy-level sweep.
struct SweepRow {
  Eigen::Index r = 0;
  double epsilon = 0.0;
  double mean_simple = 0.0;
  double stderr_simple = 0.0;
  bool lifted = false;
};

// Reruns the experiment over the cross product of projection dimensions and
// privacy levels, keeping the master seed fixed so cells are paired.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& config,
                                       const std::vector<Eigen::Index>& rs,
                                       const std::vector<double>& epsilons) {
  if (rs.empty() || epsilons.empty()) {
    throw InputError("sweep needs at least one r and one epsilon");
  }
  std::vector<SweepRow> rows;
  rows.reserve(rs.size() * epsilons.size());
  for (const Eigen::Index r : rs) {
    for (const double epsilon : epsilons) {
      ExperimentConfig cell = config;
      cell.r = r;
      cell.dp.epsilon = epsilon;
      const ExperimentReport report = run_experiment(cell);
      SweepRow row;
      row.r = r;
      row.epsilon = epsilon;
      row.mean_simple = report.po.mean_simple(config.horizon - 1);
      row.stderr_simple = report.po.stderr_simple(config.horizon - 1);
      row.lifted = report.lifted;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace pobo::bench

#endif  // POBO_BENCH_HPP_
