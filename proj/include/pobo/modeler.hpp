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

// Modeler-side GP-UCB loop over a candidate set. The modeler never sees
// raw coordinates beyond the matrix it is handed; it talks to the curator
// through row indices and the measurements that come back. Running on a
// released projection gives the privacy-preserving optimizer; running on
// the original (centered) data gives the non-private baseline.

#ifndef POBO_MODELER_HPP_
#define POBO_MODELER_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <unordered_set>
#include <vector>

#include "pobo/curator.hpp"
#include "pobo/errors.hpp"
#include "pobo/gp.hpp"

namespace pobo::modeler {

struct BoConfig {
  Eigen::Index horizon = 1;
  double delta_prime = 0.025;
  bool exclude_observed = false;
  std::uint64_t seed = 0;

  void validate() const {
    if (horizon < 1) {
      throw InputError("horizon must be at least one");
    }
    if (!(delta_prime > 0.0) || !(delta_prime < 1.0)) {
      throw InputError("delta_prime must lie in (0, 1)");
    }
  }
};

struct LogEntry {
  Eigen::Index t = 0;
  Eigen::Index row_index = 0;
  double beta_t = 0.0;
  double y_t = 0.0;

  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

struct ObservationLog {
  std::vector<LogEntry> entries;

  void validate() const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const LogEntry& e = entries[i];
      if (e.t != static_cast<Eigen::Index>(i) + 1) {
        throw InputError("log iterations must start at 1 with no gaps");
      }
      if (e.row_index < 0) {
        throw InputError("log row indices must be non-negative");
      }
      if (!std::isfinite(e.beta_t) || !std::isfinite(e.y_t)) {
        throw InputError("log values must be finite");
      }
      if (i > 0 && e.beta_t < entries[i - 1].beta_t) {
        throw InputError("beta_t must be non-decreasing across iterations");
      }
    }
  }
};

// Confidence width 2 ln(n t^2 pi^2 / (6 delta')) used at step t over n
// candidates.
inline double beta_t(Eigen::Index n, Eigen::Index t, double delta_prime) {
  if (n < 1 || t < 1) {
    throw InputError("beta_t needs n >= 1 and t >= 1");
  }
  if (!(delta_prime > 0.0) || !std::isfinite(delta_prime)) {
    throw InputError("delta_prime must be positive and finite");
  }
  const double nd = static_cast<double>(n);
  const double td = static_cast<double>(t);
  const double pi = std::numbers::pi;
  return 2.0 * std::log(nd * td * td * pi * pi / (6.0 * delta_prime));
}

// Smallest index maximizing mean + sqrt(beta) * stddev over the candidates
// not in the excluded set.
inline Eigen::Index ucb_select(const gp::GpPosterior& state,
                               const gp::CandidateMatrix& candidates,
                               double beta,
                               const std::unordered_set<Eigen::Index>& excluded) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw InputError("beta must be non-negative and finite");
  }
  std::vector<Eigen::Index> feasible;
  feasible.reserve(static_cast<std::size_t>(candidates.row_count()));
  for (Eigen::Index i = 0; i < candidates.row_count(); ++i) {
    if (!excluded.contains(i)) {
      feasible.push_back(i);
    }
  }
  if (feasible.empty()) {
    throw InputError("every candidate is excluded");
  }
  gp::Prediction pred = gp::posterior_predict(state, candidates, feasible);
  const double root_beta = std::sqrt(beta);
  Eigen::Index best = feasible.front();
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < feasible.size(); ++i) {
    const double score =
        pred.mean(static_cast<Eigen::Index>(i)) +
        root_beta * std::sqrt(pred.variance(static_cast<Eigen::Index>(i)));
    if (score > best_score) {
      best_score = score;
      best = feasible[i];
    }
  }
  return best;
}

// Full optimization loop: at each step refit the posterior on everything
// observed so far, widen the confidence band per beta_t, pick the highest
// upper bound, and query the curator for that row.
inline ObservationLog run_bo(const gp::CandidateMatrix& candidates,
                             curator::MeasurementOracle& oracle,
                             const gp::GpHyperparams& hyper,
                             const BoConfig& config) {
  config.validate();
  hyper.validate();
  if (oracle.size() != candidates.row_count()) {
    throw InputError("oracle truth length must equal the candidate count");
  }
  const Eigen::Index n = candidates.row_count();
  std::vector<Eigen::Index> observed_rows;
  std::vector<double> observed_values;
  std::unordered_set<Eigen::Index> excluded;
  ObservationLog log;
  log.entries.reserve(static_cast<std::size_t>(config.horizon));
  for (Eigen::Index t = 1; t <= config.horizon; ++t) {
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(
        observed_values.data(),
        static_cast<Eigen::Index>(observed_values.size()));
    gp::GpPosterior posterior =
        gp::make_posterior(candidates, observed_rows, y, hyper);
    const double beta = beta_t(n, t, config.delta_prime);
    const Eigen::Index pick = ucb_select(posterior, candidates, beta, excluded);
    const double measured = oracle.measure(pick);
    log.entries.push_back(LogEntry{t, pick, beta, measured});
    observed_rows.push_back(pick);
    observed_values.push_back(measured);
    if (config.exclude_observed) {
      excluded.insert(pick);
    }
  }
  log.validate();
  return log;
}

}  // namespace pobo::modeler

#endif  // POBO_MODELER_HPP_
