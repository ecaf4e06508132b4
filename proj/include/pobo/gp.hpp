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

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "pobo/errors.hpp"

namespace pobo::gp {

// Isotropic squared-exponential kernel:
//   k(x, x') = signal_variance * exp(-0.5 ||x - x'||^2 / length_scale^2)
// with noise_variance added on the diagonal of observed covariances.
struct GpHyperparams {
  double signal_variance = 1.0;
  double length_scale = 1.0;
  double noise_variance = 1e-6;

  void validate() const {
    const bool ok = std::isfinite(signal_variance) && signal_variance > 0.0 &&
                    std::isfinite(length_scale) && length_scale > 0.0 &&
                    std::isfinite(noise_variance) && noise_variance > 0.0;
    if (!ok) {
      throw InputError(
          "GP hyperparameters must be finite and strictly positive");
    }
  }
};

// Finite m x p matrix of candidate points: raw inputs or a released
// projection. Rows are the discrete optimization domain.
class CandidateMatrix {
 public:
  explicit CandidateMatrix(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
    if (rows_.rows() < 1 || rows_.cols() < 1) {
      throw InputError("candidate matrix must have at least one row and column");
    }
    if (!rows_.allFinite()) {
      throw InputError("candidate matrix has non-finite entries");
    }
  }

  Eigen::Index row_count() const { return rows_.rows(); }
  Eigen::Index dim() const { return rows_.cols(); }
  const Eigen::MatrixXd& rows() const { return rows_; }

 private:
  Eigen::MatrixXd rows_;
};

inline double se_covariance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                            const GpHyperparams& hyper) {
  hyper.validate();
  if (a.size() != b.size()) {
    throw InputError("se_covariance: vectors of dimension " +
                     std::to_string(a.size()) + " and " +
                     std::to_string(b.size()));
  }
  const double d2 = (a - b).squaredNorm();
  return hyper.signal_variance *
         std::exp(-0.5 * d2 / (hyper.length_scale * hyper.length_scale));
}

namespace internal {

// Kernel matrix between row sets. Distances use explicit row differences so
// k(x, x) is exactly signal_variance (the Gram-product shortcut is not).
inline Eigen::MatrixXd covariance_matrix(const Eigen::MatrixXd& a,
                                         const Eigen::MatrixXd& b,
                                         const GpHyperparams& hyper) {
  const double inv_2l2 =
      -0.5 / (hyper.length_scale * hyper.length_scale);
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      k(i, j) = hyper.signal_variance *
                std::exp(inv_2l2 * (a.row(i) - b.row(j)).squaredNorm());
    }
  }
  return k;
}

// Cholesky of K + noise I with an escalating jitter ladder:
// 1e-12 * signal_variance stepping x10 up to 1e-6 * signal_variance.
inline std::pair<Eigen::MatrixXd, double> jittered_cholesky(
    Eigen::MatrixXd k, const GpHyperparams& hyper) {
  double jitter = 0.0;
  for (;;) {
    Eigen::LLT<Eigen::MatrixXd> llt(
        jitter == 0.0
            ? k
            : Eigen::MatrixXd(k + jitter * Eigen::MatrixXd::Identity(
                                               k.rows(), k.cols())));
    if (llt.info() == Eigen::Success) {
      return {Eigen::MatrixXd(llt.matrixL()), jitter};
    }
    if (jitter == 0.0) {
      jitter = 1e-12 * hyper.signal_variance;
    } else if (jitter < 0.99e-6 * hyper.signal_variance) {
      jitter *= 10.0;
    } else {
      throw NumericError(
          "covariance factorization failed after the jitter ladder");
    }
  }
}

inline void check_indices(const std::vector<Eigen::Index>& indices,
                          Eigen::Index bound, const char* what) {
  for (Eigen::Index i : indices) {
    if (i < 0 || i >= bound) {
      throw InputError(std::string(what) + " index " + std::to_string(i) +
                       " outside [0, " + std::to_string(bound) + ")");
    }
  }
}

inline Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m,
                                   const std::vector<Eigen::Index>& indices) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(indices.size()), m.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(indices[i]);
  }
  return out;
}

}  // namespace internal

// Posterior state over a candidate matrix: which rows were observed, the
// observed values, and the Cholesky factor of K + noise I used by the
// mean/variance evaluation.
struct GpPosterior {
  GpHyperparams hyper;
  std::vector<Eigen::Index> observed_rows;
  Eigen::VectorXd observations;
  Eigen::MatrixXd factor;          // lower triangular
  Eigen::VectorXd alpha;           // (K + noise I)^{-1} y
  Eigen::MatrixXd observed_points; // candidate rows at observed_rows
  double jitter = 0.0;             // 0 unless the plain factorization failed

  Eigen::Index count() const { return observations.size(); }
};

inline GpPosterior make_posterior(const CandidateMatrix& candidates,
                                  const std::vector<Eigen::Index>& observed_rows,
                                  const Eigen::VectorXd& observations,
                                  const GpHyperparams& hyper) {
  hyper.validate();
  if (static_cast<Eigen::Index>(observed_rows.size()) != observations.size()) {
    throw InputError("observed row and observation counts differ");
  }
  if (!observations.allFinite()) {
    throw InputError("observations contain non-finite values");
  }
  internal::check_indices(observed_rows, candidates.row_count(), "observed");

  GpPosterior post;
  post.hyper = hyper;
  post.observed_rows = observed_rows;
  post.observations = observations;
  const Eigen::Index t = observations.size();
  post.observed_points = internal::gather_rows(candidates.rows(), observed_rows);
  if (t == 0) {
    post.factor.resize(0, 0);
    post.alpha.resize(0);
    return post;
  }
  Eigen::MatrixXd k =
      internal::covariance_matrix(post.observed_points, post.observed_points,
                                  hyper);
  k += hyper.noise_variance * Eigen::MatrixXd::Identity(t, t);
  auto [factor, jitter] = internal::jittered_cholesky(std::move(k), hyper);
  post.factor = std::move(factor);
  post.jitter = jitter;
  post.alpha = post.factor.triangularView<Eigen::Lower>().solve(observations);
  post.factor.triangularView<Eigen::Lower>().transpose().solveInPlace(
      post.alpha);
  return post;
}

struct Prediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

// Posterior mean and variance at the queried candidate rows, evaluated from
// the stored Cholesky factor. An empty observation set is the prior: mean 0,
// variance signal_variance.
inline Prediction posterior_predict(const GpPosterior& state,
                                    const CandidateMatrix& candidates,
                                    const std::vector<Eigen::Index>& query_indices) {
  internal::check_indices(query_indices, candidates.row_count(), "query");
  const Eigen::Index q = static_cast<Eigen::Index>(query_indices.size());
  Prediction out;
  out.mean = Eigen::VectorXd::Zero(q);
  out.variance =
      Eigen::VectorXd::Constant(q, state.hyper.signal_variance);
  if (state.count() == 0) {
    return out;
  }
  const Eigen::MatrixXd queries =
      internal::gather_rows(candidates.rows(), query_indices);
  const Eigen::MatrixXd k_star =
      internal::covariance_matrix(state.observed_points, queries, state.hyper);
  out.mean = k_star.transpose() * state.alpha;
  const Eigen::MatrixXd v =
      state.factor.triangularView<Eigen::Lower>().solve(k_star);
  for (Eigen::Index i = 0; i < q; ++i) {
    out.variance(i) = std::max(
        state.hyper.signal_variance - v.col(i).squaredNorm(), 0.0);
  }
  return out;
}

// Standard GP log marginal likelihood:
//   -0.5 y^T (K + noise I)^{-1} y - 0.5 log det(K + noise I) - (t/2) log 2 pi
inline double log_marginal_likelihood(const CandidateMatrix& candidates,
                                      const std::vector<Eigen::Index>& observed_rows,
                                      const Eigen::VectorXd& observations,
                                      const GpHyperparams& hyper) {
  if (observations.size() == 0) {
    throw InputError("log marginal likelihood needs at least one observation");
  }
  GpPosterior post =
      make_posterior(candidates, observed_rows, observations, hyper);
  const Eigen::Index t = observations.size();
  const double fit = -0.5 * observations.dot(post.alpha);
  double log_det_half = 0.0;
  for (Eigen::Index i = 0; i < t; ++i) {
    log_det_half += std::log(post.factor(i, i));
  }
  return fit - log_det_half -
         0.5 * static_cast<double>(t) * std::log(2.0 * std::numbers::pi);
}

// Grid-search MLE: the grid element with the highest log marginal likelihood,
// ties broken by earliest grid position.
inline GpHyperparams fit_hyperparams(const CandidateMatrix& candidates,
                                     const std::vector<Eigen::Index>& observed_rows,
                                     const Eigen::VectorXd& observations,
                                     const std::vector<GpHyperparams>& grid) {
  if (grid.empty()) {
    throw InputError("hyperparameter grid is empty");
  }
  if (observations.size() < 2) {
    throw InputError("hyperparameter fitting needs at least two observations");
  }
  const GpHyperparams* best = nullptr;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const GpHyperparams& hyper : grid) {
    const double score =
        log_marginal_likelihood(candidates, observed_rows, observations, hyper);
    if (best == nullptr || score > best_score) {
      best = &hyper;
      best_score = score;
    }
  }
  return *best;
}

// Row-wise dominance margin test on a covariance matrix: every diagonal entry
// must outweigh its off-diagonal row sum by the factor sqrt(m-1) + 1.
inline bool is_diagonally_dominant(const Eigen::MatrixXd& k) {
  if (k.rows() != k.cols()) {
    throw InputError("dominance test needs a square matrix");
  }
  const Eigen::Index m = k.rows();
  if (m == 0) {
    return true;
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (std::abs(k(i, j) - k(j, i)) > 1e-10) {
        throw InputError("dominance test needs a symmetric matrix");
      }
    }
  }
  const double margin = std::sqrt(static_cast<double>(m - 1)) + 1.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double off_sum = k.row(i).sum() - k(i, i);
    if (k(i, i) < margin * off_sum) {
      return false;
    }
  }
  return true;
}

}  // namespace pobo::gp
