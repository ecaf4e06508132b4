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

// Curator-side operations: the data owner centers a private candidate set,
// releases a random projection of it whose geometry is safe to share, and
// answers point queries about the objective with fresh Gaussian noise.

#ifndef POBO_CURATOR_HPP_
#define POBO_CURATOR_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pobo/errors.hpp"
#include "pobo/random.hpp"

namespace pobo::curator {

struct DpParams {
  double epsilon = 1.0;
  double delta = 1e-5;

  void validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw InputError("privacy epsilon must be positive and finite");
    }
    if (!(delta > 0.0) || !(delta < 1.0)) {
      throw InputError("privacy delta must lie in (0, 1)");
    }
  }
};

// The curator's private candidate matrix, one candidate per row.
class InputDataset {
 public:
  explicit InputDataset(
      Eigen::MatrixXd rows,
      std::optional<std::vector<std::string>> row_ids = std::nullopt)
      : rows_(std::move(rows)), row_ids_(std::move(row_ids)) {
    if (rows_.rows() < 2) {
      throw InputError("dataset needs at least two rows");
    }
    if (rows_.cols() < 1) {
      throw InputError("dataset needs at least one column");
    }
    if (!rows_.allFinite()) {
      throw InputError("dataset entries must be finite");
    }
    if (row_ids_.has_value() &&
        static_cast<Eigen::Index>(row_ids_->size()) != rows_.rows()) {
      throw InputError("row id count must match the number of rows");
    }
  }

  Eigen::Index n() const { return rows_.rows(); }
  Eigen::Index d() const { return rows_.cols(); }
  const Eigen::MatrixXd& rows() const { return rows_; }
  const std::optional<std::vector<std::string>>& row_ids() const {
    return row_ids_;
  }

 private:
  Eigen::MatrixXd rows_;
  std::optional<std::vector<std::string>> row_ids_;
};

// The released projection together with everything the modeler may see.
struct TransformedDataset {
  Eigen::MatrixXd rows;
  Eigen::Index r = 0;
  DpParams dp;
  double omega = 0.0;
  bool lifted = false;
  double sigma_min = 0.0;
  std::uint64_t projection_seed = 0;
  Eigen::Index source_dim = 0;

  void validate() const {
    dp.validate();
    if (r < 1 || rows.cols() != r) {
      throw InputError("released matrix must have r >= 1 columns");
    }
    if (rows.rows() < 2 || !rows.allFinite()) {
      throw InputError("released matrix must be finite with at least two rows");
    }
    if (!(omega > 0.0) || !std::isfinite(omega)) {
      throw InputError("omega must be positive and finite");
    }
    if (!(sigma_min >= 0.0) || !std::isfinite(sigma_min)) {
      throw InputError("sigma_min must be non-negative and finite");
    }
    if (lifted != (sigma_min < omega)) {
      throw InputError("lifted flag must equal (sigma_min < omega)");
    }
    if (source_dim < 1) {
      throw InputError("source dimension must be at least one");
    }
  }
};

// Subtracts each column mean, so every column of the result sums to zero.
inline Eigen::MatrixXd center_columns(const InputDataset& data) {
  Eigen::MatrixXd centered = data.rows();
  centered.rowwise() -= centered.colwise().mean();
  return centered;
}

// Smallest singular value the centered data must clear for the projection
// alone to carry the privacy guarantee at these parameters.
inline double compute_omega(Eigen::Index r, const DpParams& dp) {
  dp.validate();
  if (r < 1) {
    throw InputError("projection dimension must be at least one");
  }
  const double rd = static_cast<double>(r);
  return 16.0 * std::sqrt(rd * std::log(2.0 / dp.delta)) / dp.epsilon *
         std::log(16.0 * rd / dp.delta);
}

inline double min_singular_value(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  if (svd.info() != Eigen::Success) {
    throw NumericError("singular value decomposition failed to converge");
  }
  return svd.singularValues().minCoeff();
}

// Replaces each singular value s by sqrt(s^2 + omega^2), keeping the
// singular subspaces fixed. With omega = 0 the input is returned unchanged
// up to the round trip through the decomposition.
inline Eigen::MatrixXd lift_singular_values(const Eigen::MatrixXd& m,
                                            double omega) {
  if (!(omega >= 0.0) || !std::isfinite(omega)) {
    throw InputError("omega must be non-negative and finite");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw NumericError("singular value decomposition failed to converge");
  }
  Eigen::VectorXd lifted =
      (svd.singularValues().array().square() + omega * omega).sqrt();
  return svd.matrixU() * lifted.asDiagonal() * svd.matrixV().transpose();
}

// Standard normal matrix drawn from the given seed, filled row by row.
inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                       std::uint64_t seed) {
  GaussianStream stream(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = stream.next_gaussian();
    }
  }
  return m;
}

// Centers the data, checks its smallest singular value against the privacy
// threshold, lifts the spectrum when it falls short, and releases the
// scaled Gaussian projection. When no lift is needed the released matrix
// depends only on the data and the projection seed.
inline TransformedDataset dp_transform(const InputDataset& data,
                                       const DpParams& dp, Eigen::Index r,
                                       std::uint64_t projection_seed) {
  dp.validate();
  if (r < 1) {
    throw InputError("projection dimension must be at least one");
  }
  Eigen::MatrixXd centered = center_columns(data);
  const double sigma_min = min_singular_value(centered);
  const double omega = compute_omega(r, dp);
  const bool lifted = sigma_min < omega;
  Eigen::MatrixXd projection = gaussian_matrix(data.d(), r, projection_seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(r));
  Eigen::MatrixXd released;
  if (lifted) {
    released = (lift_singular_values(centered, omega) * projection) * scale;
  } else {
    released = (centered * projection) * scale;
  }
  TransformedDataset out;
  out.rows = std::move(released);
  out.r = r;
  out.dp = dp;
  out.omega = omega;
  out.lifted = lifted;
  out.sigma_min = sigma_min;
  out.projection_seed = projection_seed;
  out.source_dim = data.d();
  return out;
}

// Answers point queries y(i) + noise, drawing fresh noise on every call.
class MeasurementOracle {
 public:
  MeasurementOracle(Eigen::VectorXd truth, double noise_variance,
                    std::uint64_t rng_seed)
      : truth_(std::move(truth)),
        noise_variance_(noise_variance),
        stream_(rng_seed) {
    if (truth_.size() < 1 || !truth_.allFinite()) {
      throw InputError("oracle truth vector must be finite and non-empty");
    }
    if (!(noise_variance_ >= 0.0) || !std::isfinite(noise_variance_)) {
      throw InputError("noise variance must be non-negative and finite");
    }
  }

  Eigen::Index size() const { return truth_.size(); }
  double noise_variance() const { return noise_variance_; }

  double measure(Eigen::Index row_index) {
    if (row_index < 0 || row_index >= truth_.size()) {
      throw InputError("query row index out of range");
    }
    if (noise_variance_ == 0.0) {
      return truth_(row_index);
    }
    return truth_(row_index) +
           std::sqrt(noise_variance_) * stream_.next_gaussian();
  }

 private:
  Eigen::VectorXd truth_;
  double noise_variance_;
  GaussianStream stream_;
};

inline double answer_query(MeasurementOracle& oracle, Eigen::Index row_index) {
  return oracle.measure(row_index);
}

// Builds the neighboring dataset that moves one row by at most a unit step,
// the perturbation model the release is calibrated against.
inline InputDataset make_neighbor(const InputDataset& data,
                                  Eigen::Index row_index,
                                  const Eigen::VectorXd& direction,
                                  double magnitude) {
  if (row_index < 0 || row_index >= data.n()) {
    throw InputError("neighbor row index out of range");
  }
  if (direction.size() != data.d()) {
    throw InputError("direction dimension must match the dataset");
  }
  if (!direction.allFinite() ||
      std::abs(direction.norm() - 1.0) > 1e-9) {
    throw InputError("direction must be a unit vector");
  }
  if (!(magnitude >= 0.0) || !(magnitude <= 1.0)) {
    throw InputError("magnitude must lie in [0, 1]");
  }
  Eigen::MatrixXd rows = data.rows();
  rows.row(row_index) += magnitude * direction.transpose();
  return InputDataset(rows, data.row_ids());
}

}  // namespace pobo::curator

#endif  // POBO_CURATOR_HPP_
