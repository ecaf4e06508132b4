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

// Derives the constants behind the optimizer's guarantee (projection
// dimension, covariance and distance distortion factors, regret bound) and
// empirically verifies the preservation statements on concrete released
// datasets.

#ifndef POBO_ANALYSIS_HPP_
#define POBO_ANALYSIS_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>

#include "pobo/curator.hpp"
#include "pobo/errors.hpp"
#include "pobo/gp.hpp"
#include "pobo/modeler.hpp"

namespace pobo::analysis {

struct GuaranteeParams {
  double eps_ucb = 0.1;
  double delta_ucb = 0.05;
  double L = 1.0;
  double diameter_ratio = 1.0;

  void validate() const {
    if (!(eps_ucb > 0.0) || !std::isfinite(eps_ucb)) {
      throw InputError("eps_ucb must be positive and finite");
    }
    if (!(delta_ucb > 0.0) || !(delta_ucb < 1.0)) {
      throw InputError("delta_ucb must lie in (0, 1)");
    }
    if (!(L > 0.0) || !std::isfinite(L)) {
      throw InputError("the observation bound L must be positive and finite");
    }
    if (!(diameter_ratio > 0.0) || !std::isfinite(diameter_ratio)) {
      throw InputError("diameter_ratio must be positive and finite");
    }
  }
};

struct TheoryConstants {
  double mu = 0.0;
  double nu = 0.0;
  Eigen::Index r_min = 0;
  double omega = 0.0;
  double C = 0.0;
  double C_prime = 1.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double gamma_T = 0.0;
  double regret_bound = 0.0;
  double eps_ucb = 0.0;
  double delta_ucb = 0.0;
};

// Smallest projection dimension that keeps all pairwise distances within a
// (1 +/- nu) band except with probability mu.
inline Eigen::Index min_projection_dim(Eigen::Index n, double mu, double nu) {
  if (n < 2) {
    throw InputError("n must be at least two");
  }
  if (!(mu > 0.0) || !(mu < 1.0)) {
    throw InputError("mu must lie in (0, 1)");
  }
  if (!(nu > 0.0) || !(nu < 0.5)) {
    throw InputError("nu must lie in (0, 1/2)");
  }
  const double nd = static_cast<double>(n);
  return static_cast<Eigen::Index>(
      std::ceil(8.0 * std::log(nd * nd / mu) / (nu * nu)));
}

// Exact all-pairs diameter of a point set, one point per row.
inline double diameter(const Eigen::MatrixXd& points) {
  if (points.rows() < 1 || !points.allFinite()) {
    throw InputError("diameter needs a non-empty finite matrix");
  }
  double best = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < points.rows(); ++j) {
      best = std::max(best, (points.row(i) - points.row(j)).norm());
    }
  }
  return best;
}

// Smallest privacy epsilon at which the release stays unlifted for this
// dataset: the threshold scales as 1/epsilon, so it equals the threshold at
// epsilon = 1 divided by sigma_min.
inline double min_feasible_epsilon(Eigen::Index r, double delta,
                                   double sigma_min) {
  if (!(sigma_min > 0.0) || !std::isfinite(sigma_min)) {
    throw InputError("sigma_min must be positive and finite");
  }
  return curator::compute_omega(r, curator::DpParams{1.0, delta}) / sigma_min;
}

// Turns the user-facing guarantee parameters into every derived constant:
// the failure split mu, the distortion level nu, the minimal projection
// dimension, the lift threshold, and the covariance and posterior constants
// that enter the regret bound.
inline TheoryConstants derive_guarantee(const GuaranteeParams& params,
                                        Eigen::Index n, Eigen::Index r,
                                        const curator::DpParams& dp,
                                        double sigma_min,
                                        const gp::GpHyperparams& hyper) {
  params.validate();
  hyper.validate();
  if (n < 2) {
    throw InputError("n must be at least two");
  }
  if (!(sigma_min > 0.0) || !std::isfinite(sigma_min)) {
    throw InputError("sigma_min must be positive and finite");
  }
  TheoryConstants out;
  out.eps_ucb = params.eps_ucb;
  out.delta_ucb = params.delta_ucb;
  out.mu = params.delta_ucb / 2.0;
  const double phi2 = params.diameter_ratio * params.diameter_ratio;
  out.nu = std::min({params.eps_ucb / (2.0 * std::sqrt(3.0) * phi2 * params.L),
                     2.0 / phi2, 0.5});
  // nu may legitimately saturate at 1/2 here, so the ceiling formula is
  // applied directly instead of through min_projection_dim's open range.
  const double nd = static_cast<double>(n);
  out.r_min = static_cast<Eigen::Index>(
      std::ceil(8.0 * std::log(nd * nd / out.mu) / (out.nu * out.nu)));
  out.omega = curator::compute_omega(r, dp);
  const bool lifted = sigma_min < out.omega;
  if (lifted) {
    const double ratio = out.omega * out.omega / (sigma_min * sigma_min);
    out.C_prime = 1.0 + ratio;
    out.C = std::max(
        out.nu * phi2,
        1.0 - std::exp(-0.5 * (out.nu + out.nu * ratio + ratio) * phi2));
  } else {
    out.C_prime = 1.0;
    out.C = out.nu * phi2;
  }
  const double sy2 = hyper.signal_variance;
  const double sn2 = hyper.noise_variance;
  const double sy = std::sqrt(sy2);
  out.C1 = out.C * sy * std::sqrt(2.0 * sy2 + sn2) *
           (std::sqrt(2.0) * (1.0 + out.C) * (1.0 + out.C) * sy2 / sn2 +
            (2.0 + out.C) * out.C);
  out.C2 = std::sqrt(2.0) * (1.0 + out.C) * out.C * sy2 / sn2 * params.L;
  return out;
}

// Information-gain surrogate (ln T)^(d+1); the growth order is known for
// the squared exponential kernel but the leading constant is not, so every
// report labels this value a surrogate.
inline double gamma_surrogate(Eigen::Index horizon, Eigen::Index dims) {
  if (horizon < 1 || dims < 1) {
    throw InputError("gamma surrogate needs horizon >= 1 and dims >= 1");
  }
  return std::pow(std::log(static_cast<double>(horizon)),
                  static_cast<double>(dims) + 1.0);
}

// High-probability simple-regret bound at horizon T. Only valid when the
// release was unlifted: after a lift the tolerance term is replaced by a
// constant the user cannot set, so the call is refused.
inline double regret_bound(const TheoryConstants& constants, Eigen::Index T,
                           Eigen::Index n, double delta_ucb,
                           const gp::GpHyperparams& hyper) {
  hyper.validate();
  if (T < 1 || n < 1) {
    throw InputError("regret bound needs T >= 1 and n >= 1");
  }
  if (!(delta_ucb > 0.0) || !(delta_ucb < 1.0)) {
    throw InputError("delta_ucb must lie in (0, 1)");
  }
  if (constants.C_prime > 1.0) {
    throw ContractError(
        "regret bound unavailable after a lifted release: the tolerance "
        "term is replaced by a constant that cannot be set by the user");
  }
  if (!(constants.eps_ucb > 0.0) || constants.C1 < 0.0 ||
      constants.C2 < 0.0 || constants.gamma_T < 0.0) {
    throw InputError("constants must carry eps_ucb > 0 and non-negative "
                     "C1, C2, gamma_T");
  }
  const double td = static_cast<double>(T);
  const double beta = modeler::beta_t(n, T, delta_ucb / 2.0);
  const double width = constants.C2 + constants.C1 * std::sqrt(beta);
  const double second = 24.0 * width * width * std::log(td) / td;
  const double third = 24.0 / std::log(1.0 + 1.0 / hyper.noise_variance) *
                       beta * constants.gamma_T / td;
  return std::sqrt(constants.eps_ucb * constants.eps_ucb + second + third);
}

struct DistanceCheck {
  double violation_fraction = 0.0;
  double worst_ratio = 1.0;
  Eigen::Index zero_pairs = 0;
  Eigen::Index zero_pair_violations = 0;
};

// Scans every pair, counting violations of
//   (1 - nu) d_x^2 <= d_z^2 <= (1 + nu) c_prime d_x^2
// over pairs with d_x > 0. Coincident source pairs must stay coincident and
// are tallied separately. The reported worst ratio is the d_z^2 / d_x^2
// farthest from one.
inline DistanceCheck check_distance_preservation(const Eigen::MatrixXd& x,
                                                 const Eigen::MatrixXd& z,
                                                 double nu, double c_prime) {
  if (x.rows() != z.rows()) {
    throw InputError("source and released row counts differ");
  }
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw InputError("nu must be positive and finite");
  }
  if (!(c_prime >= 1.0) || !std::isfinite(c_prime)) {
    throw InputError("c_prime must be at least one");
  }
  DistanceCheck out;
  Eigen::Index checked = 0;
  Eigen::Index violations = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
      const double dx = (x.row(i) - x.row(j)).squaredNorm();
      const double dz = (z.row(i) - z.row(j)).squaredNorm();
      if (dx == 0.0) {
        ++out.zero_pairs;
        if (dz != 0.0) ++out.zero_pair_violations;
        continue;
      }
      ++checked;
      const double ratio = dz / dx;
      if (std::abs(ratio - 1.0) > std::abs(out.worst_ratio - 1.0)) {
        out.worst_ratio = ratio;
      }
      if (dz < (1.0 - nu) * dx || dz > (1.0 + nu) * c_prime * dx) {
        ++violations;
      }
    }
  }
  if (checked > 0) {
    out.violation_fraction =
        static_cast<double>(violations) / static_cast<double>(checked);
  }
  return out;
}

struct CovarianceCheck {
  double violation_fraction = 0.0;
  double max_relative_error = 0.0;
};

// Scans every pair, comparing the kernel on released rows against the
// kernel on source rows: |k_z - k_x| must stay within c * k_x. Requires
// nu <= 2 / phi^2 where phi is the source diameter over the lengthscale.
inline CovarianceCheck check_covariance_preservation(
    const Eigen::MatrixXd& x, const Eigen::MatrixXd& z,
    const gp::GpHyperparams& hyper, double c, double nu) {
  if (x.rows() != z.rows()) {
    throw InputError("source and released row counts differ");
  }
  hyper.validate();
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw InputError("c must be non-negative and finite");
  }
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw InputError("nu must be positive and finite");
  }
  const double phi = diameter(x) / hyper.length_scale;
  if (nu > 2.0 / (phi * phi)) {
    throw ContractError(
        "covariance preservation requires nu <= 2 over the squared "
        "diameter ratio");
  }
  CovarianceCheck out;
  Eigen::Index checked = 0;
  Eigen::Index violations = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = i; j < x.rows(); ++j) {
      const double k_x = gp::se_covariance(x.row(i).transpose(),
                                           x.row(j).transpose(), hyper);
      const double k_z = gp::se_covariance(z.row(i).transpose(),
                                           z.row(j).transpose(), hyper);
      const double err = std::abs(k_z - k_x);
      ++checked;
      out.max_relative_error = std::max(out.max_relative_error, err / k_x);
      if (err > c * k_x) ++violations;
    }
  }
  out.violation_fraction =
      static_cast<double>(violations) / static_cast<double>(checked);
  return out;
}

}  // namespace pobo::analysis

#endif  // POBO_ANALYSIS_HPP_
