#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "precmat/cov_inputs.hpp"
#include "precmat/errors.hpp"
#include "precmat/estimators.hpp"
#include "precmat/rng.hpp"
#include "precmat/symmetric_matrix.hpp"

namespace precmat {

// Log-density of the observed coordinates of one zero-mean row under the
// covariance sigma (its observed-observed sub-block).  Rows with nothing
// observed contribute zero.
inline double observed_loglik_row(const Eigen::VectorXd& x,
                                  const Eigen::Array<bool, Eigen::Dynamic, 1>& observed,
                                  const Eigen::MatrixXd& sigma) {
  static constexpr double kLog2Pi = 1.8378770664093455;
  std::vector<Eigen::Index> idx;
  for (Eigen::Index j = 0; j < observed.size(); ++j)
    if (observed(j)) idx.push_back(j);
  if (idx.empty()) return 0.0;
  const Eigen::Index k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd s(k, k);
  Eigen::VectorXd xo(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    xo(a) = x(idx[a]);
    for (Eigen::Index b = 0; b < k; ++b) s(a, b) = sigma(idx[a], idx[b]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success)
    throw NumericalError("observed_loglik: covariance sub-block is not positive definite");
  double logdet = 0.0;
  for (Eigen::Index a = 0; a < k; ++a) logdet += std::log(llt.matrixL()(a, a));
  logdet *= 2.0;
  double quad = xo.dot(llt.solve(xo));
  return -0.5 * (static_cast<double>(k) * kLog2Pi + logdet + quad);
}

// Sum of row log-likelihoods under sigma = theta^{-1}.
inline double observed_loglik(const MaskedData& data, const SymmetricMatrix& theta) {
  Eigen::MatrixXd sigma = sym_inverse_pd(theta).mat();
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    try {
      total += observed_loglik_row(data.x.row(i), data.observed.row(i).transpose(), sigma);
    } catch (const NumericalError& e) {
      throw NumericalError("row " + std::to_string(i) + ": " + e.what());
    }
  }
  return total;
}

// Number of nonzero entries on or above the diagonal.
inline int upper_support_size(const SymmetricMatrix& theta, double threshold = 1e-8) {
  int cnt = 0;
  for (int j = 0; j < theta.dim(); ++j)
    for (int i = 0; i <= j; ++i)
      if (std::abs(theta(i, j)) > threshold) ++cnt;
  return cnt;
}

// -2 * loglik + log(n) * #nonzero(upper triangle incl. diagonal).  Smaller is
// better.
inline double bic(const MaskedData& data, const SymmetricMatrix& theta,
                  double threshold = 1e-8) {
  double ll = observed_loglik(data, theta);
  return -2.0 * ll + std::log(static_cast<double>(data.n())) *
                         static_cast<double>(upper_support_size(theta, threshold));
}

struct TuningResult {
  std::string criterion;  // "bic" | "cv"
  std::vector<double> grid;
  std::vector<double> scores;  // bic: smaller wins; cv: larger wins
  double chosen_lambda = 0.0;
  int chosen_index = -1;
  std::vector<std::string> warnings;
};

// Fit callback: surrogate + lambda -> estimate.  Lets the tuning loop stay
// agnostic about which estimator and solver configuration is in play.
using FitFunction = std::function<EstimateResult(const SymmetricMatrix&, double)>;

inline bool estimate_converged(const EstimateResult& res) {
  if (res.variant == EstimatorVariant::Nodewise) {
    for (const auto& nr : res.node_reports)
      if (!nr.converged) return false;
    return true;
  }
  return res.report.converged;
}

// Score every lambda on the full data by BIC; ties go to the first (smaller)
// grid value.
inline TuningResult tune_bic(const MaskedData& data, const std::vector<double>& grid,
                             const FitFunction& fit, double threshold = 1e-8) {
  if (grid.empty()) throw ConfigError("tune_bic: empty lambda grid");
  TuningResult out;
  out.criterion = "bic";
  out.grid = grid;
  SymmetricMatrix gamma = missing_data_gamma(data);
  for (double lam : grid) {
    EstimateResult res = fit(gamma, lam);
    if (!estimate_converged(res))
      out.warnings.push_back("lambda=" + std::to_string(lam) + ": fit did not fully converge");
    out.scores.push_back(bic(data, res.theta_hat, threshold));
  }
  out.chosen_index = 0;
  for (std::size_t i = 1; i < out.scores.size(); ++i)
    if (out.scores[i] < out.scores[out.chosen_index]) out.chosen_index = static_cast<int>(i);
  out.chosen_lambda = grid[out.chosen_index];
  return out;
}

// K-fold cross-validation: rows are shuffled once (seeded), folds are
// contiguous chunks of the shuffle.  For each lambda the held-out observed
// log-likelihood is accumulated across folds; larger is better.  A fold
// whose fit fails poisons that lambda with -inf rather than aborting the
// search.  Per-column observation frequencies are re-estimated on each
// training fold when they were estimated to begin with.
inline TuningResult cross_validate(const MaskedData& data, const std::vector<double>& grid,
                                   int k_folds, const FitFunction& fit, std::uint64_t seed) {
  if (grid.empty()) throw ConfigError("cross_validate: empty lambda grid");
  if (k_folds < 2 || k_folds > data.n())
    throw ConfigError("cross_validate: need 2 <= K <= n");
  TuningResult out;
  out.criterion = "cv";
  out.grid = grid;
  out.scores.assign(grid.size(), 0.0);

  std::vector<int> order(static_cast<std::size_t>(data.n()));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<std::vector<int>> folds(static_cast<std::size_t>(k_folds));
  for (std::size_t i = 0; i < order.size(); ++i)
    folds[i % static_cast<std::size_t>(k_folds)].push_back(order[i]);

  for (int v = 0; v < k_folds; ++v) {
    std::vector<int> train;
    for (int u = 0; u < k_folds; ++u)
      if (u != v) train.insert(train.end(), folds[u].begin(), folds[u].end());
    MaskedData train_data = data.rows(train);
    if (data.zeta_estimated) {
      train_data.zeta = estimate_zeta(train_data.observed, &train_data.warnings);
      train_data.zeta_estimated = true;
    }
    MaskedData test_data = data.rows(folds[v]);
    SymmetricMatrix gamma = missing_data_gamma(train_data);
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      if (out.scores[gi] == -std::numeric_limits<double>::infinity()) continue;
      try {
        EstimateResult res = fit(gamma, grid[gi]);
        if (!estimate_converged(res)) {
          out.warnings.push_back("fold " + std::to_string(v) + ", lambda=" +
                                 std::to_string(grid[gi]) + ": no convergence, score dropped");
          out.scores[gi] = -std::numeric_limits<double>::infinity();
          continue;
        }
        out.scores[gi] += observed_loglik(test_data, res.theta_hat);
      } catch (const Error& e) {
        out.warnings.push_back("fold " + std::to_string(v) + ", lambda=" +
                               std::to_string(grid[gi]) + ": " + e.what());
        out.scores[gi] = -std::numeric_limits<double>::infinity();
      }
    }
  }

  out.chosen_index = 0;
  for (std::size_t i = 1; i < out.scores.size(); ++i)
    if (out.scores[i] > out.scores[out.chosen_index]) out.chosen_index = static_cast<int>(i);
  out.chosen_lambda = grid[out.chosen_index];
  return out;
}

}  // namespace precmat
