#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "precmat/admm.hpp"
#include "precmat/cov_inputs.hpp"
#include "precmat/errors.hpp"
#include "precmat/penalty.hpp"
#include "precmat/projections.hpp"
#include "precmat/symmetric_matrix.hpp"

namespace precmat {

enum class EstimatorVariant {
  NonprojGlasso,  // feed the (possibly indefinite) surrogate straight to ADMM
  ProjGlasso,     // repair the surrogate inside the smallest PSD box first
  Nodewise,       // column regressions, assembled and symmetrized
};

inline const char* to_string(EstimatorVariant v) {
  switch (v) {
    case EstimatorVariant::NonprojGlasso: return "nonproj";
    case EstimatorVariant::ProjGlasso: return "proj";
    case EstimatorVariant::Nodewise: return "nodewise";
  }
  return "?";
}

struct NodewiseConfig {
  int max_iter = 10000;
  double tol = 1e-7;        // on the sup-norm change of beta
  double step_guard = 1e-6; // step = 1 / (||submatrix||_2 + step_guard)
  // Spectral norms of the leave-one-out submatrices, if the caller has them
  // cached (they do not depend on lambda, so sweeps reuse them).
  std::optional<Eigen::VectorXd> sub_norms;
};

struct NodeReport {
  int iterations = 0;
  bool converged = false;
};

struct EstimateResult {
  SymmetricMatrix theta_hat;
  EstimatorVariant variant = EstimatorVariant::NonprojGlasso;
  SolveReport report;                    // glasso variants
  std::vector<NodeReport> node_reports;  // nodewise
  SpectrumStats input_spectrum;          // of the surrogate as handed in
  double proj_radius = 0.0;              // ProjGlasso: certified box radius
};

namespace detail {

// Spectrum summary without the box-repair field (kept cheap; the repair is
// only computed when an estimator actually needs it).
inline SpectrumStats basic_spectrum(const SymmetricMatrix& gamma) {
  SpectrumStats s;
  Eigen::VectorXd ev = eigenvalues(gamma);
  s.max_eig = ev(0);
  s.min_eig = ev(ev.size() - 1);
  s.max_eig_projected = std::numeric_limits<double>::quiet_NaN();
  const double tol = default_tolerances().psd;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) < -tol) {
      ++s.count_negative;
      s.sum_negative += ev(i);
    }
  return s;
}

}  // namespace detail

// Penalized precision estimate from a covariance surrogate via ADMM under
// the spectral side constraint.  cfg.radius carries the constraint.
inline EstimateResult glasso(const SymmetricMatrix& gamma, const Penalty& g,
                             const AdmmConfig& cfg,
                             EstimatorVariant variant = EstimatorVariant::NonprojGlasso,
                             double proj_tol = 1e-4) {
  if (variant == EstimatorVariant::Nodewise)
    throw ConfigError("glasso: nodewise is a separate estimator");
  EstimateResult res;
  res.variant = variant;
  res.input_spectrum = detail::basic_spectrum(gamma);

  const SymmetricMatrix* input = &gamma;
  SymmetricMatrix repaired;
  if (variant == EstimatorVariant::ProjGlasso && res.input_spectrum.count_negative > 0) {
    auto proj = linf_psd_project_detail(gamma, proj_tol);
    repaired = std::move(proj.projected);
    res.proj_radius = proj.radius;
    input = &repaired;
  }
  SolveResult sr = solve_spectral(*input, g, cfg);
  res.theta_hat = std::move(sr.theta);
  res.report = std::move(sr.report);
  return res;
}

// ---------------------------------------------------------------------------
// Nodewise regression estimator
// ---------------------------------------------------------------------------

// Solve, for one node j,
//   min_beta  (1/2) beta' G_jj beta - <g_j, beta> + lambda ||beta||_1
//   s.t.      ||beta||_1 <= radius
// by proximal gradient with a fixed step (soft-threshold, then project onto
// the l1 ball).  G_jj is gamma without row/column j and g_j that column.
inline Eigen::VectorXd nodewise_column(const Eigen::MatrixXd& sub, const Eigen::VectorXd& col,
                                       double lambda, double radius, double step,
                                       const NodewiseConfig& cfg, NodeReport& rep) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(sub.rows());
  if (sub.rows() == 0) {  // single-node problem: nothing to regress on
    rep.converged = true;
    return beta;
  }
  Eigen::VectorXd grad(sub.rows());
  for (int it = 1; it <= cfg.max_iter; ++it) {
    grad.noalias() = sub * beta;
    grad -= col;
    Eigen::VectorXd z = beta - step * grad;
    const double thr = step * lambda;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      double mag = std::abs(z(i)) - thr;
      z(i) = mag > 0.0 ? (z(i) > 0.0 ? mag : -mag) : 0.0;
    }
    z = project_l1_ball(z, radius);
    double change = (z - beta).cwiseAbs().maxCoeff();
    beta = std::move(z);
    rep.iterations = it;
    if (change <= cfg.tol) {
      rep.converged = true;
      break;
    }
  }
  return beta;
}

// Column-by-column precision estimate.  Each node is regressed on the rest
// under an l1 penalty and an l1 ball of its own radius; the assembled matrix
// is symmetrized by keeping the smaller-magnitude entry of each conflicting
// pair.  A node whose residual-variance denominator is nonpositive cannot be
// inverted and is reported by index.
inline EstimateResult nodewise(const SymmetricMatrix& gamma, double lambda,
                               const Eigen::VectorXd& radii, const NodewiseConfig& cfg = {}) {
  const int m = gamma.dim();
  if (radii.size() != m) throw ConfigError("nodewise: radius vector length mismatch");
  if (!(lambda >= 0.0)) throw ConfigError("nodewise: need lambda >= 0");
  for (int j = 0; j < m; ++j)
    if (!(radii(j) > 0.0)) throw ConfigError("nodewise: need radius > 0 for every node");
  if (cfg.sub_norms && cfg.sub_norms->size() != m)
    throw ConfigError("nodewise: sub_norms length mismatch");

  EstimateResult res;
  res.variant = EstimatorVariant::Nodewise;
  res.input_spectrum = detail::basic_spectrum(gamma);
  res.node_reports.resize(m);

  const Eigen::MatrixXd& gm = gamma.mat();
  Eigen::MatrixXd tilde = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd sub(m - 1, m - 1);
  Eigen::VectorXd col(m - 1);

  for (int j = 0; j < m; ++j) {
    // Leave-one-out blocks.
    for (int c = 0, cc = 0; c < m; ++c) {
      if (c == j) continue;
      for (int r = 0, rr = 0; r < m; ++r) {
        if (r == j) continue;
        sub(rr, cc) = gm(r, c);
        ++rr;
      }
      col(cc) = gm(c, j);
      ++cc;
    }
    double sn = 0.0;
    if (cfg.sub_norms) {
      sn = (*cfg.sub_norms)(j);
    } else if (m > 1) {
      Eigen::MatrixXd tmp = sub;
      Eigen::VectorXd w;
      detail::dsyevd_inplace(tmp, w, 'N');
      sn = std::max(std::abs(w(0)), std::abs(w(m - 2)));
    }
    double step = 1.0 / (sn + cfg.step_guard);
    Eigen::VectorXd beta =
        nodewise_column(sub, col, lambda, radii(j), step, cfg, res.node_reports[j]);

    double denom = gm(j, j) - col.dot(beta);
    if (!(denom > 0.0))
      throw NumericalError("nodewise: degenerate node " + std::to_string(j) +
                           " (residual variance " + std::to_string(denom) + " <= 0)");
    double ahat = -1.0 / denom;
    tilde(j, j) = -ahat;  // = 1/denom > 0
    for (int r = 0, rr = 0; r < m; ++r) {
      if (r == j) continue;
      tilde(r, j) = ahat * beta(rr);
      ++rr;
    }
  }

  // Entrywise min-magnitude symmetrization.
  Eigen::MatrixXd sym = tilde;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < j; ++i) {
      double v = std::abs(tilde(i, j)) <= std::abs(tilde(j, i)) ? tilde(i, j) : tilde(j, i);
      sym(i, j) = v;
      sym(j, i) = v;
    }
  res.theta_hat = SymmetricMatrix(std::move(sym));
  return res;
}

inline EstimateResult nodewise(const SymmetricMatrix& gamma, double lambda, double radius,
                               const NodewiseConfig& cfg = {}) {
  return nodewise(gamma, lambda, Eigen::VectorXd::Constant(gamma.dim(), radius), cfg);
}

// Spectral norms of the leave-one-out submatrices, for reuse across a lambda
// grid.
inline Eigen::VectorXd nodewise_sub_norms(const SymmetricMatrix& gamma) {
  const int m = gamma.dim();
  const Eigen::MatrixXd& gm = gamma.mat();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
  if (m == 1) return out;
  Eigen::MatrixXd sub(m - 1, m - 1);
  for (int j = 0; j < m; ++j) {
    for (int c = 0, cc = 0; c < m; ++c) {
      if (c == j) continue;
      for (int r = 0, rr = 0; r < m; ++r) {
        if (r == j) continue;
        sub(rr, cc) = gm(r, c);
        ++rr;
      }
      ++cc;
    }
    Eigen::VectorXd w;
    detail::dsyevd_inplace(sub, w, 'N');
    out(j) = std::max(std::abs(w(0)), std::abs(w(m - 2)));
    // dsyevd overwrote sub; it is rebuilt at the top of the loop.
  }
  return out;
}

// Oracle l1 radii for nodewise estimation from the true precision matrix:
// radius_j = scale * || theta*_{-j,j} / theta*_{jj} ||_1.
inline Eigen::VectorXd nodewise_oracle_radii(const SymmetricMatrix& theta_star, double scale) {
  const int m = theta_star.dim();
  Eigen::VectorXd out(m);
  for (int j = 0; j < m; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i)
      if (i != j) s += std::abs(theta_star(i, j));
    out(j) = scale * s / theta_star(j, j);
  }
  return out;
}

}  // namespace precmat
