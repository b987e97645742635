#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "precmat/errors.hpp"
#include "precmat/logdet_prox.hpp"
#include "precmat/penalty.hpp"
#include "precmat/projections.hpp"
#include "precmat/rng.hpp"
#include "precmat/symmetric_matrix.hpp"

namespace precmat {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Side constraint X = { Theta >= 0, h(Theta) <= radius } with h either the
// spectral norm or the elementwise l1 norm.
struct SideConstraint {
  enum class Kind { SpectralNorm, ElementwiseL1 };
  Kind kind = Kind::SpectralNorm;
  double radius = 1.0;

  void validate() const {
    if (!(radius > 0.0)) throw ConfigError("side constraint: need radius > 0");
  }
};

struct AdmmConfig {
  double rho = 12.0;
  double radius = 10.0;  // spectral cap for solve_spectral; +inf disables it
  int max_iter = 5000;
  double tol = 5e-5;  // on relative Frobenius change of Theta

  // Solver initialization is deterministic and seed-free: Theta = V = c*I with
  // c = 1 when radius >= 1 and radius/2 otherwise, multipliers zero.  An
  // explicit starting point (symmetric, positive definite) overrides that.
  std::optional<Eigen::MatrixXd> init;

  // Inner Dykstra budget for the l1-constrained projection step.
  int dykstra_max_iter = 5000;
  double dykstra_tol = 1e-8;

  // Called with (iteration, Theta) after every Theta update; for diagnostics.
  std::function<void(int, const Eigen::MatrixXd&)> iterate_observer;

  void validate() const {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("admm: need rho > 0");
    if (!(radius > 0.0)) throw ConfigError("admm: need radius > 0");
    if (max_iter < 1) throw ConfigError("admm: need max_iter >= 1");
    if (!(tol > 0.0)) throw ConfigError("admm: need tol > 0");
  }
};

struct SolveReport {
  bool converged = false;
  bool diverged = false;
  int iterations = 0;
  double final_relative_change = std::numeric_limits<double>::infinity();
  double final_primal_residual = std::numeric_limits<double>::infinity();
  std::vector<double> primal_residuals;  // ||Theta^k - V^k||_F per iteration
  std::vector<double> objective_trace;
  std::vector<std::string> warnings;
};

struct SolveResult {
  SymmetricMatrix theta;
  SolveReport report;
};

// Objective  tr(gamma * Theta) - log det Theta + g(Theta), extended with +inf
// outside { Theta > 0, ||Theta||_2 <= radius }.  gamma may be indefinite.
inline double objective(const SymmetricMatrix& gamma, const SymmetricMatrix& theta,
                        const Penalty& g, double radius = kInf) {
  if (gamma.dim() != theta.dim()) throw InputError("objective: dimension mismatch");
  Eigen::VectorXd ev = eigenvalues(theta);
  double dmin = ev(ev.size() - 1), dmax = ev(0);
  if (!(dmin > 0.0)) return kInf;
  if (dmax > radius * (1.0 + 1e-9)) return kInf;
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) logdet += std::log(ev(i));
  double tr = gamma.mat().cwiseProduct(theta.mat()).sum();
  return tr - logdet + g.value_matrix(theta);
}

namespace detail {

inline Eigen::MatrixXd admm_init(int m, double radius, const std::optional<Eigen::MatrixXd>& init) {
  if (init) {
    if (init->rows() != m || init->cols() != m)
      throw ConfigError("admm: init matrix has wrong dimensions");
    return 0.5 * (*init + init->transpose());
  }
  double c = radius >= 1.0 ? 1.0 : 0.5 * radius;
  return Eigen::MatrixXd::Identity(m, m) * c;
}

inline void warn_nonconvex_radius(const Penalty& g, double radius, SolveReport& report) {
  double mu = g.mu();
  if (mu > 0.0 && radius > std::sqrt(2.0 / mu)) {
    report.warnings.push_back(
        "radius " + std::to_string(radius) + " exceeds sqrt(2/mu) = " +
        std::to_string(std::sqrt(2.0 / mu)) +
        "; the constrained objective may be nonconvex and only a stationary point is guaranteed");
  }
}

}  // namespace detail

// Projection onto the side-constraint set { X >= 0, h(X) <= radius }.
// Spectral norm: exact, clip eigenvalues into [0, radius].  Elementwise l1:
// Dykstra between the l1 ball and the PSD cone; the returned point is exactly
// PSD and rescaled (if needed) to sit inside the l1 ball.
inline SymmetricMatrix project_constraint_set(const SymmetricMatrix& s,
                                              const SideConstraint& c, double tol = 1e-8,
                                              int max_iter = 5000) {
  c.validate();
  if (c.kind == SideConstraint::Kind::SpectralNorm) {
    Eigen::VectorXd ev = eigenvalues(s);
    if (ev(ev.size() - 1) >= 0.0 && ev(0) <= c.radius) return s;
    EigenDecomposition d = eigendecompose(s);
    double r = c.radius;
    return SymmetricMatrix(
        d.map_values([r](double v) { return std::min(std::max(v, 0.0), r); }));
  }
  // Elementwise l1 with a PSD requirement.
  if (s.mat().cwiseAbs().sum() <= c.radius &&
      eigenvalues(s)(s.dim() - 1) >= -default_tolerances().psd)
    return psd_project_frobenius(s);
  double r = c.radius;
  auto res = dykstra(
      s.mat(), [r](const Eigen::MatrixXd& x) { return project_l1_ball_sym(x, r); },
      [](const Eigen::MatrixXd& x) { return detail::psd_project_dense(x); }, tol, max_iter);
  if (!res.converged)
    throw NumericalError("constraint projection: Dykstra did not converge within " +
                         std::to_string(max_iter) + " iterations");
  double l1 = res.x.cwiseAbs().sum();
  if (l1 > c.radius) res.x *= c.radius / l1;  // nudge the PSD-exact point inside the ball
  return SymmetricMatrix(std::move(res.x));
}

// ADMM for  min tr(gamma*Theta) - log det Theta + g(Theta)
//           s.t. Theta > 0, ||Theta||_2 <= radius.
//
// Splitting: V carries the penalty, Theta carries log-det plus the spectral
// box, one multiplier ties them.  The Theta update is a single
// eigendecomposition per iteration; its eigenvalues also hand us log det and
// the feasibility check for free.
namespace detail {

// The eigen-basis reconstruction of the log-det block smears the penalty
// block's exact zeros with splitting residue, which downstream support
// readings would count as edges.  Restore those zeros when doing so keeps
// the estimate inside {Theta > 0, ||Theta||_2 <= cap}; otherwise keep the
// unmerged block and say so.
inline void restore_prox_zeros(Eigen::MatrixXd& theta, const Eigen::MatrixXd& v, double cap,
                               SolveReport& report) {
  Eigen::MatrixXd merged = theta;
  int zeroed = 0;
  for (Eigen::Index j = 0; j < theta.cols(); ++j)
    for (Eigen::Index i = 0; i < theta.rows(); ++i)
      if (v(i, j) == 0.0 && merged(i, j) != 0.0) {
        merged(i, j) = 0.0;
        ++zeroed;
      }
  if (zeroed == 0) return;
  Eigen::MatrixXd u = merged;
  Eigen::VectorXd w;
  dsyevd_inplace(u, w, 'N');
  if (w(0) > 0.0 && w(w.size() - 1) <= cap * (1.0 + 1e-9)) {
    theta = std::move(merged);
  } else {
    report.warnings.push_back(
        "admm: prox-block zeros not restored (merge would leave the feasible set)");
  }
}

}  // namespace detail

inline SolveResult solve_spectral(const SymmetricMatrix& gamma, const Penalty& g,
                                  const AdmmConfig& cfg) {
  cfg.validate();
  g.validate_prox_scale(1.0 / cfg.rho);
  const int m = gamma.dim();
  const double rho = cfg.rho, radius = cfg.radius;

  SolveResult out;
  detail::warn_nonconvex_radius(g, radius, out.report);

  Eigen::MatrixXd theta = detail::admm_init(m, radius, cfg.init);
  Eigen::MatrixXd v = theta;
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(m, m);
  const Eigen::MatrixXd& gm = gamma.mat();

  for (int it = 1; it <= cfg.max_iter; ++it) {
    v = g.prox_matrix(SymmetricMatrix(theta + lambda / rho), 1.0 / rho).mat();

    Eigen::MatrixXd a = v - (gm + lambda) / rho;
    Eigen::MatrixXd u = 0.5 * (a + a.transpose());
    Eigen::VectorXd w;
    detail::dsyevd_inplace(u, w, 'V');
    double logdet = 0.0;
    for (int i = 0; i < m; ++i) {
      w(i) = t_rho_scalar(w(i), rho, radius);
      logdet += std::log(w(i));
    }
    if (!(w(0) > 0.0) || !(w(m - 1) <= radius * (1.0 + 1e-12)))
      throw NumericalError("admm: Theta update left the feasible set");
    Eigen::MatrixXd theta_new = (u * w.asDiagonal()) * u.transpose();
    theta_new = 0.5 * (theta_new + theta_new.transpose()).eval();
    if (!theta_new.allFinite())
      throw NumericalError("admm: NaN/Inf in iterate at iteration " + std::to_string(it));

    lambda += rho * (theta_new - v);

    double primal = (theta_new - v).norm();
    double rel = (theta_new - theta).norm() / std::max(theta.norm(), 1e-12);
    double obj = gm.cwiseProduct(theta_new).sum() - logdet +
                 g.value_matrix(SymmetricMatrix(theta_new));
    out.report.primal_residuals.push_back(primal);
    out.report.objective_trace.push_back(obj);
    out.report.iterations = it;
    out.report.final_relative_change = rel;
    out.report.final_primal_residual = primal;
    theta = std::move(theta_new);
    if (cfg.iterate_observer) cfg.iterate_observer(it, theta);

    if (rel < cfg.tol && primal < 10.0 * cfg.tol * std::max(theta.norm(), 1e-12)) {
      out.report.converged = true;
      break;
    }
  }
  if (!out.report.converged)
    out.report.warnings.push_back("admm: no convergence within " +
                                  std::to_string(cfg.max_iter) + " iterations");
  detail::restore_prox_zeros(theta, v, radius, out.report);
  out.theta = SymmetricMatrix(theta);
  return out;
}

// ADMM for a general side constraint h(Theta) <= radius (plus PSD).  Two
// auxiliary blocks: V1 carries the penalty prox, V2 the constraint
// projection; Theta absorbs log-det through the uncapped spectral map.  The
// objective trace omits the constraint indicator since mid-run Theta iterates
// need not be feasible for it.
inline SolveResult solve_general(const SymmetricMatrix& gamma, const Penalty& g,
                                 const SideConstraint& constraint, const AdmmConfig& cfg) {
  cfg.validate();
  constraint.validate();
  g.validate_prox_scale(1.0 / cfg.rho);
  const int m = gamma.dim();
  const double rho = cfg.rho;

  SolveResult out;
  if (constraint.kind == SideConstraint::Kind::SpectralNorm)
    detail::warn_nonconvex_radius(g, constraint.radius, out.report);

  Eigen::MatrixXd theta = detail::admm_init(m, constraint.radius, cfg.init);
  Eigen::MatrixXd l1m = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd l2m = l1m;
  Eigen::MatrixXd v1 = theta;
  const Eigen::MatrixXd& gm = gamma.mat();

  for (int it = 1; it <= cfg.max_iter; ++it) {
    v1 = g.prox_matrix(SymmetricMatrix(theta + l1m / rho), 1.0 / rho).mat();
    Eigen::MatrixXd v2 = project_constraint_set(SymmetricMatrix(theta + l2m / rho), constraint,
                                                cfg.dykstra_tol, cfg.dykstra_max_iter)
                             .mat();

    Eigen::MatrixXd a = (rho * v1 + rho * v2 - gm - l1m - l2m) / (2.0 * rho);
    Eigen::MatrixXd u = 0.5 * (a + a.transpose());
    Eigen::VectorXd w;
    detail::dsyevd_inplace(u, w, 'V');
    double logdet = 0.0;
    for (int i = 0; i < m; ++i) {
      w(i) = t_rho_unconstrained_scalar(w(i), rho);
      logdet += std::log(w(i));
    }
    Eigen::MatrixXd theta_new = (u * w.asDiagonal()) * u.transpose();
    theta_new = 0.5 * (theta_new + theta_new.transpose()).eval();
    if (!theta_new.allFinite())
      throw NumericalError("admm: NaN/Inf in iterate at iteration " + std::to_string(it));

    l1m += rho * (theta_new - v1);
    l2m += rho * (theta_new - v2);

    double primal = std::sqrt((theta_new - v1).squaredNorm() + (theta_new - v2).squaredNorm());
    double rel = (theta_new - theta).norm() / std::max(theta.norm(), 1e-12);
    double obj = gm.cwiseProduct(theta_new).sum() - logdet +
                 g.value_matrix(SymmetricMatrix(theta_new));
    out.report.primal_residuals.push_back(primal);
    out.report.objective_trace.push_back(obj);
    out.report.iterations = it;
    out.report.final_relative_change = rel;
    out.report.final_primal_residual = primal;
    theta = std::move(theta_new);
    if (cfg.iterate_observer) cfg.iterate_observer(it, theta);

    if (rel < cfg.tol && primal < 10.0 * cfg.tol * std::max(theta.norm(), 1e-12)) {
      out.report.converged = true;
      break;
    }
  }
  if (!out.report.converged)
    out.report.warnings.push_back("admm: no convergence within " +
                                  std::to_string(cfg.max_iter) + " iterations");
  // This Theta block is uncapped (the side constraint lives in its own
  // block), so the merge only needs to preserve positive definiteness.
  detail::restore_prox_zeros(theta, v1, std::numeric_limits<double>::infinity(),
                             out.report);
  out.theta = SymmetricMatrix(theta);
  return out;
}

// Objective values along the diverging family Theta(t) = I + t v v^T, where v
// is a unit eigenvector of gamma's most negative eigenvalue.  When that
// eigenvalue is nonpositive and the penalty does not grow (bounded, or
// lambda = 0), these values head to -inf: the witness that the problem
// without a side constraint has no minimizer.  Requires a nonpositive
// smallest eigenvalue.
inline std::vector<double> unbounded_ray_trace(const SymmetricMatrix& gamma, const Penalty& g,
                                               const std::vector<double>& t_grid) {
  EigenDecomposition d = eigendecompose(gamma);
  const int m = gamma.dim();
  double sigma_min = d.values(m - 1);
  if (sigma_min > default_tolerances().psd)
    throw ConfigError("unbounded_ray_trace: smallest eigenvalue " + std::to_string(sigma_min) +
                      " is positive; the objective is bounded below along eigen-directions");
  Eigen::VectorXd v = d.vectors.col(m - 1);
  std::vector<double> values;
  values.reserve(t_grid.size());
  for (double t : t_grid) {
    if (!(t >= 0.0)) throw ConfigError("unbounded_ray_trace: grid values must be >= 0");
    Eigen::MatrixXd theta = Eigen::MatrixXd::Identity(m, m) + t * (v * v.transpose());
    values.push_back(objective(gamma, SymmetricMatrix(std::move(theta)), g, kInf));
  }
  return values;
}

// First-order baseline: projected proximal gradient on the same objective.
//   W      = Theta - step * (gamma - Theta^{-1})
//   Theta' = clip_[floor,radius]( prox_{step*g}(W) )   (eigenvalue clip)
// One eigendecomposition per iteration, reused for the projection, the next
// inverse and the log-det.  Large steps can make this oscillate or blow up on
// indefinite inputs; that sets `diverged` instead of throwing.
inline SolveResult projected_prox_gradient(const SymmetricMatrix& gamma, const Penalty& g,
                                           double step, double radius, int max_iter = 10000,
                                           double tol = 1e-7) {
  if (!(step > 0.0)) throw ConfigError("projected_prox_gradient: need step > 0");
  if (!(radius > 0.0)) throw ConfigError("projected_prox_gradient: need radius > 0");
  g.validate_prox_scale(step);
  const int m = gamma.dim();
  const double pd_floor = 1e-12;

  SolveResult out;
  Eigen::MatrixXd theta = detail::admm_init(m, radius, std::nullopt);
  // Eigen pair of the current iterate (identity to start).
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd w = theta.diagonal();
  const Eigen::MatrixXd& gm = gamma.mat();
  double obj0 = kInf;

  for (int it = 1; it <= max_iter; ++it) {
    Eigen::MatrixXd inv = (u * w.cwiseInverse().asDiagonal()) * u.transpose();
    Eigen::MatrixXd grad = gm - inv;
    Eigen::MatrixXd prox_in = theta - step * grad;
    Eigen::MatrixXd z = g.prox_matrix(SymmetricMatrix(std::move(prox_in)), step).mat();
    Eigen::VectorXd wz;
    detail::dsyevd_inplace(z, wz, 'V');  // z now holds eigenvectors
    double logdet = 0.0;
    for (int i = 0; i < m; ++i) {
      wz(i) = std::min(std::max(wz(i), pd_floor), radius);
      logdet += std::log(wz(i));
    }
    Eigen::MatrixXd theta_new = (z * wz.asDiagonal()) * z.transpose();
    theta_new = 0.5 * (theta_new + theta_new.transpose()).eval();

    double obj = gm.cwiseProduct(theta_new).sum() - logdet +
                 g.value_matrix(SymmetricMatrix(theta_new));
    double rel = (theta_new - theta).norm() / std::max(theta.norm(), 1e-12);
    if (!theta_new.allFinite() || !std::isfinite(obj) ||
        (std::isfinite(obj0) && obj > obj0 + 1e8) || wz(0) <= 2.0 * pd_floor) {
      out.report.diverged = true;
      out.report.warnings.push_back("projected_prox_gradient: divergence detected at iteration " +
                                    std::to_string(it) + "; try a smaller step");
      out.report.iterations = it;
      break;
    }
    if (it == 1) obj0 = obj;
    out.report.objective_trace.push_back(obj);
    out.report.iterations = it;
    out.report.final_relative_change = rel;
    theta = std::move(theta_new);
    u = std::move(z);
    w = std::move(wz);
    if (rel < tol) {
      out.report.converged = true;
      break;
    }
  }
  if (!out.report.converged && !out.report.diverged)
    out.report.warnings.push_back("projected_prox_gradient: no convergence within " +
                                  std::to_string(max_iter) + " iterations");
  out.theta = SymmetricMatrix(theta);
  return out;
}

// ---------------------------------------------------------------------------
// Stationarity certificate
// ---------------------------------------------------------------------------

// Largest first-order descent rate of the constrained objective at theta over
// sampled feasible directions (all +/- coordinate directions plus n_random
// random symmetric ones, unit Frobenius norm).  Zero for a stationary point;
// for convex instances a small gap certifies near-optimality.
//
// Directions that leave the constraint set to first order are skipped: when
// eigenvalues of theta sit on the spectral cap, a feasible direction must not
// increase them (checked on the active eigenspace).
inline double stationarity_gap(const SymmetricMatrix& gamma, const SymmetricMatrix& theta,
                               const Penalty& g, double radius, int n_random = 100,
                               std::uint64_t seed = 12345) {
  if (gamma.dim() != theta.dim()) throw InputError("stationarity_gap: dimension mismatch");
  const int m = theta.dim();
  EigenDecomposition d = eigendecompose(theta);
  if (!(d.values(m - 1) > 0.0))
    throw ConfigError("stationarity_gap: theta must be positive definite");

  // Gradient of the smooth part.
  Eigen::MatrixXd grad =
      gamma.mat() - d.map_values([](double v) { return 1.0 / v; });

  // Active spectral-cap eigenspace.
  const double act_tol = 1e-7 * std::max(1.0, radius);
  int n_active = 0;
  while (n_active < m && d.values(n_active) >= radius - act_tol) ++n_active;
  Eigen::MatrixXd ua = d.vectors.leftCols(n_active);

  const Eigen::MatrixXd& th = theta.mat();
  const bool pen_diag = g.penalize_diagonal();
  // Entries that are zero up to round-off must use the kink subderivative:
  // Theta is typically reconstructed through an eigenbasis, which contaminates
  // prox-exact zeros at the 1e-17 level, and treating those as signed nonzeros
  // would report a spurious descent direction.
  const double zero_tol = 1e-12 * std::max(1.0, th.cwiseAbs().maxCoeff());

  auto feasible = [&](const Eigen::MatrixXd& delta) {
    if (n_active == 0) return true;
    Eigen::MatrixXd proj = ua.transpose() * delta * ua;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (proj + proj.transpose()),
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff() <= 1e-10;
  };

  auto descent_rate = [&](const Eigen::MatrixXd& delta) {
    double lin = grad.cwiseProduct(delta).sum();
    double pen = 0.0;
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        if (i == j && !pen_diag) continue;
        if (delta(i, j) == 0.0) continue;
        double w = std::abs(th(i, j)) <= zero_tol ? 0.0 : th(i, j);
        pen += g.directional_derivative(w, delta(i, j));
      }
    return -(lin + pen);
  };

  double gap = 0.0;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i <= j; ++i)
      for (int sgn : {+1, -1}) {
        double v = i == j ? 1.0 : inv_sqrt2;
        delta(i, j) = sgn * v;
        delta(j, i) = sgn * v;
        if (feasible(delta)) gap = std::max(gap, descent_rate(delta));
        delta(i, j) = 0.0;
        delta(j, i) = 0.0;
      }

  Rng rng(seed);
  for (int k = 0; k < n_random; ++k) {
    Eigen::MatrixXd r(m, m);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) r(i, j) = rng.normal();
    r = 0.5 * (r + r.transpose()).eval();
    r /= std::max(r.norm(), 1e-300);
    if (feasible(r)) gap = std::max(gap, descent_rate(r));
    r = -r;
    if (feasible(r)) gap = std::max(gap, descent_rate(r));
  }
  return gap;
}

}  // namespace precmat
