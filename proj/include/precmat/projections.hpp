#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "precmat/errors.hpp"
#include "precmat/symmetric_matrix.hpp"

namespace precmat {

// ---------------------------------------------------------------------------
// l1-ball projections (Euclidean / Frobenius nearest point)
// ---------------------------------------------------------------------------

// Project v onto { x : sum_i |x_i| <= r }.  Sort-based threshold search.
inline Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double r) {
  if (!(r >= 0.0)) throw ConfigError("project_l1_ball: need r >= 0");
  if (v.cwiseAbs().sum() <= r) return v;
  if (r == 0.0) return Eigen::VectorXd::Zero(v.size());

  std::vector<double> a(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) a[i] = std::abs(v(i));
  std::sort(a.begin(), a.end(), std::greater<double>());
  double cum = 0.0, tau = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    cum += a[k];
    double cand = (cum - r) / static_cast<double>(k + 1);
    if (cand < a[k]) tau = cand;  // still valid with k+1 active entries
  }
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double m = std::abs(v(i)) - tau;
    out(i) = m > 0.0 ? (v(i) > 0.0 ? m : -m) : 0.0;
  }
  return out;
}

// Project a symmetric S onto { X = X^T : sum_ij |X_ij| <= r } (the sum runs
// over all m^2 entries).  Reducing to the upper triangle, off-diagonal
// entries carry weight 2 in both the distance and the constraint, so the
// weights cancel and the answer is again a uniform soft-threshold; only the
// threshold equation sees the weights.
inline Eigen::MatrixXd project_l1_ball_sym(const Eigen::MatrixXd& s, double r) {
  if (!(r >= 0.0)) throw ConfigError("project_l1_ball_sym: need r >= 0");
  if (s.cwiseAbs().sum() <= r) return s;
  if (r == 0.0) return Eigen::MatrixXd::Zero(s.rows(), s.cols());

  const Eigen::Index m = s.rows();
  std::vector<std::pair<double, double>> aw;  // (|value|, weight)
  aw.reserve(static_cast<std::size_t>(m * (m + 1) / 2));
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i <= j; ++i) aw.emplace_back(std::abs(s(i, j)), i == j ? 1.0 : 2.0);
  std::sort(aw.begin(), aw.end(), [](auto& x, auto& y) { return x.first > y.first; });
  double cum = 0.0, wsum = 0.0, tau = 0.0;
  for (auto& [ai, wi] : aw) {
    cum += wi * ai;
    wsum += wi;
    double cand = (cum - r) / wsum;
    if (cand < ai) tau = cand;
  }
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i) {
      double mag = std::abs(s(i, j)) - tau;
      out(i, j) = mag > 0.0 ? (s(i, j) > 0.0 ? mag : -mag) : 0.0;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Dykstra's alternating projections onto an intersection of two convex sets
// ---------------------------------------------------------------------------

struct DykstraResult {
  Eigen::MatrixXd x;
  bool converged = false;
  int iterations = 0;
};

// Unlike plain alternating projections, the correction terms p and q make
// the limit the *nearest* point of the intersection, not just any point.
template <class ProjA, class ProjB>
DykstraResult dykstra(const Eigen::MatrixXd& x0, ProjA&& proj_a, ProjB&& proj_b, double tol,
                      int max_iter) {
  DykstraResult res;
  Eigen::MatrixXd x = x0;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(x0.rows(), x0.cols());
  Eigen::MatrixXd q = p;
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::MatrixXd y = proj_a(x + p);
    p = x + p - y;
    Eigen::MatrixXd xn = proj_b(y + q);
    q = y + q - xn;
    double change = (xn - x).norm();
    x = xn;
    res.iterations = it;
    if (change <= tol * std::max(1.0, x.norm())) {
      res.converged = true;
      break;
    }
  }
  res.x = std::move(x);
  return res;
}

namespace detail {

inline Eigen::MatrixXd psd_project_dense(const Eigen::MatrixXd& s) {
  EigenDecomposition d = eigendecompose(SymmetricMatrix(s));
  return d.map_values([](double v) { return v > 0.0 ? v : 0.0; });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Smallest elementwise-box PSD repair
// ---------------------------------------------------------------------------

struct LinfPsdResult {
  SymmetricMatrix projected;
  double radius = 0.0;  // certified max-norm distance ||projected - input||_inf
  int probes = 0;       // feasibility probes spent in the bisection
};

namespace detail {

// Is { X >= 0 } ∩ { |X - gamma|_inf <= t } nonempty?  Run Dykstra between
// the box and the PSD cone; the iterate is exactly PSD after each cycle, so
// the box violation alone certifies feasibility.  A stalled violation is the
// practical signature of an empty intersection.
struct FeasProbe {
  bool feasible = false;
  Eigen::MatrixXd witness;
};

inline FeasProbe box_psd_feasible(const Eigen::MatrixXd& gamma, double t,
                                  const Eigen::MatrixXd& start, double slack, int max_iter) {
  FeasProbe out;
  Eigen::MatrixXd lo = gamma.array() - t;
  Eigen::MatrixXd hi = gamma.array() + t;
  auto clamp_box = [&](const Eigen::MatrixXd& z) {
    return z.cwiseMax(lo).cwiseMin(hi).eval();
  };
  Eigen::MatrixXd x = detail::psd_project_dense(clamp_box(start));
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  Eigen::MatrixXd q = p;
  double prev_window_viol = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::MatrixXd y = clamp_box(x + p);
    p = x + p - y;
    x = detail::psd_project_dense(y + q);
    q = y + q - x;
    double viol = (x - clamp_box(x)).cwiseAbs().maxCoeff();
    if (viol <= slack) {
      out.feasible = true;
      out.witness = std::move(x);
      return out;
    }
    if (it % 75 == 0) {
      if (it >= 150 && viol > 0.998 * prev_window_viol) break;  // stalled: treat as empty
      prev_window_viol = viol;
    }
  }
  out.witness = std::move(x);
  return out;
}

}  // namespace detail

// Given a symmetric (possibly indefinite) gamma, find the PSD matrix inside
// the smallest elementwise box |X - gamma|_inf <= t that is nonempty, up to
// `tol` on the box radius t.  Bisection over t with Dykstra feasibility
// probes; probes are warm-started from the last feasible witness.
inline LinfPsdResult linf_psd_project_detail(const SymmetricMatrix& gamma, double tol = 1e-4,
                                             int probe_max_iter = 3000) {
  if (!(tol > 0.0)) throw ConfigError("linf_psd_project: need tol > 0");
  LinfPsdResult res;
  Eigen::VectorXd ev = eigenvalues(gamma);
  double sigma_min = ev(ev.size() - 1);
  if (sigma_min >= -default_tolerances().psd) {
    res.projected = gamma;
    res.radius = 0.0;
    return res;
  }

  const Eigen::MatrixXd& g = gamma.mat();
  const double slack = 1e-8 * std::max(1.0, g.cwiseAbs().maxCoeff());
  // gamma + |sigma_min| I is PSD and sits on the boundary of the t = |sigma_min|
  // box, so the bracket top is feasible by construction.
  double t_lo = 0.0, t_hi = -sigma_min;
  Eigen::MatrixXd witness =
      g + Eigen::MatrixXd::Identity(g.rows(), g.cols()) * (-sigma_min);
  Eigen::MatrixXd warm = witness;
  while (t_hi - t_lo > tol) {
    double t = 0.5 * (t_lo + t_hi);
    auto probe = detail::box_psd_feasible(g, t, warm, slack, probe_max_iter);
    ++res.probes;
    if (probe.feasible) {
      t_hi = t;
      witness = probe.witness;
      warm = std::move(probe.witness);
    } else {
      t_lo = t;
      warm = std::move(probe.witness);  // still a decent starting shape
    }
  }
  // The bisection witness certifies feasibility but inherits the shape of the
  // bracket-top start (gamma + |sigma_min| I), inflating entries that never
  // needed to move.  A final pass anchored at gamma itself converges to the
  // Frobenius projection of gamma onto the certified box intersected with the
  // cone; keep it whenever it certifies inside the box.
  {
    Eigen::MatrixXd lo = g.array() - t_hi;
    Eigen::MatrixXd hi = g.array() + t_hi;
    auto clamp_box = [&](const Eigen::MatrixXd& z) {
      return z.cwiseMax(lo).cwiseMin(hi).eval();
    };
    auto anchored = dykstra(g, clamp_box, detail::psd_project_dense, 1e-10, probe_max_iter);
    if ((anchored.x - clamp_box(anchored.x)).cwiseAbs().maxCoeff() <= slack)
      witness = std::move(anchored.x);
  }
  res.projected = SymmetricMatrix(witness);
  res.radius = t_hi;
  return res;
}

inline SymmetricMatrix linf_psd_project(const SymmetricMatrix& gamma, double tol = 1e-4) {
  return linf_psd_project_detail(gamma, tol).projected;
}

}  // namespace precmat
