#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "precmat/errors.hpp"
#include "precmat/symmetric_matrix.hpp"

namespace precmat {

enum class PenaltyKind { L1, SCAD, MCP };

inline const char* to_string(PenaltyKind k) {
  switch (k) {
    case PenaltyKind::L1: return "l1";
    case PenaltyKind::SCAD: return "scad";
    case PenaltyKind::MCP: return "mcp";
  }
  return "?";
}

// Elementwise sparsity penalty g_lambda: l1, SCAD or MCP.  All three are
// symmetric, zero at zero, and weakly convex: g(w) + (mu/2) w^2 is convex
// with mu = 0 (l1), 1/(a-1) (SCAD), 1/a (MCP).
//
// Matrix versions apply the scalar map to every entry; the diagonal can be
// exempted (penalize_diagonal = false).
class Penalty {
 public:
  static Penalty l1(double lambda, bool penalize_diagonal = true) {
    return Penalty(PenaltyKind::L1, lambda, 0.0, penalize_diagonal);
  }
  static Penalty scad(double lambda, double a = 3.7, bool penalize_diagonal = true) {
    if (!(a > 2.0)) throw ConfigError("scad: need a > 2, got a=" + std::to_string(a));
    return Penalty(PenaltyKind::SCAD, lambda, a, penalize_diagonal);
  }
  static Penalty mcp(double lambda, double a, bool penalize_diagonal = true) {
    if (!(a > 0.0)) throw ConfigError("mcp: need a > 0, got a=" + std::to_string(a));
    return Penalty(PenaltyKind::MCP, lambda, a, penalize_diagonal);
  }

  PenaltyKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  double a() const { return a_; }
  bool penalize_diagonal() const { return penalize_diagonal_; }

  // Weak-convexity modulus.
  double mu() const {
    switch (kind_) {
      case PenaltyKind::L1: return 0.0;
      case PenaltyKind::SCAD: return 1.0 / (a_ - 1.0);
      case PenaltyKind::MCP: return 1.0 / a_;
    }
    return 0.0;
  }

  bool bounded_above() const { return kind_ != PenaltyKind::L1; }

  double value(double w) const {
    const double x = std::abs(w);
    switch (kind_) {
      case PenaltyKind::L1:
        return lambda_ * x;
      case PenaltyKind::SCAD:
        if (x <= lambda_) return lambda_ * x;
        if (x <= a_ * lambda_)
          return -(x * x - 2.0 * a_ * lambda_ * x + lambda_ * lambda_) / (2.0 * (a_ - 1.0));
        return (a_ + 1.0) * lambda_ * lambda_ / 2.0;
      case PenaltyKind::MCP:
        if (x <= a_ * lambda_) return lambda_ * x - x * x / (2.0 * a_);
        return a_ * lambda_ * lambda_ / 2.0;
    }
    return 0.0;
  }

  // dg/dw away from the kink at zero.
  double derivative(double w) const {
    if (w == 0.0)
      throw ConfigError("penalty derivative is undefined at w = 0 (use a directional form)");
    const double s = w > 0.0 ? 1.0 : -1.0;
    const double x = std::abs(w);
    switch (kind_) {
      case PenaltyKind::L1:
        return s * lambda_;
      case PenaltyKind::SCAD:
        if (x <= lambda_) return s * lambda_;
        if (x <= a_ * lambda_) return s * (a_ * lambda_ - x) / (a_ - 1.0);
        return 0.0;
      case PenaltyKind::MCP:
        return s * std::max(0.0, lambda_ - x / a_);
    }
    return 0.0;
  }

  // One-sided directional derivative of w -> g(w) in direction d; at w = 0
  // this is lambda * |d| for every kind.
  double directional_derivative(double w, double d) const {
    if (w == 0.0) return lambda_ * std::abs(d);
    return derivative(w) * d;
  }

  // argmin_x  nu * g(x) + (x - w)^2 / 2.
  //
  // Validity window keeps that objective strictly convex in x:
  //   SCAD needs nu < a - 1, MCP needs nu < a.
  // All candidate stationary points (plus 0) are evaluated against the
  // objective and the best one wins; exact ties go to the smaller |x|, so
  // kinks resolve toward zero.
  double prox(double w, double nu) const {
    validate_prox_scale(nu);
    if (lambda_ == 0.0) return w;
    const double s = w >= 0.0 ? 1.0 : -1.0;
    const double x = std::abs(w);
    double cand[4];
    int ncand = 0;
    cand[ncand++] = 0.0;
    const double soft = std::max(0.0, x - nu * lambda_);
    cand[ncand++] = soft;
    switch (kind_) {
      case PenaltyKind::L1:
        break;
      case PenaltyKind::SCAD: {
        double mid = (x - nu * a_ * lambda_ / (a_ - 1.0)) / (1.0 - nu / (a_ - 1.0));
        if (mid > 0.0) cand[ncand++] = mid;
        cand[ncand++] = x;
        break;
      }
      case PenaltyKind::MCP: {
        double mid = (x - nu * lambda_) / (1.0 - nu / a_);
        if (mid > 0.0) cand[ncand++] = mid;
        cand[ncand++] = x;
        break;
      }
    }
    double best = 0.0;
    double best_obj = std::numeric_limits<double>::infinity();
    for (int i = 0; i < ncand; ++i) {
      const double c = cand[i];
      const double obj = nu * value(c) + 0.5 * (c - x) * (c - x);
      if (obj < best_obj || (obj == best_obj && c < best)) {
        best_obj = obj;
        best = c;
      }
    }
    return s * best;
  }

  // Sum of the scalar penalty over all m^2 entries (diagonal skipped when
  // penalize_diagonal is off).
  double value_matrix(const SymmetricMatrix& theta) const {
    const Eigen::MatrixXd& t = theta.mat();
    double total = 0.0;
    for (Eigen::Index j = 0; j < t.cols(); ++j)
      for (Eigen::Index i = 0; i < t.rows(); ++i) {
        if (i == j && !penalize_diagonal_) continue;
        total += value(t(i, j));
      }
    return total;
  }

  SymmetricMatrix prox_matrix(const SymmetricMatrix& w, double nu) const {
    validate_prox_scale(nu);
    Eigen::MatrixXd out = w.mat();
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      for (Eigen::Index i = 0; i < out.rows(); ++i) {
        if (i == j && !penalize_diagonal_) continue;
        out(i, j) = prox(out(i, j), nu);
      }
    return SymmetricMatrix(std::move(out));
  }

  void validate_prox_scale(double nu) const {
    if (!(nu > 0.0)) throw ConfigError("prox: need nu > 0, got nu=" + std::to_string(nu));
    if (kind_ == PenaltyKind::SCAD && nu >= a_ - 1.0)
      throw ConfigError("scad prox: need nu < a - 1 (nu=" + std::to_string(nu) +
                        ", a=" + std::to_string(a_) + ")");
    if (kind_ == PenaltyKind::MCP && nu >= a_)
      throw ConfigError("mcp prox: need nu < a (nu=" + std::to_string(nu) +
                        ", a=" + std::to_string(a_) + ")");
  }

 private:
  Penalty(PenaltyKind kind, double lambda, double a, bool penalize_diagonal)
      : kind_(kind), lambda_(lambda), a_(a), penalize_diagonal_(penalize_diagonal) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      throw ConfigError("penalty: need lambda >= 0, got " + std::to_string(lambda));
  }

  PenaltyKind kind_;
  double lambda_;
  double a_;
  bool penalize_diagonal_;
};

}  // namespace precmat
