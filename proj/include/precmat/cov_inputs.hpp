#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "precmat/errors.hpp"
#include "precmat/projections.hpp"
#include "precmat/symmetric_matrix.hpp"

namespace precmat {

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Per-column observation frequencies.  Columns that were never observed get
// the floor 1/n and a warning; downstream surrogates would otherwise divide
// by zero.
inline Eigen::VectorXd estimate_zeta(const BoolArray& observed,
                                     std::vector<std::string>* warnings = nullptr) {
  const auto n = observed.rows();
  if (n == 0) throw InputError("estimate_zeta: empty mask");
  Eigen::VectorXd z(observed.cols());
  for (Eigen::Index j = 0; j < observed.cols(); ++j) {
    double cnt = observed.col(j).cast<double>().sum();
    if (cnt == 0.0) {
      z(j) = 1.0 / static_cast<double>(n);
      if (warnings)
        warnings->push_back("column " + std::to_string(j) +
                            " has no observed entries; zeta clamped to 1/n");
    } else {
      z(j) = cnt / static_cast<double>(n);
    }
  }
  return z;
}

// n x m data with independently missing cells.  Unobserved cells are stored
// as zero; zeta holds the per-column observation probabilities (given or
// estimated from the mask).
struct MaskedData {
  Eigen::MatrixXd x;
  BoolArray observed;
  Eigen::VectorXd zeta;
  bool zeta_estimated = false;
  std::vector<std::string> warnings;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index m() const { return x.cols(); }

  static MaskedData with_known_zeta(Eigen::MatrixXd x, BoolArray observed, Eigen::VectorXd zeta) {
    MaskedData d;
    d.x = std::move(x);
    d.observed = std::move(observed);
    d.zeta = std::move(zeta);
    d.zeta_estimated = false;
    d.validate();
    return d;
  }

  static MaskedData with_estimated_zeta(Eigen::MatrixXd x, BoolArray observed) {
    MaskedData d;
    d.x = std::move(x);
    d.observed = std::move(observed);
    d.zeta = estimate_zeta(d.observed, &d.warnings);
    d.zeta_estimated = true;
    d.validate();
    return d;
  }

  // Fully observed data, zeta identically one.
  static MaskedData complete(Eigen::MatrixXd x) {
    MaskedData d;
    d.observed = BoolArray::Constant(x.rows(), x.cols(), true);
    d.x = std::move(x);
    d.zeta = Eigen::VectorXd::Ones(d.x.cols());
    d.validate();
    return d;
  }

  void validate() {
    if (x.rows() == 0 || x.cols() == 0) throw InputError("MaskedData: empty data matrix");
    if (observed.rows() != x.rows() || observed.cols() != x.cols())
      throw InputError("MaskedData: mask shape does not match data");
    if (zeta.size() != x.cols()) throw InputError("MaskedData: zeta length does not match columns");
    for (Eigen::Index j = 0; j < zeta.size(); ++j)
      if (!(zeta(j) > 0.0 && zeta(j) <= 1.0))
        throw InputError("MaskedData: zeta for column " + std::to_string(j) +
                         " must lie in (0,1], got " + std::to_string(zeta(j)));
    if (!x.allFinite()) throw InputError("MaskedData: data contains NaN/Inf");
    // Zero-fill unobserved cells rather than trusting the caller.
    x = (observed.cast<double>() * x.array()).matrix();
  }

  // Rows restricted to an index subset (cross-validation folds).
  MaskedData rows(const std::vector<int>& idx) const {
    MaskedData d;
    d.x.resize(static_cast<Eigen::Index>(idx.size()), x.cols());
    d.observed.resize(static_cast<Eigen::Index>(idx.size()), x.cols());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      d.x.row(static_cast<Eigen::Index>(k)) = x.row(idx[k]);
      d.observed.row(static_cast<Eigen::Index>(k)) = observed.row(idx[k]);
    }
    d.zeta = zeta;
    d.zeta_estimated = zeta_estimated;
    return d;
  }
};

// Bias-corrected covariance surrogate under independent missingness:
// (X^T X / n) with each entry divided by zeta_k (diagonal) or zeta_k*zeta_l
// (off-diagonal).  Unbiased for the true covariance, but typically indefinite
// once entries get inflated at different rates.
inline SymmetricMatrix missing_data_gamma(const MaskedData& d) {
  const double n = static_cast<double>(d.n());
  Eigen::MatrixXd g = (d.x.transpose() * d.x) / n;
  for (Eigen::Index k = 0; k < g.rows(); ++k)
    for (Eigen::Index l = 0; l < g.cols(); ++l)
      g(k, l) /= (k == l) ? d.zeta(k) : d.zeta(k) * d.zeta(l);
  return SymmetricMatrix(std::move(g));
}

// Covariance surrogate when rows carry correlated noise with known total
// variance: X^T X / n minus (trace_b / n) on the diagonal.  For n < m this
// has at least m - n negative eigenvalues whenever trace_b > 0.
inline SymmetricMatrix kron_sum_gamma(const Eigen::MatrixXd& x, double trace_b) {
  if (x.rows() == 0 || x.cols() == 0) throw InputError("kron_sum_gamma: empty data");
  if (!(trace_b >= 0.0)) throw ConfigError("kron_sum_gamma: need trace_b >= 0");
  const double n = static_cast<double>(x.rows());
  Eigen::MatrixXd g = (x.transpose() * x) / n;
  g.diagonal().array() -= trace_b / n;
  return SymmetricMatrix(std::move(g));
}

// Plain second-moment matrix X^T X / n (optionally after demeaning columns).
inline SymmetricMatrix sample_covariance(const Eigen::MatrixXd& x, bool center = false) {
  if (x.rows() == 0 || x.cols() == 0) throw InputError("sample_covariance: empty data");
  Eigen::MatrixXd xc = x;
  if (center) xc.rowwise() -= x.colwise().mean();
  return SymmetricMatrix((xc.transpose() * xc) / static_cast<double>(x.rows()));
}

struct SpectrumStats {
  double min_eig = 0.0;
  double max_eig = 0.0;
  double max_eig_projected = 0.0;  // largest eigenvalue after the PSD box repair
  double sum_negative = 0.0;
  int count_negative = 0;
};

// Spectrum summary of a covariance surrogate.  Eigenvalues below -psd_tol
// count as negative so that numerically-zero eigenvalues of PSD inputs do
// not register.  proj_tol controls the box-repair bisection accuracy.
inline SpectrumStats spectrum_stats(const SymmetricMatrix& gamma, double proj_tol = 1e-3) {
  SpectrumStats s;
  Eigen::VectorXd ev = eigenvalues(gamma);
  s.max_eig = ev(0);
  s.min_eig = ev(ev.size() - 1);
  const double tol = default_tolerances().psd;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) < -tol) {
      ++s.count_negative;
      s.sum_negative += ev(i);
    }
  if (s.count_negative == 0) {
    s.max_eig_projected = s.max_eig;
  } else {
    auto proj = linf_psd_project_detail(gamma, proj_tol);
    s.max_eig_projected = eigenvalues(proj.projected)(0);
  }
  return s;
}

}  // namespace precmat
