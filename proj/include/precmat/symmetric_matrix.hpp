#pragma once

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>
#include <lapacke.h>

#include "precmat/errors.hpp"
#include "precmat/tolerances.hpp"

namespace precmat {

// Dense symmetric matrix.  Construction symmetrizes via (S + S^T)/2 so that
// asymmetric round-off (e.g. from file input) can never leak into the
// solvers; validation against a symmetry tolerance is the job of the file
// readers, not of this type.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;

  explicit SymmetricMatrix(Eigen::MatrixXd s) {
    if (s.rows() == 0 || s.rows() != s.cols())
      throw InputError("SymmetricMatrix: need a non-empty square matrix, got " +
                       std::to_string(s.rows()) + "x" + std::to_string(s.cols()));
    if (!s.allFinite())
      throw InputError("SymmetricMatrix: input contains NaN or Inf");
    mat_ = 0.5 * (s + s.transpose());
  }

  static SymmetricMatrix identity(int dim) {
    return SymmetricMatrix(Eigen::MatrixXd::Identity(dim, dim));
  }
  static SymmetricMatrix zero(int dim) {
    return SymmetricMatrix(Eigen::MatrixXd::Zero(dim, dim));
  }

  int dim() const { return static_cast<int>(mat_.rows()); }
  double operator()(int i, int j) const { return mat_(i, j); }
  const Eigen::MatrixXd& mat() const { return mat_; }
  double trace() const { return mat_.trace(); }

 private:
  Eigen::MatrixXd mat_;
};

struct EigenDecomposition {
  Eigen::MatrixXd vectors;  // orthonormal columns
  Eigen::VectorXd values;   // descending

  Eigen::MatrixXd reconstruct() const {
    return (vectors * values.asDiagonal()) * vectors.transpose();
  }

  // U f(M) U^T for a scalar map f applied to the eigenvalues.
  template <class F>
  Eigen::MatrixXd map_values(F f) const {
    Eigen::VectorXd fv(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) fv(i) = f(values(i));
    return (vectors * fv.asDiagonal()) * vectors.transpose();
  }
};

namespace detail {

// LAPACK dsyevd, eigenvalues ascending; we flip to descending afterwards.
inline void dsyevd_inplace(Eigen::MatrixXd& a, Eigen::VectorXd& w, char jobz) {
  const int m = static_cast<int>(a.rows());
  w.resize(m);
  int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, jobz, 'L', m, a.data(), m, w.data());
  if (info != 0)
    throw NumericalError("eigendecomposition failed: dsyevd info=" + std::to_string(info));
}

}  // namespace detail

// Eigenvalues only, descending.
inline Eigen::VectorXd eigenvalues(const SymmetricMatrix& s) {
  Eigen::MatrixXd a = s.mat();
  Eigen::VectorXd w;
  detail::dsyevd_inplace(a, w, 'N');
  return w.reverse();
}

inline EigenDecomposition eigendecompose(const SymmetricMatrix& s) {
  Eigen::MatrixXd a = s.mat();
  Eigen::VectorXd w;
  detail::dsyevd_inplace(a, w, 'V');
  EigenDecomposition d;
  d.values = w.reverse();
  d.vectors = a.rowwise().reverse();  // reverse column order to match
  return d;
}

struct MatrixNorms {
  double frobenius = 0;
  double spectral = 0;          // max |eigenvalue|
  double nuclear = 0;           // sum |eigenvalue|
  double linf_elementwise = 0;  // max |S_ij|
  double l1_elementwise = 0;    // sum |S_ij|
};

inline MatrixNorms norms(const SymmetricMatrix& s) {
  MatrixNorms n;
  n.frobenius = s.mat().norm();
  n.linf_elementwise = s.mat().cwiseAbs().maxCoeff();
  n.l1_elementwise = s.mat().cwiseAbs().sum();
  Eigen::VectorXd ev = eigenvalues(s);
  n.spectral = ev.cwiseAbs().maxCoeff();
  n.nuclear = ev.cwiseAbs().sum();
  return n;
}

// Frobenius-nearest positive semidefinite matrix: clip negative eigenvalues.
inline SymmetricMatrix psd_project_frobenius(const SymmetricMatrix& s) {
  EigenDecomposition d = eigendecompose(s);
  if (d.values(d.values.size() - 1) >= 0.0) return s;
  return SymmetricMatrix(d.map_values([](double v) { return v > 0.0 ? v : 0.0; }));
}

inline SymmetricMatrix sym_inverse_pd(const SymmetricMatrix& s) {
  EigenDecomposition d = eigendecompose(s);
  if (!(d.values(d.values.size() - 1) > 0.0))
    throw NumericalError("sym_inverse_pd: matrix is not positive definite (min eigenvalue " +
                         std::to_string(d.values(d.values.size() - 1)) + ")");
  return SymmetricMatrix(d.map_values([](double v) { return 1.0 / v; }));
}

// Symmetric square root; eigenvalues below zero by more than the psd
// tolerance are an error, round-off negatives are clipped.
inline SymmetricMatrix sym_sqrt_psd(const SymmetricMatrix& s) {
  EigenDecomposition d = eigendecompose(s);
  if (d.values(d.values.size() - 1) < -default_tolerances().psd)
    throw NumericalError("sym_sqrt_psd: matrix is not positive semidefinite");
  return SymmetricMatrix(d.map_values([](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; }));
}

}  // namespace precmat
