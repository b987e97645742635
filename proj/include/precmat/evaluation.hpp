#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "precmat/errors.hpp"
#include "precmat/symmetric_matrix.hpp"

namespace precmat {

struct RelativeErrors {
  double frobenius = 0.0;
  double spectral = 0.0;
  double nuclear = 0.0;
};

// ||hat - star|| / ||star|| in Frobenius, spectral and nuclear norms.
inline RelativeErrors relative_errors(const SymmetricMatrix& theta_hat,
                                      const SymmetricMatrix& theta_star) {
  if (theta_hat.dim() != theta_star.dim())
    throw InputError("relative_errors: dimension mismatch");
  SymmetricMatrix diff(theta_hat.mat() - theta_star.mat());
  MatrixNorms nd = norms(diff);
  MatrixNorms ns = norms(theta_star);
  if (ns.frobenius == 0.0) throw InputError("relative_errors: reference matrix is zero");
  RelativeErrors e;
  e.frobenius = nd.frobenius / ns.frobenius;
  e.spectral = nd.spectral / ns.spectral;
  e.nuclear = nd.nuclear / ns.nuclear;
  return e;
}

struct SupportMetrics {
  int tp = 0, fp = 0, tn = 0, fn = 0;
  double fpr = 0.0;
  double fnr = 0.0;
  double fpr_plus_fnr = 0.0;
};

// Off-diagonal support recovery; an entry is an edge when |value| exceeds
// the threshold.  Conventions for degenerate references: a full true graph
// has no negatives to falsify (fpr = 0), an empty one nothing to miss
// (fnr = 0).
inline SupportMetrics support_metrics(const SymmetricMatrix& theta_hat,
                                      const SymmetricMatrix& theta_star,
                                      double threshold = 1e-8) {
  if (theta_hat.dim() != theta_star.dim()) throw InputError("support_metrics: dimension mismatch");
  SupportMetrics s;
  const int m = theta_hat.dim();
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < j; ++i) {
      bool truth = std::abs(theta_star(i, j)) > threshold;
      bool est = std::abs(theta_hat(i, j)) > threshold;
      if (truth && est) ++s.tp;
      else if (truth && !est) ++s.fn;
      else if (!truth && est) ++s.fp;
      else ++s.tn;
    }
  s.fpr = (s.fp + s.tn) > 0 ? static_cast<double>(s.fp) / (s.fp + s.tn) : 0.0;
  s.fnr = (s.tp + s.fn) > 0 ? static_cast<double>(s.fn) / (s.tp + s.fn) : 0.0;
  s.fpr_plus_fnr = s.fpr + s.fnr;
  return s;
}

// One line of a sweep result table.
struct MetricsRow {
  std::string estimator;
  double lambda = 0.0;
  double radius = 0.0;
  std::uint64_t seed = 0;
  std::string status = "ok";  // "ok" | "no_convergence" | "error:<what>"
  RelativeErrors err;
  SupportMetrics support;
};

inline std::string metrics_csv_header() {
  return "estimator,lambda,radius,seed,status,rel_frobenius,rel_spectral,rel_nuclear,"
         "fpr,fnr,fpr_plus_fnr";
}

inline std::string to_csv(const MetricsRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%llu,%s,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g",
                r.estimator.c_str(), r.lambda, r.radius,
                static_cast<unsigned long long>(r.seed), r.status.c_str(), r.err.frobenius,
                r.err.spectral, r.err.nuclear, r.support.fpr, r.support.fnr,
                r.support.fpr_plus_fnr);
  return buf;
}

}  // namespace precmat
