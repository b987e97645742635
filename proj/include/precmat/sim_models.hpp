#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "precmat/cov_inputs.hpp"
#include "precmat/errors.hpp"
#include "precmat/rng.hpp"
#include "precmat/symmetric_matrix.hpp"

namespace precmat {

// ---------------------------------------------------------------------------
// Covariance / precision model families
// ---------------------------------------------------------------------------

// Toeplitz covariance A_ij = r^|i-j|; its precision matrix is tridiagonal.
inline SymmetricMatrix ar1_cov(int m, double r) {
  if (m < 1) throw ConfigError("ar1_cov: need m >= 1");
  if (!(std::abs(r) < 1.0)) throw ConfigError("ar1_cov: need |r| < 1");
  Eigen::MatrixXd a(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) a(i, j) = std::pow(r, std::abs(i - j));
  return SymmetricMatrix(std::move(a));
}

// Block-diagonal covariance; within each block the first index is a hub:
// unit diagonal, hub-spoke entries r, spoke-spoke entries r^2.  In the
// precision matrix the spokes decouple given the hub.
inline SymmetricMatrix star_block_cov(int m, double r, int block_size) {
  if (m < 1 || block_size < 1) throw ConfigError("star_block_cov: need m, block_size >= 1");
  if (m % block_size != 0)
    throw ConfigError("star_block_cov: dimension " + std::to_string(m) +
                      " is not divisible by block size " + std::to_string(block_size));
  if (!(std::abs(r) < 1.0)) throw ConfigError("star_block_cov: need |r| < 1");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (int b = 0; b < m / block_size; ++b) {
    int o = b * block_size;
    for (int i = 0; i < block_size; ++i)
      for (int j = 0; j < block_size; ++j) {
        double v;
        if (i == j) v = 1.0;
        else if (i == 0 || j == 0) v = r;
        else v = r * r;
        a(o + i, o + j) = v;
      }
  }
  return SymmetricMatrix(std::move(a));
}

// One random-graph edge (i,j) with weight w: subtract w off-diagonal, add w
// to both touched diagonal entries.  Keeps diagonal dominance, hence
// positive definiteness.
inline void apply_er_edge(Eigen::MatrixXd& omega, int i, int j, double w) {
  if (i == j) throw ConfigError("apply_er_edge: need i != j");
  omega(i, j) -= w;
  omega(j, i) -= w;
  omega(i, i) += w;
  omega(j, j) += w;
}

// Random sparse precision matrix: 0.25*I plus d distinct edges with weights
// uniform on [0.6, 0.8].
inline SymmetricMatrix er_precision(int m, long d, Rng& rng) {
  if (m < 1) throw ConfigError("er_precision: need m >= 1");
  long max_edges = static_cast<long>(m) * (m - 1) / 2;
  if (d < 0 || d > max_edges)
    throw ConfigError("er_precision: need 0 <= d <= m(m-1)/2, got d=" + std::to_string(d));
  Eigen::MatrixXd omega = Eigen::MatrixXd::Identity(m, m) * 0.25;
  std::set<std::pair<int, int>> chosen;
  while (static_cast<long>(chosen.size()) < d) {
    int i = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(m)));
    int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(m)));
    if (i == j) continue;
    auto e = std::minmax(i, j);
    if (!chosen.insert({e.first, e.second}).second) continue;
    double w = rng.uniform(0.6, 0.8);
    apply_er_edge(omega, e.first, e.second, w);
  }
  return SymmetricMatrix(std::move(omega));
}

struct ModelSpec {
  enum class Family { AR1, StarBlock, ErdosRenyi };
  Family family = Family::AR1;
  int m = 0;
  double r = 0.0;      // ar1 / star_block
  int block_size = 0;  // star_block
  long d = 0;          // erdos-renyi edge count
};

struct Model {
  SymmetricMatrix a;           // covariance
  SymmetricMatrix theta_star;  // its inverse
};

inline Model make_model(const ModelSpec& spec, Rng& rng) {
  Model mod;
  switch (spec.family) {
    case ModelSpec::Family::AR1:
      mod.a = ar1_cov(spec.m, spec.r);
      mod.theta_star = sym_inverse_pd(mod.a);
      break;
    case ModelSpec::Family::StarBlock:
      mod.a = star_block_cov(spec.m, spec.r, spec.block_size);
      mod.theta_star = sym_inverse_pd(mod.a);
      break;
    case ModelSpec::Family::ErdosRenyi:
      mod.theta_star = er_precision(spec.m, spec.d, rng);
      mod.a = sym_inverse_pd(mod.theta_star);
      break;
  }
  return mod;
}

// ---------------------------------------------------------------------------
// Data generators
// ---------------------------------------------------------------------------

struct GeneratedDataset {
  Model model;
  MaskedData data;
  std::string noise_type;  // "missing" | "kron_sum" | "none"
  Eigen::VectorXd zeta;    // missing-data only
  double tau_b = 0.0;      // kron-sum only
  double trace_b = 0.0;    // exact trace handed to the surrogate
  std::uint64_t seed = 0;
};

namespace detail {

// Row-major fill; one documented draw order so that seeds mean the same
// thing everywhere.
inline Eigen::MatrixXd normal_matrix(Eigen::Index n, Eigen::Index m, Rng& rng) {
  Eigen::MatrixXd w(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) w(i, j) = rng.normal();
  return w;
}

}  // namespace detail

// Zero-mean rows with covariance model.a, each cell then kept independently
// with probability zeta_j (mask drawn column by column after the data).
inline GeneratedDataset gen_missing_data(const Model& model, int n, const Eigen::VectorXd& zeta,
                                         std::uint64_t seed, Rng& rng) {
  const int m = model.a.dim();
  if (n < 1) throw ConfigError("gen_missing_data: need n >= 1");
  if (zeta.size() != m) throw ConfigError("gen_missing_data: zeta length mismatch");
  for (Eigen::Index j = 0; j < zeta.size(); ++j)
    if (!(zeta(j) > 0.0 && zeta(j) <= 1.0))
      throw ConfigError("gen_missing_data: zeta must lie in (0,1]");

  SymmetricMatrix root = sym_sqrt_psd(model.a);
  Eigen::MatrixXd z = detail::normal_matrix(n, m, rng) * root.mat();
  BoolArray u(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) u(i, j) = rng.bernoulli(zeta(j));

  GeneratedDataset ds;
  ds.model = model;
  ds.data = MaskedData::with_known_zeta((z.array() * u.cast<double>()).matrix(), u, zeta);
  ds.noise_type = "missing";
  ds.zeta = zeta;
  ds.seed = seed;
  return ds;
}

inline GeneratedDataset gen_missing_data(const Model& model, int n, double zeta,
                                         std::uint64_t seed, Rng& rng) {
  return gen_missing_data(model, n, Eigen::VectorXd::Constant(model.a.dim(), zeta), seed, rng);
}

// Zero-mean signal plus row-correlated noise:  X = W1 A^{1/2} + B^{1/2} W2
// with B an n x n covariance from `b_spec`, rescaled so tr(B) = n * tau_b
// exactly.  That trace is recorded; the surrogate subtracts trace_b/n from
// the diagonal of X^T X / n.
inline GeneratedDataset gen_kron_sum(const Model& model, int n, const ModelSpec& b_spec,
                                     double tau_b, std::uint64_t seed, Rng& rng) {
  const int m = model.a.dim();
  if (n < 1) throw ConfigError("gen_kron_sum: need n >= 1");
  if (!(tau_b >= 0.0)) throw ConfigError("gen_kron_sum: need tau_b >= 0");
  if (b_spec.m != n) throw ConfigError("gen_kron_sum: noise model dimension must equal n");

  SymmetricMatrix root = sym_sqrt_psd(model.a);
  Eigen::MatrixXd x = detail::normal_matrix(n, m, rng) * root.mat();
  if (tau_b > 0.0) {
    Model bm = make_model(b_spec, rng);
    double scale = static_cast<double>(n) * tau_b / bm.a.trace();
    SymmetricMatrix b_root = sym_sqrt_psd(SymmetricMatrix(bm.a.mat() * scale));
    x += b_root.mat() * detail::normal_matrix(n, m, rng);
  }

  GeneratedDataset ds;
  ds.model = model;
  ds.data = MaskedData::complete(std::move(x));
  ds.noise_type = "kron_sum";
  ds.tau_b = tau_b;
  ds.trace_b = static_cast<double>(n) * tau_b;
  ds.seed = seed;
  return ds;
}

// Convenience wrapper: one seed drives model structure (if random), data and
// mask, in that order.
struct NoiseSpec {
  enum class Type { None, Missing, KronSum };
  Type type = Type::None;
  Eigen::VectorXd zeta;  // Missing: scalar broadcast happens at parse time
  ModelSpec b_spec;      // KronSum
  double tau_b = 0.0;
};

inline GeneratedDataset generate(const ModelSpec& model_spec, int n, const NoiseSpec& noise,
                                 std::uint64_t seed) {
  Rng rng(seed);
  Model model = make_model(model_spec, rng);
  switch (noise.type) {
    case NoiseSpec::Type::Missing: {
      Eigen::VectorXd z = noise.zeta;
      if (z.size() == 1 && model.a.dim() > 1)
        z = Eigen::VectorXd::Constant(model.a.dim(), noise.zeta(0));
      return gen_missing_data(model, n, z, seed, rng);
    }
    case NoiseSpec::Type::KronSum: {
      ModelSpec b = noise.b_spec;
      b.m = n;
      return gen_kron_sum(model, n, b, noise.tau_b, seed, rng);
    }
    case NoiseSpec::Type::None: {
      SymmetricMatrix root = sym_sqrt_psd(model.a);
      Eigen::MatrixXd x = detail::normal_matrix(n, model.a.dim(), rng) * root.mat();
      GeneratedDataset ds;
      ds.model = model;
      ds.data = MaskedData::complete(std::move(x));
      ds.noise_type = "none";
      ds.seed = seed;
      return ds;
    }
  }
  throw ConfigError("generate: unknown noise type");
}

// The covariance surrogate matching how the dataset was generated.
inline SymmetricMatrix surrogate_for(const GeneratedDataset& ds) {
  if (ds.noise_type == "missing") return missing_data_gamma(ds.data);
  if (ds.noise_type == "kron_sum") return kron_sum_gamma(ds.data.x, ds.trace_b);
  return sample_covariance(ds.data.x);
}

}  // namespace precmat
