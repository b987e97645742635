#include <catch2/catch_amalgamated.hpp>

#include "precmat/logdet_prox.hpp"
#include "oracles.hpp"

using namespace precmat;
using Catch::Approx;

namespace {

// prox objective  -log det(Theta) + (rho/2) ||Theta - A||_F^2
double prox_obj(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& a, double rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(theta);
  if (es.eigenvalues().minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
  double logdet = es.eigenvalues().array().log().sum();
  return -logdet + 0.5 * rho * (theta - a).squaredNorm();
}

}  // namespace

TEST_CASE("t_rho scalar cases", "[logdet_prox]") {
  CHECK(t_rho_scalar(0.0, 1.0, 10.0) == Approx(1.0));
  // cap active: unconstrained minimizer (1.5+sqrt(1.5^2+1))/2 > 1.2
  CHECK(t_rho_scalar(1.5, 4.0, 1.2) == Approx(1.2));
  double uncapped = t_rho_scalar(1.5, 4.0, 100.0);
  CHECK(uncapped == Approx(0.5 * (1.5 + std::sqrt(1.5 * 1.5 + 1.0))));

  // grid oracle for the capped case
  double want = oracle::grid_argmin_refined(
      [](double d) { return -std::log(d) + 2.0 * (d - 1.5) * (d - 1.5); }, 1e-4, 1.2, 1e-3,
      1e-7);
  CHECK(t_rho_scalar(1.5, 4.0, 1.2) == Approx(want).margin(1e-6));

  // monotone in the input
  double prev = -1.0;
  for (double m = -5.0; m <= 5.0; m += 0.25) {
    double v = t_rho_scalar(m, 3.0, 2.0);
    CHECK(v >= prev);
    CHECK(v > 0.0);
    CHECK(v <= 2.0);
    prev = v;
  }
}

TEST_CASE("t_rho matrix output beats feasible perturbations", "[logdet_prox]") {
  Rng rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::MatrixXd a = oracle::random_symmetric(4, rng, 1.2);
    double rho = rng.uniform(0.5, 10.0);
    double r = rng.uniform(0.8, 3.0);
    SymmetricMatrix out = t_rho(SymmetricMatrix(a), rho, r);
    Eigen::VectorXd ev = eigenvalues(out);
    CHECK(ev(3) > 0.0);
    CHECK(ev(0) <= r * (1.0 + 1e-12));
    double base = prox_obj(out.mat(), a, rho);
    // eigenvalue nudges that stay feasible
    EigenDecomposition d = eigendecompose(out);
    for (int i = 0; i < 4; ++i)
      for (double eps : {1e-3, -1e-3}) {
        Eigen::VectorXd v = d.values;
        v(i) += eps;
        if (v(i) <= 0.0 || v(i) > r) continue;
        Eigen::MatrixXd pert = d.vectors * v.asDiagonal() * d.vectors.transpose();
        CHECK(base <= prox_obj(pert, a, rho) + 1e-12);
      }
    // random symmetric nudges
    for (int k = 0; k < 20; ++k) {
      Eigen::MatrixXd pert = out.mat() + 1e-3 * oracle::random_symmetric(4, rng);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pert);
      if (es.eigenvalues().minCoeff() <= 0.0 || es.eigenvalues().maxCoeff() > r) continue;
      CHECK(base <= prox_obj(pert, a, rho) + 1e-12);
    }
  }
}

TEST_CASE("t_rho commutes with its input", "[logdet_prox]") {
  Rng rng(19);
  Eigen::MatrixXd a = oracle::random_symmetric(5, rng);
  Eigen::MatrixXd out = t_rho(SymmetricMatrix(a), 2.0, 1.5).mat();
  CHECK((out * a - a * out).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("t_rho_unconstrained fixed values", "[logdet_prox]") {
  // 1x1, a = 0, rho = 2:  -log d + 2 d^2 minimized at d = 1/2
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(1, 1);
  CHECK(t_rho_unconstrained(SymmetricMatrix(z), 2.0)(0, 0) == Approx(0.5));
  double want = oracle::grid_argmin_refined(
      [](double d) { return -std::log(d) + 2.0 * d * d; }, 1e-4, 5.0, 1e-3, 1e-7);
  CHECK(t_rho_unconstrained(SymmetricMatrix(z), 2.0)(0, 0) == Approx(want).margin(1e-6));

  SymmetricMatrix id2 = SymmetricMatrix::identity(2);
  Eigen::MatrixXd out = t_rho_unconstrained(id2, 1.0).mat();
  double expect = 0.5 * (1.0 + std::sqrt(3.0));
  CHECK(out(0, 0) == Approx(expect));
  CHECK(out(1, 1) == Approx(expect));
  CHECK(out(0, 1) == Approx(0.0).margin(1e-14));
}

TEST_CASE("scaling identity between the two conventions", "[logdet_prox]") {
  Rng rng(23);
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::MatrixXd a = oracle::random_symmetric(5, rng, 1.5);
    double rho = rng.uniform(0.2, 8.0);
    Eigen::MatrixXd u = t_rho_unconstrained(SymmetricMatrix(a), rho).mat();
    Eigen::MatrixXd c = t_rho(SymmetricMatrix(a), 2.0 * rho,
                              std::numeric_limits<double>::infinity())
                            .mat();
    CHECK((u - c).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("t_rho parameter validation", "[logdet_prox]") {
  SymmetricMatrix id = SymmetricMatrix::identity(2);
  CHECK_THROWS_AS(t_rho(id, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(t_rho(id, -1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(t_rho(id, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(t_rho(id, 1.0, -2.0), ConfigError);
  CHECK_THROWS_AS(t_rho_unconstrained(id, 0.0), ConfigError);
  CHECK_NOTHROW(t_rho(id, 1.0, std::numeric_limits<double>::infinity()));
}
