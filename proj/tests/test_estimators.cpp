#include <catch2/catch_amalgamated.hpp>

#include "precmat/estimators.hpp"
#include "oracles.hpp"

using namespace precmat;
using Catch::Approx;

TEST_CASE("nodewise on a diagonal input inverts the diagonal", "[estimators]") {
  Eigen::MatrixXd gm(2, 2);
  gm << 2.0, 0.0, 0.0, 4.0;
  EstimateResult res = nodewise(SymmetricMatrix(gm), 0.0, 100.0);
  CHECK(res.theta_hat(0, 0) == Approx(0.5));
  CHECK(res.theta_hat(1, 1) == Approx(0.25));
  CHECK(std::abs(res.theta_hat(0, 1)) < 1e-12);
  for (const auto& nr : res.node_reports) CHECK(nr.converged);
}

TEST_CASE("nodewise worked 2x2 example with an active penalty", "[estimators]") {
  // node regressions: beta = soft(0.5, 0.1) = 0.4, residual variance 0.8
  Eigen::MatrixXd gm(2, 2);
  gm << 1.0, 0.5, 0.5, 1.0;
  EstimateResult res = nodewise(SymmetricMatrix(gm), 0.1, 50.0);
  CHECK(res.theta_hat(0, 0) == Approx(1.25).margin(1e-6));
  CHECK(res.theta_hat(1, 1) == Approx(1.25).margin(1e-6));
  CHECK(res.theta_hat(0, 1) == Approx(-0.5).margin(1e-6));
  CHECK(res.theta_hat(1, 0) == res.theta_hat(0, 1));
}

TEST_CASE("nodewise with no penalty recovers the inverse", "[estimators]") {
  Rng rng(107);
  Eigen::MatrixXd gm = oracle::random_pd(5, rng, 0.8, 2.0);
  SymmetricMatrix gamma(gm);
  NodewiseConfig cfg;
  cfg.tol = 1e-12;
  cfg.max_iter = 200000;
  EstimateResult res = nodewise(gamma, 0.0, 1e6, cfg);
  SymmetricMatrix inv = sym_inverse_pd(gamma);
  CHECK((res.theta_hat.mat() - inv.mat()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("nodewise is permutation equivariant", "[estimators]") {
  Rng rng(109);
  Eigen::MatrixXd gm = oracle::random_pd(4, rng, 0.6, 1.8);
  SymmetricMatrix gamma(gm);
  Eigen::VectorXd radii(4);
  radii << 1.0, 2.0, 0.7, 1.5;
  EstimateResult base = nodewise(gamma, 0.08, radii);

  std::vector<int> perm = {2, 0, 3, 1};
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) p(i, perm[i]) = 1.0;
  Eigen::MatrixXd gp = p * gm * p.transpose();
  Eigen::VectorXd rp(4);
  for (int i = 0; i < 4; ++i) rp(i) = radii(perm[i]);
  EstimateResult permuted = nodewise(SymmetricMatrix(gp), 0.08, rp);

  Eigen::MatrixXd back = p.transpose() * permuted.theta_hat.mat() * p;
  CHECK((back - base.theta_hat.mat()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("degenerate node reports its index", "[estimators]") {
  // indefinite input: regressing node 0 on node 1 leaves negative variance
  Eigen::MatrixXd gm(2, 2);
  gm << 1.0, 1.2, 1.2, 1.0;
  CHECK_THROWS_WITH(nodewise(SymmetricMatrix(gm), 0.0, 100.0),
                    Catch::Matchers::ContainsSubstring("degenerate node 0"));
}

TEST_CASE("single-node problem", "[estimators]") {
  Eigen::MatrixXd gm(1, 1);
  gm << 4.0;
  EstimateResult res = nodewise(SymmetricMatrix(gm), 0.3, 10.0);
  CHECK(res.theta_hat(0, 0) == Approx(0.25));
}

TEST_CASE("node radius caps propagate through symmetrization", "[estimators]") {
  Rng rng(113);
  Eigen::MatrixXd gm = oracle::random_pd(3, rng, 0.8, 1.6);
  SymmetricMatrix gamma(gm);
  Eigen::VectorXd radii(3);
  radii << 0.05, 5.0, 5.0;
  EstimateResult res = nodewise(gamma, 0.0, radii);
  // column 0 coefficients obey |beta|_1 <= 0.05, and the smaller-magnitude
  // entry survives symmetrization, so the bound carries to the output
  double denom_bound = std::abs(res.theta_hat(0, 0));  // 1/residual-variance
  double off = std::abs(res.theta_hat(0, 1)) + std::abs(res.theta_hat(0, 2));
  CHECK(off <= denom_bound * 0.05 + 1e-9);
  CHECK(res.theta_hat.mat() == res.theta_hat.mat().transpose());
}

TEST_CASE("cached submatrix norms change nothing", "[estimators]") {
  Rng rng(127);
  Eigen::MatrixXd gm = oracle::random_pd(5, rng, 0.6, 2.0);
  SymmetricMatrix gamma(gm);
  NodewiseConfig plain;
  NodewiseConfig cached;
  cached.sub_norms = nodewise_sub_norms(gamma);
  EstimateResult a = nodewise(gamma, 0.1, 2.0, plain);
  EstimateResult b = nodewise(gamma, 0.1, 2.0, cached);
  CHECK((a.theta_hat.mat() - b.theta_hat.mat()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("oracle radii from the true precision", "[estimators]") {
  Eigen::MatrixXd t(2, 2);
  t << 2.0, -1.0, -1.0, 2.0;
  Eigen::VectorXd r = nodewise_oracle_radii(SymmetricMatrix(t), 1.5);
  CHECK(r(0) == Approx(0.75));
  CHECK(r(1) == Approx(0.75));
}

TEST_CASE("projected and direct glasso agree on clean inputs", "[estimators]") {
  Rng rng(131);
  Eigen::MatrixXd gm = oracle::random_pd(4, rng, 0.5, 2.0);
  SymmetricMatrix gamma(gm);
  AdmmConfig cfg;
  cfg.radius = 8.0;
  Penalty g = Penalty::l1(0.1);
  EstimateResult direct = glasso(gamma, g, cfg, EstimatorVariant::NonprojGlasso);
  EstimateResult proj = glasso(gamma, g, cfg, EstimatorVariant::ProjGlasso);
  // positive definite input: the repair is a no-op and both paths coincide
  CHECK(proj.proj_radius == 0.0);
  CHECK((direct.theta_hat.mat() - proj.theta_hat.mat()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(direct.input_spectrum.count_negative == 0);
}

TEST_CASE("projected glasso repairs an indefinite input first", "[estimators]") {
  Eigen::MatrixXd gm(2, 2);
  gm << 1.0, 0.0, 0.0, -0.2;
  SymmetricMatrix gamma(gm);
  AdmmConfig cfg;
  cfg.radius = 3.0;
  cfg.tol = 1e-8;
  Penalty g = Penalty::l1(0.5);
  EstimateResult direct = glasso(gamma, g, cfg, EstimatorVariant::NonprojGlasso);
  EstimateResult proj = glasso(gamma, g, cfg, EstimatorVariant::ProjGlasso, 1e-5);
  CHECK(direct.input_spectrum.count_negative == 1);
  CHECK(proj.proj_radius == Approx(0.2).margin(1e-4));
  CHECK(proj.report.converged);
  // unrepaired coordinate has gradient -0.2 + 0.5 - 1/t < 0 up to t = 10/3,
  // so it rides the cap; the repaired one stops at 1/lambda = 2
  CHECK(direct.theta_hat(1, 1) == Approx(3.0).margin(1e-4));
  CHECK(proj.theta_hat(1, 1) == Approx(2.0).margin(1e-3));
  CHECK(proj.theta_hat(0, 0) == Approx(direct.theta_hat(0, 0)).margin(1e-3));
}

TEST_CASE("estimator validation", "[estimators]") {
  SymmetricMatrix id = SymmetricMatrix::identity(3);
  AdmmConfig cfg;
  CHECK_THROWS_AS(glasso(id, Penalty::l1(0.1), cfg, EstimatorVariant::Nodewise), ConfigError);
  CHECK_THROWS_AS(nodewise(id, -0.1, 1.0), ConfigError);
  CHECK_THROWS_AS(nodewise(id, 0.1, 0.0), ConfigError);
  Eigen::VectorXd radii(2);
  radii << 1.0, 1.0;
  CHECK_THROWS_AS(nodewise(id, 0.1, radii), ConfigError);
  NodewiseConfig cfg2;
  cfg2.sub_norms = Eigen::VectorXd::Ones(2);
  CHECK_THROWS_AS(nodewise(id, 0.1, 1.0, cfg2), ConfigError);
}
