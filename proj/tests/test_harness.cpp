#include <catch2/catch_amalgamated.hpp>

#include "precmat/harness.hpp"
#include "oracles.hpp"

using namespace precmat;
using Catch::Approx;

TEST_CASE("penalty json parsing", "[harness]") {
  PenaltySettings p = penalty_from_json(Json{{"lambda", 0.2}});
  CHECK(p.kind == PenaltyKind::L1);
  CHECK(p.lambda == 0.2);
  CHECK(p.penalize_diagonal);

  p = penalty_from_json(Json{{"kind", "scad"}, {"lambda", 0.1}});
  CHECK(p.kind == PenaltyKind::SCAD);
  CHECK(p.a == 3.7);  // default shape

  p = penalty_from_json(
      Json{{"kind", "mcp"}, {"lambda", 0.1}, {"a", 2.0}, {"penalize_diagonal", false}});
  CHECK(p.kind == PenaltyKind::MCP);
  CHECK_FALSE(p.penalize_diagonal);

  CHECK_THROWS_AS(penalty_from_json(Json{{"kind", "l1"}}), ConfigError);        // no lambda
  CHECK_THROWS_AS(penalty_from_json(Json{{"kind", "mcp"}, {"lambda", 0.1}}),    // no a
                  ConfigError);
  CHECK_THROWS_AS(penalty_from_json(Json{{"kind", "ridge"}, {"lambda", 0.1}}), ConfigError);
  CHECK_THROWS_AS(penalty_from_json(Json{{"lambda", "big"}}), ConfigError);
  // invalid shape parameters surface at parse time, not first use
  CHECK_THROWS_AS(penalty_from_json(Json{{"kind", "scad"}, {"lambda", 0.1}, {"a", 1.5}}),
                  ConfigError);
  CHECK_THROWS_AS(penalty_from_json(Json{{"kind", "mcp"}, {"lambda", 0.1}, {"a", 0.0}}),
                  ConfigError);
}

TEST_CASE("solver and constraint json parsing", "[harness]") {
  AdmmConfig c = solver_from_json(Json::object());
  CHECK(c.rho == 12.0);
  CHECK(c.max_iter == 5000);
  CHECK(c.tol == 5e-5);

  c = solver_from_json(Json{{"rho", 4.0}, {"R", 2.5}, {"max_iter", 100}, {"tol", 1e-6}});
  CHECK(c.rho == 4.0);
  CHECK(c.radius == 2.5);
  CHECK(c.max_iter == 100);

  CHECK_THROWS_AS(solver_from_json(Json{{"rho", 0.0}}), ConfigError);

  CHECK(constraint_from_json(Json::object()) == SideConstraint::Kind::SpectralNorm);
  CHECK(constraint_from_json(Json{{"constraint", "l1"}}) ==
        SideConstraint::Kind::ElementwiseL1);
  CHECK_THROWS_AS(constraint_from_json(Json{{"constraint", "nuclear"}}), ConfigError);
}

TEST_CASE("model and noise json round trips", "[harness]") {
  ModelSpec ar = model_from_json(Json{{"family", "ar1"}, {"m", 10}, {"r", 0.6}});
  CHECK(ar.family == ModelSpec::Family::AR1);
  CHECK(model_from_json(model_to_json(ar)).r == 0.6);

  ModelSpec sb = model_from_json(
      Json{{"family", "star_block"}, {"m", 20}, {"r", 0.3}, {"block_size", 4}});
  CHECK(sb.block_size == 4);
  CHECK(model_from_json(model_to_json(sb)).block_size == 4);

  ModelSpec er = model_from_json(Json{{"family", "er"}, {"m", 15}, {"d", 30}});
  CHECK(er.d == 30);
  CHECK(model_from_json(model_to_json(er)).d == 30);

  CHECK_THROWS_AS(model_from_json(Json{{"family", "banded"}, {"m", 5}}), ConfigError);
  CHECK_THROWS_AS(model_from_json(Json{{"family", "ar1"}, {"m", 5}}), ConfigError);  // no r
  CHECK_THROWS_AS(model_from_json(Json{{"family", "star_block"}, {"m", 6}, {"r", 0.2}}),
                  ConfigError);

  NoiseSpec miss = noise_from_json(Json{{"type", "missing"}, {"zeta", 0.8}});
  CHECK(miss.type == NoiseSpec::Type::Missing);
  CHECK(miss.zeta.size() == 1);
  NoiseSpec miss2 = noise_from_json(noise_to_json(miss));
  CHECK(miss2.zeta(0) == 0.8);

  NoiseSpec ks = noise_from_json(
      Json{{"type", "kron_sum"}, {"tau_b", 0.3},
           {"b", Json{{"family", "ar1"}, {"m", 0}, {"r", 0.5}}}});
  CHECK(ks.tau_b == 0.3);
  NoiseSpec ks2 = noise_from_json(noise_to_json(ks));
  CHECK(ks2.b_spec.r == 0.5);

  CHECK(noise_from_json(Json{{"type", "none"}}).type == NoiseSpec::Type::None);
  CHECK_THROWS_AS(noise_from_json(Json{{"type", "missing"}}), ConfigError);
  CHECK_THROWS_AS(noise_from_json(Json{{"type", "kron_sum"}, {"tau_b", 0.1}}), ConfigError);
  CHECK_THROWS_AS(noise_from_json(Json{{"type", "gauss"}}), ConfigError);
}

TEST_CASE("estimator json parsing and default ids", "[harness]") {
  EstimatorSpec e = estimator_from_json(
      Json{{"variant", "nonproj"}, {"penalty", Json{{"lambda", 0.1}}}, {"R", 3.0}});
  CHECK(e.id == "nonproj_l1");
  CHECK(e.radius == 3.0);
  CHECK_FALSE(std::isfinite(e.oracle_scale));

  e = estimator_from_json(Json{{"variant", "proj"},
                               {"penalty", Json{{"kind", "mcp"}, {"lambda", 0.1}, {"a", 2.0}}},
                               {"R", Json{{"oracle_scale", 1.5}}}});
  CHECK(e.id == "proj_mcp");
  CHECK(e.oracle_scale == 1.5);
  CHECK_FALSE(std::isfinite(e.radius));

  e = estimator_from_json(Json{{"variant", "nodewise"},
                               {"penalty", Json{{"lambda", 0.1}}},
                               {"R", Json{{"per_node_scale", 2.0}}},
                               {"id", "nw_custom"}});
  CHECK(e.id == "nw_custom");
  CHECK(e.variant == EstimatorVariant::Nodewise);

  CHECK_THROWS_AS(estimator_from_json(Json{{"penalty", Json{{"lambda", 0.1}}}}),  // no R
                  ConfigError);
  CHECK_THROWS_AS(estimator_from_json(Json{{"R", 1.0}}), ConfigError);  // no penalty
  CHECK_THROWS_AS(
      estimator_from_json(Json{{"variant", "nodewise"},
                               {"penalty", Json{{"kind", "scad"}, {"lambda", 0.1}}},
                               {"R", 1.0}}),
      ConfigError);
  CHECK_THROWS_AS(
      estimator_from_json(
          Json{{"penalty", Json{{"lambda", 0.1}}}, {"R", Json{{"scale", 2.0}}}}),
      ConfigError);
}

TEST_CASE("radius resolution", "[harness]") {
  Eigen::MatrixXd t(2, 2);
  t << 2.0, -1.0, -1.0, 2.0;  // spectral norm 3
  SymmetricMatrix theta(t);

  EstimatorSpec abs;
  abs.radius = 5.0;
  Eigen::VectorXd r = resolve_radii(abs, 2, nullptr);
  CHECK(r.size() == 2);
  CHECK(r(0) == 5.0);

  EstimatorSpec scaled;
  scaled.oracle_scale = 2.0;
  r = resolve_radii(scaled, 2, &theta);
  CHECK(r(0) == Approx(6.0));
  CHECK_THROWS_AS(resolve_radii(scaled, 2, nullptr), ConfigError);

  EstimatorSpec nodal = scaled;
  nodal.variant = EstimatorVariant::Nodewise;
  r = resolve_radii(nodal, 2, &theta);
  CHECK(r(0) == Approx(1.0));  // 2 * (1/2)

  EstimatorSpec both = abs;
  both.oracle_scale = 1.0;
  CHECK_THROWS_AS(resolve_radii(both, 2, &theta), ConfigError);
  EstimatorSpec neither;
  CHECK_THROWS_AS(resolve_radii(neither, 2, &theta), ConfigError);
}

TEST_CASE("estimator dispatch matches direct calls", "[harness]") {
  Rng rng(311);
  Eigen::MatrixXd gm = oracle::random_pd(4, rng, 0.6, 1.8);
  SymmetricMatrix gamma(gm);

  EstimatorSpec nw;
  nw.variant = EstimatorVariant::Nodewise;
  nw.radius = 2.0;
  Eigen::VectorXd radii = resolve_radii(nw, 4, nullptr);
  EstimateResult via_harness = run_estimator(nw, gamma, 0.1, radii);
  EstimateResult direct = nodewise(gamma, 0.1, 2.0);
  CHECK((via_harness.theta_hat.mat() - direct.theta_hat.mat()).cwiseAbs().maxCoeff() == 0.0);

  EstimatorSpec gl;
  gl.penalty.lambda = 0.1;
  gl.radius = 6.0;
  EstimateResult g1 = run_estimator(gl, gamma, 0.1, resolve_radii(gl, 4, nullptr));
  AdmmConfig cfg;
  cfg.radius = 6.0;
  EstimateResult g2 = glasso(gamma, Penalty::l1(0.1), cfg);
  CHECK((g1.theta_hat.mat() - g2.theta_hat.mat()).cwiseAbs().maxCoeff() == 0.0);

  // the elementwise-l1 constrained path respects its budget
  EstimatorSpec l1c;
  l1c.penalty.lambda = 0.05;
  l1c.radius = 3.0;
  l1c.constraint = SideConstraint::Kind::ElementwiseL1;
  EstimateResult g3 = run_estimator(l1c, gamma, 0.05, resolve_radii(l1c, 4, nullptr));
  CHECK(g3.theta_hat.mat().cwiseAbs().sum() <= 3.0 * (1.0 + 1e-6));
}

TEST_CASE("sweep json validation", "[harness]") {
  Json good{{"model", Json{{"family", "ar1"}, {"m", 6}, {"r", 0.5}}},
            {"n", 30},
            {"seeds", Json::array({1, 2})},
            {"lambda_grid", Json::array({0.1, 0.3})},
            {"estimators", Json::array({Json{{"penalty", Json{{"lambda", 0.1}}}, {"R", 5.0}}})}};
  SweepConfig sc = sweep_from_json(good);
  CHECK(sc.n == 30);
  CHECK(sc.seeds.size() == 2);
  CHECK(sc.lambda_grid.size() == 2);
  CHECK(sc.estimators.size() == 1);

  Json bad = good;
  bad.erase("seeds");
  CHECK_THROWS_AS(sweep_from_json(bad), ConfigError);
  bad = good;
  bad["lambda_grid"] = Json::array();
  CHECK_THROWS_AS(sweep_from_json(bad), ConfigError);
  bad = good;
  bad.erase("estimators");
  CHECK_THROWS_AS(sweep_from_json(bad), ConfigError);
  bad = good;
  bad.erase("n");
  CHECK_THROWS_AS(sweep_from_json(bad), ConfigError);
}

TEST_CASE("sweep row order and determinism", "[harness]") {
  SweepConfig sc;
  sc.model.family = ModelSpec::Family::AR1;
  sc.model.m = 6;
  sc.model.r = 0.5;
  sc.noise.type = NoiseSpec::Type::Missing;
  sc.noise.zeta = Eigen::VectorXd::Constant(1, 0.9);
  sc.n = 40;
  sc.seeds = {11, 12};
  sc.lambda_grid = {0.05, 0.2};

  EstimatorSpec gl;
  gl.id = "gl";
  gl.penalty.lambda = 0.1;
  gl.radius = 10.0;
  EstimatorSpec nw;
  nw.id = "nw";
  nw.variant = EstimatorVariant::Nodewise;
  nw.oracle_scale = 1.5;
  sc.estimators = {gl, nw};

  std::vector<MetricsRow> rows = run_sweep(sc);
  REQUIRE(rows.size() == 8);
  // estimator-major, then lambda, then seed
  const char* want_est[] = {"gl", "gl", "gl", "gl", "nw", "nw", "nw", "nw"};
  double want_lam[] = {0.05, 0.05, 0.2, 0.2, 0.05, 0.05, 0.2, 0.2};
  std::uint64_t want_seed[] = {11, 12, 11, 12, 11, 12, 11, 12};
  for (int i = 0; i < 8; ++i) {
    CHECK(rows[i].estimator == want_est[i]);
    CHECK(rows[i].lambda == want_lam[i]);
    CHECK(rows[i].seed == want_seed[i]);
    CHECK(rows[i].status == "ok");
    CHECK(std::isfinite(rows[i].err.frobenius));
    CHECK(rows[i].err.frobenius > 0.0);
    CHECK(rows[i].support.fpr_plus_fnr >= 0.0);
  }

  std::vector<MetricsRow> again = run_sweep(sc);
  for (int i = 0; i < 8; ++i) {
    CHECK(again[i].err.frobenius == rows[i].err.frobenius);
    CHECK(again[i].support.fpr == rows[i].support.fpr);
  }

  // two workers, same rows in the same order
  sc.jobs = 2;
  std::vector<MetricsRow> parallel = run_sweep(sc);
  for (int i = 0; i < 8; ++i) {
    CHECK(parallel[i].estimator == rows[i].estimator);
    CHECK(parallel[i].err.frobenius == rows[i].err.frobenius);
  }
}

TEST_CASE("sweep failure handling", "[harness]") {
  SweepConfig sc;
  sc.model.family = ModelSpec::Family::AR1;
  sc.model.m = 5;
  sc.model.r = 0.4;
  sc.n = 25;
  sc.seeds = {3};
  sc.lambda_grid = {0.1};

  // prox step 1/rho outside the mcp window: every cell errors, sweep survives
  EstimatorSpec bad;
  bad.id = "bad";
  bad.penalty.kind = PenaltyKind::MCP;
  bad.penalty.a = 2.0;
  bad.penalty.lambda = 0.1;
  bad.solver.rho = 0.4;
  bad.radius = 5.0;
  // a healthy one runs alongside
  EstimatorSpec ok;
  ok.id = "ok";
  ok.penalty.lambda = 0.1;
  ok.radius = 5.0;
  sc.estimators = {bad, ok};

  std::vector<MetricsRow> rows = run_sweep(sc);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].status.rfind("error:", 0) == 0);
  CHECK(rows[1].status == "ok");

  // iteration starvation shows up as no_convergence, not an error
  EstimatorSpec starved = ok;
  starved.id = "starved";
  starved.solver.max_iter = 1;
  starved.solver.tol = 1e-14;
  sc.estimators = {starved};
  rows = run_sweep(sc);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].status == "no_convergence");
}
