#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "precmat/admm.hpp"
#include "precmat/errors.hpp"
#include "precmat/estimators.hpp"
#include "precmat/evaluation.hpp"
#include "precmat/sim_models.hpp"
#include "precmat/tuning.hpp"

namespace precmat {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// JSON <-> configuration structs
// ---------------------------------------------------------------------------

struct PenaltySettings {
  PenaltyKind kind = PenaltyKind::L1;
  double lambda = 0.1;
  double a = 3.7;
  bool penalize_diagonal = true;

  Penalty make() const { return make(lambda); }
  Penalty make(double lam) const {
    switch (kind) {
      case PenaltyKind::L1: return Penalty::l1(lam, penalize_diagonal);
      case PenaltyKind::SCAD: return Penalty::scad(lam, a, penalize_diagonal);
      case PenaltyKind::MCP: return Penalty::mcp(lam, a, penalize_diagonal);
    }
    throw ConfigError("penalty: unknown kind");
  }
};

namespace cfg {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

inline double require_num(const Json& j, const char* key, const char* ctx) {
  if (!j.contains(key))
    throw ConfigError(std::string(ctx) + ": missing required field '" + key + "'");
  if (!j.at(key).is_number())
    throw ConfigError(std::string(ctx) + ": field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace cfg

inline PenaltySettings penalty_from_json(const Json& j) {
  PenaltySettings p;
  std::string kind = cfg::get_or<std::string>(j, "kind", "l1");
  if (kind == "l1") p.kind = PenaltyKind::L1;
  else if (kind == "scad") p.kind = PenaltyKind::SCAD;
  else if (kind == "mcp") p.kind = PenaltyKind::MCP;
  else throw ConfigError("penalty: unknown kind '" + kind + "'");
  p.lambda = cfg::require_num(j, "lambda", "penalty");
  if (j.contains("a")) p.a = j.at("a").get<double>();
  else if (p.kind == PenaltyKind::MCP)
    throw ConfigError("penalty: mcp requires an explicit 'a'");
  p.penalize_diagonal = cfg::get_or(j, "penalize_diagonal", true);
  p.make();  // validate now rather than at first use
  return p;
}

inline Json penalty_to_json(const PenaltySettings& p) {
  Json j{{"kind", to_string(p.kind)}, {"lambda", p.lambda},
         {"penalize_diagonal", p.penalize_diagonal}};
  if (p.kind != PenaltyKind::L1) j["a"] = p.a;
  return j;
}

inline AdmmConfig solver_from_json(const Json& j) {
  AdmmConfig c;
  c.rho = cfg::get_or(j, "rho", 12.0);
  if (j.contains("R")) c.radius = j.at("R").get<double>();
  c.max_iter = cfg::get_or(j, "max_iter", 5000);
  c.tol = cfg::get_or(j, "tol", 5e-5);
  c.validate();
  return c;
}

inline SideConstraint::Kind constraint_from_json(const Json& j) {
  std::string c = cfg::get_or<std::string>(j, "constraint", "spectral");
  if (c == "spectral") return SideConstraint::Kind::SpectralNorm;
  if (c == "l1") return SideConstraint::Kind::ElementwiseL1;
  throw ConfigError("solver: unknown constraint '" + c + "'");
}

inline ModelSpec model_from_json(const Json& j) {
  ModelSpec s;
  std::string fam = cfg::get_or<std::string>(j, "family", "");
  if (fam == "ar1") s.family = ModelSpec::Family::AR1;
  else if (fam == "star_block") s.family = ModelSpec::Family::StarBlock;
  else if (fam == "er") s.family = ModelSpec::Family::ErdosRenyi;
  else throw ConfigError("model: unknown family '" + fam + "'");
  s.m = static_cast<int>(cfg::get_or(j, "m", 0.0));
  if (s.family != ModelSpec::Family::ErdosRenyi) s.r = cfg::require_num(j, "r", "model");
  if (s.family == ModelSpec::Family::StarBlock)
    s.block_size = static_cast<int>(cfg::require_num(j, "block_size", "model"));
  if (s.family == ModelSpec::Family::ErdosRenyi)
    s.d = static_cast<long>(cfg::require_num(j, "d", "model"));
  return s;
}

inline Json model_to_json(const ModelSpec& s) {
  Json j;
  switch (s.family) {
    case ModelSpec::Family::AR1: j = {{"family", "ar1"}, {"m", s.m}, {"r", s.r}}; break;
    case ModelSpec::Family::StarBlock:
      j = {{"family", "star_block"}, {"m", s.m}, {"r", s.r}, {"block_size", s.block_size}};
      break;
    case ModelSpec::Family::ErdosRenyi:
      j = {{"family", "er"}, {"m", s.m}, {"d", s.d}};
      break;
  }
  return j;
}

inline NoiseSpec noise_from_json(const Json& j) {
  NoiseSpec s;
  std::string type = cfg::get_or<std::string>(j, "type", "none");
  if (type == "missing") {
    s.type = NoiseSpec::Type::Missing;
    if (!j.contains("zeta")) throw ConfigError("noise: missing-data type requires 'zeta'");
    const Json& z = j.at("zeta");
    if (z.is_number()) {
      s.zeta.resize(1);
      s.zeta(0) = z.get<double>();
    } else if (z.is_array()) {
      s.zeta.resize(static_cast<Eigen::Index>(z.size()));
      for (std::size_t i = 0; i < z.size(); ++i) s.zeta(static_cast<Eigen::Index>(i)) = z[i].get<double>();
    } else {
      throw ConfigError("noise: 'zeta' must be a number or array");
    }
  } else if (type == "kron_sum") {
    s.type = NoiseSpec::Type::KronSum;
    s.tau_b = cfg::require_num(j, "tau_b", "noise");
    if (!j.contains("b")) throw ConfigError("noise: kron_sum requires a 'b' model spec");
    s.b_spec = model_from_json(j.at("b"));
  } else if (type == "none") {
    s.type = NoiseSpec::Type::None;
  } else {
    throw ConfigError("noise: unknown type '" + type + "'");
  }
  return s;
}

inline Json noise_to_json(const NoiseSpec& s) {
  switch (s.type) {
    case NoiseSpec::Type::Missing: {
      Json j{{"type", "missing"}};
      if (s.zeta.size() == 1) j["zeta"] = s.zeta(0);
      else {
        Json arr = Json::array();
        for (Eigen::Index i = 0; i < s.zeta.size(); ++i) arr.push_back(s.zeta(i));
        j["zeta"] = arr;
      }
      return j;
    }
    case NoiseSpec::Type::KronSum:
      return Json{{"type", "kron_sum"}, {"tau_b", s.tau_b}, {"b", model_to_json(s.b_spec)}};
    case NoiseSpec::Type::None: return Json{{"type", "none"}};
  }
  throw ConfigError("noise: unknown type");
}

// ---------------------------------------------------------------------------
// Estimator specification and dispatch
// ---------------------------------------------------------------------------

struct EstimatorSpec {
  std::string id;  // row label in metrics tables
  EstimatorVariant variant = EstimatorVariant::NonprojGlasso;
  PenaltySettings penalty;
  // Side-constraint radius: either an absolute value, or a multiple of the
  // oracle (spectral norm of theta* for the ADMM variants, per-node l1 norms
  // for nodewise).  Exactly one must be set.
  double radius = std::numeric_limits<double>::quiet_NaN();
  double oracle_scale = std::numeric_limits<double>::quiet_NaN();
  AdmmConfig solver;
  SideConstraint::Kind constraint = SideConstraint::Kind::SpectralNorm;
  NodewiseConfig nodewise_cfg;
  double proj_tol = 1e-4;
};

inline EstimatorSpec estimator_from_json(const Json& j) {
  EstimatorSpec s;
  std::string var = cfg::get_or<std::string>(j, "variant", "nonproj");
  if (var == "nonproj") s.variant = EstimatorVariant::NonprojGlasso;
  else if (var == "proj") s.variant = EstimatorVariant::ProjGlasso;
  else if (var == "nodewise") s.variant = EstimatorVariant::Nodewise;
  else throw ConfigError("estimator: unknown variant '" + var + "'");
  if (!j.contains("penalty")) throw ConfigError("estimator: missing 'penalty'");
  s.penalty = penalty_from_json(j.at("penalty"));
  if (s.variant == EstimatorVariant::Nodewise && s.penalty.kind != PenaltyKind::L1)
    throw ConfigError("estimator: nodewise supports only the l1 penalty");

  if (j.contains("R")) {
    const Json& r = j.at("R");
    if (r.is_number()) {
      s.radius = r.get<double>();
    } else if (r.is_object() && r.contains("oracle_scale")) {
      s.oracle_scale = r.at("oracle_scale").get<double>();
    } else if (r.is_object() && r.contains("per_node_scale")) {
      s.oracle_scale = r.at("per_node_scale").get<double>();
    } else {
      throw ConfigError("estimator: 'R' must be a number or {oracle_scale|per_node_scale: x}");
    }
  } else {
    throw ConfigError("estimator: missing 'R'");
  }
  if (j.contains("solver")) {
    s.solver = solver_from_json(j.at("solver"));
    s.constraint = constraint_from_json(j.at("solver"));
  }
  if (j.contains("nodewise")) {
    const Json& nw = j.at("nodewise");
    s.nodewise_cfg.max_iter = static_cast<int>(cfg::get_or(nw, "max_iter", 10000.0));
    s.nodewise_cfg.tol = cfg::get_or(nw, "tol", 1e-7);
  }
  s.proj_tol = cfg::get_or(j, "proj_tol", 1e-4);
  if (j.contains("id")) s.id = j.at("id").get<std::string>();
  if (s.id.empty())
    s.id = std::string(to_string(s.variant)) +
           (s.variant == EstimatorVariant::Nodewise ? "" : std::string("_") + to_string(s.penalty.kind));
  return s;
}

// Radius actually used for a run: absolute, or scaled oracle.
inline Eigen::VectorXd resolve_radii(const EstimatorSpec& spec, int m,
                                     const SymmetricMatrix* theta_star) {
  const bool has_abs = std::isfinite(spec.radius);
  const bool has_scale = std::isfinite(spec.oracle_scale);
  if (has_abs == has_scale)
    throw ConfigError("estimator '" + spec.id + "': exactly one of absolute R or oracle scale");
  if (has_abs) return Eigen::VectorXd::Constant(m, spec.radius);
  if (!theta_star)
    throw ConfigError("estimator '" + spec.id + "': oracle-scaled R needs the true matrix");
  if (spec.variant == EstimatorVariant::Nodewise)
    return nodewise_oracle_radii(*theta_star, spec.oracle_scale);
  return Eigen::VectorXd::Constant(m, spec.oracle_scale * norms(*theta_star).spectral);
}

// One estimator run at one lambda.  `sub_norms` is the optional nodewise
// cache; radii must already be resolved.
inline EstimateResult run_estimator(const EstimatorSpec& spec, const SymmetricMatrix& gamma,
                                    double lambda, const Eigen::VectorXd& radii,
                                    const Eigen::VectorXd* sub_norms = nullptr) {
  if (spec.variant == EstimatorVariant::Nodewise) {
    NodewiseConfig cfg = spec.nodewise_cfg;
    if (sub_norms) cfg.sub_norms = *sub_norms;
    return nodewise(gamma, lambda, radii, cfg);
  }
  Penalty pen = spec.penalty.make(lambda);
  AdmmConfig cfg = spec.solver;
  cfg.radius = radii(0);
  if (spec.constraint == SideConstraint::Kind::ElementwiseL1) {
    // General-constraint path; the box repair still applies for "proj".
    EstimateResult res;
    res.variant = spec.variant;
    res.input_spectrum = detail::basic_spectrum(gamma);
    const SymmetricMatrix* input = &gamma;
    SymmetricMatrix repaired;
    if (spec.variant == EstimatorVariant::ProjGlasso && res.input_spectrum.count_negative > 0) {
      auto proj = linf_psd_project_detail(gamma, spec.proj_tol);
      repaired = std::move(proj.projected);
      res.proj_radius = proj.radius;
      input = &repaired;
    }
    SideConstraint sc{SideConstraint::Kind::ElementwiseL1, radii(0)};
    SolveResult sr = solve_general(*input, pen, sc, cfg);
    res.theta_hat = std::move(sr.theta);
    res.report = std::move(sr.report);
    return res;
  }
  return glasso(gamma, pen, cfg, spec.variant, spec.proj_tol);
}

// ---------------------------------------------------------------------------
// Sweep engine
// ---------------------------------------------------------------------------

struct SweepConfig {
  ModelSpec model;
  NoiseSpec noise;
  int n = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> lambda_grid;
  std::vector<EstimatorSpec> estimators;
  double support_threshold = 1e-8;
  int jobs = 1;
};

inline SweepConfig sweep_from_json(const Json& j) {
  SweepConfig s;
  s.model = model_from_json(j.at("model"));
  s.noise = j.contains("noise") ? noise_from_json(j.at("noise")) : NoiseSpec{};
  s.n = static_cast<int>(cfg::require_num(j, "n", "sweep"));
  if (!j.contains("seeds") || !j.at("seeds").is_array() || j.at("seeds").empty())
    throw ConfigError("sweep: need a nonempty 'seeds' array");
  for (const auto& v : j.at("seeds")) s.seeds.push_back(v.get<std::uint64_t>());
  if (!j.contains("lambda_grid") || !j.at("lambda_grid").is_array() || j.at("lambda_grid").empty())
    throw ConfigError("sweep: need a nonempty 'lambda_grid'");
  for (const auto& v : j.at("lambda_grid")) s.lambda_grid.push_back(v.get<double>());
  if (!j.contains("estimators") || !j.at("estimators").is_array() || j.at("estimators").empty())
    throw ConfigError("sweep: need a nonempty 'estimators' array");
  for (const auto& e : j.at("estimators")) s.estimators.push_back(estimator_from_json(e));
  s.support_threshold = cfg::get_or(j, "support_threshold", 1e-8);
  s.jobs = static_cast<int>(cfg::get_or(j, "jobs", 1.0));
  return s;
}

// Every (estimator, lambda, seed) cell; failures become rows with a status
// instead of aborting the sweep.  Row order is estimator-major, then lambda,
// then seed, independent of scheduling.
inline std::vector<MetricsRow> run_sweep(const SweepConfig& sc,
                                         const std::function<void(const std::string&)>& log = {}) {
  if (sc.n < 1) throw ConfigError("sweep: need n >= 1");
  const std::size_t ne = sc.estimators.size(), nl = sc.lambda_grid.size(), ns = sc.seeds.size();
  std::vector<MetricsRow> rows(ne * nl * ns);

  bool any_nodewise = false;
  for (const auto& e : sc.estimators)
    if (e.variant == EstimatorVariant::Nodewise) any_nodewise = true;

  std::mutex mu;
  std::size_t next_seed = 0;
  auto worker = [&]() {
    for (;;) {
      std::size_t si;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next_seed >= ns) return;
        si = next_seed++;
      }
      const std::uint64_t seed = sc.seeds[si];
      GeneratedDataset ds = generate(sc.model, sc.n, sc.noise, seed);
      SymmetricMatrix gamma = surrogate_for(ds);
      Eigen::VectorXd sub_norms;
      if (any_nodewise) sub_norms = nodewise_sub_norms(gamma);

      for (std::size_t ei = 0; ei < ne; ++ei) {
        const EstimatorSpec& spec = sc.estimators[ei];
        Eigen::VectorXd radii;
        std::string radius_err;
        try {
          radii = resolve_radii(spec, ds.model.a.dim(), &ds.model.theta_star);
        } catch (const Error& e) {
          radius_err = e.what();
        }
        for (std::size_t li = 0; li < nl; ++li) {
          MetricsRow row;
          row.estimator = spec.id;
          row.lambda = sc.lambda_grid[li];
          row.seed = seed;
          row.radius = radius_err.empty() ? radii(0) : 0.0;
          if (!radius_err.empty()) {
            row.status = "error:" + radius_err;
          } else {
            try {
              EstimateResult res = run_estimator(spec, gamma, sc.lambda_grid[li], radii,
                                                 any_nodewise ? &sub_norms : nullptr);
              row.err = relative_errors(res.theta_hat, ds.model.theta_star);
              row.support =
                  support_metrics(res.theta_hat, ds.model.theta_star, sc.support_threshold);
              if (!estimate_converged(res)) row.status = "no_convergence";
            } catch (const Error& e) {
              row.status = std::string("error:") + e.what();
            }
          }
          rows[(ei * nl + li) * ns + si] = std::move(row);
        }
      }
      if (log) {
        std::lock_guard<std::mutex> lock(mu);
        log("seed " + std::to_string(seed) + " done");
      }
    }
  };

  int jobs = std::max(1, sc.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

}  // namespace precmat
