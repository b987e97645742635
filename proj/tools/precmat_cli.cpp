// Command-line toolkit around the precmat headers: simulate datasets,
// estimate precision matrices, sweep estimator grids, tune lambda, export
// association graphs from vote tables, and inspect surrogate spectra.
//
// Every command reads one JSON config, writes its artifacts into --out, and
// leaves a manifest.json recording command, config digest, seeds, inputs and
// outputs.  Exit codes: 0 ok, 2 usage/config/input error, 3 numerical
// failure.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "precmat/dataset_io.hpp"
#include "precmat/graph_export.hpp"
#include "precmat/precmat.hpp"

namespace fs = std::filesystem;
using precmat::Json;

namespace {

// ---------------------------------------------------------------------------
// Small utilities
// ---------------------------------------------------------------------------

std::string fnv1a64_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw precmat::InputError("cannot read config " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw precmat::InputError(path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw precmat::InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

std::vector<std::string> read_label_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw precmat::InputError("cannot read " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

// Shared flag/config state for one invocation.
struct CliArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
};

struct RunRecord {
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

void write_manifest(const CliArgs& args, const std::string& command, const Json& config,
                    const RunRecord& rec, double wall_sec) {
  Json m;
  m["command"] = command;
  m["config_digest"] = "fnv1a64:" + fnv1a64_hex(config.dump());
  m["seeds"] = rec.seeds;
  m["inputs"] = rec.inputs;
  m["outputs"] = rec.outputs;
  m["wall_clock_sec"] = wall_sec;
  m["version"] = precmat::kVersion;
  write_json_file((fs::path(args.out_dir) / "manifest.json").string(), m);
}

Json spectrum_json(const precmat::SpectrumStats& s) {
  Json j;
  j["min_eig"] = s.min_eig;
  j["max_eig"] = s.max_eig;
  j["max_eig_projected"] = s.max_eig_projected;
  j["sum_negative"] = s.sum_negative;
  j["count_negative"] = s.count_negative;
  return j;
}

Json report_json(const precmat::EstimateResult& res, double lambda, double radius) {
  Json j;
  j["variant"] = precmat::to_string(res.variant);
  j["lambda"] = lambda;
  j["radius"] = radius;
  j["converged"] = precmat::estimate_converged(res);
  if (res.variant == precmat::EstimatorVariant::Nodewise) {
    Json nodes = Json::array();
    for (const auto& nr : res.node_reports)
      nodes.push_back(Json{{"iterations", nr.iterations}, {"converged", nr.converged}});
    j["node_reports"] = nodes;
  } else {
    j["iterations"] = res.report.iterations;
    j["diverged"] = res.report.diverged;
    j["final_relative_change"] = res.report.final_relative_change;
    j["final_primal_residual"] = res.report.final_primal_residual;
    j["warnings"] = res.report.warnings;
    if (res.variant == precmat::EstimatorVariant::ProjGlasso)
      j["proj_radius"] = res.proj_radius;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Input loading shared by estimate / tune / spectrum / bundle sweeps
// ---------------------------------------------------------------------------

struct InputData {
  precmat::MaskedData data;  // always populated (complete data => all-observed)
  precmat::SymmetricMatrix gamma;
  std::optional<precmat::SymmetricMatrix> theta_star;
  std::uint64_t seed = 0;  // from bundle meta when present
  std::vector<std::string> files;
};

precmat::SymmetricMatrix gamma_for(const std::string& kind, const precmat::MaskedData& data,
                                   double trace_b, bool center) {
  if (kind == "missing") return precmat::missing_data_gamma(data);
  if (kind == "kron_sum") {
    if (!data.observed.all())
      throw precmat::InputError("kron-sum surrogate requires fully observed data");
    return precmat::kron_sum_gamma(data.x, trace_b);
  }
  if (kind == "sample") {
    if (!data.observed.all())
      throw precmat::InputError("sample covariance requires fully observed data");
    return precmat::sample_covariance(data.x, center);
  }
  throw precmat::ConfigError("unknown surrogate '" + kind +
                             "' (expected missing | kron_sum | sample)");
}

InputData load_input(const Json& cfg) {
  if (!cfg.contains("data")) throw precmat::ConfigError("config needs a 'data' path");
  const std::string path = cfg.at("data").get<std::string>();
  const bool center = precmat::cfg::get_or(cfg, "center", false);
  InputData in;

  if (fs::is_directory(path)) {
    precmat::LoadedBundle b = precmat::read_bundle(path);
    in.files.push_back((fs::path(path) / "data.csv").string());
    std::string kind = b.noise_type == "none" ? "sample" : b.noise_type;
    if (cfg.contains("surrogate")) kind = cfg.at("surrogate").get<std::string>();
    double trace_b = precmat::cfg::get_or(cfg, "trace_b", b.trace_b);
    in.gamma = gamma_for(kind, b.data, trace_b, center);
    in.data = std::move(b.data);
    in.theta_star = std::move(b.theta_star);
    if (b.meta.contains("seed")) in.seed = b.meta["seed"].get<std::uint64_t>();
    return in;
  }

  if (!fs::exists(path)) throw precmat::InputError("no such data path: " + path);
  if (!cfg.contains("surrogate"))
    throw precmat::ConfigError(
        "raw CSV input needs 'surrogate': missing | kron_sum | sample");
  const std::string kind = cfg.at("surrogate").get<std::string>();
  precmat::Table t = precmat::read_table(path, precmat::cfg::get_or(cfg, "header", false));
  in.files.push_back(path);

  if (kind == "missing" && cfg.contains("zeta")) {
    const Json& z = cfg.at("zeta");
    if (!z.is_array() || z.size() != static_cast<std::size_t>(t.cols()))
      throw precmat::ConfigError("'zeta' must list one frequency per column");
    Eigen::VectorXd zeta(t.cols());
    for (Eigen::Index j = 0; j < t.cols(); ++j)
      zeta(j) = z[static_cast<std::size_t>(j)].get<double>();
    in.data = precmat::MaskedData::with_known_zeta(std::move(t.values), std::move(t.observed),
                                                   std::move(zeta));
  } else {
    in.data =
        precmat::MaskedData::with_estimated_zeta(std::move(t.values), std::move(t.observed));
  }
  in.gamma = gamma_for(kind, in.data, precmat::cfg::get_or(cfg, "trace_b", 0.0), center);
  return in;
}

// Resolved estimator ready to run: spec + per-node radii + lambda.
struct PreparedEstimator {
  precmat::EstimatorSpec spec;
  Eigen::VectorXd radii;
};

PreparedEstimator prepare_estimator(const Json& cfg, int m,
                                    const precmat::SymmetricMatrix* theta_star) {
  if (!cfg.contains("estimator")) throw precmat::ConfigError("config needs an 'estimator'");
  PreparedEstimator p;
  p.spec = precmat::estimator_from_json(cfg.at("estimator"));
  p.radii = precmat::resolve_radii(p.spec, m, theta_star);
  return p;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_simulate(const CliArgs& args, const Json& cfg, RunRecord& rec) {
  precmat::ModelSpec model = precmat::model_from_json(cfg.at("model"));
  precmat::NoiseSpec noise =
      cfg.contains("noise") ? precmat::noise_from_json(cfg.at("noise")) : precmat::NoiseSpec{};
  int n = static_cast<int>(precmat::cfg::require_num(cfg, "n", "simulate"));
  std::uint64_t seed = args.seed ? *args.seed
                                 : static_cast<std::uint64_t>(
                                       precmat::cfg::get_or(cfg, "seed", 0.0));
  precmat::GeneratedDataset ds = precmat::generate(model, n, noise, seed);
  precmat::write_bundle(args.out_dir, ds, model);
  rec.seeds.push_back(seed);
  for (const char* f : {"data.csv", "mask.csv", "A.csv", "theta_star.csv", "meta.json"})
    rec.outputs.push_back((fs::path(args.out_dir) / f).string());
  std::cerr << "simulate: wrote " << ds.data.n() << " x " << ds.data.m() << " bundle to "
            << args.out_dir << "\n";
  return 0;
}

int cmd_estimate(const CliArgs& args, const Json& cfg, RunRecord& rec) {
  InputData in = load_input(cfg);
  rec.inputs.insert(rec.inputs.end(), in.files.begin(), in.files.end());
  PreparedEstimator est = prepare_estimator(
      cfg, in.gamma.dim(), in.theta_star ? &*in.theta_star : nullptr);
  const double lambda = est.spec.penalty.lambda;

  const std::string report_path = (fs::path(args.out_dir) / "report.json").string();
  precmat::EstimateResult res;
  try {
    res = precmat::run_estimator(est.spec, in.gamma, lambda, est.radii);
  } catch (const precmat::NumericalError& e) {
    Json rj;
    rj["variant"] = precmat::to_string(est.spec.variant);
    rj["lambda"] = lambda;
    rj["converged"] = false;
    rj["error"] = e.what();
    write_json_file(report_path, rj);
    rec.outputs.push_back(report_path);
    std::cerr << "estimate: numerical failure: " << e.what() << "\n";
    return 3;
  }

  const std::string theta_path = (fs::path(args.out_dir) / "theta_hat.csv").string();
  precmat::write_matrix_csv(theta_path, res.theta_hat.mat());
  Json rj = report_json(res, lambda, est.radii(0));
  if (!in.data.warnings.empty()) rj["input_warnings"] = in.data.warnings;
  write_json_file(report_path, rj);
  const std::string spec_path = (fs::path(args.out_dir) / "spectrum.json").string();
  write_json_file(spec_path, spectrum_json(precmat::spectrum_stats(in.gamma)));
  rec.outputs.insert(rec.outputs.end(), {theta_path, report_path, spec_path});

  std::cerr << "estimate: " << est.spec.id << " lambda=" << lambda
            << (precmat::estimate_converged(res) ? " converged" : " did NOT converge") << "\n";
  return 0;
}

// Expand a top-level "R_grid" into one estimator copy per radius so every
// (estimator, lambda, R, seed) cell gets its own row.
Json expand_r_grid(const Json& cfg) {
  if (!cfg.contains("R_grid")) return cfg;
  const Json& grid = cfg.at("R_grid");
  if (!grid.is_array() || grid.empty())
    throw precmat::ConfigError("sweep: 'R_grid' must be a nonempty array");
  Json out = cfg;
  out.erase("R_grid");
  Json ests = Json::array();
  for (const auto& e : cfg.at("estimators")) {
    if (e.contains("R"))
      throw precmat::ConfigError("sweep: estimators must not set 'R' when 'R_grid' is given");
    for (const auto& r : grid) {
      Json c = e;
      c["R"] = r;
      ests.push_back(c);
    }
  }
  out["estimators"] = ests;
  return out;
}

int cmd_sweep(const CliArgs& args, const Json& raw_cfg, RunRecord& rec) {
  Json cfg = expand_r_grid(raw_cfg);
  std::vector<precmat::MetricsRow> rows;

  if (cfg.contains("data")) {
    // One existing dataset; metrics only when its true matrix is on disk.
    InputData in = load_input(cfg);
    rec.inputs.insert(rec.inputs.end(), in.files.begin(), in.files.end());
    std::vector<double> lambdas;
    for (const auto& v : cfg.at("lambda_grid")) lambdas.push_back(v.get<double>());
    if (lambdas.empty()) throw precmat::ConfigError("sweep: need a nonempty 'lambda_grid'");
    double thr = precmat::cfg::get_or(cfg, "support_threshold", 1e-8);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& ej : cfg.at("estimators")) {
      precmat::EstimatorSpec spec = precmat::estimator_from_json(ej);
      Eigen::VectorXd radii;
      std::string radius_err;
      try {
        radii = precmat::resolve_radii(spec, in.gamma.dim(),
                                       in.theta_star ? &*in.theta_star : nullptr);
      } catch (const precmat::Error& e) {
        radius_err = e.what();
      }
      for (double lam : lambdas) {
        precmat::MetricsRow row;
        row.estimator = spec.id;
        row.lambda = lam;
        row.seed = in.seed;
        row.radius = radius_err.empty() ? radii(0) : 0.0;
        if (!radius_err.empty()) {
          row.status = "error:" + radius_err;
        } else {
          try {
            precmat::EstimateResult res = precmat::run_estimator(spec, in.gamma, lam, radii);
            if (!precmat::estimate_converged(res)) row.status = "no_convergence";
            if (in.theta_star) {
              row.err = precmat::relative_errors(res.theta_hat, *in.theta_star);
              row.support = precmat::support_metrics(res.theta_hat, *in.theta_star, thr);
            } else {
              row.err = {nan, nan, nan};
              row.support.fpr = row.support.fnr = row.support.fpr_plus_fnr = nan;
            }
          } catch (const precmat::Error& e) {
            row.status = std::string("error:") + e.what();
          }
        }
        rows.push_back(std::move(row));
      }
    }
  } else {
    precmat::SweepConfig sc = precmat::sweep_from_json(cfg);
    if (args.jobs) sc.jobs = *args.jobs;
    if (args.seed) sc.seeds = {*args.seed};
    rec.seeds = sc.seeds;
    rows = precmat::run_sweep(sc, [](const std::string& msg) { std::cerr << msg << "\n"; });
  }

  const std::string metrics_path = (fs::path(args.out_dir) / "metrics.csv").string();
  std::ofstream out(metrics_path);
  if (!out) throw precmat::InputError("cannot write " + metrics_path);
  out << precmat::metrics_csv_header() << '\n';
  for (const auto& r : rows) out << precmat::to_csv(r) << '\n';
  out.close();
  rec.outputs.push_back(metrics_path);
  std::cerr << "sweep: " << rows.size() << " rows -> " << metrics_path << "\n";
  return 0;
}

int cmd_tune(const CliArgs& args, const Json& cfg, RunRecord& rec) {
  InputData in = load_input(cfg);
  rec.inputs.insert(rec.inputs.end(), in.files.begin(), in.files.end());
  PreparedEstimator est = prepare_estimator(
      cfg, in.gamma.dim(), in.theta_star ? &*in.theta_star : nullptr);

  std::vector<double> grid;
  if (cfg.contains("lambda_grid"))
    for (const auto& v : cfg.at("lambda_grid")) grid.push_back(v.get<double>());
  if (grid.empty()) throw precmat::ConfigError("tune: need a nonempty 'lambda_grid'");
  const std::string criterion = precmat::cfg::get_or<std::string>(cfg, "criterion", "bic");

  precmat::FitFunction fit = [&](const precmat::SymmetricMatrix& g, double lam) {
    return precmat::run_estimator(est.spec, g, lam, est.radii);
  };

  precmat::TuningResult tr;
  if (criterion == "bic") {
    tr = precmat::tune_bic(in.data, grid, fit,
                           precmat::cfg::get_or(cfg, "support_threshold", 1e-8));
  } else if (criterion == "cv") {
    int k = static_cast<int>(precmat::cfg::get_or(cfg, "K", 5.0));
    std::uint64_t seed = args.seed ? *args.seed
                                   : static_cast<std::uint64_t>(
                                         precmat::cfg::get_or(cfg, "seed", 0.0));
    rec.seeds.push_back(seed);
    tr = precmat::cross_validate(in.data, grid, k, fit, seed);
  } else {
    throw precmat::ConfigError("tune: criterion must be 'bic' or 'cv'");
  }

  Json tj;
  tj["criterion"] = tr.criterion;
  tj["lambda_grid"] = tr.grid;
  tj["scores"] = tr.scores;  // -inf (failed lambda) serializes as null
  tj["chosen_lambda"] = tr.chosen_lambda;
  tj["chosen_index"] = tr.chosen_index;
  tj["warnings"] = tr.warnings;
  const std::string tune_path = (fs::path(args.out_dir) / "tuning.json").string();
  write_json_file(tune_path, tj);
  rec.outputs.push_back(tune_path);

  // Refit on the full data at the winner and ship the estimate alongside.
  precmat::EstimateResult res = fit(in.gamma, tr.chosen_lambda);
  const std::string theta_path = (fs::path(args.out_dir) / "theta_hat.csv").string();
  precmat::write_matrix_csv(theta_path, res.theta_hat.mat());
  const std::string report_path = (fs::path(args.out_dir) / "report.json").string();
  write_json_file(report_path, report_json(res, tr.chosen_lambda, est.radii(0)));
  rec.outputs.insert(rec.outputs.end(), {theta_path, report_path});
  std::cerr << "tune: " << criterion << " chose lambda=" << tr.chosen_lambda << "\n";
  return 0;
}

int cmd_graph(const CliArgs& args, const Json& cfg, RunRecord& rec) {
  if (!cfg.contains("votes")) throw precmat::ConfigError("graph: config needs a 'votes' path");
  const std::string votes_path = cfg.at("votes").get<std::string>();
  precmat::VoteMatrix votes =
      precmat::read_votes_csv(votes_path, precmat::cfg::get_or(cfg, "header", false));
  rec.inputs.push_back(votes_path);
  if (precmat::cfg::get_or(cfg, "transpose", false)) precmat::transpose_votes(votes);

  std::vector<std::string> party;
  if (cfg.contains("party")) {
    const std::string party_path = cfg.at("party").get<std::string>();
    party = read_label_lines(party_path);
    rec.inputs.push_back(party_path);
    if (party.size() != static_cast<std::size_t>(votes.x.cols()))
      throw precmat::InputError("graph: party file has " + std::to_string(party.size()) +
                                " labels for " + std::to_string(votes.x.cols()) + " subjects");
  }

  double min_obs = precmat::cfg::get_or(cfg, "min_obs", 0.0);
  if (min_obs > 0.0) {
    std::vector<int> kept = precmat::drop_sparse_columns(votes, min_obs);
    if (!party.empty()) {
      std::vector<std::string> filtered;
      for (int j : kept) filtered.push_back(party[static_cast<std::size_t>(j)]);
      party = std::move(filtered);
    }
  }
  if (precmat::cfg::get_or(cfg, "drop_unanimous", true)) {
    int dropped = precmat::drop_unanimous_votes(votes);
    if (dropped > 0) std::cerr << "graph: dropped " << dropped << " uninformative ballots\n";
  }
  if (votes.x.rows() < 1 || votes.x.cols() < 2)
    throw precmat::InputError("graph: need at least one ballot and two subjects after filtering");

  if (precmat::cfg::get_or(cfg, "demean_by_party", false)) {
    std::vector<int> groups;
    if (!party.empty()) {
      std::vector<std::string> seen;
      for (const auto& label : party) {
        auto it = std::find(seen.begin(), seen.end(), label);
        if (it == seen.end()) {
          seen.push_back(label);
          groups.push_back(static_cast<int>(seen.size()) - 1);
        } else {
          groups.push_back(static_cast<int>(it - seen.begin()));
        }
      }
    }
    precmat::demean_votes_by_group(votes, groups);
  }

  precmat::MaskedData data =
      precmat::MaskedData::with_estimated_zeta(std::move(votes.x), std::move(votes.observed));
  precmat::SymmetricMatrix gamma = precmat::missing_data_gamma(data);

  Json est_cfg = cfg;
  PreparedEstimator est = prepare_estimator(est_cfg, gamma.dim(), nullptr);
  precmat::EstimateResult res =
      precmat::run_estimator(est.spec, gamma, est.spec.penalty.lambda, est.radii);

  precmat::SymmetricMatrix pc = precmat::partial_correlations(res.theta_hat);
  double threshold = precmat::cfg::get_or(cfg, "threshold", 0.04);
  std::vector<precmat::GraphEdge> edges = precmat::extract_edges(pc, threshold);
  precmat::sort_edges_ranked(edges);

  const std::string dot_path = (fs::path(args.out_dir) / "graph.dot").string();
  const std::string edges_path = (fs::path(args.out_dir) / "edges.csv").string();
  const std::string theta_path = (fs::path(args.out_dir) / "theta_hat.csv").string();
  precmat::write_dot(dot_path, gamma.dim(), edges, votes.names, party);
  precmat::write_edges_csv(edges_path, edges, votes.names);
  precmat::write_matrix_csv(theta_path, res.theta_hat.mat());
  rec.outputs.insert(rec.outputs.end(), {dot_path, edges_path, theta_path});
  std::cerr << "graph: " << edges.size() << " edges above |pc| > " << threshold << "\n";
  return 0;
}

int cmd_spectrum(const CliArgs& args, const Json& cfg, RunRecord& rec) {
  precmat::SymmetricMatrix gamma;
  if (cfg.contains("matrix")) {
    const std::string path = cfg.at("matrix").get<std::string>();
    gamma = precmat::read_symmetric_csv(path, precmat::cfg::get_or(cfg, "header", false));
    rec.inputs.push_back(path);
  } else {
    InputData in = load_input(cfg);
    rec.inputs.insert(rec.inputs.end(), in.files.begin(), in.files.end());
    gamma = std::move(in.gamma);
  }
  precmat::SpectrumStats s =
      precmat::spectrum_stats(gamma, precmat::cfg::get_or(cfg, "proj_tol", 1e-3));
  const std::string path = (fs::path(args.out_dir) / "spectrum.json").string();
  write_json_file(path, spectrum_json(s));
  rec.outputs.push_back(path);
  std::cerr << "spectrum: min_eig=" << s.min_eig << " count_negative=" << s.count_negative
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse precision estimation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", precmat::kVersion);

  CliArgs args;
  std::uint64_t seed_flag = 0;
  int jobs_flag = 0;

  struct Sub {
    const char* name;
    const char* desc;
    int (*run)(const CliArgs&, const Json&, RunRecord&);
  };
  const Sub subs[] = {
      {"simulate", "generate a synthetic dataset bundle", cmd_simulate},
      {"estimate", "fit one estimator and write theta_hat / report / spectrum", cmd_estimate},
      {"sweep", "run an estimator x lambda x R x seed grid to metrics.csv", cmd_sweep},
      {"tune", "pick lambda by BIC or cross-validation, then refit", cmd_tune},
      {"graph", "estimate an association graph from a vote table", cmd_graph},
      {"spectrum", "report surrogate eigenvalue diagnostics", cmd_spectrum},
  };
  for (const Sub& s : subs) {
    CLI::App* c = app.add_subcommand(s.name, s.desc);
    c->add_option("--config", args.config_path, "JSON config file")->required();
    c->add_option("--out", args.out_dir, "output directory")->required();
    auto* so = c->add_option("--seed", seed_flag, "seed override");
    auto* jo = c->add_option("--jobs", jobs_flag, "worker threads (sweep only)");
    c->callback([&args, &seed_flag, &jobs_flag, so, jo]() {
      if (so->count() > 0) args.seed = seed_flag;
      if (jo->count() > 0) args.jobs = jobs_flag;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const Sub* chosen = nullptr;
  for (const Sub& s : subs)
    if (app.got_subcommand(s.name)) chosen = &s;
  if (!chosen) return 2;

  try {
    Json cfg = load_config(args.config_path);
    fs::create_directories(args.out_dir);
    RunRecord rec;
    rec.inputs.push_back(args.config_path);
    auto t0 = std::chrono::steady_clock::now();
    int rc = chosen->run(args, cfg, rec);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(args, chosen->name, cfg, rec, wall);
    return rc;
  } catch (const precmat::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const precmat::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
