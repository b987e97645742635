#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "precmat/csv.hpp"
#include "precmat/errors.hpp"
#include "precmat/harness.hpp"
#include "precmat/sim_models.hpp"

namespace precmat {

// On-disk dataset bundle:
//   data.csv        n x m, NA for unobserved cells
//   mask.csv        n x m of 0/1
//   A.csv           true covariance
//   theta_star.csv  its inverse
//   meta.json       model, noise, seed, n, m
inline void write_bundle(const std::string& dir, const GeneratedDataset& ds,
                         const ModelSpec& model_spec) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_table_csv(dir + "/data.csv", ds.data.x, ds.data.observed);
  write_mask_csv(dir + "/mask.csv", ds.data.observed);
  write_matrix_csv(dir + "/A.csv", ds.model.a.mat());
  write_matrix_csv(dir + "/theta_star.csv", ds.model.theta_star.mat());

  Json meta;
  meta["n"] = ds.data.n();
  meta["m"] = ds.data.m();
  meta["seed"] = ds.seed;
  meta["model"] = model_to_json(model_spec);
  meta["noise_type"] = ds.noise_type;
  if (ds.noise_type == "missing") {
    Json z = Json::array();
    for (Eigen::Index j = 0; j < ds.zeta.size(); ++j) z.push_back(ds.zeta(j));
    meta["zeta"] = z;
  } else if (ds.noise_type == "kron_sum") {
    meta["tau_b"] = ds.tau_b;
    meta["trace_b"] = ds.trace_b;
  }
  std::ofstream out(dir + "/meta.json");
  if (!out) throw InputError("cannot write " + dir + "/meta.json");
  out << meta.dump(2) << '\n';
}

struct LoadedBundle {
  MaskedData data;
  std::optional<SymmetricMatrix> a;
  std::optional<SymmetricMatrix> theta_star;
  Json meta;
  std::string noise_type = "missing";
  double trace_b = 0.0;
};

inline LoadedBundle read_bundle(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::exists(dir + "/data.csv")) throw InputError(dir + ": no data.csv found");
  LoadedBundle b;
  Table t = read_table(dir + "/data.csv");

  BoolArray observed = t.observed;
  if (fs::exists(dir + "/mask.csv")) {
    Table mk = read_table(dir + "/mask.csv");
    if (mk.rows() != t.rows() || mk.cols() != t.cols())
      throw InputError(dir + ": mask.csv shape does not match data.csv");
    for (Eigen::Index i = 0; i < mk.rows(); ++i)
      for (Eigen::Index j = 0; j < mk.cols(); ++j) observed(i, j) = mk.values(i, j) != 0.0;
  }

  std::optional<Eigen::VectorXd> zeta;
  if (fs::exists(dir + "/meta.json")) {
    std::ifstream in(dir + "/meta.json");
    try {
      in >> b.meta;
    } catch (const std::exception& e) {
      throw InputError(dir + "/meta.json: " + e.what());
    }
    if (b.meta.contains("noise_type")) b.noise_type = b.meta["noise_type"].get<std::string>();
    if (b.meta.contains("trace_b")) b.trace_b = b.meta["trace_b"].get<double>();
    if (b.meta.contains("zeta")) {
      const Json& z = b.meta["zeta"];
      Eigen::VectorXd zv(static_cast<Eigen::Index>(z.size()));
      for (std::size_t j = 0; j < z.size(); ++j) zv(static_cast<Eigen::Index>(j)) = z[j].get<double>();
      zeta = zv;
    }
  }

  if (zeta) {
    b.data = MaskedData::with_known_zeta(t.values, observed, *zeta);
  } else {
    b.data = MaskedData::with_estimated_zeta(t.values, observed);
  }

  if (fs::exists(dir + "/A.csv")) b.a = read_symmetric_csv(dir + "/A.csv");
  if (fs::exists(dir + "/theta_star.csv")) b.theta_star = read_symmetric_csv(dir + "/theta_star.csv");
  return b;
}

}  // namespace precmat
