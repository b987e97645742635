#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "precmat/cov_inputs.hpp"
#include "precmat/csv.hpp"
#include "precmat/errors.hpp"
#include "precmat/symmetric_matrix.hpp"

namespace precmat {

// P_ij = -theta_ij / sqrt(theta_ii * theta_jj), unit diagonal.  Requires a
// positive diagonal.
inline SymmetricMatrix partial_correlations(const SymmetricMatrix& theta) {
  const int m = theta.dim();
  for (int i = 0; i < m; ++i)
    if (!(theta(i, i) > 0.0))
      throw InputError("partial_correlations: diagonal entry " + std::to_string(i) +
                       " is not positive");
  Eigen::MatrixXd p(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      p(i, j) = i == j ? 1.0 : -theta(i, j) / std::sqrt(theta(i, i) * theta(j, j));
  return SymmetricMatrix(std::move(p));
}

struct GraphEdge {
  int i = 0, j = 0;      // i < j
  double weight = 0.0;   // signed partial correlation
};

// Edges whose |partial correlation| exceeds the display threshold.
inline std::vector<GraphEdge> extract_edges(const SymmetricMatrix& partial_corr,
                                            double threshold) {
  if (!(threshold >= 0.0)) throw ConfigError("extract_edges: need threshold >= 0");
  std::vector<GraphEdge> edges;
  const int m = partial_corr.dim();
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < j; ++i)
      if (std::abs(partial_corr(i, j)) > threshold)
        edges.push_back({i, j, partial_corr(i, j)});
  return edges;
}

// Ranking order used everywhere an edge list is reported: strongest partial
// correlation first (by magnitude), ties broken by ascending (i, j).
inline void sort_edges_ranked(std::vector<GraphEdge>& edges) {
  std::sort(edges.begin(), edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
    double ma = std::abs(a.weight), mb = std::abs(b.weight);
    if (ma != mb) return ma > mb;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
}

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

// Undirected DOT graph; every node is declared so isolated ones still render.
// Optional per-node groups (e.g. party labels) become a color attribute.
inline void write_dot(const std::string& path, int n_nodes, const std::vector<GraphEdge>& edges,
                      const std::vector<std::string>& names = {},
                      const std::vector<std::string>& groups = {}) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "graph precision {\n  node [shape=circle];\n";
  for (int i = 0; i < n_nodes; ++i) {
    out << "  n" << i;
    std::string attrs;
    if (i < static_cast<int>(names.size()) && !names[i].empty())
      attrs += "label=\"" + dot_escape(names[i]) + "\"";
    if (i < static_cast<int>(groups.size()) && !groups[i].empty()) {
      if (!attrs.empty()) attrs += ", ";
      attrs += "group=\"" + dot_escape(groups[i]) + "\"";
    }
    if (!attrs.empty()) out << " [" << attrs << "]";
    out << ";\n";
  }
  char buf[64];
  for (const auto& e : edges) {
    std::snprintf(buf, sizeof buf, "%.6g", e.weight);
    // Color doubles as the sign attribute: green = positive partial
    // correlation, orange = negative.
    out << "  n" << e.i << " -- n" << e.j << " [weight=\"" << buf << "\", color=\""
        << (e.weight >= 0.0 ? "green" : "orange") << "\"];\n";
  }
  out << "}\n";
}

inline void write_edges_csv(const std::string& path, const std::vector<GraphEdge>& edges,
                            const std::vector<std::string>& names = {}) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "i,j,name_i,name_j,partial_correlation\n";
  char buf[64];
  for (const auto& e : edges) {
    std::string ni = e.i < static_cast<int>(names.size()) ? names[e.i] : "";
    std::string nj = e.j < static_cast<int>(names.size()) ? names[e.j] : "";
    std::snprintf(buf, sizeof buf, "%.10g", e.weight);
    out << e.i << ',' << e.j << ',' << ni << ',' << nj << ',' << buf << '\n';
  }
}

// ---------------------------------------------------------------------------
// Vote-matrix ingestion (rows = ballots, columns = subjects)
// ---------------------------------------------------------------------------

struct VoteMatrix {
  Eigen::MatrixXd x;   // +1 / -1, 0 where unobserved
  BoolArray observed;
  std::vector<std::string> names;  // per column; may be empty
};

inline VoteMatrix read_votes_csv(const std::string& path, bool header = false) {
  Table t = read_table(path, header);
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    for (Eigen::Index j = 0; j < t.cols(); ++j)
      if (t.observed(i, j) && t.values(i, j) != 1.0 && t.values(i, j) != -1.0)
        throw InputError(path + ": vote cells must be 1, -1 or NA; got " +
                         std::to_string(t.values(i, j)) + " at row " +
                         std::to_string(i + 1 + (header ? 1 : 0)) + ", column " +
                         std::to_string(j + 1));
  VoteMatrix v;
  v.x = std::move(t.values);
  v.observed = std::move(t.observed);
  v.names = std::move(t.col_names);
  return v;
}

inline void transpose_votes(VoteMatrix& v) {
  v.x = v.x.transpose().eval();
  v.observed = v.observed.transpose().eval();
  v.names.clear();  // names belonged to the old columns
}

// Remove ballots every observed participant agreed on; they carry no
// covariance information.  Returns how many rows were dropped.
inline int drop_unanimous_votes(VoteMatrix& v) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < v.x.rows(); ++i) {
    bool seen = false, unanimous = true;
    double first = 0.0;
    for (Eigen::Index j = 0; j < v.x.cols(); ++j) {
      if (!v.observed(i, j)) continue;
      if (!seen) {
        first = v.x(i, j);
        seen = true;
      } else if (v.x(i, j) != first) {
        unanimous = false;
        break;
      }
    }
    if (seen && !unanimous) keep.push_back(i);
  }
  int dropped = static_cast<int>(v.x.rows()) - static_cast<int>(keep.size());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(keep.size()), v.x.cols());
  BoolArray obs(static_cast<Eigen::Index>(keep.size()), v.x.cols());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    x.row(static_cast<Eigen::Index>(k)) = v.x.row(keep[k]);
    obs.row(static_cast<Eigen::Index>(k)) = v.observed.row(keep[k]);
  }
  v.x = std::move(x);
  v.observed = std::move(obs);
  return dropped;
}

// Drop subjects observed on fewer than `min_obs_frac` of the ballots
// (e.g. members who served partial terms).  Returns the original indices of
// the surviving columns so aligned metadata can be filtered in lockstep.
inline std::vector<int> drop_sparse_columns(VoteMatrix& v, double min_obs_frac) {
  if (!(min_obs_frac >= 0.0 && min_obs_frac <= 1.0))
    throw ConfigError("drop_sparse_columns: need fraction in [0, 1]");
  const auto rows = v.x.rows();
  std::vector<int> keep;
  for (Eigen::Index j = 0; j < v.x.cols(); ++j) {
    Eigen::Index obs = v.observed.col(j).count();
    if (rows == 0 || static_cast<double>(obs) >= min_obs_frac * static_cast<double>(rows))
      keep.push_back(static_cast<int>(j));
  }
  Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(keep.size()));
  BoolArray obs(rows, static_cast<Eigen::Index>(keep.size()));
  std::vector<std::string> names;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    x.col(static_cast<Eigen::Index>(k)) = v.x.col(keep[k]);
    obs.col(static_cast<Eigen::Index>(k)) = v.observed.col(keep[k]);
    if (keep[k] < static_cast<int>(v.names.size()))
      names.push_back(v.names[static_cast<std::size_t>(keep[k])]);
  }
  v.x = std::move(x);
  v.observed = std::move(obs);
  if (!v.names.empty()) v.names = std::move(names);
  return keep;
}

// Subtract, within each ballot, the mean of the observed votes of each
// group (all columns form one group when `groups` is empty).  Centers out
// block-level shifts such as party-line voting.
inline void demean_votes_by_group(VoteMatrix& v, const std::vector<int>& groups = {}) {
  std::vector<int> g = groups;
  if (g.empty()) g.assign(static_cast<std::size_t>(v.x.cols()), 0);
  if (g.size() != static_cast<std::size_t>(v.x.cols()))
    throw InputError("demean_votes_by_group: group labels do not match column count");
  int ng = 0;
  for (int gi : g) ng = std::max(ng, gi + 1);
  std::vector<double> sum(static_cast<std::size_t>(ng));
  std::vector<int> cnt(static_cast<std::size_t>(ng));
  for (Eigen::Index i = 0; i < v.x.rows(); ++i) {
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(cnt.begin(), cnt.end(), 0);
    for (Eigen::Index j = 0; j < v.x.cols(); ++j) {
      if (!v.observed(i, j)) continue;
      sum[static_cast<std::size_t>(g[static_cast<std::size_t>(j)])] += v.x(i, j);
      ++cnt[static_cast<std::size_t>(g[static_cast<std::size_t>(j)])];
    }
    for (Eigen::Index j = 0; j < v.x.cols(); ++j) {
      if (!v.observed(i, j)) continue;
      auto gi = static_cast<std::size_t>(g[static_cast<std::size_t>(j)]);
      if (cnt[gi] > 0) v.x(i, j) -= sum[gi] / cnt[gi];
    }
  }
}

}  // namespace precmat
