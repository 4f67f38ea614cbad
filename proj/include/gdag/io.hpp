#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gdag/dag.hpp"
#include "gdag/linalg.hpp"
#include "gdag/prior.hpp"

namespace gdag {

struct Dataset {
  std::vector<std::string> variable_names;
  Eigen::MatrixXd values;  // sample_count x variable count

  long sample_count() const { return values.rows(); }
  int variable_count() const { return static_cast<int>(values.cols()); }
};

// CSV with a mandatory identifier header; `#`-prefixed lines are ignored;
// scientific notation accepted, quoting not supported.  Parse failures
// carry 1-based file line and field column.
Dataset parse_dataset(const std::string& text);
Dataset ingest_dataset(const std::string& path);

// 17 significant digits, so ingest(write(d)) round-trips exactly.
std::string write_dataset(const Dataset& dataset);

// DAG text format: `node NAME` and `NAME1 -> NAME2` lines; `#` starts a
// comment anywhere in a line; duplicate arcs are errors; the node set is
// every name in first-appearance order.
DagStructure parse_dag(const std::string& text);
DagStructure read_dag_file(const std::string& path);

// Canonical form: one `node` line per variable in index order, then arcs
// ordered lexicographically by (from, to).
std::string write_dag(const DagStructure& g);

// CLI default: nu = 0, alpha_mu = 1, alpha = n + 2, T = identity.
NormalWishartPrior default_prior(int dimension);

// `key = value` lines over keys alpha_mu, alpha, nu (`zeros` or a comma
// list), T (`identity`, `scaled:<c>`, `file:<path>`); unknown or duplicate
// keys are errors; unspecified keys keep the default-prior values.
// Relative `file:` paths resolve against `base_dir`.
NormalWishartPrior parse_prior_config(const std::string& text, int dimension,
                                      const std::string& base_dir = ".");
NormalWishartPrior read_prior_file(const std::string& path, int dimension);

// Square matrix CSV without a header; symmetry is validated to 1e-9 and
// the result exactly symmetrized by averaging.
SymMatrix read_matrix_csv(const std::string& path);
SymMatrix parse_matrix_csv(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

bool is_identifier(const std::string& name);

}  // namespace gdag
