#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "gdag/dag.hpp"
#include "gdag/linalg.hpp"
#include "gdag/prior.hpp"
#include "gdag/rng.hpp"

namespace gdag {

// Per-node linear regression parameters of a Gaussian DAG model;
// coefficients are aligned with the owning DAG's sorted parent lists.
struct NodeParams {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;
  double variance = 1.0;
};

struct GaussianDagParams {
  std::vector<NodeParams> nodes;
};

// Lower-triangular factor B with B B' = T^{-1}; precompute once when
// drawing many Wisharts with the same parametric matrix.
Eigen::MatrixXd wishart_scale_factor(const SymMatrix& t);

// One draw with density proportional to |W|^{(dof-n-1)/2} exp(-tr(TW)/2)
// via the triangular (Bartlett) construction; valid for any real
// dof > n - 1.
SymMatrix draw_wishart(CounterRng& rng, double dof,
                       const Eigen::MatrixXd& scale_factor);

SymMatrix sample_wishart(double dof, const SymMatrix& t, RandomSeed seed);

// Draws W, then mu | W ~ normal(nu, precision alpha_mu W).
std::pair<Eigen::VectorXd, SymMatrix> draw_normal_wishart(
    CounterRng& rng, const NormalWishartPrior& p,
    const Eigen::MatrixXd& scale_factor);

std::pair<Eigen::VectorXd, SymMatrix> sample_normal_wishart(
    const NormalWishartPrior& p, RandomSeed seed);

// Converts a joint (mu, W) into regression triples for the complete DAG
// whose arcs follow `ordering`: for the last node, v = 1/W_22,
// b = -W_12/W_22, and the intercept is chosen so the composed regressions
// reproduce the joint exactly; then recurse on the leading block with
// precision ((W^{-1})_11)^{-1}.
GaussianDagParams regression_params_from_joint(const Eigen::VectorXd& mu,
                                               const SymMatrix& w,
                                               const std::vector<int>& ordering);

// The complete DAG implied by an ordering (arcs from earlier to later).
DagStructure complete_dag(std::vector<std::string> names,
                          const std::vector<int>& ordering);

// Independent per-node parameter draw from the prior of the DAG model g:
// each node's (m, b, v) comes from its local regression prior.
GaussianDagParams sample_params_from_prior(const NormalWishartPrior& p,
                                           const DagStructure& g,
                                           RandomSeed seed);

// Ancestral sampling in topological order.
Eigen::MatrixXd sample_dataset(const GaussianDagParams& params,
                               const DagStructure& g, long rows,
                               RandomSeed seed);

}  // namespace gdag
