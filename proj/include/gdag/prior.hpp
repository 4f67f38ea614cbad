#pragma once

#include <Eigen/Dense>

#include "gdag/linalg.hpp"

namespace gdag {

// Conjugate prior over (mean, precision) of a complete Gaussian DAG model:
// precision W is Wishart with dof `alpha` and parametric matrix `t`
// (density proportional to |W|^{(alpha-n-1)/2} exp(-tr(tW)/2), so the mean
// of W is alpha * t^{-1}); the mean given W is normal with location `nu`
// and precision alpha_mu * W.
struct NormalWishartPrior {
  Eigen::VectorXd nu;
  double alpha_mu = 1.0;
  double alpha = 0.0;
  SymMatrix t{1};

  int dim() const { return static_cast<int>(nu.size()); }
  // Enforces alpha_mu > 0, alpha > n - 1, T positive definite.
  void validate() const;
};

struct SufficientStats {
  long sample_count = 0;
  Eigen::VectorXd sample_mean;
  SymMatrix scatter{1};  // sum of centered outer products

  int dim() const { return static_cast<int>(sample_mean.size()); }
};

// Prior over one local regression x_node = m + b' x_parents + noise,
// derived from the joint normal-Wishart:
//   1/v  ~ one-dimensional Wishart with dof precision_shape and parametric
//          value precision_rate (a gamma with shape precision_shape/2 and
//          rate precision_rate/2),
//   b|v  ~ normal, mean coef_mean, precision coef_precision_scale / v,
//   m|b,v ~ normal, location intercept_location shifted by
//          (coef_mean - b)' nu_parents, precision intercept_precision_scale/v.
struct RegressionPrior {
  double precision_shape = 0.0;
  double precision_rate = 0.0;
  Eigen::VectorXd coef_mean;
  SymMatrix coef_precision_scale{1};
  double intercept_location = 0.0;
  double intercept_precision_scale = 0.0;
  Eigen::VectorXd nu_parents;  // retained so the b-dependent location of m
                               // can be reconstructed exactly
  double nu_node = 0.0;
};

// log c(l, a) of the Wishart normalization; requires a > l - 1.
double wishart_log_norm_const(int l, double a);

// Column means and centered scatter; m = 0 yields zeros.
SufficientStats sufficient_stats(const Eigen::MatrixXd& data);

// Conjugate update: nu' = (alpha_mu nu + m xbar)/(alpha_mu + m),
// alpha_mu' = alpha_mu + m, alpha' = alpha + m,
// T' = T + S_m + alpha_mu m/(alpha_mu + m) (nu - xbar)(nu - xbar)'.
NormalWishartPrior posterior_update(const NormalWishartPrior& p,
                                    const SufficientStats& s);

// Marginal of (mu_Y, ((W^{-1})_YY)^{-1}): parameters
// (nu_Y, alpha_mu, alpha - n + |Y|, ((T^{-1})_YY)^{-1}).
NormalWishartPrior marginal_prior(const NormalWishartPrior& p,
                                  const IndexSet& y);

// Marginalize to parents + node, then condition the node on the parents.
RegressionPrior local_regression_prior(const NormalWishartPrior& p, int node,
                                       const IndexSet& parents);

}  // namespace gdag
