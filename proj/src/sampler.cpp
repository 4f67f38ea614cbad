#include "gdag/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gdag {

Eigen::MatrixXd wishart_scale_factor(const SymMatrix& t) {
  const int n = t.order();
  Eigen::MatrixXd t_inv = solve_spd(t, Eigen::MatrixXd::Identity(n, n));
  return cholesky_logdet(SymMatrix::symmetrized(t_inv)).lower;
}

SymMatrix draw_wishart(CounterRng& rng, double dof,
                       const Eigen::MatrixXd& scale_factor) {
  const int n = static_cast<int>(scale_factor.rows());
  if (!(dof > n - 1)) {
    throw InvalidDegreesOfFreedom("Wishart needs dof > n - 1");
  }
  Eigen::MatrixXd bartlett = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) bartlett(i, j) = rng.normal();
    bartlett(i, i) = std::sqrt(rng.chi_square(dof - i));
  }
  Eigen::MatrixXd root = scale_factor * bartlett;
  return SymMatrix::symmetrized(root * root.transpose());
}

SymMatrix sample_wishart(double dof, const SymMatrix& t, RandomSeed seed) {
  CounterRng rng(seed, streams::kWishart);
  return draw_wishart(rng, dof, wishart_scale_factor(t));
}

std::pair<Eigen::VectorXd, SymMatrix> draw_normal_wishart(
    CounterRng& rng, const NormalWishartPrior& p,
    const Eigen::MatrixXd& scale_factor) {
  const int n = p.dim();
  SymMatrix w = draw_wishart(rng, p.alpha, scale_factor);
  Eigen::MatrixXd lower = cholesky_logdet(w).lower;
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z[i] = rng.normal();
  // Precision of mu is alpha_mu W = (sqrt(alpha_mu) L)(sqrt(alpha_mu) L)'.
  Eigen::VectorXd shift =
      lower.transpose().triangularView<Eigen::Upper>().solve(z) /
      std::sqrt(p.alpha_mu);
  return {p.nu + shift, w};
}

std::pair<Eigen::VectorXd, SymMatrix> sample_normal_wishart(
    const NormalWishartPrior& p, RandomSeed seed) {
  p.validate();
  CounterRng rng(seed, streams::kNormalWishartW);
  return draw_normal_wishart(rng, p, wishart_scale_factor(p.t));
}

GaussianDagParams regression_params_from_joint(
    const Eigen::VectorXd& mu, const SymMatrix& w,
    const std::vector<int>& ordering) {
  const int n = w.order();
  if (static_cast<int>(mu.size()) != n ||
      static_cast<int>(ordering.size()) != n) {
    throw DimensionMismatch("mu, W, and ordering sizes disagree");
  }
  {
    std::vector<int> check = ordering;
    std::sort(check.begin(), check.end());
    for (int i = 0; i < n; ++i) {
      if (check[static_cast<size_t>(i)] != i) {
        throw Error(ErrorKind::validation, "ordering is not a permutation");
      }
    }
  }
  if (!is_positive_definite(w)) {
    throw NotPositiveDefinite("joint precision is not positive definite");
  }

  // Work on prefix-aligned copies: position k corresponds to ordering[k].
  Eigen::MatrixXd prec(n, n);
  Eigen::VectorXd mean(n);
  for (int i = 0; i < n; ++i) {
    mean[i] = mu[ordering[static_cast<size_t>(i)]];
    for (int j = 0; j < n; ++j) {
      prec(i, j) = w(ordering[static_cast<size_t>(i)],
                     ordering[static_cast<size_t>(j)]);
    }
  }

  GaussianDagParams params;
  params.nodes.resize(static_cast<size_t>(n));
  for (int k = n - 1; k >= 0; --k) {
    const double w22 = prec(k, k);
    NodeParams node;
    node.variance = 1.0 / w22;
    Eigen::VectorXd w12 = prec.col(k).head(k);
    Eigen::VectorXd coef_prefix = -w12 / w22;
    // Intercept from the regression identity: conditional mean of the node
    // is m + b' x_parents, so m = mu_node - b' mu_parents.
    node.intercept = mean[k] - coef_prefix.dot(mean.head(k));

    // Reorder prefix coefficients to the sorted parent order the DAG uses.
    std::vector<int> pa(ordering.begin(), ordering.begin() + k);
    std::vector<int> by_index(pa.size());
    for (size_t i = 0; i < pa.size(); ++i) by_index[i] = static_cast<int>(i);
    std::sort(by_index.begin(), by_index.end(),
              [&](int a, int b) { return pa[static_cast<size_t>(a)] <
                                         pa[static_cast<size_t>(b)]; });
    node.coefficients.resize(k);
    for (int i = 0; i < k; ++i) {
      node.coefficients[i] = coef_prefix[by_index[static_cast<size_t>(i)]];
    }
    params.nodes[static_cast<size_t>(ordering[static_cast<size_t>(k)])] =
        std::move(node);

    if (k > 0) {
      // Leading-block precision ((W^{-1})_11)^{-1} = W_11 - W_12 W_12'/w22.
      prec.topLeftCorner(k, k) -= w12 * w12.transpose() / w22;
    }
  }
  return params;
}

DagStructure complete_dag(std::vector<std::string> names,
                          const std::vector<int>& ordering) {
  std::vector<std::vector<int>> parents(names.size());
  for (size_t k = 0; k < ordering.size(); ++k) {
    for (size_t j = 0; j < k; ++j) {
      parents[static_cast<size_t>(ordering[k])].push_back(ordering[j]);
    }
  }
  return DagStructure(std::move(names), std::move(parents));
}

GaussianDagParams sample_params_from_prior(const NormalWishartPrior& p,
                                           const DagStructure& g,
                                           RandomSeed seed) {
  p.validate();
  if (p.dim() != g.node_count()) {
    throw VariableMismatch("prior dimension does not match the DAG");
  }
  CounterRng rng(seed, streams::kPriorParams);
  GaussianDagParams params;
  params.nodes.resize(static_cast<size_t>(g.node_count()));
  for (int i = 0; i < g.node_count(); ++i) {
    RegressionPrior rp = local_regression_prior(p, i, IndexSet(g.parents(i)));
    // 1/v ~ gamma(shape/2, rate/2).
    double precision = rng.gamma(0.5 * rp.precision_shape) /
                       (0.5 * rp.precision_rate);
    NodeParams node;
    node.variance = 1.0 / precision;
    const int k = static_cast<int>(rp.coef_mean.size());
    if (k > 0) {
      // b | v ~ normal(coef_mean, precision T11 / v).
      Eigen::MatrixXd lower = cholesky_logdet(rp.coef_precision_scale).lower;
      Eigen::VectorXd z(k);
      for (int j = 0; j < k; ++j) z[j] = rng.normal();
      node.coefficients =
          rp.coef_mean +
          std::sqrt(node.variance) *
              lower.transpose().triangularView<Eigen::Upper>().solve(z);
    } else {
      node.coefficients = Eigen::VectorXd::Zero(0);
    }
    // m | b, v ~ normal(nu_node - b' nu_parents, variance v / alpha_mu).
    double location = rp.nu_node - (k > 0 ? node.coefficients.dot(rp.nu_parents)
                                          : 0.0);
    node.intercept =
        location +
        std::sqrt(node.variance / rp.intercept_precision_scale) * rng.normal();
    params.nodes[static_cast<size_t>(i)] = std::move(node);
  }
  return params;
}

Eigen::MatrixXd sample_dataset(const GaussianDagParams& params,
                               const DagStructure& g, long rows,
                               RandomSeed seed) {
  const int n = g.node_count();
  if (static_cast<int>(params.nodes.size()) != n) {
    throw VariableMismatch("parameter count does not match the DAG");
  }
  for (int i = 0; i < n; ++i) {
    const NodeParams& node = params.nodes[static_cast<size_t>(i)];
    if (static_cast<int>(node.coefficients.size()) !=
        static_cast<int>(g.parents(i).size())) {
      throw VariableMismatch("coefficient count does not match parents of " +
                             g.variable_names()[static_cast<size_t>(i)]);
    }
    if (!(node.variance > 0.0)) {
      throw Error(ErrorKind::validation, "variances must be positive");
    }
  }
  std::vector<int> order = topological_order(g);
  CounterRng rng(seed, streams::kDataset);
  Eigen::MatrixXd data(rows, n);
  for (long r = 0; r < rows; ++r) {
    for (int v : order) {
      const NodeParams& node = params.nodes[static_cast<size_t>(v)];
      double value = node.intercept;
      const auto& pa = g.parents(v);
      for (size_t j = 0; j < pa.size(); ++j) {
        value += node.coefficients[static_cast<Eigen::Index>(j)] *
                 data(r, pa[j]);
      }
      data(r, v) = value + std::sqrt(node.variance) * rng.normal();
    }
  }
  return data;
}

}  // namespace gdag
