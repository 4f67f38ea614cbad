#include "gdag/score.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include "gdag/errors.hpp"
#include "gdag/fingerprint.hpp"

namespace gdag {

namespace {

void check_subset(const Eigen::MatrixXd& data, const IndexSet& y) {
  const int n = static_cast<int>(data.cols());
  if (!y.empty() && y[y.size() - 1] >= n) {
    throw DimensionMismatch("subset index " +
                            std::to_string(y[y.size() - 1]) +
                            " out of range for " + std::to_string(n) +
                            " variables");
  }
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& data, const IndexSet& y) {
  Eigen::MatrixXd out(data.rows(), y.size());
  for (int j = 0; j < y.size(); ++j) out.col(j) = data.col(y[j]);
  return out;
}

}  // namespace

FamilyKey::FamilyKey(int node_, IndexSet parents_)
    : node(node_), parents(std::move(parents_)) {
  if (parents.contains(node)) {
    throw CycleDetected("node " + std::to_string(node) +
                        " listed among its own parents");
  }
}

std::size_t FamilyKeyHash::operator()(const FamilyKey& key) const {
  std::uint64_t h = fnv1a(&key.node, sizeof(key.node));
  for (int idx : key.parents) h = fnv1a(&idx, sizeof(idx), h);
  return static_cast<std::size_t>(h);
}

double subset_log_marginal(const NormalWishartPrior& prior,
                           const Eigen::MatrixXd& data, const IndexSet& y) {
  if (prior.dim() != data.cols()) {
    throw DimensionMismatch("prior covers " + std::to_string(prior.dim()) +
                            " variables but the data has " +
                            std::to_string(data.cols()) + " columns");
  }
  check_subset(data, y);
  if (y.empty()) return 0.0;

  const NormalWishartPrior sub = marginal_prior(prior, y);
  const Eigen::MatrixXd cols = select_columns(data, y);
  const SufficientStats stats = sufficient_stats(cols);
  const NormalWishartPrior post = posterior_update(sub, stats);

  const int l = y.size();
  const double m = static_cast<double>(stats.sample_count);
  const double log_det_t = cholesky_logdet(sub.t).log_det;
  const double log_det_r = cholesky_logdet(post.t).log_det;

  return -(l * m / 2.0) * std::log(2.0 * std::numbers::pi) +
         (l / 2.0) * std::log(sub.alpha_mu / post.alpha_mu) +
         wishart_log_norm_const(l, sub.alpha) -
         wishart_log_norm_const(l, post.alpha) + (sub.alpha / 2.0) * log_det_t -
         (post.alpha / 2.0) * log_det_r;
}

double sequential_predictive_log_marginal(const NormalWishartPrior& prior,
                                          const Eigen::MatrixXd& data,
                                          const IndexSet& y) {
  if (prior.dim() != data.cols()) {
    throw DimensionMismatch("prior covers " + std::to_string(prior.dim()) +
                            " variables but the data has " +
                            std::to_string(data.cols()) + " columns");
  }
  check_subset(data, y);
  if (y.empty()) return 0.0;

  NormalWishartPrior state = marginal_prior(prior, y);
  const int l = y.size();
  const double half_log_pi = 0.5 * std::log(std::numbers::pi);

  double total = 0.0;
  for (Eigen::Index row = 0; row < data.rows(); ++row) {
    Eigen::VectorXd x(l);
    for (int j = 0; j < l; ++j) x(j) = data(row, y[j]);

    // Posterior predictive for the next observation is multivariate
    // Student-t with df = alpha - l + 1 and scale
    // T (alpha_mu + 1) / (alpha_mu * df).
    const double df = state.alpha - l + 1.0;
    const double scale_factor =
        (state.alpha_mu + 1.0) / (state.alpha_mu * df);
    const SymMatrix sigma =
        SymMatrix::symmetrized(scale_factor * state.t.dense());
    const CholeskyResult chol = cholesky_logdet(sigma);

    const Eigen::VectorXd diff = x - state.nu;
    const Eigen::VectorXd w = solve_spd(sigma, diff);
    const double quad = diff.dot(w);

    total += std::lgamma((df + l) / 2.0) - std::lgamma(df / 2.0) -
             l * (0.5 * std::log(df) + half_log_pi) - 0.5 * chol.log_det -
             ((df + l) / 2.0) * std::log1p(quad / df);

    SufficientStats one;
    one.sample_count = 1;
    one.sample_mean = x;
    one.scatter = SymMatrix(l);
    state = posterior_update(state, one);
  }
  return total;
}

double family_log_score(const NormalWishartPrior& prior,
                        const Eigen::MatrixXd& data, const FamilyKey& key) {
  const IndexSet family = key.parents.unioned_with(IndexSet{key.node});
  return subset_log_marginal(prior, data, family) -
         subset_log_marginal(prior, data, key.parents);
}

ScoreContext::ScoreContext(NormalWishartPrior prior, Eigen::MatrixXd data)
    : prior_(std::move(prior)), data_(std::move(data)) {
  prior_.validate();
  if (prior_.dim() != data_.cols()) {
    throw DimensionMismatch("prior covers " + std::to_string(prior_.dim()) +
                            " variables but the data has " +
                            std::to_string(data_.cols()) + " columns");
  }
  const Eigen::Index dims[2] = {data_.rows(), data_.cols()};
  fingerprint_ = fnv1a(dims, sizeof(dims));
  if (data_.size() > 0) {
    fingerprint_ = fnv1a(data_.data(),
                         static_cast<std::size_t>(data_.size()) *
                             sizeof(double),
                         fingerprint_);
  }
}

double ScoreContext::family_log_score(const FamilyKey& key) const {
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  const double value = gdag::family_log_score(prior_, data_, key);
  std::unique_lock lock(mutex_);
  return cache_.emplace(key, value).first->second;
}

double ScoreContext::dag_log_score(const DagStructure& graph) const {
  if (graph.node_count() != data_.cols()) {
    throw VariableMismatch("graph has " + std::to_string(graph.node_count()) +
                           " nodes but the data has " +
                           std::to_string(data_.cols()) + " columns");
  }
  double total = 0.0;
  for (int node = 0; node < graph.node_count(); ++node) {
    total += family_log_score(FamilyKey(node, IndexSet(graph.parents(node))));
  }
  return total;
}

std::size_t ScoreContext::cache_size() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

double dag_log_score(const NormalWishartPrior& prior,
                     const Eigen::MatrixXd& data, const DagStructure& graph) {
  return ScoreContext(prior, data).dag_log_score(graph);
}

std::vector<std::pair<DagStructure, double>> structure_posterior(
    const NormalWishartPrior& prior, const Eigen::MatrixXd& data,
    const std::vector<std::string>& names) {
  const int n = static_cast<int>(data.cols());
  if (n > 4) {
    throw TooLarge("exact posterior over structures supports at most 4 "
                   "variables; got " +
                   std::to_string(n));
  }
  if (!names.empty() && static_cast<int>(names.size()) != n) {
    throw VariableMismatch("got " + std::to_string(names.size()) +
                           " names for " + std::to_string(n) + " columns");
  }

  ScoreContext ctx(prior, data);
  std::vector<DagStructure> dags = enumerate_dags(n);
  if (!names.empty()) {
    for (auto& g : dags) {
      std::vector<std::vector<int>> parents;
      parents.reserve(static_cast<size_t>(n));
      for (int v = 0; v < n; ++v) parents.push_back(g.parents(v));
      g = DagStructure(names, std::move(parents));
    }
  }

  std::vector<double> logs;
  logs.reserve(dags.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (const auto& g : dags) {
    logs.push_back(ctx.dag_log_score(g));
    max_log = std::max(max_log, logs.back());
  }

  double norm = 0.0;
  for (double& v : logs) {
    v = std::exp(v - max_log);
    norm += v;
  }

  std::vector<std::pair<DagStructure, double>> out;
  out.reserve(dags.size());
  for (size_t i = 0; i < dags.size(); ++i) {
    out.emplace_back(std::move(dags[i]), logs[i] / norm);
  }
  return out;
}

}  // namespace gdag
