#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <shared_mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gdag/dag.hpp"
#include "gdag/linalg.hpp"
#include "gdag/prior.hpp"

namespace gdag {

// Identifies one node/parent-set family.  The node must not appear in its
// own parent set.
struct FamilyKey {
  int node = 0;
  IndexSet parents;

  FamilyKey(int node_, IndexSet parents_);
  bool operator==(const FamilyKey& other) const {
    return node == other.node && parents == other.parents;
  }
};

struct FamilyKeyHash {
  std::size_t operator()(const FamilyKey& key) const;
};

// Log marginal likelihood of the data restricted to the variable subset `y`
// under the joint normal-Wishart prior `prior`.  The subset model is the
// prior marginalized to `y` followed by the complete-model closed form on
// the restricted data.  An empty subset scores exactly zero, as does an
// empty dataset.
double subset_log_marginal(const NormalWishartPrior& prior,
                           const Eigen::MatrixXd& data, const IndexSet& y);

// Same quantity evaluated as a product of one-row posterior predictive
// densities (multivariate Student-t).  Numerically independent route used
// to cross-check subset_log_marginal.
double sequential_predictive_log_marginal(const NormalWishartPrior& prior,
                                          const Eigen::MatrixXd& data,
                                          const IndexSet& y);

// Local family score: subset score of parents+node minus subset score of
// the parents alone.
double family_log_score(const NormalWishartPrior& prior,
                        const Eigen::MatrixXd& data, const FamilyKey& key);

// Bundles a prior and dataset and memoizes family scores so that search and
// enumeration never recompute a family.  Insert-only cache; safe for
// concurrent readers.
class ScoreContext {
 public:
  ScoreContext(NormalWishartPrior prior, Eigen::MatrixXd data);

  const NormalWishartPrior& prior() const { return prior_; }
  const Eigen::MatrixXd& data() const { return data_; }
  std::uint64_t data_fingerprint() const { return fingerprint_; }

  double family_log_score(const FamilyKey& key) const;
  double dag_log_score(const DagStructure& graph) const;
  std::size_t cache_size() const;

 private:
  NormalWishartPrior prior_;
  Eigen::MatrixXd data_;
  std::uint64_t fingerprint_ = 0;
  mutable std::unordered_map<FamilyKey, double, FamilyKeyHash> cache_;
  mutable std::shared_mutex mutex_;
};

// Convenience wrapper scoring a full structure without a reusable context.
double dag_log_score(const NormalWishartPrior& prior,
                     const Eigen::MatrixXd& data, const DagStructure& graph);

// Exact posterior over all DAGs on the data's variables under a uniform
// structure prior.  Only feasible for small n; throws TooLarge when the
// variable count exceeds 4.  Optional `names` relabels the enumerated
// structures (must match the column count when present).
std::vector<std::pair<DagStructure, double>> structure_posterior(
    const NormalWishartPrior& prior, const Eigen::MatrixXd& data,
    const std::vector<std::string>& names = {});

}  // namespace gdag
