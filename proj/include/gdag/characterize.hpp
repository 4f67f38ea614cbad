#pragma once

#include <string>
#include <vector>

#include "gdag/linalg.hpp"
#include "gdag/prior.hpp"
#include "gdag/rng.hpp"

namespace gdag {

// Two-block coordinate partition used when splitting a precision matrix
// into W_11, W_12, W_22.  block2 is always the complement of block1.
struct PartitionSpec {
  IndexSet block1;
  IndexSet block2;

  PartitionSpec(IndexSet first_block, int dimension);
};

enum class Verdict { independent, dependent, inconclusive };

std::string to_string(Verdict v);

struct StatPair {
  std::string first;
  std::string second;
  double correlation = 0.0;
  long sample_count = 0;
};

// Outcome of a Monte Carlo independence check between groups of derived
// statistics.  Verdict is independent when every cross-group correlation is
// below 4/sqrt(N), dependent when some exceeds 10/sqrt(N), inconclusive in
// the dead zone between.
struct IndependenceReport {
  std::vector<StatPair> statistic_pairs;
  double max_abs_correlation = 0.0;
  double threshold = 0.0;  // 4 / sqrt(sample_count)
  long sample_count = 0;
  Verdict verdict = Verdict::inconclusive;

  // One line per pair "A, B, corr, N", then max_abs_corr, threshold,
  // verdict.
  std::string render() const;
};

// Two-component scale-contaminated prior used to exhibit dependence between
// the transformed blocks; weight_b is the probability of drawing from
// component_b.
struct MixturePrior {
  NormalWishartPrior component_a;
  NormalWishartPrior component_b;
  double weight_b = 0.5;
};

enum class TestMode { wishart, normal_mean, normal_wishart };

// Sign convention for the combined location statistic
// mu_2 (+/-) W_22^{-1} W_12' mu_1; the plus convention is the one the block
// decomposition leaves independent of mu_1.
enum class MeanSign { plus, minus };

// Draws N joint samples and tests independence of the transformed blocks:
//   wishart        W_11 - W_12 W_22^{-1} W_12'   vs  {W_12, W_22}
//   normal-mean    mu_1  vs  mu_2 (+/-) W_22^{-1} W_12' mu_1, with W fixed
//                  (drawn once, redrawn while any |entry| < 1e-6) and
//                  mu ~ normal(nu, precision alpha_mu W)
//   normal-wishart {mu_1, W_11.2}  vs  {combined location, W_12, W_22}
// Cross-group correlations are computed for the identity, square, and
// (where entries stay positive) log statistics.
IndependenceReport global_independence_test(TestMode mode,
                                            const NormalWishartPrior& prior,
                                            const PartitionSpec& partition,
                                            long sample_count, RandomSeed seed,
                                            MeanSign sign = MeanSign::plus);

// Same block test for a Wishart mixture; the shared scale of W_11.2 and
// W_22 across components makes the groups dependent.  Components must
// differ in degrees of freedom by at least a factor of five.
IndependenceReport counterexample_test(const MixturePrior& mix,
                                       const PartitionSpec& partition,
                                       long sample_count, RandomSeed seed);

// Samples (mu, W), converts to the last node's regression triple
// (m, b, v), standardizes m and b with location/scale constants fitted on
// an independent pilot stream, and tests the triple for mutual pairwise
// independence.  With standardize = false the raw (m, b, v) triple is
// tested instead (the negative control: the scale of b varies with v).
IndependenceReport local_standardization_test(const NormalWishartPrior& prior,
                                              long sample_count,
                                              RandomSeed seed,
                                              bool standardize = true);

}  // namespace gdag
