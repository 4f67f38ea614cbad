#include "gdag/characterize.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "gdag/errors.hpp"
#include "gdag/format.hpp"
#include "gdag/sampler.hpp"

namespace gdag {

namespace {

constexpr long kMinSamples = 10000;
constexpr double kDependentFactor = 10.0;  // dependent above 10/sqrt(N)

// Raw per-sample entries for one group of quantities; statistic expansion
// (identity / square / log) happens after sampling.
struct RawGroup {
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // sample_count x names.size()

  RawGroup(std::vector<std::string> names_, long sample_count)
      : names(std::move(names_)),
        values(sample_count, static_cast<Eigen::Index>(names.size())) {}
};

struct StatColumn {
  std::string name;
  Eigen::VectorXd centered;
  double norm = 0.0;  // sqrt of centered sum of squares
};

std::vector<StatColumn> expand_statistics(const RawGroup& group) {
  std::vector<StatColumn> out;
  auto push = [&out](const std::string& name, Eigen::VectorXd samples) {
    StatColumn col;
    col.name = name;
    col.centered = samples.array() - samples.mean();
    col.norm = std::sqrt(col.centered.squaredNorm());
    out.push_back(std::move(col));
  };
  for (Eigen::Index j = 0; j < group.values.cols(); ++j) {
    const Eigen::VectorXd raw = group.values.col(j);
    const std::string& base = group.names[static_cast<size_t>(j)];
    push("id:" + base, raw);
    push("sq:" + base, raw.array().square());
    if (raw.minCoeff() > 0.0) push("log:" + base, raw.array().log());
  }
  return out;
}

IndependenceReport correlate_groups(const std::vector<RawGroup>& groups,
                                    long sample_count) {
  std::vector<std::vector<StatColumn>> stats;
  stats.reserve(groups.size());
  for (const auto& g : groups) stats.push_back(expand_statistics(g));

  IndependenceReport report;
  report.sample_count = sample_count;
  report.threshold = 4.0 / std::sqrt(static_cast<double>(sample_count));
  for (size_t g = 0; g < stats.size(); ++g) {
    for (size_t h = g + 1; h < stats.size(); ++h) {
      for (const auto& a : stats[g]) {
        for (const auto& b : stats[h]) {
          const double denom = a.norm * b.norm;
          const double corr =
              denom > 0.0 ? a.centered.dot(b.centered) / denom : 0.0;
          report.statistic_pairs.push_back(
              {a.name, b.name, corr, sample_count});
          report.max_abs_correlation =
              std::max(report.max_abs_correlation, std::abs(corr));
        }
      }
    }
  }

  if (report.max_abs_correlation < report.threshold) {
    report.verdict = Verdict::independent;
  } else if (report.max_abs_correlation >
             kDependentFactor / std::sqrt(static_cast<double>(sample_count))) {
    report.verdict = Verdict::dependent;
  } else {
    report.verdict = Verdict::inconclusive;
  }
  return report;
}

void check_sample_count(long sample_count) {
  if (sample_count < kMinSamples) {
    throw SampleTooSmall("need at least " + std::to_string(kMinSamples) +
                         " samples; got " + std::to_string(sample_count));
  }
}

void check_partition(const PartitionSpec& partition, int dimension) {
  if (!(partition.block1.unioned_with(partition.block2) ==
        IndexSet::full(dimension))) {
    throw DimensionMismatch("partition does not cover the " +
                            std::to_string(dimension) +
                            " prior coordinates");
  }
}

Eigen::MatrixXd cross_block(const SymMatrix& w, const IndexSet& rows,
                            const IndexSet& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (int i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < cols.size(); ++j) out(i, j) = w(rows[i], cols[j]);
  }
  return out;
}

std::string entry_name(const std::string& base, int i, int j) {
  return base + "[" + std::to_string(i) + "," + std::to_string(j) + "]";
}

// Upper-triangle (including diagonal) names of a symmetric block, labeled
// with the original coordinate indices.
std::vector<std::string> sym_block_names(const std::string& base,
                                         const IndexSet& coords) {
  std::vector<std::string> names;
  for (int i = 0; i < coords.size(); ++i) {
    for (int j = i; j < coords.size(); ++j) {
      names.push_back(entry_name(base, coords[i], coords[j]));
    }
  }
  return names;
}

void fill_sym_block(RawGroup& group, long row, int offset, const SymMatrix& m) {
  int k = offset;
  for (int i = 0; i < m.order(); ++i) {
    for (int j = i; j < m.order(); ++j) group.values(row, k++) = m(i, j);
  }
}

int sym_entry_count(int order) { return order * (order + 1) / 2; }

std::vector<std::string> wishart_b_names(const PartitionSpec& partition) {
  std::vector<std::string> names;
  for (int i : partition.block1) {
    for (int j : partition.block2) names.push_back(entry_name("W12", i, j));
  }
  auto w22 = sym_block_names("W22", partition.block2);
  names.insert(names.end(), w22.begin(), w22.end());
  return names;
}

void fill_wishart_b(RawGroup& group, long row, int offset, const SymMatrix& w,
                    const PartitionSpec& partition) {
  int k = offset;
  for (int i : partition.block1) {
    for (int j : partition.block2) group.values(row, k++) = w(i, j);
  }
  for (int i = 0; i < partition.block2.size(); ++i) {
    for (int j = i; j < partition.block2.size(); ++j) {
      group.values(row, k++) = w(partition.block2[i], partition.block2[j]);
    }
  }
}

Eigen::VectorXd subvector(const Eigen::VectorXd& x, const IndexSet& idx) {
  Eigen::VectorXd out(idx.size());
  for (int i = 0; i < idx.size(); ++i) out(i) = x(idx[i]);
  return out;
}

// mu_2 (+/-) W_22^{-1} W_12' mu_1.
Eigen::VectorXd combined_location(const Eigen::VectorXd& mu,
                                  const SymMatrix& w,
                                  const PartitionSpec& partition,
                                  MeanSign sign) {
  const Eigen::VectorXd mu1 = subvector(mu, partition.block1);
  const Eigen::VectorXd mu2 = subvector(mu, partition.block2);
  const SymMatrix w22 = w.submatrix(partition.block2);
  const Eigen::MatrixXd w21 =
      cross_block(w, partition.block2, partition.block1);
  const Eigen::VectorXd shift = solve_spd(w22, w21 * mu1);
  return sign == MeanSign::plus ? (mu2 + shift).eval() : (mu2 - shift).eval();
}

std::vector<std::string> indexed_names(const std::string& base,
                                       const IndexSet& coords) {
  std::vector<std::string> names;
  for (int i : coords) names.push_back(base + "[" + std::to_string(i) + "]");
  return names;
}

}  // namespace

PartitionSpec::PartitionSpec(IndexSet first_block, int dimension)
    : block1(std::move(first_block)), block2(block1.complement(dimension)) {
  if (block1.empty()) throw EmptySubset("partition block1 is empty");
  if (block2.empty()) {
    throw EmptySubset("partition block2 is empty: block1 covers all " +
                      std::to_string(dimension) + " coordinates");
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::independent: return "independent";
    case Verdict::dependent: return "dependent";
    case Verdict::inconclusive: return "inconclusive";
  }
  std::abort();
}

std::string IndependenceReport::render() const {
  std::string out;
  for (const auto& pair : statistic_pairs) {
    out += pair.first + ", " + pair.second + ", " +
           format_real(pair.correlation) + ", " +
           std::to_string(pair.sample_count) + "\n";
  }
  out += "max_abs_corr " + format_real(max_abs_correlation) + "\n";
  out += "threshold " + format_real(threshold) + "\n";
  out += "verdict " + to_string(verdict) + "\n";
  return out;
}

IndependenceReport global_independence_test(TestMode mode,
                                            const NormalWishartPrior& prior,
                                            const PartitionSpec& partition,
                                            long sample_count, RandomSeed seed,
                                            MeanSign sign) {
  check_sample_count(sample_count);
  prior.validate();
  const int n = prior.dim();
  if (n < 2) {
    throw DimensionMismatch("independence tests need at least 2 variables");
  }
  check_partition(partition, n);

  const Eigen::MatrixXd factor = wishart_scale_factor(prior.t);

  if (mode == TestMode::wishart) {
    RawGroup ga(sym_block_names("W11.2", partition.block1), sample_count);
    RawGroup gb(wishart_b_names(partition), sample_count);
    CounterRng rng(seed, streams::kCharacterize);
    for (long i = 0; i < sample_count; ++i) {
      const SymMatrix w = draw_wishart(rng, prior.alpha, factor);
      fill_sym_block(ga, i, 0, schur_complement(w, partition.block1));
      fill_wishart_b(gb, i, 0, w, partition);
    }
    return correlate_groups({std::move(ga), std::move(gb)}, sample_count);
  }

  if (mode == TestMode::normal_mean) {
    // Fixed W with no (near-)zero entries; the location prior is
    // mu ~ normal(nu, precision alpha_mu W).
    CounterRng wrng(seed, streams::kNormalWishartW);
    SymMatrix w = draw_wishart(wrng, prior.alpha, factor);
    while (w.dense().array().abs().minCoeff() < 1e-6) {
      w = draw_wishart(wrng, prior.alpha, factor);
    }
    const Eigen::MatrixXd lower = cholesky_logdet(w).lower;
    const double mu_scale = 1.0 / std::sqrt(prior.alpha_mu);

    RawGroup ga(indexed_names("mu1", partition.block1), sample_count);
    RawGroup gb(indexed_names("mloc", partition.block2), sample_count);
    CounterRng rng(seed, streams::kNormalWishartMu);
    Eigen::VectorXd z(n);
    for (long i = 0; i < sample_count; ++i) {
      for (int k = 0; k < n; ++k) z(k) = rng.normal();
      const Eigen::VectorXd mu =
          prior.nu +
          mu_scale * lower.transpose()
                         .triangularView<Eigen::Upper>()
                         .solve(z);
      const Eigen::VectorXd mu1 = subvector(mu, partition.block1);
      const Eigen::VectorXd comb = combined_location(mu, w, partition, sign);
      for (int k = 0; k < mu1.size(); ++k) ga.values(i, k) = mu1(k);
      for (int k = 0; k < comb.size(); ++k) gb.values(i, k) = comb(k);
    }
    return correlate_groups({std::move(ga), std::move(gb)}, sample_count);
  }

  // normal-wishart mode: {mu_1, W_11.2} vs {combined location, W_12, W_22}.
  std::vector<std::string> a_names = indexed_names("mu1", partition.block1);
  {
    auto schur_names = sym_block_names("W11.2", partition.block1);
    a_names.insert(a_names.end(), schur_names.begin(), schur_names.end());
  }
  std::vector<std::string> b_names = indexed_names("mloc", partition.block2);
  {
    auto tail = wishart_b_names(partition);
    b_names.insert(b_names.end(), tail.begin(), tail.end());
  }
  RawGroup ga(std::move(a_names), sample_count);
  RawGroup gb(std::move(b_names), sample_count);
  CounterRng rng(seed, streams::kCharacterize);
  for (long i = 0; i < sample_count; ++i) {
    const auto [mu, w] = draw_normal_wishart(rng, prior, factor);
    const Eigen::VectorXd mu1 = subvector(mu, partition.block1);
    for (int k = 0; k < mu1.size(); ++k) ga.values(i, k) = mu1(k);
    fill_sym_block(ga, i, partition.block1.size(),
                   schur_complement(w, partition.block1));
    const Eigen::VectorXd comb = combined_location(mu, w, partition, sign);
    for (int k = 0; k < comb.size(); ++k) gb.values(i, k) = comb(k);
    fill_wishart_b(gb, i, partition.block2.size(), w, partition);
  }
  return correlate_groups({std::move(ga), std::move(gb)}, sample_count);
}

IndependenceReport counterexample_test(const MixturePrior& mix,
                                       const PartitionSpec& partition,
                                       long sample_count, RandomSeed seed) {
  check_sample_count(sample_count);
  mix.component_a.validate();
  mix.component_b.validate();
  if (mix.component_a.dim() != mix.component_b.dim()) {
    throw DimensionMismatch("mixture components differ in dimension");
  }
  const int n = mix.component_a.dim();
  if (n < 2) {
    throw DimensionMismatch("independence tests need at least 2 variables");
  }
  check_partition(partition, n);
  if (!(mix.weight_b >= 0.0 && mix.weight_b <= 1.0)) {
    throw Error(ErrorKind::validation, "mixture weight must lie in [0, 1]");
  }
  const double ratio =
      std::max(mix.component_a.alpha, mix.component_b.alpha) /
      std::min(mix.component_a.alpha, mix.component_b.alpha);
  if (!(ratio >= 5.0)) {
    throw InvalidDegreesOfFreedom(
        "mixture components must differ in degrees of freedom by at least a "
        "factor of 5; ratio is " +
        format_real(ratio));
  }

  const Eigen::MatrixXd factor_a = wishart_scale_factor(mix.component_a.t);
  const Eigen::MatrixXd factor_b = wishart_scale_factor(mix.component_b.t);

  RawGroup ga(sym_block_names("W11.2", partition.block1), sample_count);
  RawGroup gb(wishart_b_names(partition), sample_count);
  CounterRng rng(seed, streams::kMixture);
  for (long i = 0; i < sample_count; ++i) {
    const bool use_b = rng.uniform() < mix.weight_b;
    const SymMatrix w =
        use_b ? draw_wishart(rng, mix.component_b.alpha, factor_b)
              : draw_wishart(rng, mix.component_a.alpha, factor_a);
    fill_sym_block(ga, i, 0, schur_complement(w, partition.block1));
    fill_wishart_b(gb, i, 0, w, partition);
  }
  return correlate_groups({std::move(ga), std::move(gb)}, sample_count);
}

namespace {

struct RegressionDraws {
  Eigen::VectorXd intercepts;    // N
  Eigen::MatrixXd coefficients;  // N x (n-1)
  Eigen::VectorXd variances;     // N
};

RegressionDraws draw_regression_triples(const NormalWishartPrior& prior,
                                        long sample_count, RandomSeed seed,
                                        std::uint64_t stream) {
  const int n = prior.dim();
  std::vector<int> ordering(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) ordering[static_cast<size_t>(i)] = i;
  const Eigen::MatrixXd factor = wishart_scale_factor(prior.t);

  RegressionDraws draws;
  draws.intercepts.resize(sample_count);
  draws.coefficients.resize(sample_count, n - 1);
  draws.variances.resize(sample_count);
  CounterRng rng(seed, stream);
  for (long i = 0; i < sample_count; ++i) {
    const auto [mu, w] = draw_normal_wishart(rng, prior, factor);
    const GaussianDagParams params =
        regression_params_from_joint(mu, w, ordering);
    const NodeParams& node = params.nodes[static_cast<size_t>(n - 1)];
    draws.intercepts(i) = node.intercept;
    draws.coefficients.row(i) = node.coefficients.transpose();
    draws.variances(i) = node.variance;
  }
  return draws;
}

}  // namespace

IndependenceReport local_standardization_test(const NormalWishartPrior& prior,
                                              long sample_count,
                                              RandomSeed seed,
                                              bool standardize) {
  check_sample_count(sample_count);
  prior.validate();
  const int n = prior.dim();
  if (n < 2) {
    throw DimensionMismatch("local standardization needs at least 2 "
                            "variables");
  }

  RegressionDraws eval =
      draw_regression_triples(prior, sample_count, seed, streams::kLocalTest);

  Eigen::VectorXd m = eval.intercepts;
  Eigen::MatrixXd b = eval.coefficients;
  std::string m_name = "m";
  std::string b_base = "b";

  if (standardize) {
    // Location and scale constants of the conditional laws m | v and
    // b_j | v are fitted on an independent pilot stream: both are
    // normal with a variance proportional to v, so the location is the
    // pilot mean and the squared scale is the pilot mean of
    // (x - location)^2 / v.
    const RegressionDraws pilot = draw_regression_triples(
        prior, sample_count, seed, streams::kLocalPilot);
    const double m_loc = pilot.intercepts.mean();
    const double m_scale = std::sqrt(
        ((pilot.intercepts.array() - m_loc).square() /
         pilot.variances.array())
            .mean());
    m = ((m.array() - m_loc) / (m_scale * eval.variances.array().sqrt()))
            .matrix();
    for (int j = 0; j < n - 1; ++j) {
      const double b_loc = pilot.coefficients.col(j).mean();
      const double b_scale = std::sqrt(
          ((pilot.coefficients.col(j).array() - b_loc).square() /
           pilot.variances.array())
              .mean());
      b.col(j) = ((b.col(j).array() - b_loc) /
                  (b_scale * eval.variances.array().sqrt()))
                     .matrix();
    }
    m_name = "m*";
    b_base = "b*";
  }

  RawGroup gm({m_name}, sample_count);
  gm.values.col(0) = m;
  std::vector<std::string> b_names;
  for (int j = 0; j < n - 1; ++j) {
    b_names.push_back(b_base + "[" + std::to_string(j) + "]");
  }
  RawGroup gbcoef(std::move(b_names), sample_count);
  gbcoef.values = b;
  RawGroup gv({"v"}, sample_count);
  gv.values.col(0) = eval.variances;

  return correlate_groups(
      {std::move(gm), std::move(gbcoef), std::move(gv)}, sample_count);
}

}  // namespace gdag
