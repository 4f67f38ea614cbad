#include <CLI11.hpp>
#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gdag/characterize.hpp"
#include "gdag/dag.hpp"
#include "gdag/errors.hpp"
#include "gdag/fingerprint.hpp"
#include "gdag/format.hpp"
#include "gdag/io.hpp"
#include "gdag/sampler.hpp"
#include "gdag/score.hpp"
#include "gdag/search.hpp"

namespace {

using namespace gdag;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

// Report preamble: command echo and a content hash per input file, so
// identical inputs yield byte-identical reports.
struct ReportBuilder {
  std::string text;

  void echo_command(int argc, char** argv) {
    text += "# command:";
    for (int i = 0; i < argc; ++i) text += std::string(" ") + argv[i];
    text += '\n';
  }
  void fingerprint(const std::string& path) {
    if (path.empty()) return;
    text += "# input " + path + " fnv1a64 " + hex64(fnv1a(read_text_file(path))) +
            "\n";
  }
  void seed_line(std::uint64_t seed) {
    text += "# seed " + std::to_string(seed) + "\n";
  }
  void line(const std::string& s) { text += s + "\n"; }
};

void emit(const ReportBuilder& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << report.text;
  } else {
    write_text_file(out_path, report.text);
  }
}

// Reindexes a parsed DAG so node i carries names[i]; the name sets must
// coincide.
DagStructure align_to_names(const DagStructure& g,
                            const std::vector<std::string>& names) {
  const int n = static_cast<int>(names.size());
  if (g.node_count() != n) {
    throw VariableMismatch("graph has " + std::to_string(g.node_count()) +
                           " nodes but expected " + std::to_string(n));
  }
  std::vector<int> to_new(static_cast<size_t>(n), -1);
  for (int old = 0; old < n; ++old) {
    const std::string& name = g.variable_names()[static_cast<size_t>(old)];
    int found = -1;
    for (int i = 0; i < n; ++i) {
      if (names[static_cast<size_t>(i)] == name) {
        found = i;
        break;
      }
    }
    if (found < 0) {
      throw VariableMismatch("graph variable '" + name +
                             "' is not a dataset variable");
    }
    to_new[static_cast<size_t>(old)] = found;
  }
  std::vector<std::vector<int>> parents(static_cast<size_t>(n));
  for (int old = 0; old < n; ++old) {
    std::vector<int> mapped;
    for (int p : g.parents(old)) {
      mapped.push_back(to_new[static_cast<size_t>(p)]);
    }
    parents[static_cast<size_t>(to_new[static_cast<size_t>(old)])] =
        std::move(mapped);
  }
  return DagStructure(names, std::move(parents));
}

std::string arcs_summary(const DagStructure& g) {
  std::string out;
  for (const Arc& arc : g.arcs()) {
    if (!out.empty()) out += ';';
    out += g.variable_names()[static_cast<size_t>(arc.from)] + "->" +
           g.variable_names()[static_cast<size_t>(arc.to)];
  }
  return out.empty() ? "-" : out;
}

std::vector<std::string> synthetic_names(int n) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back("X" + std::to_string(i));
  return names;
}

IndexSet parse_partition(const std::string& csv,
                         const std::vector<std::string>& names) {
  if (csv.empty()) return IndexSet{0};
  std::vector<int> members;
  size_t start = 0;
  while (start <= csv.size()) {
    size_t pos = csv.find(',', start);
    if (pos == std::string::npos) pos = csv.size();
    const std::string token = csv.substr(start, pos - start);
    start = pos + 1;
    if (token.empty()) {
      throw Error(ErrorKind::validation, "empty entry in --partition");
    }
    int index = -1;
    for (size_t i = 0; i < names.size(); ++i) {
      if (names[i] == token) {
        index = static_cast<int>(i);
        break;
      }
    }
    if (index < 0 &&
        token.find_first_not_of("0123456789") == std::string::npos) {
      index = std::atoi(token.c_str());
    }
    if (index < 0 || index >= static_cast<int>(names.size())) {
      throw Error(ErrorKind::validation,
                  "--partition entry '" + token + "' names no variable");
    }
    members.push_back(index);
    if (pos == csv.size()) break;
  }
  return IndexSet(std::move(members));
}

NormalWishartPrior load_prior(const std::string& path, int n) {
  return path.empty() ? default_prior(n) : read_prior_file(path, n);
}

GaussianDagParams parse_params_file(const std::string& text,
                                    const DagStructure& g);

int run_score(const std::string& data_path, const std::string& dag_path,
              const std::string& prior_path, const std::string& out_path,
              ReportBuilder& report) {
  const Dataset data = ingest_dataset(data_path);
  const DagStructure g =
      align_to_names(read_dag_file(dag_path), data.variable_names);
  ScoreContext ctx(load_prior(prior_path, data.variable_count()),
                   data.values);
  report.line("log_score = " + format_real(ctx.dag_log_score(g)));
  for (int node = 0; node < g.node_count(); ++node) {
    std::string parents = "-";
    if (!g.parents(node).empty()) {
      parents.clear();
      for (int p : g.parents(node)) {
        if (!parents.empty()) parents += ',';
        parents += data.variable_names[static_cast<size_t>(p)];
      }
    }
    const double value =
        ctx.family_log_score(FamilyKey(node, IndexSet(g.parents(node))));
    report.line("family " + data.variable_names[static_cast<size_t>(node)] +
                " parents " + parents + " log_score = " + format_real(value));
  }
  emit(report, out_path);
  return 0;
}

int run_learn(const std::string& data_path, const std::string& prior_path,
              int restarts, std::uint64_t seed, const std::string& out_path,
              ReportBuilder& report) {
  const Dataset data = ingest_dataset(data_path);
  ScoreContext ctx(load_prior(prior_path, data.variable_count()),
                   data.values);
  SearchConfig cfg;
  cfg.restarts = restarts;
  cfg.seed = RandomSeed{seed};
  const SearchResult result =
      greedy_search(ctx, DagStructure::empty_graph(data.variable_names), cfg);
  for (const TraceStep& step : result.trace) {
    const auto& names = result.best.variable_names();
    report.line(to_string(step.move.kind) + " " +
                names[static_cast<size_t>(step.move.arc.from)] + "->" +
                names[static_cast<size_t>(step.move.arc.to)] + " " +
                format_real(step.log_score));
  }
  report.line("log_score = " + format_real(result.log_score));
  report.text += write_dag(result.best);
  emit(report, out_path);
  return 0;
}

int run_posterior(const std::string& data_path, const std::string& prior_path,
                  const std::string& out_path, ReportBuilder& report) {
  const Dataset data = ingest_dataset(data_path);
  auto table = structure_posterior(load_prior(prior_path,
                                              data.variable_count()),
                                   data.values, data.variable_names);
  std::stable_sort(table.begin(), table.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;
                   });
  for (const auto& [g, prob] : table) {
    report.line(format_real(prob) + " " + arcs_summary(g));
  }
  emit(report, out_path);
  return 0;
}

int run_sample(const std::string& dag_path, const std::string& params_path,
               bool from_prior, const std::string& prior_path, long rows,
               std::uint64_t seed, const std::string& out_path,
               ReportBuilder& report) {
  const DagStructure g = read_dag_file(dag_path);
  if (from_prior == !params_path.empty()) {
    throw UsageError("pass exactly one of --params and --from-prior");
  }
  GaussianDagParams params =
      from_prior
          ? sample_params_from_prior(load_prior(prior_path, g.node_count()),
                                     g, RandomSeed{seed})
          : parse_params_file(read_text_file(params_path), g);
  const Eigen::MatrixXd values =
      sample_dataset(params, g, rows, RandomSeed{seed});
  Dataset out;
  out.variable_names = g.variable_names();
  out.values = values;
  report.text += write_dataset(out);
  emit(report, out_path);
  return 0;
}

int run_equiv(const std::string& dag_path, const std::string& dag2_path,
              const std::string& out_path, ReportBuilder& report) {
  const DagStructure g1 = read_dag_file(dag_path);
  const DagStructure g2 =
      align_to_names(read_dag_file(dag2_path), g1.variable_names());
  const auto& names = g1.variable_names();

  report.line(equivalent(g1, g2) ? "verdict equivalent"
                                 : "verdict not_equivalent");

  const auto sk1 = skeleton(g1);
  const auto sk2 = skeleton(g2);
  auto edge_name = [&names](const std::pair<int, int>& e) {
    return names[static_cast<size_t>(e.first)] + "-" +
           names[static_cast<size_t>(e.second)];
  };
  for (const auto& e : sk1) {
    if (!sk2.count(e)) report.line("skeleton first_only " + edge_name(e));
  }
  for (const auto& e : sk2) {
    if (!sk1.count(e)) report.line("skeleton second_only " + edge_name(e));
  }

  auto vset = [](const DagStructure& g) {
    const auto v = v_structures(g);
    return std::set<std::array<int, 3>>(v.begin(), v.end());
  };
  const auto v1 = vset(g1);
  const auto v2 = vset(g2);
  auto v_name = [&names](const std::array<int, 3>& t) {
    return names[static_cast<size_t>(t[0])] + "->" +
           names[static_cast<size_t>(t[1])] + "<-" +
           names[static_cast<size_t>(t[2])];
  };
  for (const auto& t : v1) {
    if (!v2.count(t)) report.line("vstructure first_only " + v_name(t));
  }
  for (const auto& t : v2) {
    if (!v1.count(t)) report.line("vstructure second_only " + v_name(t));
  }
  emit(report, out_path);
  return 0;
}

int run_classes(int n, const std::string& out_path, ReportBuilder& report) {
  const std::vector<DagStructure> dags = enumerate_dags(n);
  const std::vector<std::vector<int>> classes = equivalence_classes(dags);
  report.line("n " + std::to_string(n));
  report.line("dags " + std::to_string(dags.size()));
  report.line("classes " + std::to_string(classes.size()));
  for (size_t c = 0; c < classes.size(); ++c) {
    report.line(
        "class " + std::to_string(c) + " size " +
        std::to_string(classes[c].size()) + " representative " +
        arcs_summary(dags[static_cast<size_t>(classes[c].front())]));
  }
  emit(report, out_path);
  return 0;
}

int run_characterize(const std::string& mode, const std::string& prior_path,
                     int n, const std::string& partition_csv, long samples,
                     std::uint64_t seed, const std::string& out_path,
                     ReportBuilder& report) {
  const NormalWishartPrior prior = load_prior(prior_path, n);
  const RandomSeed rng_seed{seed};
  report.line("mode " + mode);

  if (mode == "local") {
    report.text += local_standardization_test(prior, samples, rng_seed).render();
    emit(report, out_path);
    return 0;
  }

  const IndexSet block1 =
      parse_partition(partition_csv, synthetic_names(n));
  const PartitionSpec partition(block1, n);

  if (mode == "counterexample") {
    MixturePrior mix;
    mix.component_a = prior;
    mix.component_b = prior;
    mix.component_b.alpha = prior.alpha * 10.0;
    mix.weight_b = 0.5;
    report.line("components alpha " + format_real(mix.component_a.alpha) +
                " and " + format_real(mix.component_b.alpha) +
                " weight " + format_real(mix.weight_b));
    report.text +=
        counterexample_test(mix, partition, samples, rng_seed).render();
    emit(report, out_path);
    return 0;
  }

  TestMode test_mode;
  if (mode == "wishart") {
    test_mode = TestMode::wishart;
  } else if (mode == "normal-mean") {
    test_mode = TestMode::normal_mean;
  } else if (mode == "normal-wishart") {
    test_mode = TestMode::normal_wishart;
  } else {
    throw UsageError("unknown --mode '" + mode + "'");
  }

  if (test_mode == TestMode::normal_mean) {
    // Both sign conventions of the combined location are reported.
    report.line("sign plus");
    report.text += global_independence_test(test_mode, prior, partition,
                                            samples, rng_seed, MeanSign::plus)
                       .render();
    report.line("sign minus");
    report.text += global_independence_test(test_mode, prior, partition,
                                            samples, rng_seed,
                                            MeanSign::minus)
                       .render();
  } else {
    report.text += global_independence_test(test_mode, prior, partition,
                                            samples, rng_seed)
                       .render();
  }
  emit(report, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian scoring and structure learning for Gaussian DAG "
               "models"};
  app.require_subcommand(1);

  std::string data_path, dag_path, dag2_path, prior_path, params_path;
  std::string out_path, mode = "wishart", partition_csv;
  std::uint64_t seed = 0;
  long rows = 0, samples = 100000;
  int n = 3, restarts = 0;
  bool from_prior = false;

  CLI::App* score = app.add_subcommand("score", "Log marginal likelihood of "
                                                "a DAG with per-family "
                                                "breakdown");
  score->add_option("--data", data_path)->required();
  score->add_option("--dag", dag_path)->required();
  score->add_option("--prior", prior_path);
  score->add_option("--out", out_path);

  CLI::App* learn = app.add_subcommand("learn", "Greedy structure search "
                                                "from the empty graph");
  learn->add_option("--data", data_path)->required();
  learn->add_option("--prior", prior_path);
  learn->add_option("--restarts", restarts);
  learn->add_option("--seed", seed);
  learn->add_option("--out", out_path);

  CLI::App* posterior = app.add_subcommand("posterior", "Exact structure "
                                                        "posterior (n <= 4)");
  posterior->add_option("--data", data_path)->required();
  posterior->add_option("--prior", prior_path);
  posterior->add_option("--out", out_path);

  CLI::App* sample = app.add_subcommand("sample", "Draw a dataset from a DAG "
                                                  "model");
  sample->add_option("--dag", dag_path)->required();
  sample->add_option("--params", params_path);
  sample->add_flag("--from-prior", from_prior,
                   "draw parameters from the prior instead of --params");
  sample->add_option("--prior", prior_path);
  sample->add_option("--rows", rows)->required();
  sample->add_option("--seed", seed);
  sample->add_option("--out", out_path);

  CLI::App* equiv = app.add_subcommand("equiv", "Markov equivalence verdict "
                                                "with skeleton/v-structure "
                                                "diff");
  equiv->add_option("--dag", dag_path)->required();
  equiv->add_option("--dag2", dag2_path)->required();
  equiv->add_option("--out", out_path);

  CLI::App* classes = app.add_subcommand("classes", "Enumerate DAGs and "
                                                    "equivalence classes");
  classes->add_option("--n", n)->required();
  classes->add_option("--out", out_path);

  CLI::App* characterize =
      app.add_subcommand("characterize", "Monte Carlo independence reports "
                                         "for the prior decompositions");
  characterize->add_option("--mode", mode,
                           "wishart | normal-mean | normal-wishart | local | "
                           "counterexample");
  characterize->add_option("--prior", prior_path);
  characterize->add_option("--n", n);
  characterize->add_option("--partition", partition_csv,
                           "comma list of block-1 variables");
  characterize->add_option("--samples", samples);
  characterize->add_option("--seed", seed);
  characterize->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    ReportBuilder report;
    report.echo_command(argc, argv);
    for (const std::string& path :
         {data_path, dag_path, dag2_path, prior_path, params_path}) {
      report.fingerprint(path);
    }

    if (app.got_subcommand(score)) {
      return run_score(data_path, dag_path, prior_path, out_path, report);
    }
    if (app.got_subcommand(learn)) {
      report.seed_line(seed);
      return run_learn(data_path, prior_path, restarts, seed, out_path,
                       report);
    }
    if (app.got_subcommand(posterior)) {
      return run_posterior(data_path, prior_path, out_path, report);
    }
    if (app.got_subcommand(sample)) {
      report.seed_line(seed);
      return run_sample(dag_path, params_path, from_prior, prior_path, rows,
                        seed, out_path, report);
    }
    if (app.got_subcommand(equiv)) {
      return run_equiv(dag_path, dag2_path, out_path, report);
    }
    if (app.got_subcommand(classes)) {
      return run_classes(n, out_path, report);
    }
    if (app.got_subcommand(characterize)) {
      report.seed_line(seed);
      return run_characterize(mode, prior_path, n, partition_csv, samples,
                              seed, out_path, report);
    }
    throw UsageError("no subcommand given");
  } catch (const gdag::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}

namespace {

// Params file: one line per node,
//   NODE intercept=<v> variance=<v> PARENT=<coef> ...
// Every node appears exactly once and every parent needs a coefficient.
GaussianDagParams parse_params_file(const std::string& text,
                                    const DagStructure& g) {
  const int n = g.node_count();
  GaussianDagParams params;
  params.nodes.resize(static_cast<size_t>(n));
  std::vector<bool> seen(static_cast<size_t>(n), false);

  auto node_index = [&g, n](const std::string& name) {
    for (int i = 0; i < n; ++i) {
      if (g.variable_names()[static_cast<size_t>(i)] == name) return i;
    }
    return -1;
  };

  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::istringstream fields(raw);
    std::string head;
    if (!(fields >> head)) continue;

    const int node = node_index(head);
    if (node < 0) {
      throw ParseError("unknown node '" + head + "' at line " +
                       std::to_string(number),
                       number, 0);
    }
    if (seen[static_cast<size_t>(node)]) {
      throw ParseError("node '" + head + "' appears twice (line " +
                       std::to_string(number) + ")",
                       number, 0);
    }
    seen[static_cast<size_t>(node)] = true;

    NodeParams& entry = params.nodes[static_cast<size_t>(node)];
    const std::vector<int>& parents = g.parents(node);
    entry.coefficients = Eigen::VectorXd::Zero(
        static_cast<Eigen::Index>(parents.size()));
    std::vector<bool> have_coef(parents.size(), false);
    bool have_intercept = false, have_variance = false;

    std::string token;
    while (fields >> token) {
      const size_t eq = token.find('=');
      if (eq == std::string::npos) {
        throw ParseError("expected key=value, got '" + token + "' at line " +
                         std::to_string(number),
                         number, 0);
      }
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      const double parsed = [&] {
        errno = 0;
        char* end = nullptr;
        const double v = std::strtod(value.c_str(), &end);
        if (value.empty() || end != value.c_str() + value.size() ||
            !std::isfinite(v)) {
          throw ParseError("bad number '" + value + "' at line " +
                           std::to_string(number),
                           number, 0);
        }
        return v;
      }();
      if (key == "intercept") {
        entry.intercept = parsed;
        have_intercept = true;
      } else if (key == "variance") {
        if (!(parsed > 0.0)) {
          throw ParseError("variance must be positive at line " +
                           std::to_string(number),
                           number, 0);
        }
        entry.variance = parsed;
        have_variance = true;
      } else {
        const int parent = node_index(key);
        bool matched = false;
        for (size_t k = 0; k < parents.size(); ++k) {
          if (parents[k] == parent) {
            entry.coefficients(static_cast<Eigen::Index>(k)) = parsed;
            have_coef[k] = true;
            matched = true;
            break;
          }
        }
        if (!matched) {
          throw ParseError("'" + key + "' is not a parent of '" + head +
                           "' (line " + std::to_string(number) + ")",
                           number, 0);
        }
      }
    }
    if (!have_intercept || !have_variance) {
      throw ParseError("node '" + head + "' needs intercept= and variance= "
                       "(line " + std::to_string(number) + ")",
                       number, 0);
    }
    for (size_t k = 0; k < parents.size(); ++k) {
      if (!have_coef[k]) {
        throw ParseError(
            "node '" + head + "' is missing a coefficient for parent '" +
                g.variable_names()[static_cast<size_t>(parents[k])] +
                "' (line " + std::to_string(number) + ")",
            number, 0);
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    if (!seen[static_cast<size_t>(i)]) {
      throw ParseError("no parameters for node '" +
                       g.variable_names()[static_cast<size_t>(i)] + "'",
                       0, 0);
    }
  }
  return params;
}

}  // namespace
