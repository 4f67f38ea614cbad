#include "gdag/search.hpp"

#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "gdag/errors.hpp"

namespace gdag {

namespace {

// Depth-first reachability along directed arcs.
bool reaches(const DagStructure& g, int src, int dst) {
  if (src == dst) return true;
  std::vector<char> seen(static_cast<size_t>(g.node_count()), 0);
  std::vector<int> stack{src};
  seen[static_cast<size_t>(src)] = 1;
  while (!stack.empty()) {
    const int at = stack.back();
    stack.pop_back();
    for (int child = 0; child < g.node_count(); ++child) {
      if (!g.has_arc(at, child) || seen[static_cast<size_t>(child)]) continue;
      if (child == dst) return true;
      seen[static_cast<size_t>(child)] = 1;
      stack.push_back(child);
    }
  }
  return false;
}

IndexSet parents_plus(const DagStructure& g, int node, int extra) {
  std::vector<int> p = g.parents(node);
  p.push_back(extra);
  return IndexSet(std::move(p));
}

IndexSet parents_minus(const DagStructure& g, int node, int removed) {
  std::vector<int> p;
  for (int q : g.parents(node)) {
    if (q != removed) p.push_back(q);
  }
  return IndexSet(std::move(p));
}

// Score change of a move; touches one family for add/delete, two for
// reverse.
double move_delta(const ScoreContext& ctx, const DagStructure& g,
                  const Move& move) {
  const int u = move.arc.from;
  const int v = move.arc.to;
  const double v_now =
      ctx.family_log_score(FamilyKey(v, IndexSet(g.parents(v))));
  switch (move.kind) {
    case MoveKind::add:
      return ctx.family_log_score(FamilyKey(v, parents_plus(g, v, u))) - v_now;
    case MoveKind::delete_:
      return ctx.family_log_score(FamilyKey(v, parents_minus(g, v, u))) -
             v_now;
    case MoveKind::reverse: {
      const double u_now =
          ctx.family_log_score(FamilyKey(u, IndexSet(g.parents(u))));
      return ctx.family_log_score(FamilyKey(v, parents_minus(g, v, u))) -
             v_now +
             ctx.family_log_score(FamilyKey(u, parents_plus(g, u, v))) - u_now;
    }
  }
  std::abort();
}

struct ClimbResult {
  DagStructure graph;
  double log_score;
  std::vector<TraceStep> trace;
};

ClimbResult climb(const ScoreContext& ctx, DagStructure current,
                  const SearchConfig& cfg) {
  double score = ctx.dag_log_score(current);
  std::vector<TraceStep> trace;
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    bool found = false;
    Move best_move;
    double best_delta = cfg.improvement_epsilon;
    for (const Move& move : neighbors(current)) {
      const double delta = move_delta(ctx, current, move);
      // Strict > keeps the first (lexicographically least) move on ties.
      if (delta > best_delta) {
        best_delta = delta;
        best_move = move;
        found = true;
      }
    }
    if (!found) break;
    current = apply_move(current, best_move);
    // Rescore from the cache instead of accumulating deltas, so the trace
    // carries drift-free log scores.
    score = ctx.dag_log_score(current);
    trace.push_back({best_move, score});
  }
  return {std::move(current), score, std::move(trace)};
}

DagStructure perturb(const DagStructure& start, CounterRng& rng, int moves) {
  DagStructure g = start;
  for (int i = 0; i < moves; ++i) {
    const std::vector<Move> options = neighbors(g);
    if (options.empty()) break;
    const size_t pick =
        static_cast<size_t>(rng.next_u64() % options.size());
    g = apply_move(g, options[pick]);
  }
  return g;
}

}  // namespace

std::string to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::add: return "add";
    case MoveKind::delete_: return "delete";
    case MoveKind::reverse: return "reverse";
  }
  std::abort();
}

std::vector<Move> neighbors(const DagStructure& g) {
  const int n = g.node_count();
  std::vector<Move> moves;
  for (int from = 0; from < n; ++from) {
    for (int to = 0; to < n; ++to) {
      if (from == to || g.adjacent(from, to)) continue;
      // from -> to closes a cycle exactly when to already reaches from.
      if (!reaches(g, to, from)) {
        moves.push_back({MoveKind::add, {from, to}});
      }
    }
  }
  for (const Arc& arc : g.arcs()) {
    moves.push_back({MoveKind::delete_, arc});
  }
  for (const Arc& arc : g.arcs()) {
    const DagStructure without = g.with_arc_removed(arc);
    if (!reaches(without, arc.from, arc.to)) {
      moves.push_back({MoveKind::reverse, arc});
    }
  }
  return moves;
}

DagStructure apply_move(const DagStructure& g, const Move& move) {
  switch (move.kind) {
    case MoveKind::add:
      return g.with_arc_added(move.arc);
    case MoveKind::delete_:
      return g.with_arc_removed(move.arc);
    case MoveKind::reverse:
      return g.with_arc_removed(move.arc).with_arc_added(
          {move.arc.to, move.arc.from});
  }
  std::abort();
}

SearchResult greedy_search(const ScoreContext& ctx, const DagStructure& start,
                           const SearchConfig& cfg) {
  if (cfg.max_iterations < 1) {
    throw Error(ErrorKind::validation, "max_iterations must be positive");
  }
  if (!(cfg.improvement_epsilon > 0.0)) {
    throw Error(ErrorKind::validation,
                "improvement_epsilon must be positive");
  }
  if (cfg.restarts < 0) {
    throw Error(ErrorKind::validation, "restarts must be non-negative");
  }
  if (start.node_count() != ctx.data().cols()) {
    throw VariableMismatch("start graph has " +
                           std::to_string(start.node_count()) +
                           " nodes but the data has " +
                           std::to_string(ctx.data().cols()) + " columns");
  }

  ClimbResult best = climb(ctx, start, cfg);
  for (int r = 1; r <= cfg.restarts; ++r) {
    CounterRng rng(cfg.seed,
                   streams::kSearchRestart + static_cast<std::uint64_t>(r));
    const DagStructure jittered =
        perturb(start, rng, start.node_count() + r);
    ClimbResult run = climb(ctx, jittered, cfg);
    if (run.log_score > best.log_score) best = std::move(run);
  }
  return {std::move(best.graph), best.log_score, std::move(best.trace)};
}

SearchResult greedy_search(const NormalWishartPrior& prior,
                           const Eigen::MatrixXd& data,
                           const DagStructure& start,
                           const SearchConfig& cfg) {
  ScoreContext ctx(prior, data);
  return greedy_search(ctx, start, cfg);
}

}  // namespace gdag
