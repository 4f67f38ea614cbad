#pragma once

#include <string>
#include <vector>

#include "gdag/dag.hpp"
#include "gdag/rng.hpp"
#include "gdag/score.hpp"

namespace gdag {

enum class MoveKind { add, delete_, reverse };

std::string to_string(MoveKind kind);

struct Move {
  MoveKind kind = MoveKind::add;
  Arc arc;
  auto operator<=>(const Move&) const = default;
};

struct SearchConfig {
  int max_iterations = 1000;
  double improvement_epsilon = 1e-9;
  int restarts = 0;  // extra seeded starts beyond the given one
  RandomSeed seed;
};

struct TraceStep {
  Move move;
  double log_score = 0.0;
};

struct SearchResult {
  DagStructure best;
  double log_score = 0.0;
  std::vector<TraceStep> trace;  // of the run that produced `best`
};

// All acyclicity-preserving single-arc moves, ordered by (kind, from, to).
std::vector<Move> neighbors(const DagStructure& g);

DagStructure apply_move(const DagStructure& g, const Move& move);

// Greedy hill climbing over DAG space.  Each accepted move must improve
// the log score by more than cfg.improvement_epsilon; move deltas touch at
// most two families.  Restarts perturb `start` with seeded random legal
// moves and the best-scoring run wins (ties broken toward the earlier run).
SearchResult greedy_search(const ScoreContext& ctx, const DagStructure& start,
                           const SearchConfig& cfg);

SearchResult greedy_search(const NormalWishartPrior& prior,
                           const Eigen::MatrixXd& data,
                           const DagStructure& start, const SearchConfig& cfg);

}  // namespace gdag
