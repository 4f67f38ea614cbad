#pragma once

#include <array>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gdag/errors.hpp"

namespace gdag {

struct Arc {
  int from = 0;
  int to = 0;
  auto operator<=>(const Arc&) const = default;
};

// Labeled directed acyclic graph.  Node identity is by index; names are
// metadata resolved at the CLI boundary.  Acyclicity is validated at
// construction.
class DagStructure {
 public:
  DagStructure(std::vector<std::string> variable_names,
               std::vector<std::vector<int>> parents);

  static DagStructure empty_graph(std::vector<std::string> variable_names);
  static DagStructure from_arcs(std::vector<std::string> variable_names,
                                const std::vector<Arc>& arcs);

  int node_count() const { return static_cast<int>(parents_.size()); }
  const std::vector<std::string>& variable_names() const { return names_; }
  const std::vector<int>& parents(int node) const {
    return parents_[static_cast<size_t>(node)];
  }
  bool has_arc(int from, int to) const;
  bool adjacent(int a, int b) const {
    return has_arc(a, b) || has_arc(b, a);
  }
  std::vector<Arc> arcs() const;  // lexicographic by (from, to)

  DagStructure with_arc_added(const Arc& a) const;
  DagStructure with_arc_removed(const Arc& a) const;

  bool operator==(const DagStructure& other) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<int>> parents_;  // each sorted ascending
};

// Deterministic topological order: lowest index first among ready nodes.
std::vector<int> topological_order(const DagStructure& g);

// Ordered triples (i, j, k), i < k, with arcs i -> j <- k and no arc
// between i and k.
std::vector<std::array<int, 3>> v_structures(const DagStructure& g);

// Undirected edge set as (min, max) pairs.
std::set<std::pair<int, int>> skeleton(const DagStructure& g);

// Verma-Pearl test: identical skeletons and identical v-structures.
bool equivalent(const DagStructure& g1, const DagStructure& g2);

// Arcs u -> v whose endpoints share parents once the arc is removed:
// parents(v) \ {u} == parents(u).
std::vector<Arc> covered_arcs(const DagStructure& g);

DagStructure reverse_covered_arc(const DagStructure& g, const Arc& a);

// All labeled DAGs on n nodes (names X1..Xn), deterministic order; n <= 5.
std::vector<DagStructure> enumerate_dags(int n);

// Partition of the input under equivalent(); groups are listed by first
// occurrence and hold input positions in order.
std::vector<std::vector<int>> equivalence_classes(
    const std::vector<DagStructure>& dags);

}  // namespace gdag
