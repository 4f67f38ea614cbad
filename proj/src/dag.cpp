#include "gdag/dag.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace gdag {

namespace {

std::string arc_name(const DagStructure& g, const Arc& a) {
  return g.variable_names()[static_cast<size_t>(a.from)] + " -> " +
         g.variable_names()[static_cast<size_t>(a.to)];
}

}  // namespace

DagStructure::DagStructure(std::vector<std::string> variable_names,
                           std::vector<std::vector<int>> parents)
    : names_(std::move(variable_names)), parents_(std::move(parents)) {
  const int n = node_count();
  if (n < 1 || static_cast<int>(names_.size()) != n) {
    throw DimensionMismatch("variable names and parent lists disagree");
  }
  for (int v = 0; v < n; ++v) {
    auto& pa = parents_[static_cast<size_t>(v)];
    std::sort(pa.begin(), pa.end());
    for (size_t i = 0; i < pa.size(); ++i) {
      if (pa[i] < 0 || pa[i] >= n) {
        throw Error(ErrorKind::validation, "parent index out of range");
      }
      if (pa[i] == v) {
        throw CycleDetected("self-loop at " + names_[static_cast<size_t>(v)]);
      }
      if (i > 0 && pa[i] == pa[i - 1]) {
        throw Error(ErrorKind::validation,
                    "duplicate parent of " + names_[static_cast<size_t>(v)]);
      }
    }
  }
  topological_order(*this);  // throws CycleDetected on a cycle
}

DagStructure DagStructure::empty_graph(
    std::vector<std::string> variable_names) {
  std::vector<std::vector<int>> parents(variable_names.size());
  return DagStructure(std::move(variable_names), std::move(parents));
}

DagStructure DagStructure::from_arcs(std::vector<std::string> variable_names,
                                     const std::vector<Arc>& arcs) {
  std::vector<std::vector<int>> parents(variable_names.size());
  for (const Arc& a : arcs) {
    if (a.to < 0 || a.to >= static_cast<int>(variable_names.size())) {
      throw Error(ErrorKind::validation, "arc endpoint out of range");
    }
    parents[static_cast<size_t>(a.to)].push_back(a.from);
  }
  return DagStructure(std::move(variable_names), std::move(parents));
}

bool DagStructure::has_arc(int from, int to) const {
  const auto& pa = parents_[static_cast<size_t>(to)];
  return std::binary_search(pa.begin(), pa.end(), from);
}

std::vector<Arc> DagStructure::arcs() const {
  std::vector<Arc> out;
  for (int to = 0; to < node_count(); ++to) {
    for (int from : parents(to)) out.push_back({from, to});
  }
  std::sort(out.begin(), out.end());
  return out;
}

DagStructure DagStructure::with_arc_added(const Arc& a) const {
  if (has_arc(a.from, a.to)) {
    throw Error(ErrorKind::validation, "arc already present");
  }
  auto parents = parents_;
  parents[static_cast<size_t>(a.to)].push_back(a.from);
  return DagStructure(names_, std::move(parents));
}

DagStructure DagStructure::with_arc_removed(const Arc& a) const {
  if (!has_arc(a.from, a.to)) {
    throw Error(ErrorKind::validation, "arc not present");
  }
  auto parents = parents_;
  auto& pa = parents[static_cast<size_t>(a.to)];
  pa.erase(std::find(pa.begin(), pa.end(), a.from));
  return DagStructure(names_, std::move(parents));
}

std::vector<int> topological_order(const DagStructure& g) {
  const int n = g.node_count();
  std::vector<int> remaining_parents(static_cast<size_t>(n));
  std::vector<std::vector<int>> children(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) {
    remaining_parents[static_cast<size_t>(v)] =
        static_cast<int>(g.parents(v).size());
    for (int p : g.parents(v)) children[static_cast<size_t>(p)].push_back(v);
  }
  // Lowest-index-first among ready nodes keeps the order deterministic.
  std::set<int> ready;
  for (int v = 0; v < n; ++v) {
    if (remaining_parents[static_cast<size_t>(v)] == 0) ready.insert(v);
  }
  std::vector<int> order;
  while (!ready.empty()) {
    int v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (int c : children[static_cast<size_t>(v)]) {
      if (--remaining_parents[static_cast<size_t>(c)] == 0) ready.insert(c);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    throw CycleDetected("arc list contains a directed cycle");
  }
  return order;
}

std::vector<std::array<int, 3>> v_structures(const DagStructure& g) {
  std::vector<std::array<int, 3>> out;
  for (int j = 0; j < g.node_count(); ++j) {
    const auto& pa = g.parents(j);
    for (size_t a = 0; a < pa.size(); ++a) {
      for (size_t b = a + 1; b < pa.size(); ++b) {
        int i = pa[a];
        int k = pa[b];  // i < k since parents are sorted
        if (!g.adjacent(i, k)) out.push_back({i, j, k});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::set<std::pair<int, int>> skeleton(const DagStructure& g) {
  std::set<std::pair<int, int>> edges;
  for (const Arc& a : g.arcs()) {
    edges.emplace(std::min(a.from, a.to), std::max(a.from, a.to));
  }
  return edges;
}

bool equivalent(const DagStructure& g1, const DagStructure& g2) {
  if (g1.variable_names() != g2.variable_names()) {
    throw VariableMismatch("DAGs are over different variables");
  }
  return skeleton(g1) == skeleton(g2) && v_structures(g1) == v_structures(g2);
}

std::vector<Arc> covered_arcs(const DagStructure& g) {
  std::vector<Arc> out;
  for (const Arc& a : g.arcs()) {
    std::vector<int> to_parents = g.parents(a.to);
    to_parents.erase(std::find(to_parents.begin(), to_parents.end(), a.from));
    if (to_parents == g.parents(a.from)) out.push_back(a);
  }
  return out;
}

DagStructure reverse_covered_arc(const DagStructure& g, const Arc& a) {
  auto covered = covered_arcs(g);
  if (std::find(covered.begin(), covered.end(), a) == covered.end()) {
    throw ArcNotCovered("arc " + arc_name(g, a) + " is not covered");
  }
  return g.with_arc_removed(a).with_arc_added({a.to, a.from});
}

std::vector<DagStructure> enumerate_dags(int n) {
  if (n < 1 || n > 5) {
    throw TooLarge("enumerate_dags supports 1 <= n <= 5");
  }
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back("X" + std::to_string(i));

  // Ordered pairs (from, to), lexicographic; one bit per possible arc.
  std::vector<Arc> slots;
  for (int from = 0; from < n; ++from) {
    for (int to = 0; to < n; ++to) {
      if (from != to) slots.push_back({from, to});
    }
  }
  std::vector<DagStructure> out;
  const std::uint64_t limit = 1ull << slots.size();
  for (std::uint64_t mask = 0; mask < limit; ++mask) {
    // parent_bits[v] holds a bit per parent of v.
    unsigned parent_bits[5] = {0, 0, 0, 0, 0};
    for (size_t i = 0; i < slots.size(); ++i) {
      if (mask & (1ull << i)) {
        parent_bits[slots[i].to] |= 1u << slots[i].from;
      }
    }
    // Kahn-style elimination on the bitmasks.
    unsigned removed = 0;
    const unsigned all = (1u << n) - 1;
    for (;;) {
      unsigned next = removed;
      for (int v = 0; v < n; ++v) {
        if ((parent_bits[v] & ~removed) == 0) next |= 1u << v;
      }
      if (next == removed) break;
      removed = next;
    }
    if (removed != all) continue;
    std::vector<std::vector<int>> parents(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) {
      for (int p = 0; p < n; ++p) {
        if (parent_bits[v] & (1u << p)) {
          parents[static_cast<size_t>(v)].push_back(p);
        }
      }
    }
    out.emplace_back(names, std::move(parents));
  }
  return out;
}

std::vector<std::vector<int>> equivalence_classes(
    const std::vector<DagStructure>& dags) {
  std::map<std::string, int> class_of_key;
  std::vector<std::vector<int>> classes;
  for (size_t i = 0; i < dags.size(); ++i) {
    if (i > 0 && dags[i].variable_names() != dags[0].variable_names()) {
      throw VariableMismatch("DAGs are over different variables");
    }
    std::ostringstream key;
    for (const auto& e : skeleton(dags[i])) {
      key << e.first << "-" << e.second << ";";
    }
    key << "|";
    for (const auto& v : v_structures(dags[i])) {
      key << v[0] << ">" << v[1] << "<" << v[2] << ";";
    }
    auto [it, inserted] =
        class_of_key.try_emplace(key.str(), static_cast<int>(classes.size()));
    if (inserted) classes.emplace_back();
    classes[static_cast<size_t>(it->second)].push_back(static_cast<int>(i));
  }
  return classes;
}

}  // namespace gdag
