#pragma once

#include <string>
#include <vector>

#include "rankaudit/graph.hpp"

namespace testutil {

using namespace rankaudit;

inline std::string data_path(const std::string& name) { return std::string(RANKAUDIT_DATA_DIR) + "/" + name; }

inline Graph karate(NormMode mode = NormMode::ColumnStochastic) {
  return load_edge_list(data_path("karate.txt"), false, mode);
}

inline Graph lesmis(NormMode mode = NormMode::ColumnStochastic) {
  return load_edge_list(data_path("lesmis.txt"), false, mode);
}

inline Graph make(std::size_t n, std::vector<WeightedArc> arcs, bool directed,
                  NormMode mode = NormMode::ColumnStochastic) {
  return Graph::from_edges(n, arcs, directed, mode);
}

inline Graph triangle(NormMode mode = NormMode::ColumnStochastic) {
  return make(3, {{0, 1}, {1, 2}, {0, 2}}, false, mode);
}

/// Directed path 0 -> 1 -> 2.
inline Graph path3(NormMode mode = NormMode::ColumnStochastic) { return make(3, {{0, 1}, {1, 2}}, true, mode); }

/// Undirected star with center 0 and `leaves` leaves.
inline Graph star(std::size_t leaves, NormMode mode = NormMode::ColumnStochastic) {
  std::vector<WeightedArc> arcs;
  for (NodeId v = 1; v <= leaves; ++v) arcs.push_back({0, v});
  return make(leaves + 1, arcs, false, mode);
}

}  // namespace testutil
