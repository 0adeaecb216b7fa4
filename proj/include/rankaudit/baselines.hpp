#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rankaudit/audit.hpp"
#include "rankaudit/graph.hpp"
#include "rankaudit/linsys.hpp"

namespace rankaudit {

/// Elements picked by a reference selector, with the score that ranked
/// each of them (NaN-free; random selections carry zeros).
struct Selection {
  ElementSet set;
  std::vector<double> scores;
  std::vector<std::string> warnings;
};

/// Uniform sample without replacement from the existing edges, or from all
/// nodes (nodes and subgraph kinds). Reproducible for a fixed seed.
Selection select_random(const Graph& g, std::size_t k, ElementKind kind, std::uint64_t seed);

/// Top-k by degree. Edge score is (d(u) + d(v)) * max(d(u), d(v)) for
/// undirected graphs and (d(u) + d(v)) * d(u) for directed ones.
Selection select_degree(const Graph& g, std::size_t k, ElementKind kind);

/// Top-k by PageRank score with the same edge-score shape as select_degree.
Selection select_pagerank(const Graph& g, std::size_t k, ElementKind kind, double c,
                          const SolverOptions& opts = {});

struct HitsScores {
  std::vector<double> hub;
  std::vector<double> auth;
  int iterations = 0;
  double residual = 0.0;
};

/// Hub and authority vectors: auth is the dominant eigenvector of A_adj' A_adj
/// and hub that of A_adj A_adj' (A_adj(u, v) = raw weight of arc u -> v), both
/// obtained by L2-normalized power iteration from a uniform start.
HitsScores hits(const Graph& g, double tol = 1e-10, int max_iter = 10000);

/// Top-k by hub(u) hub(v) + auth(u) auth(v) for edges, hub(u) + auth(u) for
/// nodes.
Selection select_hits(const Graph& g, std::size_t k, ElementKind kind, double tol = 1e-10,
                      int max_iter = 10000);

inline constexpr std::uint64_t kDefaultBruteForceLimit = 10'000'000;

struct BruteForceResult {
  ElementSet best;
  double delta_f = 0.0;
  std::uint64_t evaluated = 0;
};

/// Number of k-subsets of a population, saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Exhaustive argmax of evaluate_delta_f over every k-subset of the kind's
/// population (edges, or all nodes for nodes and subgraph). Ties keep the
/// lexicographically first subset. Throws ResourceLimit when the subset count
/// exceeds `limit`. Work is split across RANKAUDIT_THREADS threads.
BruteForceResult brute_force(const Graph& g, std::size_t k, ElementKind kind, const AuditConfig& cfg = {},
                             std::uint64_t limit = kDefaultBruteForceLimit);

/// Thread count from RANKAUDIT_THREADS, else the hardware concurrency.
unsigned worker_threads();

}  // namespace rankaudit
