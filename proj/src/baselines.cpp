#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rankaudit/baselines.hpp"
#include "rankaudit/error.hpp"

namespace rankaudit {

namespace {

void require_budget(std::size_t k) {
  if (k < 1) throw Error(ErrorKind::Argument, "budget k must be at least 1");
}

std::size_t clamp_budget(std::size_t k, std::size_t population, Selection& out) {
  if (k > population) {
    out.warnings.push_back("budget " + std::to_string(k) + " exceeds population " +
                           std::to_string(population) + "; clamped");
    return population;
  }
  return k;
}

/// Picks the k best candidates; candidates arrive in lexicographic order and
/// the stable sort keeps that order among equal scores.
template <typename T>
Selection top_k(std::vector<T> candidates, std::vector<double> scores, std::size_t k, ElementKind kind) {
  Selection out;
  out.set.kind = kind;
  k = clamp_budget(k, candidates.size(), out);
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  for (std::size_t i = 0; i < k; ++i) {
    if constexpr (std::is_same_v<T, Edge>) {
      out.set.edges.push_back(candidates[order[i]]);
    } else {
      out.set.nodes.push_back(candidates[order[i]]);
    }
    out.scores.push_back(scores[order[i]]);
  }
  return out;
}

std::vector<NodeId> all_nodes(const Graph& g) {
  std::vector<NodeId> nodes(g.node_count());
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  return nodes;
}

/// Shared shape of the degree and PageRank edge scores.
double pair_score(const Graph& g, const Edge& e, std::span<const double> node_score) {
  const double su = node_score[e.src];
  const double sv = node_score[e.dst];
  return g.directed() ? (su + sv) * su : (su + sv) * std::max(su, sv);
}

Selection select_by_node_score(const Graph& g, std::size_t k, ElementKind kind,
                               std::span<const double> node_score) {
  require_budget(k);
  if (kind == ElementKind::Edges) {
    auto edges = g.edges();
    std::vector<double> scores;
    scores.reserve(edges.size());
    for (const auto& e : edges) scores.push_back(pair_score(g, e, node_score));
    return top_k(std::move(edges), std::move(scores), k, kind);
  }
  return top_k(all_nodes(g), std::vector<double>(node_score.begin(), node_score.end()), k, kind);
}

std::vector<double> l2_normalized(std::vector<double> v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (auto& x : v) x /= norm;
  }
  return v;
}

}  // namespace

Selection select_random(const Graph& g, std::size_t k, ElementKind kind, std::uint64_t seed) {
  require_budget(k);
  std::mt19937_64 rng(seed);
  Selection out;
  out.set.kind = kind;
  const auto sample = [&](auto population) {
    k = clamp_budget(k, population.size(), out);
    // Partial Fisher-Yates: the first k slots form the sample.
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, population.size() - 1);
      std::swap(population[i], population[pick(rng)]);
    }
    population.resize(k);
    return population;
  };
  if (kind == ElementKind::Edges) {
    out.set.edges = sample(g.edges());
  } else {
    out.set.nodes = sample(all_nodes(g));
  }
  out.scores.assign(out.set.size(), 0.0);
  return out;
}

Selection select_degree(const Graph& g, std::size_t k, ElementKind kind) {
  std::vector<double> degree(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) degree[v] = static_cast<double>(g.degree(v));
  return select_by_node_score(g, k, kind, degree);
}

Selection select_pagerank(const Graph& g, std::size_t k, ElementKind kind, double c, const SolverOptions& opts) {
  const auto r = pagerank(g, UniformTeleport{}, c, opts);
  return select_by_node_score(g, k, kind, r.values);
}

HitsScores hits(const Graph& g, double tol, int max_iter) {
  if (g.arc_count() == 0) throw Error(ErrorKind::Validation, "HITS needs at least one arc");
  if (!(tol > 0.0) || max_iter < 1) throw Error(ErrorKind::Argument, "invalid HITS tolerance or budget");
  const std::size_t n = g.node_count();
  const auto out = g.out_view();
  const auto out_raw = g.out_raw_weights();

  // y = A_adj x: y(u) = sum over arcs u -> v of w x(v).
  const auto forward = [&](std::span<const double> x) {
    std::vector<double> y(n, 0.0);
    for (NodeId u = 0; u < n; ++u) {
      for (auto e = out.begin(u); e < out.end(u); ++e) y[u] += out_raw[e] * x[out.neighbors[e]];
    }
    return y;
  };
  // y = A_adj' x: y(v) = sum over arcs u -> v of w x(u).
  const auto backward = [&](std::span<const double> x) {
    std::vector<double> y(n, 0.0);
    for (NodeId u = 0; u < n; ++u) {
      for (auto e = out.begin(u); e < out.end(u); ++e) y[out.neighbors[e]] += out_raw[e] * x[u];
    }
    return y;
  };

  HitsScores s;
  s.hub.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
  s.auth = s.hub;
  for (int it = 1; it <= max_iter; ++it) {
    auto auth = l2_normalized(backward(forward(s.auth)));
    auto hub = l2_normalized(forward(backward(s.hub)));
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual += std::abs(auth[i] - s.auth[i]) + std::abs(hub[i] - s.hub[i]);
    s.auth = std::move(auth);
    s.hub = std::move(hub);
    s.iterations = it;
    s.residual = residual;
    if (residual <= tol) return s;
  }
  throw ConvergenceError("HITS did not converge in " + std::to_string(max_iter) + " iterations", s.residual,
                         max_iter);
}

Selection select_hits(const Graph& g, std::size_t k, ElementKind kind, double tol, int max_iter) {
  require_budget(k);
  const auto s = hits(g, tol, max_iter);
  if (kind == ElementKind::Edges) {
    auto edges = g.edges();
    std::vector<double> scores;
    scores.reserve(edges.size());
    for (const auto& e : edges) scores.push_back(s.hub[e.src] * s.hub[e.dst] + s.auth[e.src] * s.auth[e.dst]);
    return top_k(std::move(edges), std::move(scores), k, kind);
  }
  std::vector<double> scores(g.node_count());
  for (std::size_t v = 0; v < scores.size(); ++v) scores[v] = s.hub[v] + s.auth[v];
  return top_k(all_nodes(g), std::move(scores), k, kind);
}

}  // namespace rankaudit
