#include "rankaudit/influence.hpp"

#include <numeric>

#include "rankaudit/error.hpp"

namespace rankaudit {

GradientFactors::GradientFactors(std::vector<double> left, std::vector<double> right, double c,
                                 GradientVariant variant, bool directed)
    : left_(std::move(left)), right_(std::move(right)), c_(c), variant_(variant), directed_(directed) {
  if (left_.size() != right_.size()) throw Error(ErrorKind::Validation, "gradient factor length mismatch");
}

GradientFactors gradient_factors(const Graph& g, const RankVector& r, const LossSpec& spec, double c,
                                 const SolverOptions& opts) {
  if (r.size() != g.node_count()) throw Error(ErrorKind::Validation, "rank vector length mismatch");
  const auto grad = loss_gradient(spec, r.values);
  auto y = resolvent_transpose_apply(g, grad, c, opts);
  return {std::move(y.values), r.values, c, GradientVariant::Plain, g.directed()};
}

GradientFactors gradient_factors_normalized(const Graph& g, const RankVector& r, const LossSpec& spec,
                                            double c, const SolverOptions& opts) {
  if (!std::holds_alternative<SquaredL2Loss>(spec)) {
    throw Error(ErrorKind::Argument, "normalized PageRank gradient supports the l2sq loss only");
  }
  if (r.size() != g.node_count()) throw Error(ErrorKind::Validation, "rank vector length mismatch");
  const double total = std::accumulate(r.values.begin(), r.values.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorKind::Domain, "normalized gradient requires sum(r) > 0");

  // f(r_hat) with r_hat = r / S: grad_r = (2 / S) r_hat - (2 f / S) 1.
  std::vector<double> b(r.size());
  double f = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    b[i] = r[i] / total;
    f += b[i] * b[i];
  }
  for (auto& x : b) x = (2.0 / total) * x - (2.0 * f / total);
  auto y = resolvent_transpose_apply(g, b, c, opts);
  return {std::move(y.values), r.values, c, GradientVariant::L1Normalized, g.directed()};
}

double edge_influence(const GradientFactors& gf, NodeId src, NodeId dst) {
  if (src >= gf.size() || dst >= gf.size()) throw Error(ErrorKind::Argument, "edge endpoint out of range");
  if (gf.directed()) return gf.entry(dst, src);
  if (src == dst) return gf.entry(src, src);
  return gf.entry(src, dst) + gf.entry(dst, src);
}

std::vector<EdgeScore> edge_influences(const GradientFactors& gf, const Graph& g) {
  std::vector<EdgeScore> scores;
  for (const auto& e : g.edges()) scores.push_back({e, edge_influence(gf, e.src, e.dst)});
  return scores;
}

std::vector<double> node_influences(const GradientFactors& gf, const Graph& g) {
  std::vector<double> total(g.node_count(), 0.0);
  const auto out = g.out_view();
  for (NodeId s = 0; s < g.node_count(); ++s) {
    for (auto e = out.begin(s); e < out.end(s); ++e) {
      const NodeId d = out.neighbors[e];
      if (!g.directed() && d < s) continue;
      const double value = edge_influence(gf, s, d);
      total[s] += value;
      if (d != s) total[d] += value;
    }
  }
  return total;
}

double node_influence(const GradientFactors& gf, const Graph& g, NodeId v) {
  if (v >= g.node_count()) throw Error(ErrorKind::Argument, "node id out of range");
  double total = 0.0;
  const auto out = g.out_view();
  for (auto e = out.begin(v); e < out.end(v); ++e) total += edge_influence(gf, v, out.neighbors[e]);
  if (g.directed()) {
    const auto in = g.in_view();
    for (auto e = in.begin(v); e < in.end(v); ++e) {
      if (in.neighbors[e] != v) total += edge_influence(gf, in.neighbors[e], v);
    }
  }
  return total;
}

double subgraph_influence(const GradientFactors& gf, const Graph& g, std::span<const NodeId> nodes) {
  std::vector<char> member(g.node_count(), 0);
  for (auto v : nodes) {
    if (v >= g.node_count()) throw Error(ErrorKind::Argument, "node id out of range");
    member[v] = 1;
  }
  double total = 0.0;
  const auto out = g.out_view();
  for (auto s : nodes) {
    if (member[s] != 1) continue;  // duplicates count once
    member[s] = 2;
    for (auto e = out.begin(s); e < out.end(s); ++e) {
      const NodeId d = out.neighbors[e];
      if (!member[d]) continue;
      if (!g.directed() && d < s) continue;
      total += edge_influence(gf, s, d);
    }
  }
  return total;
}

double set_influence(const GradientFactors& gf, const Graph& g, const ElementSet& set) {
  switch (set.kind) {
    case ElementKind::Edges: {
      double total = 0.0;
      for (const auto& e : set.edges) total += edge_influence(gf, e.src, e.dst);
      return total;
    }
    case ElementKind::Nodes: {
      double total = 0.0;
      for (auto v : set.nodes) total += node_influence(gf, g, v);
      return total;
    }
    case ElementKind::Subgraph:
      return subgraph_influence(gf, g, set.nodes);
  }
  return 0.0;
}

}  // namespace rankaudit
