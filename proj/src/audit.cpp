#include "rankaudit/audit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankaudit/error.hpp"
#include "rankaudit/numfmt.hpp"

namespace rankaudit {

double resolve_damping(const Graph& g, const AuditConfig& cfg) {
  return cfg.damping ? *cfg.damping : default_damping(g);
}

double audited_loss(const AuditConfig& cfg, std::span<const double> r) {
  if (!cfg.normalized) return loss_value(cfg.loss, r);
  const double total = std::accumulate(r.begin(), r.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorKind::Domain, "normalized loss requires sum(r) > 0");
  std::vector<double> scaled(r.begin(), r.end());
  for (auto& x : scaled) x /= total;
  return loss_value(cfg.loss, scaled);
}

ElementSet AuditResult::selection() const {
  ElementSet set{kind, {}, {}};
  for (const auto& s : steps) {
    set.edges.insert(set.edges.end(), s.added.edges.begin(), s.added.edges.end());
    set.nodes.insert(set.nodes.end(), s.added.nodes.begin(), s.added.nodes.end());
  }
  return set;
}

namespace {

/// Shared state of one greedy run.
class GreedyRun {
 public:
  GreedyRun(const Graph& g, ElementKind kind, std::size_t k, const AuditConfig& cfg)
      : cfg_(cfg), current_(g) {
    c_ = resolve_damping(g, cfg);
    teleport_ = materialize(cfg.teleport, g.node_count());
    rank_ = pagerank(current_.in_view(), teleport_, c_, cfg.solver);
    result_.kind = kind;
    result_.budget = k;
    result_.damping = c_;
    result_.loss = describe(cfg.loss);
    result_.tol = cfg.solver.tol;
    result_.normalized = cfg.normalized;
    result_.loss_before = audited_loss(cfg, rank_.values);
  }

  const Graph& graph() const { return current_; }

  GradientFactors factors() const {
    return cfg_.normalized ? gradient_factors_normalized(current_, rank_, cfg_.loss, c_, cfg_.solver)
                           : gradient_factors(current_, rank_, cfg_.loss, c_, cfg_.solver);
  }

  double score(double influence) const { return cfg_.abs_influence ? std::abs(influence) : influence; }

  void commit(Graph next, ElementSet added, double influence) {
    if (!(influence > 0.0)) {
      result_.warnings.push_back("step " + std::to_string(result_.steps.size() + 1) +
                                 ": selected element has non-positive influence " +
                                 format_double(influence));
    }
    current_ = std::move(next);
    rank_ = pagerank(current_.in_view(), teleport_, c_, cfg_.solver);
    const double f = audited_loss(cfg_, rank_.values);
    const double diff = result_.loss_before - f;
    result_.steps.push_back({std::move(added), influence, f, diff * diff});
  }

  void warn(std::string message) { result_.warnings.push_back(std::move(message)); }
  std::size_t steps() const { return result_.steps.size(); }
  AuditResult finish() { return std::move(result_); }

 private:
  const AuditConfig& cfg_;
  Graph current_;
  double c_ = 0.0;
  std::vector<double> teleport_;
  RankVector rank_;
  AuditResult result_;
};

void require_budget(std::size_t k) {
  if (k < 1) throw Error(ErrorKind::Argument, "budget k must be at least 1");
}

/// Best existing edge by score; ties keep the lexicographically first edge.
std::optional<EdgeScore> best_edge(const GreedyRun& run, const GradientFactors& gf) {
  std::optional<EdgeScore> best;
  double best_score = 0.0;
  for (const auto& s : edge_influences(gf, run.graph())) {
    const double sc = run.score(s.value);
    if (!best || sc > best_score) {
      best = s;
      best_score = sc;
    }
  }
  return best;
}

}  // namespace

AuditResult audit_edges(const Graph& g, std::size_t k, const AuditConfig& cfg) {
  require_budget(k);
  GreedyRun run(g, ElementKind::Edges, k, cfg);
  while (run.steps() < k) {
    if (run.graph().edge_count() == 0) {
      run.warn(run.steps() == 0 ? "graph has no edges" : "ran out of edges before reaching budget");
      break;
    }
    const auto best = best_edge(run, run.factors());
    Graph next = run.graph().remove_edge(best->edge.src, best->edge.dst);
    run.commit(std::move(next), ElementSet{ElementKind::Edges, {best->edge}, {}}, best->value);
  }
  return run.finish();
}

AuditResult audit_nodes(const Graph& g, std::size_t k, const AuditConfig& cfg) {
  require_budget(k);
  GreedyRun run(g, ElementKind::Nodes, k, cfg);
  while (run.steps() < k) {
    const auto& cur = run.graph();
    if (cur.edge_count() == 0) {
      run.warn(run.steps() == 0 ? "graph has no edges" : "ran out of non-isolated nodes before reaching budget");
      break;
    }
    const auto influence = node_influences(run.factors(), cur);
    std::optional<NodeId> best;
    for (NodeId v = 0; v < cur.node_count(); ++v) {
      if (cur.out_degree(v) + cur.in_degree(v) == 0) continue;
      if (!best || run.score(influence[v]) > run.score(influence[*best])) best = v;
    }
    Graph next = cur.remove_node_edges(*best);
    run.commit(std::move(next), ElementSet{ElementKind::Nodes, {}, {*best}}, influence[*best]);
  }
  return run.finish();
}

AuditResult audit_subgraph(const Graph& g, std::size_t k, const AuditConfig& cfg) {
  if (k < 2) {
    throw Error(ErrorKind::Argument, "subgraph audit needs k >= 2: a single-node induced subgraph has no edges");
  }
  std::vector<std::string> early;
  if (k > g.node_count()) {
    early.push_back("budget " + std::to_string(k) + " exceeds node count; clamped to " +
                    std::to_string(g.node_count()));
    k = g.node_count();
  }
  GreedyRun run(g, ElementKind::Subgraph, k, cfg);
  for (auto& w : early) run.warn(std::move(w));

  std::vector<NodeId> chosen;
  std::vector<char> member(g.node_count(), 0);
  while (chosen.size() < k) {
    const auto& cur = run.graph();
    if (cur.edge_count() == 0) {
      run.warn(chosen.empty() ? "graph has no edges" : "no edges left to grow the subgraph");
      break;
    }
    const auto gf = run.factors();
    const auto best = best_edge(run, gf);
    const NodeId i = best->edge.src;
    const NodeId j = best->edge.dst;

    ElementSet added{ElementKind::Subgraph, {}, {}};
    const auto add = [&](NodeId v) {
      if (member[v]) return;
      member[v] = 1;
      chosen.push_back(v);
      added.nodes.push_back(v);
    };
    if (chosen.size() + 2 <= k) {
      add(i);
      add(j);
    } else {
      // One slot left: take the endpoint with the higher node influence.
      const double gi = run.score(node_influence(gf, cur, i));
      const double gj = run.score(node_influence(gf, cur, j));
      NodeId v = gj > gi ? j : i;
      if (member[v]) v = (v == i) ? j : i;
      add(v);
    }
    Graph next = cur.remove_induced_edges(chosen);
    run.commit(std::move(next), std::move(added), best->value);
  }
  return run.finish();
}

AuditResult audit(const Graph& g, ElementKind kind, std::size_t k, const AuditConfig& cfg) {
  switch (kind) {
    case ElementKind::Edges: return audit_edges(g, k, cfg);
    case ElementKind::Nodes: return audit_nodes(g, k, cfg);
    case ElementKind::Subgraph: return audit_subgraph(g, k, cfg);
  }
  throw Error(ErrorKind::Argument, "unknown element kind");
}

double evaluate_delta_f(const Graph& g, const ElementSet& set, const AuditConfig& cfg) {
  validate(set, g);
  const double c = resolve_damping(g, cfg);
  const auto e = materialize(cfg.teleport, g.node_count());
  const auto before = pagerank(g.in_view(), e, c, cfg.solver);
  if (set.empty()) return 0.0;
  const auto after = pagerank(remove_elements(g, set).in_view(), e, c, cfg.solver);
  const double diff = audited_loss(cfg, before.values) - audited_loss(cfg, after.values);
  return diff * diff;
}

AuditResult selection_report(const Graph& g, const ElementSet& set, std::span<const double> scores,
                             const std::string& method, const AuditConfig& cfg) {
  validate(set, g);
  if (scores.size() != set.size()) throw Error(ErrorKind::Validation, "one score per element required");
  AuditResult result;
  result.kind = set.kind;
  result.method = method;
  result.budget = set.size();
  result.damping = resolve_damping(g, cfg);
  result.loss = describe(cfg.loss);
  result.tol = cfg.solver.tol;
  result.normalized = cfg.normalized;

  const auto e = materialize(cfg.teleport, g.node_count());
  const auto before = pagerank(g.in_view(), e, result.damping, cfg.solver);
  result.loss_before = audited_loss(cfg, before.values);

  ElementSet prefix{set.kind, {}, {}};
  for (std::size_t i = 0; i < set.size(); ++i) {
    ElementSet added{set.kind, {}, {}};
    if (set.kind == ElementKind::Edges) {
      added.edges.push_back(set.edges[i]);
      prefix.edges.push_back(set.edges[i]);
    } else {
      added.nodes.push_back(set.nodes[i]);
      prefix.nodes.push_back(set.nodes[i]);
    }
    const auto after = pagerank(remove_elements(g, prefix).in_view(), e, result.damping, cfg.solver);
    const double f = audited_loss(cfg, after.values);
    const double diff = result.loss_before - f;
    result.steps.push_back({std::move(added), scores[i], f, diff * diff});
  }
  return result;
}

}  // namespace rankaudit
