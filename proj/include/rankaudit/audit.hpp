#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rankaudit/graph.hpp"
#include "rankaudit/influence.hpp"
#include "rankaudit/linsys.hpp"
#include "rankaudit/loss.hpp"

namespace rankaudit {

struct AuditConfig {
  LossSpec loss = SquaredL2Loss{};
  /// Damping factor; when unset it is chosen as 1 / (2 rho(A)) from the
  /// input graph (see default_damping).
  std::optional<double> damping;
  TeleportSpec teleport = UniformTeleport{};
  SolverOptions solver;
  /// Audit the L1-normalized PageRank r / sum(r) instead of r.
  bool normalized = false;
  /// Rank candidates by |influence| instead of signed influence.
  bool abs_influence = false;
};

/// Damping factor the audit of `g` will use.
double resolve_damping(const Graph& g, const AuditConfig& cfg);

/// f(r), or f(r / sum r) for the normalized variant.
double audited_loss(const AuditConfig& cfg, std::span<const double> r);

struct AuditStep {
  /// Elements added in this step: one edge, one node, or one or two
  /// subgraph nodes.
  ElementSet added;
  double influence = 0.0;   // score of the selected element before removal
  double loss_after = 0.0;  // f(r_S) after this step's removal
  double delta_f = 0.0;     // (f(r) - f(r_S))^2 against the original ranking
};

struct AuditResult {
  ElementKind kind = ElementKind::Edges;
  std::string method = "greedy";
  std::size_t budget = 0;
  double damping = 0.0;
  std::string loss;
  double tol = 0.0;
  bool normalized = false;
  double loss_before = 0.0;
  std::vector<AuditStep> steps;
  std::vector<std::string> warnings;

  /// Union of all step elements in selection order.
  ElementSet selection() const;
  double delta_f() const { return steps.empty() ? 0.0 : steps.back().delta_f; }
};

/// Greedy edge audit: each round recomputes r and the gradient factors on the
/// current graph, removes the existing edge of largest influence (ties go to
/// the lexicographically smallest pair) and records the step.
AuditResult audit_edges(const Graph& g, std::size_t k, const AuditConfig& cfg = {});

/// Greedy node audit: removes all arcs of the node with the largest
/// node influence among nodes that still have an incident arc.
AuditResult audit_nodes(const Graph& g, std::size_t k, const AuditConfig& cfg = {});

/// Greedy vertex-induced subgraph audit of k >= 2 nodes.
AuditResult audit_subgraph(const Graph& g, std::size_t k, const AuditConfig& cfg = {});

AuditResult audit(const Graph& g, ElementKind kind, std::size_t k, const AuditConfig& cfg = {});

/// (f(r) - f(r_S))^2 where r_S is the ranking after removing `set` from g.
double evaluate_delta_f(const Graph& g, const ElementSet& set, const AuditConfig& cfg = {});

/// Builds a report in audit shape for an externally chosen selection: step i
/// holds element i, its selector score and the delta f of the first i + 1
/// elements.
AuditResult selection_report(const Graph& g, const ElementSet& set, std::span<const double> scores,
                             const std::string& method, const AuditConfig& cfg = {});

}  // namespace rankaudit
