#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rankaudit/audit.hpp"
#include "rankaudit/graph.hpp"
#include "rankaudit/linsys.hpp"

namespace rankaudit {

/// Labels of one step's elements: "u v" per edge, the node label per node.
std::vector<std::string> element_labels(const Graph& g, const ElementSet& set);

/// Quotes a CSV field when it holds a comma, quote or line break.
std::string csv_field(const std::string& text);

/// Steps table with header "step,element,influence,delta_f". Multi-node
/// subgraph steps join their labels with a space.
void write_audit_csv(std::ostream& out, const Graph& g, const AuditResult& result);

/// Full result as a JSON document (config snapshot, steps, warnings).
void write_audit_json(std::ostream& out, const Graph& g, const AuditResult& result);

/// "node_label,score" rows in NodeId order.
void write_rank_csv(std::ostream& out, const Graph& g, const RankVector& r);
void write_rank_json(std::ostream& out, const Graph& g, const RankVector& r);

}  // namespace rankaudit
