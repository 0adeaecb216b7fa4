#include "rankaudit/report.hpp"

#include <cmath>
#include <json.hpp>
#include <ostream>

#include "rankaudit/numfmt.hpp"

namespace rankaudit {

std::vector<std::string> element_labels(const Graph& g, const ElementSet& set) {
  std::vector<std::string> out;
  for (const auto& e : set.edges) out.push_back(g.label(e.src) + " " + g.label(e.dst));
  for (auto v : set.nodes) out.push_back(g.label(v));
  return out;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char ch : text) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  return quoted;
}

void write_audit_csv(std::ostream& out, const Graph& g, const AuditResult& result) {
  out << "step,element,influence,delta_f\n";
  for (std::size_t i = 0; i < result.steps.size(); ++i) {
    const auto& step = result.steps[i];
    std::string element;
    for (const auto& label : element_labels(g, step.added)) {
      if (!element.empty()) element += ' ';
      element += label;
    }
    out << (i + 1) << ',' << csv_field(element) << ',' << format_double(step.influence) << ','
        << format_double(step.delta_f) << '\n';
  }
}

namespace {

nlohmann::ordered_json number(double v) {
  // JSON has no NaN or infinity.
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

void write_audit_json(std::ostream& out, const Graph& g, const AuditResult& result) {
  nlohmann::ordered_json doc;
  doc["kind"] = std::string(to_string(result.kind));
  doc["method"] = result.method;
  doc["budget"] = result.budget;
  doc["damping"] = number(result.damping);
  doc["loss"] = result.loss;
  doc["tol"] = number(result.tol);
  doc["normalized"] = result.normalized;
  doc["directed"] = g.directed();
  doc["norm"] = std::string(to_string(g.norm_mode()));
  doc["loss_before"] = number(result.loss_before);
  doc["delta_f"] = number(result.delta_f());
  doc["selection"] = element_labels(g, result.selection());
  auto steps = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < result.steps.size(); ++i) {
    const auto& s = result.steps[i];
    nlohmann::ordered_json row;
    row["step"] = i + 1;
    row["elements"] = element_labels(g, s.added);
    row["influence"] = number(s.influence);
    row["loss_after"] = number(s.loss_after);
    row["delta_f"] = number(s.delta_f);
    steps.push_back(std::move(row));
  }
  doc["steps"] = std::move(steps);
  doc["warnings"] = result.warnings;
  out << doc.dump(2) << '\n';
}

void write_rank_csv(std::ostream& out, const Graph& g, const RankVector& r) {
  out << "node_label,score\n";
  for (NodeId v = 0; v < r.size(); ++v) out << csv_field(g.label(v)) << ',' << format_double(r[v]) << '\n';
}

void write_rank_json(std::ostream& out, const Graph& g, const RankVector& r) {
  nlohmann::ordered_json doc;
  doc["residual"] = number(r.residual);
  doc["iterations"] = r.iterations;
  auto scores = nlohmann::ordered_json::array();
  for (NodeId v = 0; v < r.size(); ++v) scores.push_back({{"node", g.label(v)}, {"score", number(r[v])}});
  doc["scores"] = std::move(scores);
  out << doc.dump(2) << '\n';
}

}  // namespace rankaudit
