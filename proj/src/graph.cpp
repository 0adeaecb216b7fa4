#include "rankaudit/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "rankaudit/error.hpp"

namespace rankaudit {

std::string_view to_string(NormMode mode) {
  return mode == NormMode::ColumnStochastic ? "column" : "raw";
}

NormMode parse_norm_mode(std::string_view text) {
  if (text == "column" || text == "column-stochastic" || text == "stochastic") {
    return NormMode::ColumnStochastic;
  }
  if (text == "raw") return NormMode::Raw;
  throw Error(ErrorKind::Argument, "unknown normalization mode '" + std::string(text) +
                                       "' (expected column|raw)");
}

std::string_view to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::Edges: return "edges";
    case ElementKind::Nodes: return "nodes";
    case ElementKind::Subgraph: return "subgraph";
  }
  return "edges";
}

ElementKind parse_element_kind(std::string_view text) {
  if (text == "edges" || text == "edge") return ElementKind::Edges;
  if (text == "nodes" || text == "node") return ElementKind::Nodes;
  if (text == "subgraph") return ElementKind::Subgraph;
  throw Error(ErrorKind::Argument,
              "unknown element kind '" + std::string(text) + "' (expected edges|nodes|subgraph)");
}

LabelTable LabelTable::numbered(std::size_t n) {
  LabelTable t;
  for (std::size_t i = 0; i < n; ++i) t.intern(std::to_string(i));
  return t;
}

NodeId LabelTable::intern(std::string_view label) {
  std::string key(label);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  const auto id = static_cast<NodeId>(labels_.size());
  labels_.push_back(key);
  index_.emplace(std::move(key), id);
  return id;
}

std::optional<NodeId> LabelTable::find(std::string_view label) const {
  if (auto it = index_.find(std::string(label)); it != index_.end()) return it->second;
  return std::nullopt;
}

Graph Graph::from_edges(std::size_t n, std::span<const WeightedArc> arcs, bool directed,
                        NormMode mode, std::shared_ptr<const LabelTable> labels) {
  std::vector<WeightedArc> all;
  all.reserve(directed ? arcs.size() : 2 * arcs.size());
  for (const auto& a : arcs) {
    if (a.src >= n || a.dst >= n) {
      throw Error(ErrorKind::Validation, "arc endpoint out of range");
    }
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
      throw Error(ErrorKind::Validation, "arc weight must be finite and non-negative");
    }
    all.push_back(a);
    if (!directed && a.src != a.dst) all.push_back({a.dst, a.src, a.weight});
  }
  if (!labels) labels = std::make_shared<LabelTable>(LabelTable::numbered(n));
  if (labels->size() != n) throw Error(ErrorKind::Validation, "label table size mismatch");
  return build(n, std::move(all), directed, mode, std::move(labels));
}

Graph Graph::build(std::size_t n, std::vector<WeightedArc> arcs, bool directed, NormMode mode,
                   std::shared_ptr<const LabelTable> labels) {
  const auto by_src_dst = [](const WeightedArc& a, const WeightedArc& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  };
  if (!std::is_sorted(arcs.begin(), arcs.end(), by_src_dst)) {
    std::stable_sort(arcs.begin(), arcs.end(), by_src_dst);
  }
  // Merge repeated arcs by summing weights.
  std::size_t w = 0;
  for (std::size_t r = 0; r < arcs.size(); ++r) {
    if (w > 0 && arcs[w - 1].src == arcs[r].src && arcs[w - 1].dst == arcs[r].dst) {
      arcs[w - 1].weight += arcs[r].weight;
    } else {
      arcs[w++] = arcs[r];
    }
  }
  arcs.resize(w);

  Graph g;
  g.n_ = n;
  g.directed_ = directed;
  g.mode_ = mode;
  g.labels_ = std::move(labels);

  const std::size_t a = arcs.size();
  g.out_offsets_.assign(n + 1, 0);
  g.out_dst_.resize(a);
  g.out_raw_.resize(a);
  g.out_weight_.resize(a);
  std::vector<double> column_sum(n, 0.0);
  std::size_t self_loops = 0;
  for (std::size_t e = 0; e < a; ++e) {
    const auto& arc = arcs[e];
    ++g.out_offsets_[arc.src + 1];
    g.out_dst_[e] = arc.dst;
    g.out_raw_[e] = arc.weight;
    column_sum[arc.src] += arc.weight;
    if (arc.src == arc.dst) ++self_loops;
  }
  for (std::size_t v = 0; v < n; ++v) g.out_offsets_[v + 1] += g.out_offsets_[v];
  for (std::size_t e = 0; e < a; ++e) {
    const double sum = column_sum[arcs[e].src];
    g.out_weight_[e] =
        mode == NormMode::ColumnStochastic ? (sum > 0.0 ? arcs[e].weight / sum : 0.0) : arcs[e].weight;
  }

  // In-form by counting sort on destination; sources stay ascending per row.
  g.in_offsets_.assign(n + 1, 0);
  for (const auto& arc : arcs) ++g.in_offsets_[arc.dst + 1];
  for (std::size_t v = 0; v < n; ++v) g.in_offsets_[v + 1] += g.in_offsets_[v];
  g.in_src_.resize(a);
  g.in_raw_.resize(a);
  g.in_weight_.resize(a);
  std::vector<std::size_t> cursor(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  for (std::size_t e = 0; e < a; ++e) {
    const auto slot = cursor[arcs[e].dst]++;
    g.in_src_[slot] = arcs[e].src;
    g.in_raw_[slot] = g.out_raw_[e];
    g.in_weight_[slot] = g.out_weight_[e];
  }

  g.m_ = directed ? a : (a + self_loops) / 2;
  return g;
}

void Graph::check_node(NodeId v) const {
  if (v >= n_) {
    throw Error(ErrorKind::Argument,
                "node id " + std::to_string(v) + " out of range [0, " + std::to_string(n_) + ")");
  }
}

namespace {

std::ptrdiff_t find_in_row(const std::vector<std::size_t>& offsets, const std::vector<NodeId>& cols,
                           NodeId row, NodeId col) {
  const auto first = cols.begin() + static_cast<std::ptrdiff_t>(offsets[row]);
  const auto last = cols.begin() + static_cast<std::ptrdiff_t>(offsets[row + 1]);
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return -1;
  return it - cols.begin();
}

}  // namespace

bool Graph::has_arc(NodeId src, NodeId dst) const {
  if (src >= n_ || dst >= n_) return false;
  return find_in_row(out_offsets_, out_dst_, src, dst) >= 0;
}

double Graph::arc_weight(NodeId src, NodeId dst) const {
  if (src >= n_ || dst >= n_) return 0.0;
  const auto pos = find_in_row(out_offsets_, out_dst_, src, dst);
  return pos < 0 ? 0.0 : out_weight_[static_cast<std::size_t>(pos)];
}

double Graph::raw_arc_weight(NodeId src, NodeId dst) const {
  if (src >= n_ || dst >= n_) return 0.0;
  const auto pos = find_in_row(out_offsets_, out_dst_, src, dst);
  return pos < 0 ? 0.0 : out_raw_[static_cast<std::size_t>(pos)];
}

std::size_t Graph::degree(NodeId v) const {
  check_node(v);
  if (directed_) {
    return out_degree(v) + in_degree(v) - (has_self_loop(v) ? 1 : 0);
  }
  return out_degree(v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> result;
  result.reserve(m_);
  for (NodeId s = 0; s < n_; ++s) {
    for (auto e = out_offsets_[s]; e < out_offsets_[s + 1]; ++e) {
      if (directed_ || s <= out_dst_[e]) result.push_back({s, out_dst_[e]});
    }
  }
  return result;
}

std::vector<WeightedArc> Graph::raw_arcs() const {
  std::vector<WeightedArc> result;
  result.reserve(out_dst_.size());
  for (NodeId s = 0; s < n_; ++s) {
    for (auto e = out_offsets_[s]; e < out_offsets_[s + 1]; ++e) {
      result.push_back({s, out_dst_[e], out_raw_[e]});
    }
  }
  return result;
}

template <typename Keep>
Graph Graph::filtered(Keep&& keep) const {
  std::vector<WeightedArc> arcs;
  arcs.reserve(out_dst_.size());
  for (NodeId s = 0; s < n_; ++s) {
    for (auto e = out_offsets_[s]; e < out_offsets_[s + 1]; ++e) {
      if (keep(s, out_dst_[e])) arcs.push_back({s, out_dst_[e], out_raw_[e]});
    }
  }
  return build(n_, std::move(arcs), directed_, mode_, labels_);
}

Graph Graph::remove_edge(NodeId i, NodeId j) const {
  const Edge e{i, j};
  return remove_edges(std::span<const Edge>(&e, 1));
}

Graph Graph::remove_edges(std::span<const Edge> edges) const {
  std::set<std::pair<NodeId, NodeId>> doomed;
  for (const auto& e : edges) {
    check_node(e.src);
    check_node(e.dst);
    if (!has_arc(e.src, e.dst)) {
      throw Error(ErrorKind::NotFound, "arc (" + label(e.src) + ", " + label(e.dst) +
                                           ") does not exist");
    }
    doomed.emplace(e.src, e.dst);
    if (!directed_) doomed.emplace(e.dst, e.src);
  }
  return filtered([&](NodeId s, NodeId d) { return !doomed.contains({s, d}); });
}

Graph Graph::remove_node_edges(NodeId v) const {
  return remove_nodes_edges(std::span<const NodeId>(&v, 1));
}

Graph Graph::remove_nodes_edges(std::span<const NodeId> nodes) const {
  std::vector<char> hit(n_, 0);
  for (auto v : nodes) {
    check_node(v);
    hit[v] = 1;
  }
  return filtered([&](NodeId s, NodeId d) { return !hit[s] && !hit[d]; });
}

Graph Graph::remove_induced_edges(std::span<const NodeId> nodes) const {
  std::vector<char> in(n_, 0);
  for (auto v : nodes) {
    check_node(v);
    in[v] = 1;
  }
  return filtered([&](NodeId s, NodeId d) { return !(in[s] && in[d]); });
}

Graph Graph::reverse() const {
  Graph r = *this;
  std::swap(r.out_offsets_, r.in_offsets_);
  std::swap(r.out_dst_, r.in_src_);
  std::swap(r.out_raw_, r.in_raw_);
  std::swap(r.out_weight_, r.in_weight_);
  return r;
}

Graph Graph::add_arcs(std::span<const WeightedArc> extra) const {
  std::vector<WeightedArc> arcs = raw_arcs();
  for (const auto& a : extra) {
    check_node(a.src);
    check_node(a.dst);
    if (has_arc(a.src, a.dst)) {
      throw Error(ErrorKind::Validation, "arc (" + label(a.src) + ", " + label(a.dst) +
                                             ") already exists");
    }
    arcs.push_back(a);
    if (!directed_ && a.src != a.dst) arcs.push_back({a.dst, a.src, a.weight});
  }
  return build(n_, std::move(arcs), directed_, mode_, labels_);
}

void validate(const ElementSet& set, const Graph& g) {
  if (set.kind == ElementKind::Edges) {
    std::set<Edge> seen;
    for (auto e : set.edges) {
      if (!g.directed() && e.src > e.dst) std::swap(e.src, e.dst);
      if (!seen.insert(e).second) throw Error(ErrorKind::Validation, "duplicate edge in element set");
      if (!g.has_arc(e.src, e.dst)) {
        throw Error(ErrorKind::NotFound, "edge in element set does not exist in graph");
      }
    }
    return;
  }
  std::set<NodeId> seen;
  for (auto v : set.nodes) {
    if (v >= g.node_count()) throw Error(ErrorKind::Validation, "node in element set out of range");
    if (!seen.insert(v).second) throw Error(ErrorKind::Validation, "duplicate node in element set");
  }
}

Graph remove_elements(const Graph& g, const ElementSet& set) {
  switch (set.kind) {
    case ElementKind::Edges: return g.remove_edges(set.edges);
    case ElementKind::Nodes: return g.remove_nodes_edges(set.nodes);
    case ElementKind::Subgraph: return g.remove_induced_edges(set.nodes);
  }
  return g;
}

Graph augment_node_attributes(const Graph& g, const AttributeWeights& w) {
  if (w.attributes == 0) return g;
  if (w.nodes != g.node_count() || w.values.size() != w.attributes * w.nodes) {
    throw Error(ErrorKind::Validation, "attribute matrix must be attributes x " +
                                           std::to_string(g.node_count()));
  }
  if (!w.labels.empty() && w.labels.size() != w.attributes) {
    throw Error(ErrorKind::Validation, "attribute label count mismatch");
  }
  auto labels = std::make_shared<LabelTable>(g.labels());
  for (std::size_t a = 0; a < w.attributes; ++a) {
    const std::string name = w.labels.empty() ? "@attr" + std::to_string(a) : w.labels[a];
    if (labels->find(name)) {
      throw Error(ErrorKind::Validation, "attribute label '" + name + "' collides with a node");
    }
    labels->intern(name);
  }
  // Original arcs already appear in both orientations for undirected input.
  std::vector<WeightedArc> arcs = g.raw_arcs();
  const auto base = static_cast<NodeId>(g.node_count());
  for (std::size_t a = 0; a < w.attributes; ++a) {
    for (std::size_t v = 0; v < w.nodes; ++v) {
      const double weight = w.at(a, v);
      if (!(weight >= 0.0) || !std::isfinite(weight)) {
        throw Error(ErrorKind::Validation, "attribute weights must be finite and non-negative");
      }
      if (weight > 0.0) arcs.push_back({static_cast<NodeId>(v), base + static_cast<NodeId>(a), weight});
    }
  }
  return Graph::from_edges(g.node_count() + w.attributes, arcs, /*directed=*/true, g.norm_mode(),
                           std::move(labels));
}

}  // namespace rankaudit
