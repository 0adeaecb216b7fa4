#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rankaudit {

using NodeId = std::uint32_t;

/// How arc weights are turned into entries of the audited matrix A.
/// Column convention: an arc src -> dst with weight w contributes A(dst, src).
enum class NormMode {
  ColumnStochastic,  // each non-empty column (source) sums to one
  Raw,               // weights are used unchanged
};

std::string_view to_string(NormMode mode);
NormMode parse_norm_mode(std::string_view text);

/// A directed arc. For undirected graphs the pair (src, dst) names the
/// logical edge; the smaller endpoint comes first when canonicalized.
struct Edge {
  NodeId src = 0;
  NodeId dst = 0;

  auto operator<=>(const Edge&) const = default;
};

struct WeightedArc {
  NodeId src = 0;
  NodeId dst = 0;
  double weight = 1.0;
};

/// Bijective map between original node labels and dense NodeIds.
class LabelTable {
 public:
  LabelTable() = default;

  /// Identity labels "0".."n-1".
  static LabelTable numbered(std::size_t n);

  /// Returns the id of `label`, inserting it when unseen.
  NodeId intern(std::string_view label);
  std::optional<NodeId> find(std::string_view label) const;
  const std::string& label(NodeId id) const { return labels_.at(id); }
  std::size_t size() const { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
};

/// Non-owning compressed-row view of one adjacency form.
struct CsrView {
  std::span<const std::size_t> offsets;  // node_count() + 1 entries
  std::span<const NodeId> neighbors;
  std::span<const double> weights;

  std::size_t node_count() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::size_t begin(NodeId v) const { return offsets[v]; }
  std::size_t end(NodeId v) const { return offsets[v + 1]; }
};

/// Immutable weighted graph stored in both out-neighbor and in-neighbor
/// compressed form. Mutating operations return new snapshots.
///
/// Every arc carries its ingested (raw) weight and its matrix entry. In
/// ColumnStochastic mode the matrix entry is raw / out-weight of the source,
/// so removing arcs re-normalizes the affected columns. Dangling columns are
/// left at zero.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from arcs. Undirected input lists each edge once in
  /// either orientation; the mirror arc is added here. Repeated arcs have
  /// their weights summed.
  static Graph from_edges(std::size_t n, std::span<const WeightedArc> arcs, bool directed,
                          NormMode mode, std::shared_ptr<const LabelTable> labels = nullptr);

  std::size_t node_count() const { return n_; }
  /// Logical edge count: arcs for directed graphs, unordered pairs otherwise.
  std::size_t edge_count() const { return m_; }
  std::size_t arc_count() const { return out_dst_.size(); }
  bool directed() const { return directed_; }
  NormMode norm_mode() const { return mode_; }

  const LabelTable& labels() const { return *labels_; }
  std::shared_ptr<const LabelTable> shared_labels() const { return labels_; }
  const std::string& label(NodeId v) const { return labels_->label(v); }

  /// Rows are sources, neighbors are destinations.
  CsrView out_view() const { return {out_offsets_, out_dst_, out_weight_}; }
  /// Rows are destinations, neighbors are sources. Row i is row i of A.
  CsrView in_view() const { return {in_offsets_, in_src_, in_weight_}; }
  std::span<const double> out_raw_weights() const { return out_raw_; }

  bool has_arc(NodeId src, NodeId dst) const;
  /// Matrix entry A(dst, src) of the arc, or 0 when absent.
  double arc_weight(NodeId src, NodeId dst) const;
  double raw_arc_weight(NodeId src, NodeId dst) const;

  std::size_t out_degree(NodeId v) const { return out_offsets_[v + 1] - out_offsets_[v]; }
  std::size_t in_degree(NodeId v) const { return in_offsets_[v + 1] - in_offsets_[v]; }
  /// Incident edge count: in + out arcs for directed graphs, neighbors
  /// (self-loop once) for undirected graphs.
  std::size_t degree(NodeId v) const;
  bool has_self_loop(NodeId v) const { return has_arc(v, v); }

  /// Candidate removal population: every arc for directed graphs, one
  /// canonical (src <= dst) entry per undirected edge.
  std::vector<Edge> edges() const;
  /// Arcs in out-form order with raw weights.
  std::vector<WeightedArc> raw_arcs() const;

  /// Removes arc (i, j), and (j, i) too when undirected.
  /// Throws NotFound when the arc is absent.
  Graph remove_edge(NodeId i, NodeId j) const;
  /// Removes a batch of edges; every edge must exist.
  Graph remove_edges(std::span<const Edge> edges) const;
  /// Isolates `v`; node count is unchanged.
  Graph remove_node_edges(NodeId v) const;
  Graph remove_nodes_edges(std::span<const NodeId> nodes) const;
  /// Removes every arc whose endpoints both lie in `nodes`.
  Graph remove_induced_edges(std::span<const NodeId> nodes) const;
  /// Exact transpose of the stored matrix entries; no re-normalization.
  Graph reverse() const;

  /// Adds arcs (raw weights) that must not already exist; used to undo a
  /// removal on Raw graphs.
  Graph add_arcs(std::span<const WeightedArc> arcs) const;

 private:
  template <typename Keep>
  Graph filtered(Keep&& keep) const;

  static Graph build(std::size_t n, std::vector<WeightedArc> arcs, bool directed, NormMode mode,
                     std::shared_ptr<const LabelTable> labels);
  void check_node(NodeId v) const;

  std::size_t n_ = 0;
  std::size_t m_ = 0;
  bool directed_ = true;
  NormMode mode_ = NormMode::ColumnStochastic;
  std::shared_ptr<const LabelTable> labels_ = std::make_shared<LabelTable>();

  std::vector<std::size_t> out_offsets_{0};
  std::vector<NodeId> out_dst_;
  std::vector<double> out_raw_;
  std::vector<double> out_weight_;

  std::vector<std::size_t> in_offsets_{0};
  std::vector<NodeId> in_src_;
  std::vector<double> in_raw_;
  std::vector<double> in_weight_;
};

enum class ElementKind { Edges, Nodes, Subgraph };

std::string_view to_string(ElementKind kind);
ElementKind parse_element_kind(std::string_view text);

/// Set of graph elements selected for removal. Edge members are used for
/// ElementKind::Edges, node members otherwise. For Subgraph the induced arcs
/// are derived from the graph on demand.
struct ElementSet {
  ElementKind kind = ElementKind::Edges;
  std::vector<Edge> edges;
  std::vector<NodeId> nodes;

  std::size_t size() const { return kind == ElementKind::Edges ? edges.size() : nodes.size(); }
  bool empty() const { return size() == 0; }
};

/// Throws Validation if the set contains duplicates or out-of-range members.
void validate(const ElementSet& set, const Graph& g);

/// g with the elements of `set` removed: edges, node-incident arcs, or the
/// arcs induced by the node set.
Graph remove_elements(const Graph& g, const ElementSet& set);

/// Dense attributes-by-nodes weight matrix, row-major.
struct AttributeWeights {
  std::size_t attributes = 0;
  std::size_t nodes = 0;
  std::vector<double> values;
  std::vector<std::string> labels;  // optional, one per attribute

  double at(std::size_t attribute, std::size_t node) const { return values[attribute * nodes + node]; }
};

/// Appends one node per attribute and an arc node -> attribute for every
/// positive weight. The result is directed; the norm mode of `g` is applied
/// to the raw weights of the augmented graph.
Graph augment_node_attributes(const Graph& g, const AttributeWeights& w);

// Edge-list ingestion.

/// Parses "src dst [weight]" lines; '#' starts a comment line.
Graph read_edge_list(std::istream& in, bool directed, NormMode mode,
                     std::string_view source_name = "<stream>");
Graph load_edge_list(const std::filesystem::path& path, bool directed, NormMode mode);
void write_edge_list(std::ostream& out, const Graph& g);

struct GraphMetadata {
  bool directed = false;
  NormMode norm_mode = NormMode::ColumnStochastic;
};

/// Sidecar location for an edge-list file: "<path>.meta.json".
std::filesystem::path metadata_path(const std::filesystem::path& edge_list);
void write_metadata(const std::filesystem::path& path, const GraphMetadata& meta);
std::optional<GraphMetadata> read_metadata(const std::filesystem::path& path);

}  // namespace rankaudit
