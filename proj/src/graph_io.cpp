#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "rankaudit/error.hpp"
#include "rankaudit/graph.hpp"
#include "rankaudit/numfmt.hpp"

namespace rankaudit {

namespace {

bool is_space(char ch) { return ch == ' ' || ch == '\t' || ch == '\r' || ch == '\v' || ch == '\f'; }

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const auto start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

}  // namespace

Graph read_edge_list(std::istream& in, bool directed, NormMode mode, std::string_view source_name) {
  auto labels = std::make_shared<LabelTable>();
  std::vector<WeightedArc> arcs;
  std::string line;
  std::size_t line_no = 0;
  const auto where = [&] { return std::string(source_name) + ":" + std::to_string(line_no) + ": "; };

  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (tokens.size() != 2 && tokens.size() != 3) {
      throw Error(ErrorKind::Parse, where() + "expected 'src dst [weight]', got " +
                                        std::to_string(tokens.size()) + " fields");
    }
    double weight = 1.0;
    if (tokens.size() == 3) {
      const auto tok = tokens[2];
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), weight);
      if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw Error(ErrorKind::Parse, where() + "malformed weight '" + std::string(tok) + "'");
      }
      if (!std::isfinite(weight)) {
        throw Error(ErrorKind::Validation, where() + "weight must be finite");
      }
      if (weight < 0.0) {
        throw Error(ErrorKind::Validation, where() + "negative weight " + std::string(tok));
      }
    }
    const NodeId s = labels->intern(tokens[0]);
    const NodeId d = labels->intern(tokens[1]);
    arcs.push_back({s, d, weight});
  }
  if (arcs.empty()) {
    throw Error(ErrorKind::Validation, std::string(source_name) + ": edge list contains no edges");
  }
  const auto n = labels->size();
  return Graph::from_edges(n, arcs, directed, mode, std::move(labels));
}

Graph load_edge_list(const std::filesystem::path& path, bool directed, NormMode mode) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open edge list '" + path.string() + "'");
  return read_edge_list(in, directed, mode, path.string());
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# " << (g.directed() ? "directed" : "undirected") << " n=" << g.node_count()
      << " m=" << g.edge_count() << "\n";
  const auto view = g.out_view();
  const auto raw = g.out_raw_weights();
  for (NodeId s = 0; s < g.node_count(); ++s) {
    for (auto e = view.begin(s); e < view.end(s); ++e) {
      const NodeId d = view.neighbors[e];
      if (!g.directed() && d < s) continue;
      out << g.label(s) << ' ' << g.label(d) << ' ' << format_double(raw[e]) << '\n';
    }
  }
}

std::filesystem::path metadata_path(const std::filesystem::path& edge_list) {
  auto p = edge_list;
  p += ".meta.json";
  return p;
}

void write_metadata(const std::filesystem::path& path, const GraphMetadata& meta) {
  nlohmann::ordered_json j;
  j["directed"] = meta.directed;
  j["normalization"] = std::string(to_string(meta.norm_mode));
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

std::optional<GraphMetadata> read_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(in);
    GraphMetadata meta;
    meta.directed = j.value("directed", false);
    meta.norm_mode = parse_norm_mode(j.value("normalization", std::string("column")));
    return meta;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

}  // namespace rankaudit
