#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "rankaudit/audit.hpp"
#include "rankaudit/baselines.hpp"
#include "rankaudit/error.hpp"
#include "rankaudit/harness.hpp"
#include "rankaudit/numfmt.hpp"
#include "rankaudit/report.hpp"

namespace rankaudit {

namespace {

/// Flags shared by the graph-consuming subcommands.
struct GraphFlags {
  std::string graph;
  bool directed = false;
  std::string norm = "column";
  double damping = 0.0;
  double tol = 1e-10;
  int max_iter = 1000;
  std::string teleport = "uniform";
  std::string loss = "l2sq";
  bool normalized = false;
  std::string out_dir;
  std::string format = "csv";
  CLI::Option* directed_opt = nullptr;
  CLI::Option* norm_opt = nullptr;
  CLI::Option* damping_opt = nullptr;
};

void add_graph_flags(CLI::App* cmd, GraphFlags& f, bool with_loss) {
  cmd->add_option("--graph", f.graph, "Edge list file: 'src dst [weight]' per line, '#' comments")->required();
  f.directed_opt = cmd->add_flag("--directed", f.directed,
                                 "Treat the edge list as directed (default: metadata sidecar, else undirected)");
  f.norm_opt = cmd->add_option("--norm", f.norm, "Adjacency normalization: column|raw (default: sidecar, else column)")
                   ->check(CLI::IsMember({"column", "raw"}));
  f.damping_opt = cmd->add_option("--damping", f.damping, "Damping factor c in (0,1) (default: 1/(2 rho(A)), capped at 0.85)");
  cmd->add_option("--tol", f.tol, "Solver tolerance on the L1 iterate difference")->capture_default_str();
  cmd->add_option("--max-iter", f.max_iter, "Solver iteration budget")->capture_default_str();
  cmd->add_option("--teleport", f.teleport, "Teleport vector: uniform|node:LABEL|file:F")->capture_default_str();
  if (with_loss) {
    cmd->add_option("--loss", f.loss, "Loss: l2sq|lp:P|softmax|energy:FILE")->capture_default_str();
    cmd->add_flag("--normalized-pr", f.normalized, "Audit the L1-normalized ranking r/sum(r) (l2sq only)");
  }
  cmd->add_option("--out", f.out_dir, "Output directory (default: stdout)");
  cmd->add_option("--format", f.format, "Output format: csv|json")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
}

Graph load_graph(const GraphFlags& f) {
  bool directed = false;
  NormMode norm = NormMode::ColumnStochastic;
  if (const auto meta = read_metadata(metadata_path(f.graph))) {
    directed = meta->directed;
    norm = meta->norm_mode;
  }
  if (f.directed_opt->count() > 0) directed = f.directed;
  if (f.norm_opt->count() > 0) norm = parse_norm_mode(f.norm);
  return load_edge_list(f.graph, directed, norm);
}

TeleportSpec parse_teleport(const std::string& text, const Graph& g) {
  if (text == "uniform") return UniformTeleport{};
  if (text.rfind("node:", 0) == 0) {
    const auto label = text.substr(5);
    const auto id = g.labels().find(label);
    if (!id) throw Error(ErrorKind::NotFound, "teleport node '" + label + "' is not in the graph");
    return SingleNodeTeleport{*id};
  }
  if (text.rfind("file:", 0) == 0) {
    // "label weight" lines; non-negative weights normalized to sum 1.
    const auto path = text.substr(5);
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open teleport file " + path);
    std::vector<double> dist(g.node_count(), 0.0);
    std::string line;
    std::size_t line_no = 0;
    double total = 0.0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      std::istringstream fields(line);
      std::string label;
      double w = 0.0;
      if (!(fields >> label)) continue;
      if (!(fields >> w)) throw Error(ErrorKind::Parse, path + ":" + std::to_string(line_no) + ": expected 'label weight'");
      const auto id = g.labels().find(label);
      if (!id) throw Error(ErrorKind::NotFound, path + ":" + std::to_string(line_no) + ": unknown node '" + label + "'");
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw Error(ErrorKind::Validation, path + ":" + std::to_string(line_no) + ": weight must be finite and >= 0");
      }
      dist[*id] += w;
      total += w;
    }
    if (!(total > 0.0)) throw Error(ErrorKind::Validation, "teleport file " + path + " has zero total weight");
    for (auto& x : dist) x /= total;
    return PersonalizedTeleport{std::move(dist)};
  }
  throw Error(ErrorKind::Argument, "unknown teleport '" + text + "' (expected uniform, node:LABEL or file:F)");
}

AuditConfig make_config(const GraphFlags& f, const Graph& g, std::ostream& err) {
  AuditConfig cfg;
  cfg.loss = parse_loss(f.loss, g.node_count());
  cfg.solver = {f.tol, f.max_iter};
  if (!(f.tol > 0.0)) throw Error(ErrorKind::Argument, "--tol must be positive");
  if (f.max_iter < 1) throw Error(ErrorKind::Argument, "--max-iter must be at least 1");
  cfg.teleport = parse_teleport(f.teleport, g);
  cfg.normalized = f.normalized;
  if (f.normalized && !std::holds_alternative<SquaredL2Loss>(cfg.loss)) {
    throw Error(ErrorKind::Argument, "--normalized-pr requires --loss l2sq");
  }
  if (f.damping_opt->count() > 0) {
    if (!(f.damping > 0.0 && f.damping < 1.0)) throw Error(ErrorKind::Argument, "--damping must lie in (0, 1)");
    cfg.damping = f.damping;
    const double rho = spectral_radius_estimate(g);
    if (f.damping * rho >= 1.0) {
      err << "warning: c * rho(A) = " << format_double(f.damping * rho) << " >= 1; the solver may not converge\n";
    }
  } else {
    cfg.damping = default_damping(g);
    err << "damping c = " << format_double(*cfg.damping) << " (auto: min(0.85, 1/(2 rho(A))))\n";
  }
  return cfg;
}

/// Sends the rendered output to stdout or to <out_dir>/<stem>.<ext>.
void deliver(const GraphFlags& f, const std::string& stem, std::ostream& out,
             const std::function<void(std::ostream&)>& render) {
  if (f.out_dir.empty()) {
    render(out);
    return;
  }
  std::error_code ec;
  std::filesystem::create_directories(f.out_dir, ec);
  const auto path = std::filesystem::path(f.out_dir) / (stem + "." + f.format);
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::Io, "cannot write " + path.string());
  render(file);
  if (!file) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

void emit_result(const GraphFlags& f, const std::string& stem, const Graph& g, const AuditResult& result,
                 std::ostream& out, std::ostream& err) {
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';
  deliver(f, stem, out, [&](std::ostream& os) {
    if (f.format == "json") {
      write_audit_json(os, g, result);
    } else {
      write_audit_csv(os, g, result);
    }
  });
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Argument: return kExitUsage;
    case ErrorKind::Convergence: return kExitConvergence;
    case ErrorKind::ResourceLimit: return kExitResource;
    default: return kExitData;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"PageRank auditing: find the graph elements whose removal changes a ranking loss the most"};
  app.name("rankaudit");
  app.require_subcommand(1);

  GraphFlags audit_f, baseline_f, oracle_f, pagerank_f;
  std::string kind = "edges";
  std::size_t k = 0;
  bool abs_influence = false;
  std::string method;
  std::uint64_t seed = 1;
  std::uint64_t limit = kDefaultBruteForceLimit;

  auto* audit_cmd = app.add_subcommand("audit", "Greedy audit of edges, nodes or an induced subgraph");
  add_graph_flags(audit_cmd, audit_f, true);
  audit_cmd->add_option("--kind", kind, "Element kind: edges|nodes|subgraph")
      ->capture_default_str()
      ->check(CLI::IsMember({"edges", "nodes", "subgraph"}));
  audit_cmd->add_option("--k", k, "Budget (subgraph needs k >= 2)")->required();
  audit_cmd->add_flag("--abs-influence", abs_influence, "Rank candidates by |influence|");

  auto* baseline_cmd = app.add_subcommand("baseline", "Reference selector and its delta f");
  add_graph_flags(baseline_cmd, baseline_f, true);
  baseline_cmd->add_option("--method", method, "Selector: random|degree|pagerank|hits")
      ->required()
      ->check(CLI::IsMember({"random", "degree", "pagerank", "hits"}));
  baseline_cmd->add_option("--kind", kind, "Element kind: edges|nodes|subgraph")
      ->capture_default_str()
      ->check(CLI::IsMember({"edges", "nodes", "subgraph"}));
  baseline_cmd->add_option("--k", k, "Budget")->required();
  baseline_cmd->add_option("--seed", seed, "Seed of the random selector")->capture_default_str();

  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive optimum over all k-subsets");
  add_graph_flags(oracle_cmd, oracle_f, true);
  oracle_cmd->add_option("--kind", kind, "Element kind: edges|nodes|subgraph")
      ->capture_default_str()
      ->check(CLI::IsMember({"edges", "nodes", "subgraph"}));
  oracle_cmd->add_option("--k", k, "Budget")->required();
  oracle_cmd->add_option("--limit", limit, "Refuse when the subset count exceeds this")->capture_default_str();

  auto* pagerank_cmd = app.add_subcommand("pagerank", "Print the PageRank vector");
  add_graph_flags(pagerank_cmd, pagerank_f, false);

  std::string config_path;
  std::vector<std::size_t> nodes{10'000, 20'000, 40'000, 80'000};
  std::vector<std::size_t> budgets{10};
  double avg_degree = 10.0;
  int repeats = 3;
  bool no_timing = false;
  bool bench_directed = false;
  std::string bench_out;
  std::string bench_format = "csv";
  double bench_damping = 0.0;
  double bench_tol = 1e-10;
  auto* bench_cmd = app.add_subcommand("bench", "Method comparison (--config) or synthetic scaling run");
  bench_cmd->add_option("--config", config_path, "Experiment config file; runs the method comparison");
  bench_cmd->add_option("--nodes", nodes, "Node counts of the random graphs")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--k", budgets, "Budgets")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--avg-degree", avg_degree, "Average degree of the random graphs")->capture_default_str();
  bench_cmd->add_option("--repeats", repeats, "Runs per cell; the median time is reported")->capture_default_str();
  bench_cmd->add_option("--seed", seed, "Generator seed")->capture_default_str();
  bench_cmd->add_option("--kind", kind, "Element kind: edges|nodes|subgraph")
      ->capture_default_str()
      ->check(CLI::IsMember({"edges", "nodes", "subgraph"}));
  bench_cmd->add_flag("--directed", bench_directed, "Generate directed graphs");
  auto* bench_damping_opt = bench_cmd->add_option("--damping", bench_damping, "Damping factor (default: automatic)");
  bench_cmd->add_option("--tol", bench_tol, "Solver tolerance")->capture_default_str();
  bench_cmd->add_flag("--no-timing", no_timing, "Write zeros in the time and memory columns");
  bench_cmd->add_option("--out", bench_out, "Output directory (default: stdout)");
  bench_cmd->add_option("--format", bench_format, "Output format: csv|json")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (audit_cmd->parsed()) {
      const auto& f = audit_f;
      const auto element_kind = parse_element_kind(kind);
      if (k < 1) throw Error(ErrorKind::Argument, "--k must be at least 1");
      if (element_kind == ElementKind::Subgraph && k < 2) {
        throw Error(ErrorKind::Argument, "--kind subgraph needs --k >= 2: a single-node induced subgraph has no edges");
      }
      const Graph g = load_graph(f);
      auto cfg = make_config(f, g, err);
      cfg.abs_influence = abs_influence;
      const auto result = audit(g, element_kind, k, cfg);
      emit_result(f, "audit_" + kind, g, result, out, err);
    } else if (baseline_cmd->parsed()) {
      const auto& f = baseline_f;
      const auto element_kind = parse_element_kind(kind);
      if (k < 1) throw Error(ErrorKind::Argument, "--k must be at least 1");
      const Graph g = load_graph(f);
      const auto cfg = make_config(f, g, err);
      Selection sel;
      if (method == "random") {
        sel = select_random(g, k, element_kind, seed);
      } else if (method == "degree") {
        sel = select_degree(g, k, element_kind);
      } else if (method == "pagerank") {
        sel = select_pagerank(g, k, element_kind, *cfg.damping, cfg.solver);
      } else {
        sel = select_hits(g, k, element_kind);
      }
      auto result = selection_report(g, sel.set, sel.scores, method, cfg);
      result.budget = k;
      result.warnings.insert(result.warnings.begin(), sel.warnings.begin(), sel.warnings.end());
      emit_result(f, "baseline_" + method + "_" + kind, g, result, out, err);
    } else if (oracle_cmd->parsed()) {
      const auto& f = oracle_f;
      const auto element_kind = parse_element_kind(kind);
      if (k < 1) throw Error(ErrorKind::Argument, "--k must be at least 1");
      const Graph g = load_graph(f);
      const auto cfg = make_config(f, g, err);
      const auto best = brute_force(g, k, element_kind, cfg, limit);
      // Each element is scored by its influence on the unmodified graph.
      const auto r = pagerank(g, cfg.teleport, *cfg.damping, cfg.solver);
      const auto gf = cfg.normalized ? gradient_factors_normalized(g, r, cfg.loss, *cfg.damping, cfg.solver)
                                     : gradient_factors(g, r, cfg.loss, *cfg.damping, cfg.solver);
      std::vector<double> scores;
      for (const auto& e : best.best.edges) scores.push_back(edge_influence(gf, e.src, e.dst));
      for (auto v : best.best.nodes) scores.push_back(node_influence(gf, g, v));
      const auto result = selection_report(g, best.best, scores, kMethodBruteForce, cfg);
      emit_result(f, "oracle_" + kind, g, result, out, err);
    } else if (pagerank_cmd->parsed()) {
      const auto& f = pagerank_f;
      const Graph g = load_graph(f);
      const auto cfg = make_config(f, g, err);
      const auto r = pagerank(g, cfg.teleport, *cfg.damping, cfg.solver);
      deliver(f, "pagerank", out, [&](std::ostream& os) {
        if (f.format == "json") {
          write_rank_json(os, g, r);
        } else {
          write_rank_csv(os, g, r);
        }
      });
    } else if (bench_cmd->parsed()) {
      ExperimentReport report;
      if (!config_path.empty()) {
        auto cfg = load_experiment_config(config_path);
        if (no_timing) cfg.timing = false;
        report = run_comparison(cfg);
      } else {
        ScalingSpec spec;
        spec.node_counts = nodes;
        spec.budgets = budgets;
        spec.average_degree = avg_degree;
        spec.repeats = repeats;
        spec.seed = seed;
        spec.kind = parse_element_kind(kind);
        spec.directed = bench_directed;
        if (bench_damping_opt->count() > 0) spec.damping = bench_damping;
        spec.tol = bench_tol;
        spec.timing = !no_timing;
        report = run_scaling(spec);
      }
      const auto format = parse_table_format(bench_format);
      if (bench_out.empty()) {
        emit_table(out, report, format);
      } else {
        emit_tables(report, format, bench_out);
      }
    }
  } catch (const Error& e) {
    err << "error[" << to_string(e.kind()) << "]: " << e.what() << '\n';
    if (e.kind() == ErrorKind::Argument) {
      for (const auto* sub : app.get_subcommands()) err << sub->help("rankaudit");
    }
    return exit_code_for(e.kind());
  } catch (const std::bad_alloc&) {
    err << "error[resource-limit]: out of memory\n";
    return kExitResource;
  }
  return kExitOk;
}

}  // namespace rankaudit
