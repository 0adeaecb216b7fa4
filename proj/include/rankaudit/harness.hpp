#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rankaudit/graph.hpp"

namespace rankaudit {

/// Method names understood by the comparison runner.
inline constexpr const char* kMethodGreedy = "greedy";
inline constexpr const char* kMethodRandom = "random";
inline constexpr const char* kMethodDegree = "degree";
inline constexpr const char* kMethodPageRank = "pagerank";
inline constexpr const char* kMethodHits = "hits";
inline constexpr const char* kMethodBruteForce = "brute-force";

struct ExperimentConfig {
  std::vector<std::string> datasets;
  /// Used for datasets without a metadata sidecar.
  bool directed = false;
  NormMode norm = NormMode::ColumnStochastic;
  std::vector<ElementKind> kinds{ElementKind::Edges};
  std::size_t k_min = 1;
  std::size_t k_max = 10;
  std::vector<std::string> methods{kMethodGreedy, kMethodRandom, kMethodDegree, kMethodPageRank, kMethodHits};
  std::string loss = "l2sq";
  std::optional<double> damping;  // unset: chosen per dataset
  double tol = 1e-10;
  int max_iter = 1000;
  std::uint64_t seed = 1;
  /// The random baseline reports the median over this many seeds.
  std::size_t random_repeats = 10;
  std::uint64_t brute_force_limit = 10'000'000;
  std::string output_dir = ".";
  /// When false every time and memory column is written as 0 so reports
  /// are byte-reproducible.
  bool timing = true;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Checks the invariants (non-empty datasets, methods, kinds and k range).
void validate(const ExperimentConfig& cfg);

/// "key = value" lines; '#' starts a comment; lists are comma separated.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
std::string to_text(const ExperimentConfig& cfg);

struct ReportRow {
  std::string dataset;
  std::size_t n = 0;
  std::size_t m = 0;
  std::string method;
  ElementKind kind = ElementKind::Edges;
  std::size_t k = 0;
  double damping = 0.0;
  double delta_f = 0.0;  // NaN when the cell did not produce a value
  double wall_time_ms = 0.0;
  std::uint64_t peak_rss_kb = 0;
  std::string status = "ok";

  bool operator==(const ReportRow&) const = default;
};

struct ExperimentReport {
  std::map<std::string, std::string> environment;
  std::vector<ReportRow> rows;
};

/// Fixed column order of every emitted table.
const std::vector<std::string>& report_columns();

/// One row per (dataset, kind, method, k) in that nesting order. Subgraph
/// rows start at k = 2. Brute-force cells over the limit are recorded with a
/// "skipped" status; any other per-cell failure is recorded as
/// "error: <message>" and the run continues.
ExperimentReport run_comparison(const ExperimentConfig& cfg);

/// Erdos-Renyi G(n, M) graph: M distinct pairs without self-loops drawn
/// uniformly, reproducible by seed.
Graph erdos_renyi(std::size_t n, std::size_t m, bool directed, std::uint64_t seed);

struct ScalingSpec {
  std::vector<std::size_t> node_counts{10'000, 20'000, 40'000, 80'000};
  double average_degree = 10.0;
  std::vector<std::size_t> budgets{10};
  ElementKind kind = ElementKind::Edges;
  bool directed = false;
  std::uint64_t seed = 1;
  /// Wall time is the median over this many runs.
  int repeats = 3;
  std::optional<double> damping;
  double tol = 1e-10;
  bool timing = true;
  /// Run each measurement in a forked child so peak RSS is per cell.
  bool isolate = true;
};

/// Greedy audit timing for every (node count, budget) pair.
ExperimentReport run_scaling(const ScalingSpec& spec);

enum class TableFormat { Csv, Json };
TableFormat parse_table_format(std::string_view text);

void emit_table(std::ostream& out, const ExperimentReport& report, TableFormat format);
/// Writes <dir>/<stem>.csv or .json and returns the path.
std::filesystem::path emit_tables(const ExperimentReport& report, TableFormat format,
                                  const std::filesystem::path& dir, const std::string& stem = "report");

ExperimentReport parse_report_csv(std::istream& in);
ExperimentReport parse_report_json(std::istream& in);

}  // namespace rankaudit
