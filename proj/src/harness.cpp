#include "rankaudit/harness.hpp"

#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "rankaudit/audit.hpp"
#include "rankaudit/baselines.hpp"
#include "rankaudit/error.hpp"
#include "rankaudit/numfmt.hpp"
#include "rankaudit/report.hpp"

namespace rankaudit {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto item = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& key) {
  T value{};
  std::istringstream in(text);
  in >> value;
  if (in.fail() || !in.eof()) throw Error(ErrorKind::Parse, "config key '" + key + "': bad number '" + text + "'");
  return value;
}

double parse_real(const std::string& text, const std::string& key) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0') throw Error(ErrorKind::Parse, "config key '" + key + "': bad number '" + text + "'");
  return v;
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw Error(ErrorKind::Parse, "config key '" + key + "': expected true or false");
}

bool is_known_method(const std::string& m) {
  return m == kMethodGreedy || m == kMethodRandom || m == kMethodDegree || m == kMethodPageRank || m == kMethodHits ||
         m == kMethodBruteForce;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::uint64_t peak_rss_kb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return static_cast<std::uint64_t>(usage.ru_maxrss);
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (cfg.datasets.empty()) throw Error(ErrorKind::Validation, "experiment needs at least one dataset");
  if (cfg.methods.empty()) throw Error(ErrorKind::Validation, "experiment needs at least one method");
  if (cfg.kinds.empty()) throw Error(ErrorKind::Validation, "experiment needs at least one element kind");
  if (cfg.k_min < 1 || cfg.k_max < cfg.k_min) throw Error(ErrorKind::Validation, "k range must be non-empty and start at 1 or more");
  for (const auto& m : cfg.methods) {
    if (!is_known_method(m)) throw Error(ErrorKind::Validation, "unknown method '" + m + "'");
  }
  if (cfg.random_repeats < 1) throw Error(ErrorKind::Validation, "random_repeats must be at least 1");
  if (cfg.damping && !(*cfg.damping > 0.0 && *cfg.damping < 1.0)) {
    throw Error(ErrorKind::Validation, "damping must lie in (0, 1)");
  }
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1) throw Error(ErrorKind::Validation, "invalid solver settings");
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Parse, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(std::string_view(line).substr(0, eq));
    const auto value = trim(std::string_view(line).substr(eq + 1));
    if (key == "datasets") {
      cfg.datasets = split_list(value);
    } else if (key == "directed") {
      cfg.directed = parse_bool(value, key);
    } else if (key == "norm") {
      cfg.norm = parse_norm_mode(value);
    } else if (key == "kinds") {
      cfg.kinds.clear();
      for (const auto& k : split_list(value)) cfg.kinds.push_back(parse_element_kind(k));
    } else if (key == "k_min") {
      cfg.k_min = parse_number<std::size_t>(value, key);
    } else if (key == "k_max") {
      cfg.k_max = parse_number<std::size_t>(value, key);
    } else if (key == "methods") {
      cfg.methods = split_list(value);
    } else if (key == "loss") {
      cfg.loss = value;
    } else if (key == "damping") {
      cfg.damping = value == "auto" ? std::nullopt : std::optional<double>(parse_real(value, key));
    } else if (key == "tol") {
      cfg.tol = parse_real(value, key);
    } else if (key == "max_iter") {
      cfg.max_iter = parse_number<int>(value, key);
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(value, key);
    } else if (key == "random_repeats") {
      cfg.random_repeats = parse_number<std::size_t>(value, key);
    } else if (key == "brute_force_limit") {
      cfg.brute_force_limit = parse_number<std::uint64_t>(value, key);
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else if (key == "timing") {
      cfg.timing = parse_bool(value, key);
    } else {
      throw Error(ErrorKind::Parse, "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  return parse_experiment_config(in);
}

std::string to_text(const ExperimentConfig& cfg) {
  std::vector<std::string> kinds;
  for (auto k : cfg.kinds) kinds.emplace_back(to_string(k));
  std::ostringstream out;
  out << "datasets = " << join(cfg.datasets) << '\n'
      << "directed = " << (cfg.directed ? "true" : "false") << '\n'
      << "norm = " << to_string(cfg.norm) << '\n'
      << "kinds = " << join(kinds) << '\n'
      << "k_min = " << cfg.k_min << '\n'
      << "k_max = " << cfg.k_max << '\n'
      << "methods = " << join(cfg.methods) << '\n'
      << "loss = " << cfg.loss << '\n'
      << "damping = " << (cfg.damping ? format_double(*cfg.damping) : std::string("auto")) << '\n'
      << "tol = " << format_double(cfg.tol) << '\n'
      << "max_iter = " << cfg.max_iter << '\n'
      << "seed = " << cfg.seed << '\n'
      << "random_repeats = " << cfg.random_repeats << '\n'
      << "brute_force_limit = " << cfg.brute_force_limit << '\n'
      << "output_dir = " << cfg.output_dir << '\n'
      << "timing = " << (cfg.timing ? "true" : "false") << '\n';
  return out.str();
}

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> columns{"dataset", "n",        "m",           "method",      "kind",  "k",
                                                "damping", "delta_f", "wall_time_ms", "peak_rss_kb", "status"};
  return columns;
}

namespace {

struct Dataset {
  std::string name;
  Graph graph;
};

Dataset load_dataset(const std::string& path, const ExperimentConfig& cfg) {
  bool directed = cfg.directed;
  NormMode norm = cfg.norm;
  if (const auto meta = read_metadata(metadata_path(path))) {
    directed = meta->directed;
    norm = meta->norm_mode;
  }
  return {std::filesystem::path(path).stem().string(), load_edge_list(path, directed, norm)};
}

std::map<std::string, std::string> environment_fingerprint() {
  std::map<std::string, std::string> env;
#if defined(__clang__)
  env["compiler"] = "clang " __clang_version__;
#elif defined(__GNUC__)
  env["compiler"] = "gcc " __VERSION__;
#endif
#ifdef NDEBUG
  env["build"] = "release";
#else
  env["build"] = "debug";
#endif
  env["threads"] = std::to_string(worker_threads());
  return env;
}

/// Fills delta_f and status of one comparison cell.
void run_cell(ReportRow& row, const std::string& method, const Graph& g, std::size_t k, const AuditConfig& audit_cfg,
              const ExperimentConfig& cfg) {
  const auto kind = row.kind;
  if (method == kMethodGreedy) {
    row.delta_f = audit(g, kind, k, audit_cfg).delta_f();
  } else if (method == kMethodRandom) {
    std::vector<double> values;
    for (std::size_t i = 0; i < cfg.random_repeats; ++i) {
      const auto sel = select_random(g, k, kind, cfg.seed + i);
      values.push_back(evaluate_delta_f(g, sel.set, audit_cfg));
    }
    row.delta_f = median(std::move(values));
  } else if (method == kMethodDegree) {
    row.delta_f = evaluate_delta_f(g, select_degree(g, k, kind).set, audit_cfg);
  } else if (method == kMethodPageRank) {
    row.delta_f = evaluate_delta_f(g, select_pagerank(g, k, kind, row.damping, audit_cfg.solver).set, audit_cfg);
  } else if (method == kMethodHits) {
    row.delta_f = evaluate_delta_f(g, select_hits(g, k, kind).set, audit_cfg);
  } else if (method == kMethodBruteForce) {
    const std::size_t population = kind == ElementKind::Edges ? g.edge_count() : g.node_count();
    const auto count = binomial(population, k);
    if (count > cfg.brute_force_limit) {
      row.status = "skipped: " + std::to_string(count) + " subsets over limit " + std::to_string(cfg.brute_force_limit);
      row.delta_f = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    row.delta_f = brute_force(g, k, kind, audit_cfg, cfg.brute_force_limit).delta_f;
  }
}

}  // namespace

ExperimentReport run_comparison(const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentReport report;
  report.environment = environment_fingerprint();
  report.environment["loss"] = cfg.loss;
  report.environment["tol"] = format_double(cfg.tol);
  report.environment["max_iter"] = std::to_string(cfg.max_iter);
  report.environment["damping"] = cfg.damping ? format_double(*cfg.damping) : "auto";
  report.environment["seed"] = std::to_string(cfg.seed);
  report.environment["random_repeats"] = std::to_string(cfg.random_repeats);

  for (const auto& path : cfg.datasets) {
    const auto data = load_dataset(path, cfg);
    const Graph& g = data.graph;
    AuditConfig audit_cfg;
    audit_cfg.loss = parse_loss(cfg.loss, g.node_count());
    audit_cfg.solver = {cfg.tol, cfg.max_iter};
    audit_cfg.damping = cfg.damping ? *cfg.damping : default_damping(g);

    for (auto kind : cfg.kinds) {
      const std::size_t k_first = kind == ElementKind::Subgraph ? std::max<std::size_t>(2, cfg.k_min) : cfg.k_min;
      for (const auto& method : cfg.methods) {
        for (std::size_t k = k_first; k <= cfg.k_max; ++k) {
          ReportRow row;
          row.dataset = data.name;
          row.n = g.node_count();
          row.m = g.edge_count();
          row.method = method;
          row.kind = kind;
          row.k = k;
          row.damping = *audit_cfg.damping;
          const auto start = Clock::now();
          try {
            run_cell(row, method, g, k, audit_cfg, cfg);
          } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
            row.delta_f = std::numeric_limits<double>::quiet_NaN();
          }
          if (cfg.timing) row.wall_time_ms = elapsed_ms(start);
          report.rows.push_back(std::move(row));
        }
      }
    }
  }
  return report;
}

Graph erdos_renyi(std::size_t n, std::size_t m, bool directed, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorKind::Argument, "random graph needs at least 2 nodes");
  const double pairs = directed ? double(n) * double(n - 1) : double(n) * double(n - 1) / 2.0;
  if (double(m) > pairs) throw Error(ErrorKind::Argument, "more edges requested than node pairs");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(m * 2);
  std::vector<WeightedArc> arcs;
  arcs.reserve(m);
  while (arcs.size() < m) {
    auto u = pick(rng);
    auto v = pick(rng);
    if (u == v) continue;
    if (!directed && u > v) std::swap(u, v);
    if (!seen.insert(static_cast<std::uint64_t>(u) * n + v).second) continue;
    arcs.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), 1.0});
  }
  return Graph::from_edges(n, arcs, directed, NormMode::ColumnStochastic);
}

namespace {

struct Measurement {
  double wall_time_ms = 0.0;
  std::uint64_t peak_rss_kb = 0;
  double delta_f = 0.0;
};

Measurement measure_once(std::size_t n, std::size_t m, std::size_t k, const ScalingSpec& spec) {
  const Graph g = erdos_renyi(n, m, spec.directed, spec.seed);
  AuditConfig cfg;
  cfg.damping = spec.damping;
  cfg.solver.tol = spec.tol;
  const auto start = Clock::now();
  const auto result = audit(g, spec.kind, k, cfg);
  Measurement out;
  out.wall_time_ms = elapsed_ms(start);
  out.delta_f = result.delta_f();
  out.peak_rss_kb = peak_rss_kb();
  return out;
}

/// Runs measure_once in a child process so the peak RSS belongs to the cell.
Measurement measure_isolated(std::size_t n, std::size_t m, std::size_t k, const ScalingSpec& spec) {
  int fds[2];
  if (pipe(fds) != 0) throw Error(ErrorKind::Io, "pipe failed");
  const pid_t pid = fork();
  if (pid < 0) throw Error(ErrorKind::Io, "fork failed");
  if (pid == 0) {
    close(fds[0]);
    Measurement m_out;
    int status = 0;
    try {
      m_out = measure_once(n, m, k, spec);
    } catch (...) {
      status = 1;
    }
    const auto written = write(fds[1], &m_out, sizeof m_out);
    close(fds[1]);
    _exit(written == sizeof m_out ? status : 1);
  }
  close(fds[1]);
  Measurement result;
  const auto got = read(fds[0], &result, sizeof result);
  close(fds[0]);
  int status = 0;
  rusage usage{};
  wait4(pid, &status, 0, &usage);
  if (got != sizeof result || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(ErrorKind::ResourceLimit, "scaling run failed for n = " + std::to_string(n));
  }
  result.peak_rss_kb = static_cast<std::uint64_t>(usage.ru_maxrss);
  return result;
}

}  // namespace

ExperimentReport run_scaling(const ScalingSpec& spec) {
  if (spec.node_counts.empty() || spec.budgets.empty()) throw Error(ErrorKind::Argument, "empty scaling grid");
  for (auto k : spec.budgets) {
    if (k < 1) throw Error(ErrorKind::Argument, "budget k must be at least 1");
  }
  if (spec.repeats < 1) throw Error(ErrorKind::Argument, "repeats must be at least 1");
  if (!(spec.average_degree > 0.0)) throw Error(ErrorKind::Argument, "average degree must be positive");

  ExperimentReport report;
  report.environment = environment_fingerprint();
  report.environment["generator"] = "erdos-renyi";
  report.environment["average_degree"] = format_double(spec.average_degree);
  report.environment["seed"] = std::to_string(spec.seed);
  report.environment["repeats"] = std::to_string(spec.repeats);
  report.environment["tol"] = format_double(spec.tol);
  report.environment["damping"] = spec.damping ? format_double(*spec.damping) : "auto";

  for (auto n : spec.node_counts) {
    const auto m = static_cast<std::size_t>(std::llround(double(n) * spec.average_degree / 2.0));
    const Graph probe = erdos_renyi(n, m, spec.directed, spec.seed);
    const double c = spec.damping ? *spec.damping : default_damping(probe);
    for (auto k : spec.budgets) {
      std::vector<double> times;
      std::uint64_t rss = 0;
      double delta_f = 0.0;
      for (int rep = 0; rep < spec.repeats; ++rep) {
        const auto meas = spec.isolate ? measure_isolated(n, m, k, spec) : measure_once(n, m, k, spec);
        times.push_back(meas.wall_time_ms);
        rss = std::max(rss, meas.peak_rss_kb);
        delta_f = meas.delta_f;
      }
      ReportRow row;
      row.dataset = "er-n" + std::to_string(n);
      row.n = n;
      row.m = m;
      row.method = kMethodGreedy;
      row.kind = spec.kind;
      row.k = k;
      row.damping = c;
      row.delta_f = delta_f;
      if (spec.timing) {
        row.wall_time_ms = median(std::move(times));
        row.peak_rss_kb = rss;
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

TableFormat parse_table_format(std::string_view text) {
  if (text == "csv") return TableFormat::Csv;
  if (text == "json") return TableFormat::Json;
  throw Error(ErrorKind::Argument, "unknown format '" + std::string(text) + "' (expected csv or json)");
}

void emit_table(std::ostream& out, const ExperimentReport& report, TableFormat format) {
  if (format == TableFormat::Csv) {
    const auto& cols = report_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& r : report.rows) {
      out << csv_field(r.dataset) << ',' << r.n << ',' << r.m << ',' << csv_field(r.method) << ','
          << to_string(r.kind) << ',' << r.k << ',' << format_double(r.damping) << ',' << format_double(r.delta_f)
          << ',' << format_double(r.wall_time_ms) << ',' << r.peak_rss_kb << ',' << csv_field(r.status) << '\n';
    }
    return;
  }
  nlohmann::ordered_json doc;
  doc["environment"] = report.environment;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row;
    row["dataset"] = r.dataset;
    row["n"] = r.n;
    row["m"] = r.m;
    row["method"] = r.method;
    row["kind"] = std::string(to_string(r.kind));
    row["k"] = r.k;
    row["damping"] = r.damping;
    row["delta_f"] = std::isfinite(r.delta_f) ? nlohmann::ordered_json(r.delta_f) : nlohmann::ordered_json(nullptr);
    row["wall_time_ms"] = r.wall_time_ms;
    row["peak_rss_kb"] = r.peak_rss_kb;
    row["status"] = r.status;
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  out << doc.dump(2) << '\n';
}

std::filesystem::path emit_tables(const ExperimentReport& report, TableFormat format, const std::filesystem::path& dir,
                                  const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto path = dir / (stem + (format == TableFormat::Csv ? ".csv" : ".json"));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  emit_table(out, report, format);
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
  return path;
}

namespace {

/// Splits one CSV record, honoring double-quoted fields.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        fields.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back();
    } else {
      fields.back() += ch;
    }
  }
  return fields;
}

}  // namespace

ExperimentReport parse_report_csv(std::istream& in) {
  ExperimentReport report;
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != report_columns()) {
    throw Error(ErrorKind::Parse, "report header does not match the expected columns");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != report_columns().size()) {
      throw Error(ErrorKind::Parse, "report line " + std::to_string(line_no) + ": wrong field count");
    }
    ReportRow r;
    r.dataset = f[0];
    r.n = parse_number<std::size_t>(f[1], "n");
    r.m = parse_number<std::size_t>(f[2], "m");
    r.method = f[3];
    r.kind = parse_element_kind(f[4]);
    r.k = parse_number<std::size_t>(f[5], "k");
    r.damping = parse_real(f[6], "damping");
    r.delta_f = parse_real(f[7], "delta_f");
    r.wall_time_ms = parse_real(f[8], "wall_time_ms");
    r.peak_rss_kb = parse_number<std::uint64_t>(f[9], "peak_rss_kb");
    r.status = f[10];
    report.rows.push_back(std::move(r));
  }
  return report;
}

ExperimentReport parse_report_json(std::istream& in) {
  ExperimentReport report;
  try {
    const auto doc = nlohmann::json::parse(in);
    report.environment = doc.at("environment").get<std::map<std::string, std::string>>();
    for (const auto& j : doc.at("rows")) {
      ReportRow r;
      r.dataset = j.at("dataset").get<std::string>();
      r.n = j.at("n").get<std::size_t>();
      r.m = j.at("m").get<std::size_t>();
      r.method = j.at("method").get<std::string>();
      r.kind = parse_element_kind(j.at("kind").get<std::string>());
      r.k = j.at("k").get<std::size_t>();
      r.damping = j.at("damping").get<double>();
      r.delta_f = j.at("delta_f").is_null() ? std::numeric_limits<double>::quiet_NaN() : j.at("delta_f").get<double>();
      r.wall_time_ms = j.at("wall_time_ms").get<double>();
      r.peak_rss_kb = j.at("peak_rss_kb").get<std::uint64_t>();
      r.status = j.at("status").get<std::string>();
      report.rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("report JSON: ") + e.what());
  }
  return report;
}

}  // namespace rankaudit
