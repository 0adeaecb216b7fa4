#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "rankaudit/error.hpp"
#include "rankaudit/harness.hpp"

using namespace rankaudit;
using namespace testutil;

namespace {

ExperimentConfig karate_config() {
  ExperimentConfig cfg;
  cfg.datasets = {data_path("karate.txt")};
  cfg.methods = {kMethodGreedy, kMethodRandom, kMethodDegree};
  cfg.timing = false;
  return cfg;
}

std::string csv_of(const ExperimentReport& report) {
  std::ostringstream out;
  emit_table(out, report, TableFormat::Csv);
  return out.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("rankaudit_harness_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config: text form round trips") {
  ExperimentConfig cfg;
  cfg.datasets = {"a.txt", "b/c.txt"};
  cfg.directed = true;
  cfg.norm = NormMode::Raw;
  cfg.kinds = {ElementKind::Nodes, ElementKind::Subgraph};
  cfg.k_min = 2;
  cfg.k_max = 7;
  cfg.methods = {kMethodGreedy, kMethodHits, kMethodBruteForce};
  cfg.loss = "lp:1.5";
  cfg.damping = 0.3;
  cfg.tol = 1e-9;
  cfg.max_iter = 77;
  cfg.seed = 99;
  cfg.random_repeats = 3;
  cfg.brute_force_limit = 1234;
  cfg.output_dir = "out";
  cfg.timing = false;
  std::istringstream in(to_text(cfg));
  CHECK(parse_experiment_config(in) == cfg);

  ExperimentConfig defaults;
  defaults.datasets = {"x.txt"};
  std::istringstream din(to_text(defaults));
  CHECK(parse_experiment_config(din) == defaults);
}

TEST_CASE("config: comments, blanks and errors") {
  std::istringstream ok("# comment\n\ndatasets = g.txt  # trailing\nk_max = 3\n");
  const auto cfg = parse_experiment_config(ok);
  CHECK(cfg.datasets == std::vector<std::string>{"g.txt"});
  CHECK(cfg.k_max == 3);

  for (const char* bad : {"datasets = g.txt\nk_min = 0\n", "datasets = g.txt\nk_min = 5\nk_max = 4\n",
                          "datasets = g.txt\nmethods = \n", "k_max = 3\n", "datasets = g.txt\nbogus = 1\n",
                          "datasets = g.txt\nmethods = oracle\n", "datasets = g.txt\nk_max\n"}) {
    std::istringstream in(bad);
    INFO(bad);
    CHECK_THROWS_AS(parse_experiment_config(in), Error);
  }
}

TEST_CASE("comparison: karate with three methods on edges gives 30 rows") {
  const auto report = run_comparison(karate_config());
  REQUIRE(report.rows.size() == 30);
  std::set<std::tuple<std::string, std::string, std::size_t>> cells;
  for (const auto& row : report.rows) {
    CHECK(row.status == "ok");
    CHECK(row.n == 34);
    CHECK(row.m == 78);
    CHECK(row.wall_time_ms == 0.0);
    cells.insert({row.dataset, row.method, row.k});
  }
  CHECK(cells.size() == 30);
  CHECK(report.environment.count("damping") == 1);
}

TEST_CASE("comparison: greedy is not beaten by the random median on karate") {
  // Raw adjacency with the default damping, the form the gradient models.
  auto cfg = karate_config();
  cfg.norm = NormMode::Raw;
  cfg.methods = {kMethodGreedy, kMethodRandom};
  const auto report = run_comparison(cfg);
  for (std::size_t k = 1; k <= 10; ++k) {
    double greedy = NAN, random = NAN;
    for (const auto& row : report.rows) {
      if (row.k != k) continue;
      (row.method == kMethodGreedy ? greedy : random) = row.delta_f;
    }
    INFO("k = ", k);
    CHECK(greedy >= random);
  }
}

TEST_CASE("comparison: brute force dominates on lesmis k = 2") {
  ExperimentConfig cfg;
  cfg.datasets = {data_path("lesmis.txt")};
  cfg.k_min = cfg.k_max = 2;
  cfg.methods = {kMethodGreedy, kMethodRandom, kMethodDegree, kMethodPageRank, kMethodHits, kMethodBruteForce};
  cfg.timing = false;
  const auto report = run_comparison(cfg);
  double best = NAN;
  for (const auto& row : report.rows) {
    if (row.method == kMethodBruteForce) best = row.delta_f;
  }
  REQUIRE(std::isfinite(best));
  for (const auto& row : report.rows) CHECK(row.delta_f <= best * (1.0 + 1e-12));
}

TEST_CASE("comparison: subgraph rows start at k = 2, skipped cells stay in the report") {
  auto cfg = karate_config();
  cfg.kinds = {ElementKind::Subgraph};
  cfg.methods = {kMethodGreedy, kMethodBruteForce};
  cfg.k_max = 3;
  cfg.brute_force_limit = 1000;
  const auto report = run_comparison(cfg);
  std::size_t skipped = 0;
  for (const auto& row : report.rows) {
    if (row.kind == ElementKind::Subgraph && row.dataset == "karate") CHECK(row.k >= 2);
    if (row.status.rfind("skipped", 0) == 0) {
      ++skipped;
      CHECK(std::isnan(row.delta_f));
    }
  }
  CHECK(report.rows.size() == 4);
  CHECK(skipped == 1);  // C(34, 3) = 5984 > 1000; C(34, 2) = 561 runs
}

TEST_CASE("comparison: unloadable dataset is rejected before any cell runs") {
  auto cfg = karate_config();
  cfg.datasets.push_back("/nonexistent/graph.txt");
  CHECK_THROWS_AS(run_comparison(cfg), Error);
}

TEST_CASE("comparison: rows are a pure function of the config") {
  auto cfg = karate_config();
  cfg.kinds = {ElementKind::Edges, ElementKind::Nodes};
  cfg.k_max = 3;
  CHECK(csv_of(run_comparison(cfg)) == csv_of(run_comparison(cfg)));
}

TEST_CASE("erdos_renyi") {
  const auto g = erdos_renyi(200, 1000, false, 5);
  CHECK(g.node_count() == 200);
  CHECK(g.edge_count() == 1000);
  for (const auto& e : g.edges()) CHECK(e.src != e.dst);
  const auto d = erdos_renyi(50, 300, true, 5);
  CHECK(d.arc_count() == 300);
  const auto again = erdos_renyi(200, 1000, false, 5);
  CHECK(again.edges() == g.edges());
  CHECK(erdos_renyi(200, 1000, false, 6).edges() != g.edges());
  CHECK_THROWS_AS(erdos_renyi(4, 7, false, 1), Error);
}

TEST_CASE("scaling: small run and argument checks") {
  ScalingSpec spec;
  spec.node_counts = {300, 600};
  spec.budgets = {1, 2};
  spec.repeats = 1;
  spec.isolate = false;
  const auto report = run_scaling(spec);
  REQUIRE(report.rows.size() == 4);
  for (const auto& row : report.rows) {
    CHECK(row.status == "ok");
    CHECK(row.wall_time_ms >= 0.0);
    CHECK(row.m == row.n * 5);
  }
  spec.budgets = {0};
  CHECK_THROWS_AS(run_scaling(spec), Error);
}

TEST_CASE("scaling: isolated cells report a child peak RSS") {
  ScalingSpec spec;
  spec.node_counts = {200};
  spec.budgets = {1};
  spec.repeats = 1;
  const auto report = run_scaling(spec);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].status == "ok");
  CHECK(report.rows[0].peak_rss_kb > 0);
}

TEST_CASE("tables") {
  SUBCASE("empty report is header only") {
    const auto dir = scratch_dir("empty");
    const auto path = emit_tables({}, TableFormat::Csv, dir);
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str() == "dataset,n,m,method,kind,k,damping,delta_f,wall_time_ms,peak_rss_kb,status\n");
    std::filesystem::remove_all(dir);
  }
  SUBCASE("column order is fixed") {
    CHECK(report_columns() == std::vector<std::string>{"dataset", "n", "m", "method", "kind", "k", "damping",
                                                       "delta_f", "wall_time_ms", "peak_rss_kb", "status"});
  }
  SUBCASE("csv and json round trip") {
    auto cfg = karate_config();
    cfg.k_max = 2;
    auto report = run_comparison(cfg);
    report.rows.push_back(report.rows.front());
    report.rows.back().status = "skipped: a, \"quoted\" reason";
    report.rows.back().delta_f = NAN;
    report.rows.back().wall_time_ms = 1.25;
    report.rows.back().peak_rss_kb = 4096;

    const auto same = [&](const ExperimentReport& back) {
      REQUIRE(back.rows.size() == report.rows.size());
      for (std::size_t i = 0; i < report.rows.size(); ++i) {
        auto a = report.rows[i];
        auto b = back.rows[i];
        if (std::isnan(a.delta_f) && std::isnan(b.delta_f)) a.delta_f = b.delta_f = 0.0;
        CHECK(a == b);
      }
    };
    std::stringstream csv;
    emit_table(csv, report, TableFormat::Csv);
    same(parse_report_csv(csv));

    std::stringstream json;
    emit_table(json, report, TableFormat::Json);
    const auto back = parse_report_json(json);
    same(back);
    CHECK(back.environment == report.environment);
  }
  SUBCASE("format names") {
    CHECK(parse_table_format("csv") == TableFormat::Csv);
    CHECK(parse_table_format("json") == TableFormat::Json);
    CHECK_THROWS_AS(parse_table_format("xml"), Error);
  }
}
