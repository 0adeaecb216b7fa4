#include <doctest.h>

#include <numeric>
#include <random>

#include "helpers.hpp"
#include "oracle/dense.hpp"
#include "rankaudit/error.hpp"
#include "rankaudit/linsys.hpp"

using namespace rankaudit;
using namespace testutil;

namespace {

double l1_residual(const Graph& g, const std::vector<double>& r, const std::vector<double>& e, double c) {
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
  const Eigen::VectorXd ev = Eigen::Map<const Eigen::VectorXd>(e.data(), static_cast<Eigen::Index>(e.size()));
  return (x - (c * oracle::dense_matrix(g) * x + (1.0 - c) * ev)).lpNorm<1>();
}

}  // namespace

TEST_CASE("pagerank: edgeless graph gives (1 - c) / n") {
  const auto g = make(4, {}, true);
  for (double c : {0.1, 0.5, 0.85}) {
    const auto r = pagerank(g, UniformTeleport{}, c);
    for (double x : r.values) CHECK(x == doctest::Approx((1.0 - c) / 4.0).epsilon(1e-14));
  }
}

TEST_CASE("pagerank: triangle is uniform") {
  const auto r = pagerank(triangle(), UniformTeleport{}, 0.5);
  for (double x : r.values) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("pagerank: directed path matches a dense solve") {
  const auto g = path3();
  const auto r = pagerank(g, UniformTeleport{}, 0.5);
  const auto want = oracle::pagerank(oracle::dense_matrix_from_raw(g), oracle::uniform(3), 0.5);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(r[i] - want(i)) <= 1e-9);
  CHECK(r.residual <= 1e-10);
}

TEST_CASE("pagerank: teleport variants") {
  const auto g = karate();
  const std::size_t n = g.node_count();
  SUBCASE("single node") {
    const auto r = pagerank(g, SingleNodeTeleport{5}, 0.5);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    e(5) = 1.0;
    const auto want = oracle::pagerank(oracle::dense_matrix(g), e, 0.5);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(r[i] - want(static_cast<Eigen::Index>(i))) <= 1e-9);
  }
  SUBCASE("personalized must be a distribution") {
    CHECK_THROWS_AS(pagerank(g, PersonalizedTeleport{std::vector<double>(n, 1.0)}, 0.5), Error);
    CHECK_THROWS_AS(pagerank(g, PersonalizedTeleport{std::vector<double>(n - 1, 1.0 / double(n - 1))}, 0.5), Error);
  }
  SUBCASE("raw vector only needs finite values") {
    std::vector<double> e(n, -2.0);
    CHECK_NOTHROW(pagerank(g, RawTeleport{e}, 0.5));
    e[0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(pagerank(g, RawTeleport{e}, 0.5), Error);
  }
  SUBCASE("single node out of range") { CHECK_THROWS_AS(pagerank(g, SingleNodeTeleport{NodeId(n)}, 0.5), Error); }
}

TEST_CASE("pagerank: damping outside (0, 1) is rejected") {
  const auto g = triangle();
  CHECK_THROWS_AS(pagerank(g, UniformTeleport{}, 0.0), Error);
  CHECK_THROWS_AS(pagerank(g, UniformTeleport{}, 1.0), Error);
}

TEST_CASE("pagerank: non-convergence reports the last residual") {
  const auto g = karate();
  try {
    pagerank(g, UniformTeleport{}, 0.85, {1e-14, 3});
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.kind() == ErrorKind::Convergence);
    CHECK(e.iterations() == 3);
    CHECK(e.last_residual() > 1e-14);
  }
}

TEST_CASE("pagerank: divergent raw system is a convergence error") {
  const auto g = make(2, {{0, 1, 3.0}}, false, NormMode::Raw);
  CHECK_THROWS_AS(pagerank(g, UniformTeleport{}, 0.9, {1e-10, 5000}), ConvergenceError);
}

TEST_CASE("resolvent_transpose_apply") {
  SUBCASE("b = 0 gives 0") {
    const auto x = resolvent_transpose_apply(karate(), std::vector<double>(34, 0.0), 0.5);
    for (double v : x.values) CHECK(v == 0.0);
  }
  SUBCASE("edgeless graph gives b") {
    const std::vector<double> b{0.3, -1.0, 2.5};
    const auto x = resolvent_transpose_apply(make(3, {}, true), b, 0.7);
    for (int i = 0; i < 3; ++i) CHECK(x[i] == b[i]);
  }
  SUBCASE("path graph matches dense solve") {
    const auto g = path3();
    const auto r = pagerank(g, UniformTeleport{}, 0.5);
    const auto x = resolvent_transpose_apply(g, r.values, 0.5);
    const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(r.values.data(), 3);
    const auto want = oracle::resolvent_transpose(oracle::dense_matrix(g), b, 0.5);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(x[i] - want(i)) <= 1e-9);
  }
}

TEST_CASE("spectral_radius_estimate") {
  CHECK(spectral_radius_estimate(triangle()) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(spectral_radius_estimate(make(3, {}, true)) == 0.0);
  const auto two_cycle = make(2, {{0, 1, 2.0}}, false, NormMode::Raw);
  CHECK(spectral_radius_estimate(two_cycle) == doctest::Approx(2.0).epsilon(1e-6));
  SUBCASE("karate raw adjacency matches the dense eigenvalue") {
    const auto g = karate(NormMode::Raw);
    const double want = oracle::spectral_radius(oracle::dense_matrix(g));
    CHECK(std::abs(spectral_radius_estimate(g) - want) <= 1e-6 * want);
  }
}

TEST_CASE("default_damping") {
  CHECK(default_damping(karate()) == doctest::Approx(0.5).epsilon(1e-8));
  const auto raw = karate(NormMode::Raw);
  CHECK(default_damping(raw) == doctest::Approx(1.0 / (2.0 * spectral_radius_estimate(raw))));
  CHECK(default_damping(make(3, {}, true)) == kMaxAutoDamping);
}

TEST_CASE("property: residual within tolerance and L1 normalization") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const bool directed = trial % 2 == 0;
    const auto mode = trial % 3 == 0 ? NormMode::Raw : NormMode::ColumnStochastic;
    const auto g = oracle::random_graph(rng, 20, 0.25, directed, mode, true);
    const double c = mode == NormMode::Raw ? default_damping(g) : 0.85;
    const double tol = 1e-10;
    const auto r = pagerank(g, UniformTeleport{}, c, {tol, 1000});
    CHECK(r.residual <= tol);
    // The fixed-point defect is bounded by the contraction of the last step.
    CHECK(l1_residual(g, r.values, std::vector<double>(20, 1.0 / 20.0), c) <= 10 * tol);
    bool dangling = false;
    for (NodeId v = 0; v < g.node_count(); ++v) dangling |= g.out_degree(v) == 0;
    if (mode == NormMode::ColumnStochastic && !dangling) {
      CHECK(std::abs(std::accumulate(r.values.begin(), r.values.end(), 0.0) - 1.0) <= 10 * tol);
    }
  }
}

TEST_CASE("property: resolvent linearity on 100 random draws") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto g = karate();
  const double c = 0.5;
  const double tol = 1e-10;
  int failures = 0;
  for (int draw = 0; draw < 100; ++draw) {
    std::vector<double> b1(34), b2(34), mix(34);
    const double alpha = u(rng) * 3.0;
    const double beta = u(rng) * 3.0;
    for (int i = 0; i < 34; ++i) {
      b1[i] = u(rng);
      b2[i] = u(rng);
      mix[i] = alpha * b1[i] + beta * b2[i];
    }
    const auto x1 = resolvent_transpose_apply(g, b1, c, {tol, 1000});
    const auto x2 = resolvent_transpose_apply(g, b2, c, {tol, 1000});
    const auto xm = resolvent_transpose_apply(g, mix, c, {tol, 1000});
    for (int i = 0; i < 34; ++i) {
      if (std::abs(xm[i] - (alpha * x1[i] + beta * x2[i])) > 10 * tol) ++failures;
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("property: resolvent on the reverse graph reproduces pagerank") {
  // (1 - c) Q e computed as the transpose resolvent of the reversed graph.
  const auto g = path3();
  const double c = 0.5;
  const auto r = pagerank(g, UniformTeleport{}, c);
  std::vector<double> b(3, (1.0 - c) / 3.0);
  const auto x = resolvent_transpose_apply(g.reverse(), b, c);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(x[i] - r[i]) <= 1e-9);
}

TEST_CASE("property: reported residual is the final iterate difference") {
  const auto g = karate();
  const auto r = pagerank(g, UniformTeleport{}, 0.5, {1e-6, 1000});
  // One more sweep moves the iterate by at most c times the last step.
  const auto r2 = pagerank(g, UniformTeleport{}, 0.5, {1e-6, r.iterations});
  CHECK(r2.residual == r.residual);
  CHECK_THROWS_AS(pagerank(g, UniformTeleport{}, 0.5, {1e-6, r.iterations - 1}), ConvergenceError);
}
