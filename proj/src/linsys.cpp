#include "rankaudit/linsys.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rankaudit/error.hpp"

namespace rankaudit {

namespace {

constexpr double kDistributionSlack = 1e-12;

void require_distribution(std::span<const double> v, const char* what) {
  double sum = 0.0;
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) {
      throw Error(ErrorKind::Validation, std::string(what) + " must be finite and non-negative");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kDistributionSlack) {
    throw Error(ErrorKind::Validation, std::string(what) + " must sum to 1");
  }
}

void check_damping(double c) {
  if (!(c > 0.0 && c < 1.0)) {
    throw Error(ErrorKind::Argument, "damping factor must lie in (0, 1), got " + std::to_string(c));
  }
}

void check_options(const SolverOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error(ErrorKind::Argument, "solver tolerance must be positive");
  if (opts.max_iter < 1) throw Error(ErrorKind::Argument, "max_iter must be at least 1");
}

/// Iterates x <- c * M x + b where row v of M is given by `rows`.
RankVector fixed_point(const CsrView& rows, std::span<const double> b, double c,
                       const SolverOptions& opts, const char* what) {
  const std::size_t n = rows.node_count();
  std::vector<double> x(b.begin(), b.end());
  std::vector<double> next(n);
  double residual = 0.0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    residual = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      double acc = 0.0;
      for (auto e = rows.offsets[v]; e < rows.offsets[v + 1]; ++e) {
        acc += rows.weights[e] * x[rows.neighbors[e]];
      }
      next[v] = c * acc + b[v];
      residual += std::abs(next[v] - x[v]);
    }
    x.swap(next);
    if (!std::isfinite(residual)) {
      throw ConvergenceError(std::string(what) + " diverged (c * rho(A) >= 1?)", residual, it);
    }
    if (residual <= opts.tol) return {std::move(x), residual, it};
  }
  throw ConvergenceError(std::string(what) + " did not converge in " + std::to_string(opts.max_iter) +
                             " iterations (residual " + std::to_string(residual) + ")",
                         residual, opts.max_iter);
}

}  // namespace

std::vector<double> materialize(const TeleportSpec& spec, std::size_t n) {
  return std::visit(
      [n](const auto& s) -> std::vector<double> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformTeleport>) {
          if (n == 0) return {};
          return std::vector<double>(n, 1.0 / static_cast<double>(n));
        } else if constexpr (std::is_same_v<T, PersonalizedTeleport>) {
          if (s.distribution.size() != n) {
            throw Error(ErrorKind::Validation, "teleport distribution length mismatch");
          }
          require_distribution(s.distribution, "teleport distribution");
          return s.distribution;
        } else if constexpr (std::is_same_v<T, SingleNodeTeleport>) {
          if (s.node >= n) throw Error(ErrorKind::Validation, "teleport node out of range");
          std::vector<double> e(n, 0.0);
          e[s.node] = 1.0;
          return e;
        } else {
          if (s.values.size() != n) throw Error(ErrorKind::Validation, "teleport vector length mismatch");
          for (double x : s.values) {
            if (!std::isfinite(x)) throw Error(ErrorKind::Validation, "teleport vector must be finite");
          }
          return s.values;
        }
      },
      spec);
}

RankVector pagerank(const CsrView& in_form, std::span<const double> e, double c,
                    const SolverOptions& opts) {
  check_damping(c);
  check_options(opts);
  if (e.size() != in_form.node_count()) {
    throw Error(ErrorKind::Validation, "teleport vector length mismatch");
  }
  std::vector<double> b(e.size());
  std::transform(e.begin(), e.end(), b.begin(), [c](double x) { return (1.0 - c) * x; });
  return fixed_point(in_form, b, c, opts, "pagerank");
}

RankVector pagerank(const Graph& g, const TeleportSpec& e, double c, const SolverOptions& opts) {
  const auto dense = materialize(e, g.node_count());
  return pagerank(g.in_view(), dense, c, opts);
}

RankVector resolvent_transpose_apply(const Graph& g, std::span<const double> b, double c,
                                     const SolverOptions& opts) {
  check_damping(c);
  check_options(opts);
  if (b.size() != g.node_count()) throw Error(ErrorKind::Validation, "right-hand side length mismatch");
  for (double x : b) {
    if (!std::isfinite(x)) throw Error(ErrorKind::Validation, "right-hand side must be finite");
  }
  // (A'x)(j) = sum over arcs j -> i of A(i, j) x(i): the out-form rows.
  return fixed_point(g.out_view(), b, c, opts, "resolvent");
}

double spectral_radius_estimate(const Graph& g, int iters) {
  const std::size_t n = g.node_count();
  if (n == 0 || g.arc_count() == 0) return 0.0;
  const auto rows = g.in_view();

  // rho(A) <= max column sum; shifting by half of it makes the Perron root
  // the unique dominant eigenvalue even for periodic (e.g. bipartite) graphs.
  std::vector<double> col_sum(n, 0.0);
  const auto out = g.out_view();
  for (std::size_t v = 0; v < n; ++v) {
    for (auto e = out.offsets[v]; e < out.offsets[v + 1]; ++e) col_sum[v] += std::abs(out.weights[e]);
  }
  const double bound = *std::max_element(col_sum.begin(), col_sum.end());
  if (bound == 0.0) return 0.0;
  const double shift = 0.5 * bound;

  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  std::vector<double> y(n);
  double estimate = bound;
  for (int it = 0; it < iters; ++it) {
    double norm = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      double acc = shift * x[v];
      for (auto e = rows.offsets[v]; e < rows.offsets[v + 1]; ++e) acc += rows.weights[e] * x[rows.neighbors[e]];
      y[v] = acc;
      norm += std::abs(acc);
    }
    // x stays L1-normalized, so the norm of the product is the ratio.
    const double next = norm - shift;
    for (std::size_t v = 0; v < n; ++v) x[v] = y[v] / norm;
    const bool settled = std::abs(next - estimate) <= 1e-10 * std::max(1.0, std::abs(next));
    estimate = next;
    if (settled) break;
  }
  return std::max(0.0, estimate);
}

double default_damping(const Graph& g) {
  const double rho = spectral_radius_estimate(g);
  if (rho <= 0.0) return kMaxAutoDamping;
  return std::min(kMaxAutoDamping, 1.0 / (2.0 * rho));
}

}  // namespace rankaudit
