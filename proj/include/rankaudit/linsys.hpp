#pragma once

#include <span>
#include <variant>
#include <vector>

#include "rankaudit/graph.hpp"

namespace rankaudit {

/// Dense solution of a fixed-point solve plus solver metadata. Used both for
/// PageRank vectors and for resolvent applications.
struct RankVector {
  std::vector<double> values;
  double residual = 0.0;  // final ||x_{t+1} - x_t||_1
  int iterations = 0;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 1000;
};

/// Teleportation vector e of the PageRank system.
struct UniformTeleport {};
struct PersonalizedTeleport {
  std::vector<double> distribution;
};
struct SingleNodeTeleport {
  NodeId node = 0;
};
/// Arbitrary finite vector; need not be a distribution.
struct RawTeleport {
  std::vector<double> values;
};

using TeleportSpec = std::variant<UniformTeleport, PersonalizedTeleport, SingleNodeTeleport, RawTeleport>;

/// Expands a teleport spec to a dense length-n vector, validating it.
std::vector<double> materialize(const TeleportSpec& spec, std::size_t n);

/// Solves r = c A r + (1 - c) e by Jacobi-style power iteration.
/// Throws ConvergenceError when max_iter sweeps do not reach tol.
RankVector pagerank(const Graph& g, const TeleportSpec& e, double c, const SolverOptions& opts = {});

/// Same solve over an explicit in-form view (row i of A) and a dense
/// teleport vector.
RankVector pagerank(const CsrView& in_form, std::span<const double> e, double c,
                    const SolverOptions& opts = {});

/// Returns x = (I - c A')^{-1} b, i.e. Q'b, by iterating x = c A' x + b.
RankVector resolvent_transpose_apply(const Graph& g, std::span<const double> b, double c,
                                     const SolverOptions& opts = {});

/// Power-iteration estimate of the dominant eigenvalue magnitude of A.
/// Returns 0 for an edgeless graph.
double spectral_radius_estimate(const Graph& g, int iters = 500);

/// Upper bound applied to the automatically chosen damping factor.
inline constexpr double kMaxAutoDamping = 0.85;

/// c = 1 / (2 * rho(A)), capped at kMaxAutoDamping (and used as-is when the
/// graph is edgeless).
double default_damping(const Graph& g);

}  // namespace rankaudit
