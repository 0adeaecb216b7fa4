#pragma once

#include <span>
#include <vector>

#include "rankaudit/graph.hpp"
#include "rankaudit/linsys.hpp"
#include "rankaudit/loss.hpp"

namespace rankaudit {

enum class GradientVariant { Plain, L1Normalized };

/// Rank-one factorization of the partial gradient df/dA = c * y * g_r'.
/// Entry (row, col) is the derivative with respect to matrix entry A(row, col),
/// which holds the arc col -> row. Memory is O(n); the n x n matrix is never
/// formed.
class GradientFactors {
 public:
  GradientFactors() = default;
  GradientFactors(std::vector<double> left, std::vector<double> right, double c,
                  GradientVariant variant, bool directed);

  double entry(NodeId row, NodeId col) const { return c_ * left_[row] * right_[col]; }

  std::span<const double> left() const { return left_; }
  std::span<const double> right() const { return right_; }
  double damping() const { return c_; }
  GradientVariant variant() const { return variant_; }
  bool directed() const { return directed_; }
  std::size_t size() const { return left_.size(); }

 private:
  std::vector<double> left_;   // y = Q' grad f
  std::vector<double> right_;  // r
  double c_ = 0.0;
  GradientVariant variant_ = GradientVariant::Plain;
  bool directed_ = true;
};

/// y = Q' grad f(r); for the squared L2 loss this is 2 Q'r.
GradientFactors gradient_factors(const Graph& g, const RankVector& r, const LossSpec& spec, double c,
                                 const SolverOptions& opts = {});

/// Gradient of f(r / S(r)) with S(r) = sum r, squared L2 loss only.
GradientFactors gradient_factors_normalized(const Graph& g, const RankVector& r, const LossSpec& spec,
                                            double c, const SolverOptions& opts = {});

/// Influence of the arc src -> dst. For undirected graphs the two mirrored
/// entries are summed (a self-loop contributes its diagonal entry once).
double edge_influence(const GradientFactors& gf, NodeId src, NodeId dst);

/// Sum of the influences of the existing edges incident to v; undirected
/// edges and self-loops count once.
double node_influence(const GradientFactors& gf, const Graph& g, NodeId v);

/// Sum of the influences of the existing edges with both endpoints in `nodes`.
double subgraph_influence(const GradientFactors& gf, const Graph& g, std::span<const NodeId> nodes);

struct EdgeScore {
  Edge edge;
  double value = 0.0;
};

/// Influence of every candidate edge of g (see Graph::edges), in that order.
std::vector<EdgeScore> edge_influences(const GradientFactors& gf, const Graph& g);

/// node_influence for all nodes in one O(m) pass.
std::vector<double> node_influences(const GradientFactors& gf, const Graph& g);

/// Static set influence I(S): the sum of the member influences for edge and
/// node sets, the induced-subgraph sum for subgraphs.
double set_influence(const GradientFactors& gf, const Graph& g, const ElementSet& set);

}  // namespace rankaudit
