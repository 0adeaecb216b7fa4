#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rankaudit/graph.hpp"

namespace rankaudit {

/// Square sparse matrix in compressed-row form.
class SparseMatrix {
 public:
  struct Entry {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
  };

  SparseMatrix() = default;
  /// Repeated (row, col) entries are summed.
  SparseMatrix(std::size_t n, std::vector<Entry> entries);

  static SparseMatrix identity(std::size_t n);

  std::size_t size() const { return n_; }
  std::size_t nonzeros() const { return cols_.size(); }
  bool is_symmetric(double tol = 1e-12) const;

  /// y = M x
  std::vector<double> multiply(std::span<const double> x) const;
  /// y = M' x
  std::vector<double> multiply_transpose(std::span<const double> x) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
};

/// Reads "row col value" triplets over 0-based node ids.
SparseMatrix load_sparse_matrix(const std::filesystem::path& path, std::size_t n);

struct SquaredL2Loss {};
struct LpNormLoss {
  double p = 2.0;
};
struct SoftMaxLoss {};
struct EnergyNormLoss {
  std::shared_ptr<const SparseMatrix> matrix;
};

/// Loss f(r) over the ranking vector.
using LossSpec = std::variant<SquaredL2Loss, LpNormLoss, SoftMaxLoss, EnergyNormLoss>;

/// Builds an EnergyNorm loss; throws Validation unless M is symmetric.
/// Positive-definiteness is the caller's responsibility.
LossSpec make_energy_loss(SparseMatrix m);
LossSpec make_lp_loss(double p);

/// Parses "l2sq", "lp:<p>", "softmax" or "energy:<matrix-file>". The energy
/// matrix is sized to `n` nodes.
LossSpec parse_loss(std::string_view text, std::size_t n);
std::string describe(const LossSpec& spec);

double loss_value(const LossSpec& spec, std::span<const double> r);

/// df/dr. LpNorm at r = 0 throws Domain.
std::vector<double> loss_gradient(const LossSpec& spec, std::span<const double> r);

}  // namespace rankaudit
