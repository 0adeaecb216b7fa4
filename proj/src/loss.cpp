#include "rankaudit/loss.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rankaudit/error.hpp"
#include "rankaudit/numfmt.hpp"

namespace rankaudit {

SparseMatrix::SparseMatrix(std::size_t n, std::vector<Entry> entries) : n_(n) {
  for (const auto& e : entries) {
    if (e.row >= n || e.col >= n) throw Error(ErrorKind::Validation, "matrix entry out of range");
    if (!std::isfinite(e.value)) throw Error(ErrorKind::Validation, "matrix entry must be finite");
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!cols_.empty() && i > 0 && entries[i].row == entries[i - 1].row &&
        entries[i].col == entries[i - 1].col) {
      values_.back() += entries[i].value;
      continue;
    }
    ++offsets_[entries[i].row + 1];
    cols_.push_back(entries[i].col);
    values_.push_back(entries[i].value);
  }
  for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Entry> entries;
  entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) entries.push_back({i, i, 1.0});
  return SparseMatrix(n, std::move(entries));
}

bool SparseMatrix::is_symmetric(double tol) const {
  for (std::size_t r = 0; r < n_; ++r) {
    for (auto k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      const auto c = cols_[k];
      const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[c]);
      const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[c + 1]);
      const auto it = std::lower_bound(first, last, r);
      const double mirror = (it != last && *it == r) ? values_[static_cast<std::size_t>(it - cols_.begin())] : 0.0;
      if (std::abs(mirror - values_[k]) > tol * std::max(1.0, std::abs(values_[k]))) return false;
    }
  }
  return true;
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_, 0.0);
  for (std::size_t r = 0; r < n_; ++r) {
    double acc = 0.0;
    for (auto k = offsets_[r]; k < offsets_[r + 1]; ++k) acc += values_[k] * x[cols_[k]];
    y[r] = acc;
  }
  return y;
}

std::vector<double> SparseMatrix::multiply_transpose(std::span<const double> x) const {
  std::vector<double> y(n_, 0.0);
  for (std::size_t r = 0; r < n_; ++r) {
    for (auto k = offsets_[r]; k < offsets_[r + 1]; ++k) y[cols_[k]] += values_[k] * x[r];
  }
  return y;
}

SparseMatrix load_sparse_matrix(const std::filesystem::path& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open matrix file '" + path.string() + "'");
  std::vector<SparseMatrix::Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first) || first.front() == '#') continue;
    SparseMatrix::Entry e;
    std::istringstream head(first);
    std::string extra;
    if (!(head >> e.row) || !(fields >> e.col >> e.value) || (fields >> extra)) {
      throw Error(ErrorKind::Parse, path.string() + ":" + std::to_string(line_no) +
                                        ": expected 'row col value'");
    }
    entries.push_back(e);
  }
  return SparseMatrix(n, std::move(entries));
}

LossSpec make_energy_loss(SparseMatrix m) {
  if (!m.is_symmetric()) throw Error(ErrorKind::Validation, "energy-norm matrix must be symmetric");
  return EnergyNormLoss{std::make_shared<const SparseMatrix>(std::move(m))};
}

LossSpec make_lp_loss(double p) {
  if (!std::isfinite(p) || p < 1.0) {
    throw Error(ErrorKind::Argument, "Lp loss requires finite p >= 1");
  }
  return LpNormLoss{p};
}

LossSpec parse_loss(std::string_view text, std::size_t n) {
  if (text == "l2sq") return SquaredL2Loss{};
  if (text == "softmax") return SoftMaxLoss{};
  if (text.starts_with("lp:")) {
    const auto num = text.substr(3);
    double p = 0.0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), p);
    if (ec != std::errc{} || ptr != num.data() + num.size()) {
      throw Error(ErrorKind::Argument, "malformed Lp exponent '" + std::string(num) + "'");
    }
    return make_lp_loss(p);
  }
  if (text.starts_with("energy:")) {
    return make_energy_loss(load_sparse_matrix(std::string(text.substr(7)), n));
  }
  throw Error(ErrorKind::Argument,
              "unknown loss '" + std::string(text) + "' (expected l2sq|lp:<p>|softmax|energy:<file>)");
}

std::string describe(const LossSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SquaredL2Loss>) return "l2sq";
        else if constexpr (std::is_same_v<T, LpNormLoss>) return "lp:" + format_double(s.p);
        else if constexpr (std::is_same_v<T, SoftMaxLoss>) return "softmax";
        else return "energy";
      },
      spec);
}

namespace {

double lp_norm(std::span<const double> r, double p) {
  double acc = 0.0;
  for (double x : r) acc += std::pow(std::abs(x), p);
  return std::pow(acc, 1.0 / p);
}

double max_of(std::span<const double> r) {
  return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
}

}  // namespace

double loss_value(const LossSpec& spec, std::span<const double> r) {
  return std::visit(
      [r](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SquaredL2Loss>) {
          double acc = 0.0;
          for (double x : r) acc += x * x;
          return acc;
        } else if constexpr (std::is_same_v<T, LpNormLoss>) {
          return lp_norm(r, s.p);
        } else if constexpr (std::is_same_v<T, SoftMaxLoss>) {
          const double top = max_of(r);
          double acc = 0.0;
          for (double x : r) acc += std::exp(x - top);
          return top + std::log(acc);
        } else {
          if (s.matrix->size() != r.size()) throw Error(ErrorKind::Validation, "energy matrix size mismatch");
          const auto mr = s.matrix->multiply(r);
          double acc = 0.0;
          for (std::size_t i = 0; i < r.size(); ++i) acc += r[i] * mr[i];
          return acc;
        }
      },
      spec);
}

std::vector<double> loss_gradient(const LossSpec& spec, std::span<const double> r) {
  return std::visit(
      [r](const auto& s) -> std::vector<double> {
        using T = std::decay_t<decltype(s)>;
        std::vector<double> g(r.size());
        if constexpr (std::is_same_v<T, SquaredL2Loss>) {
          for (std::size_t i = 0; i < r.size(); ++i) g[i] = 2.0 * r[i];
        } else if constexpr (std::is_same_v<T, LpNormLoss>) {
          const double norm = lp_norm(r, s.p);
          if (norm == 0.0) throw Error(ErrorKind::Domain, "Lp loss is not differentiable at r = 0");
          const double scale = std::pow(norm, s.p - 1.0);
          // r o |r|^(p-2) written as sign(r) |r|^(p-1), finite at r(i) = 0.
          for (std::size_t i = 0; i < r.size(); ++i) {
            g[i] = std::copysign(std::pow(std::abs(r[i]), s.p - 1.0), r[i]) / scale;
            if (r[i] == 0.0) g[i] = 0.0;
          }
        } else if constexpr (std::is_same_v<T, SoftMaxLoss>) {
          const double top = max_of(r);
          double acc = 0.0;
          for (std::size_t i = 0; i < r.size(); ++i) {
            g[i] = std::exp(r[i] - top);
            acc += g[i];
          }
          for (auto& x : g) x /= acc;
        } else {
          if (s.matrix->size() != r.size()) throw Error(ErrorKind::Validation, "energy matrix size mismatch");
          const auto a = s.matrix->multiply(r);
          const auto b = s.matrix->multiply_transpose(r);
          for (std::size_t i = 0; i < r.size(); ++i) g[i] = a[i] + b[i];
        }
        return g;
      },
      spec);
}

}  // namespace rankaudit
