#include <algorithm>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

#include "rankaudit/baselines.hpp"
#include "rankaudit/error.hpp"

namespace rankaudit {

unsigned worker_threads() {
  if (const char* env = std::getenv("RANKAUDIT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > kMax) return kMax;
  }
  return static_cast<std::uint64_t>(acc);
}

namespace {

/// Mutable copy of the in-form weights that can drop arcs and re-normalize
/// the touched columns exactly as Graph::build would, then restore them.
class MaskedMatrix {
 public:
  explicit MaskedMatrix(const Graph& g) : g_(g) {
    const auto in = g.in_view();
    weights_.assign(in.weights.begin(), in.weights.end());
    removed_.assign(weights_.size(), 0);
    // Position of every out-form arc inside the in-form arrays.
    const auto out = g.out_view();
    out_to_in_.resize(weights_.size());
    std::vector<std::size_t> cursor(in.offsets.begin(), in.offsets.end() - 1);
    for (NodeId s = 0; s < g.node_count(); ++s) {
      for (auto e = out.begin(s); e < out.end(s); ++e) out_to_in_[e] = cursor[out.neighbors[e]]++;
    }
    touched_flag_.assign(g.node_count(), 0);
  }

  CsrView view() const {
    const auto in = g_.in_view();
    return {in.offsets, in.neighbors, weights_};
  }

  /// Removes the out-form arc `e` of source `s`.
  void drop(NodeId s, std::size_t out_pos) {
    const auto pos = out_to_in_[out_pos];
    if (removed_[pos]) return;
    removed_[pos] = 1;
    dropped_.push_back(pos);
    if (!touched_flag_[s]) {
      touched_flag_[s] = 1;
      touched_.push_back(s);
    }
  }

  void renormalize() {
    const auto out = g_.out_view();
    const auto raw = g_.out_raw_weights();
    const bool stochastic = g_.norm_mode() == NormMode::ColumnStochastic;
    for (auto s : touched_) {
      double sum = 0.0;
      for (auto e = out.begin(s); e < out.end(s); ++e) {
        if (!removed_[out_to_in_[e]]) sum += raw[e];
      }
      for (auto e = out.begin(s); e < out.end(s); ++e) {
        const auto pos = out_to_in_[e];
        if (removed_[pos]) {
          weights_[pos] = 0.0;
        } else if (stochastic) {
          weights_[pos] = sum > 0.0 ? raw[e] / sum : 0.0;
        }
      }
    }
  }

  void restore() {
    const auto out = g_.out_view();
    const auto in = g_.in_view();
    for (auto s : touched_) {
      for (auto e = out.begin(s); e < out.end(s); ++e) weights_[out_to_in_[e]] = in.weights[out_to_in_[e]];
      touched_flag_[s] = 0;
    }
    for (auto pos : dropped_) removed_[pos] = 0;
    touched_.clear();
    dropped_.clear();
  }

 private:
  const Graph& g_;
  std::vector<double> weights_;
  std::vector<char> removed_;
  std::vector<std::size_t> out_to_in_;
  std::vector<char> touched_flag_;
  std::vector<NodeId> touched_;
  std::vector<std::size_t> dropped_;
};

std::size_t out_position(const Graph& g, NodeId s, NodeId d) {
  const auto out = g.out_view();
  for (auto e = out.begin(s); e < out.end(s); ++e) {
    if (out.neighbors[e] == d) return e;
  }
  throw Error(ErrorKind::NotFound, "arc missing");
}

/// First combination of rank `rank` in lexicographic order (combinatorial
/// number system).
std::vector<std::size_t> unrank(std::uint64_t rank, std::size_t n, std::size_t k) {
  std::vector<std::size_t> comb;
  std::size_t next = 0;
  for (std::size_t slot = 0; slot < k; ++slot) {
    for (std::size_t v = next;; ++v) {
      const auto block = binomial(n - v - 1, k - slot - 1);
      if (rank < block) {
        comb.push_back(v);
        next = v + 1;
        break;
      }
      rank -= block;
    }
  }
  return comb;
}

bool next_combination(std::vector<std::size_t>& comb, std::size_t n) {
  const std::size_t k = comb.size();
  for (std::size_t i = k; i-- > 0;) {
    if (comb[i] < n - k + i) {
      ++comb[i];
      for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

struct ChunkBest {
  double delta_f = -1.0;
  std::vector<std::size_t> comb;
  std::uint64_t evaluated = 0;
};

}  // namespace

BruteForceResult brute_force(const Graph& g, std::size_t k, ElementKind kind, const AuditConfig& cfg,
                             std::uint64_t limit) {
  if (k < 1) throw Error(ErrorKind::Argument, "budget k must be at least 1");
  const std::vector<Edge> edges = kind == ElementKind::Edges ? g.edges() : std::vector<Edge>{};
  const std::size_t population = kind == ElementKind::Edges ? edges.size() : g.node_count();
  if (k > population) {
    throw Error(ErrorKind::Argument, "budget " + std::to_string(k) + " exceeds population " +
                                         std::to_string(population));
  }
  const auto total = binomial(population, k);
  if (total > limit) {
    throw Error(ErrorKind::ResourceLimit, "brute force needs " + std::to_string(total) +
                                              " evaluations, over the limit of " + std::to_string(limit));
  }

  const double c = resolve_damping(g, cfg);
  const auto teleport = materialize(cfg.teleport, g.node_count());
  const double f0 = audited_loss(cfg, pagerank(g.in_view(), teleport, c, cfg.solver).values);

  // Arcs removed by each element for the edge and node kinds.
  std::vector<std::vector<std::pair<NodeId, std::size_t>>> element_arcs;
  if (kind == ElementKind::Edges) {
    for (const auto& e : edges) {
      std::vector<std::pair<NodeId, std::size_t>> arcs{{e.src, out_position(g, e.src, e.dst)}};
      if (!g.directed() && e.src != e.dst) arcs.emplace_back(e.dst, out_position(g, e.dst, e.src));
      element_arcs.push_back(std::move(arcs));
    }
  } else if (kind == ElementKind::Nodes) {
    const auto in = g.in_view();
    const auto out = g.out_view();
    for (NodeId v = 0; v < g.node_count(); ++v) {
      std::vector<std::pair<NodeId, std::size_t>> arcs;
      for (auto e = out.begin(v); e < out.end(v); ++e) arcs.emplace_back(v, e);
      for (auto e = in.begin(v); e < in.end(v); ++e) {
        const NodeId s = in.neighbors[e];
        if (s != v) arcs.emplace_back(s, out_position(g, s, v));
      }
      element_arcs.push_back(std::move(arcs));
    }
  }

  const auto run_chunk = [&](std::uint64_t first, std::uint64_t count) {
    ChunkBest best;
    if (count == 0) return best;
    MaskedMatrix mask(g);
    std::vector<char> member(g.node_count(), 0);
    const auto out = g.out_view();
    auto comb = unrank(first, population, k);
    for (std::uint64_t step = 0; step < count; ++step) {
      if (kind == ElementKind::Subgraph) {
        for (auto v : comb) member[v] = 1;
        for (auto v : comb) {
          for (auto e = out.begin(v); e < out.end(v); ++e) {
            if (member[out.neighbors[e]]) mask.drop(static_cast<NodeId>(v), e);
          }
        }
        for (auto v : comb) member[v] = 0;
      } else {
        for (auto idx : comb) {
          for (const auto& [s, e] : element_arcs[idx]) mask.drop(s, e);
        }
      }
      mask.renormalize();
      const auto r = pagerank(mask.view(), teleport, c, cfg.solver);
      mask.restore();
      const double diff = f0 - audited_loss(cfg, r.values);
      const double delta = diff * diff;
      ++best.evaluated;
      if (delta > best.delta_f) {
        best.delta_f = delta;
        best.comb = comb;
      }
      if (step + 1 < count) next_combination(comb, population);
    }
    return best;
  };

  const auto threads = static_cast<std::uint64_t>(std::min<std::uint64_t>(worker_threads(), total));
  std::vector<ChunkBest> results(threads);
  if (threads <= 1) {
    results[0] = run_chunk(0, total);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::uint64_t per = total / threads;
    const std::uint64_t extra = total % threads;
    std::uint64_t start = 0;
    for (std::uint64_t t = 0; t < threads; ++t) {
      const std::uint64_t count = per + (t < extra ? 1 : 0);
      pool.emplace_back([&, t, start, count] {
        try {
          results[t] = run_chunk(start, count);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
      start += count;
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  // Chunks are in rank order, so strict improvement keeps the first optimum.
  BruteForceResult result;
  result.best.kind = kind;
  const ChunkBest* winner = nullptr;
  for (const auto& r : results) {
    result.evaluated += r.evaluated;
    if (!r.comb.empty() && (!winner || r.delta_f > winner->delta_f)) winner = &r;
  }
  if (winner) {
    result.delta_f = winner->delta_f;
    for (auto idx : winner->comb) {
      if (kind == ElementKind::Edges) {
        result.best.edges.push_back(edges[idx]);
      } else {
        result.best.nodes.push_back(static_cast<NodeId>(idx));
      }
    }
  }
  return result;
}

}  // namespace rankaudit
