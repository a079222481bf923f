#include "listmix/recursion.hpp"

#include <algorithm>
#include <boost/container_hash/hash.hpp>
#include <cmath>
#include <random>
#include <unordered_map>

namespace listmix {

namespace {

std::vector<Vertex> resolve_order(const GraphListPair& pair, Vertex v, std::span<const Vertex> order) {
  const auto& nb = pair.neighbors(v);
  if (order.empty()) return nb;
  std::vector<Vertex> given(order.begin(), order.end());
  std::vector<Vertex> sorted = given;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != nb) throw std::invalid_argument("neighbor order is not a permutation of the neighbors");
  return given;
}

ReducedInstance reduce(const GraphListPair& pair, Vertex v, Color before, std::optional<Color> after, int i,
                       std::span<const Vertex> order) {
  if (!pair.contains(v)) throw std::out_of_range("vertex " + std::to_string(v) + " out of range");
  auto ranked = resolve_order(pair, v, order);
  const int m = static_cast<int>(ranked.size());
  if (i < 1 || i > m)
    throw std::out_of_range("neighbor rank " + std::to_string(i) + " outside 1.." + std::to_string(m));
  ReducedInstance out;
  out.removed = v;
  out.focus = ranked[static_cast<std::size_t>(i - 1)];
  out.position = i;
  auto lists = pair.lists();
  auto trim = [&](Vertex u, Color c) {
    auto& l = lists[static_cast<std::size_t>(u)];
    if (!l.contains(c)) return;
    if (l.size() == 1)
      throw UncolorableRegion("removing color " + std::to_string(c) + " empties the list of vertex " +
                              std::to_string(u));
    l.erase(c);
    out.removals.push_back({u, c});
  };
  for (int k = 1; k < i; ++k) trim(ranked[static_cast<std::size_t>(k - 1)], before);
  if (after)
    for (int k = i + 1; k <= m; ++k) trim(ranked[static_cast<std::size_t>(k - 1)], *after);
  out.pair = pair.detached(v).with_lists(std::move(lists));
  return out;
}

void require_color(const GraphListPair& pair, Vertex v, Color j) {
  if (!pair.list(v).contains(j))
    throw std::invalid_argument("color " + std::to_string(j) + " not in list of vertex " + std::to_string(v));
}

/// An assigned color that a reduction trimmed away leaves no valid coloring.
bool condition_fits(const GraphListPair& pair, const BoundaryCondition& condition) {
  for (auto [u, c] : condition.assignments())
    if (pair.contains(u) && !pair.list(u).contains(c)) return false;
  return true;
}

Rational oracle_probability(const GraphListPair& pair, const BoundaryCondition& condition, Vertex u, Color j) {
  if (!condition_fits(pair, condition)) throw UncolorableRegion("condition color trimmed from its list");
  if (auto c = condition.color(u)) return *c == j ? 1 : 0;
  return exact_marginals(pair, condition, u).probability(j);
}

/// The vertex can only take color j: assigned j, or free with list {j}.
bool forced_to(const GraphListPair& pair, const BoundaryCondition& condition, Vertex u, Color j) {
  if (auto c = condition.color(u)) return *c == j;
  return pair.list(u) == ColorSet{j};
}

}  // namespace

ReducedInstance reduce_pairwise(const GraphListPair& pair, Vertex v, Color j1, Color j2, int i,
                                std::span<const Vertex> order) {
  require_color(pair, v, j1);
  require_color(pair, v, j2);
  return reduce(pair, v, j1, j2, i, order);
}

ReducedInstance reduce_single(const GraphListPair& pair, Vertex v, Color j, int i, std::span<const Vertex> order) {
  require_color(pair, v, j);
  return reduce(pair, v, j, std::nullopt, i, order);
}

Rational ratio_exact_rational(const GraphListPair& pair, Vertex v, Color j1, Color j2,
                              const BoundaryCondition& condition, std::span<const Vertex> order) {
  require_color(pair, v, j1);
  require_color(pair, v, j2);
  if (condition.is_assigned(v)) throw std::invalid_argument("ratio requested at assigned vertex");
  auto ranked = resolve_order(pair, v, order);
  for (Vertex u : ranked)
    if (forced_to(pair, condition, u, j2))
      throw DegenerateInstance("neighbor " + std::to_string(u) + " is forced onto color " + std::to_string(j2));
  if (j1 == j2) return 1;
  for (Vertex u : ranked)
    if (forced_to(pair, condition, u, j1)) return 0;
  Rational ratio = 1;
  for (int i = 1; i <= static_cast<int>(ranked.size()); ++i) {
    auto sub = reduce_pairwise(pair, v, j1, j2, i, ranked);
    Rational num = 1 - oracle_probability(sub.pair, condition, sub.focus, j1);
    Rational den = 1 - oracle_probability(sub.pair, condition, sub.focus, j2);
    if (den == 0)
      throw DegenerateInstance("sub-marginal of color " + std::to_string(j2) + " equals 1 at neighbor " +
                               std::to_string(sub.focus));
    ratio *= num / den;
  }
  return ratio;
}

double ratio_exact(const GraphListPair& pair, Vertex v, Color j1, Color j2, const BoundaryCondition& condition,
                   std::span<const Vertex> order) {
  return to_double(ratio_exact_rational(pair, v, j1, j2, condition, order));
}

namespace {

class RecursiveEvaluator {
 public:
  RecursiveEvaluator(const BoundaryCondition& condition, const RecursionOptions& options)
      : condition_(condition), options_(options) {}

  MarginalVector evaluate(const GraphListPair& pair, std::uint64_t detached, Vertex v, int depth) {
    std::vector<std::uint64_t> key{static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(depth), detached};
    for (ColorSet l : pair.lists()) key.push_back(l.bits());
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    MarginalVector out = compute(pair, detached, v, depth);
    memo_.emplace(std::move(key), out);
    return out;
  }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint64_t>& k) const noexcept {
      return boost::hash_range(k.begin(), k.end());
    }
  };

  static MarginalVector uniform(const GraphListPair& pair, Vertex v) {
    MarginalVector out;
    out.vertex = v;
    out.colors = pair.list(v).colors();
    out.probabilities.assign(out.colors.size(), 1.0 / static_cast<double>(out.colors.size()));
    return out;
  }

  std::vector<Vertex> order_for(const GraphListPair& pair, Vertex v, int depth) const {
    std::vector<Vertex> order = pair.neighbors(v);
    if (options_.shuffle_seed) {
      std::seed_seq seq{static_cast<std::uint32_t>(*options_.shuffle_seed),
                        static_cast<std::uint32_t>(*options_.shuffle_seed >> 32), static_cast<std::uint32_t>(v),
                        static_cast<std::uint32_t>(depth)};
      std::mt19937_64 rng(seq);
      std::shuffle(order.begin(), order.end(), rng);
    }
    return order;
  }

  MarginalVector compute(const GraphListPair& pair, std::uint64_t detached, Vertex v, int depth) {
    if (auto c = condition_.color(v)) {
      if (!pair.list(v).contains(*c)) throw UncolorableRegion("assigned color trimmed from its list");
      MarginalVector out;
      out.vertex = v;
      out.colors = pair.list(v).colors();
      for (Color k : out.colors) out.probabilities.push_back(k == *c ? 1.0 : 0.0);
      return out;
    }
    if (depth <= 0) {
      if (options_.leaf == LeafRule::kUniform) return uniform(pair, v);
      if (!condition_fits(pair, condition_)) throw UncolorableRegion("condition color trimmed from its list");
      return exact_marginals(pair, condition_, v).to_vector();
    }
    auto order = order_for(pair, v, depth);
    if (order.empty()) return uniform(pair, v);

    MarginalVector out;
    out.vertex = v;
    out.colors = pair.list(v).colors();
    double total = 0.0;
    for (Color k : out.colors) {
      double weight = 1.0;
      for (int i = 1; i <= static_cast<int>(order.size()) && weight != 0.0; ++i) {
        auto sub = reduce(pair, v, k, std::nullopt, i, order);
        double t = evaluate(sub.pair, detached | (std::uint64_t{1} << v), sub.focus, depth - 1)(k);
        weight *= 1.0 - t;
      }
      out.probabilities.push_back(weight);
      total += weight;
    }
    if (!(total > 0.0)) throw UncolorableRegion("every color of vertex " + std::to_string(v) + " has weight 0");
    for (double& p : out.probabilities) p /= total;
    return out;
  }

  const BoundaryCondition& condition_;
  const RecursionOptions& options_;
  std::unordered_map<std::vector<std::uint64_t>, MarginalVector, KeyHash> memo_;
};

}  // namespace

MarginalVector recursive_marginal_vector(const GraphListPair& pair, const BoundaryCondition& condition, Vertex v,
                                         const RecursionOptions& options) {
  if (!pair.contains(v)) throw std::out_of_range("vertex " + std::to_string(v) + " out of range");
  if (pair.size() > 64) throw std::invalid_argument("recursion supports at most 64 vertices");
  condition.validate(pair);
  RecursiveEvaluator evaluator(condition, options);
  return evaluator.evaluate(pair, 0, v, options.depth);
}

double marginal_recursive(const GraphListPair& pair, Vertex v, Color j, const BoundaryCondition& condition,
                          const RecursionOptions& options) {
  require_color(pair, v, j);
  return recursive_marginal_vector(pair, condition, v, options)(j);
}

double marginal_recursive(const GraphListPair& pair, Vertex v, Color j, const BoundaryCondition& condition,
                          int depth) {
  RecursionOptions options;
  options.depth = depth;
  return marginal_recursive(pair, v, j, condition, options);
}

ErrorValue error_functional(const MarginalVector& x, const MarginalVector& y) {
  if (x.colors != y.colors || x.probabilities.size() != x.colors.size() ||
      y.probabilities.size() != y.colors.size())
    throw std::invalid_argument("error functional needs vectors over the same colors");
  if (x.colors.empty()) throw std::invalid_argument("error functional of empty vectors");
  ErrorValue e;
  for (std::size_t k = 0; k < x.colors.size(); ++k) {
    double a = x.probabilities[k];
    double b = y.probabilities[k];
    if (!(a > 0.0) || !(b > 0.0))
      throw std::domain_error("error functional needs strictly positive entries (color " +
                              std::to_string(x.colors[k]) + ")");
    double r = std::log(a) - std::log(b);
    if (k == 0 || r > e.max_log_ratio) {
      e.max_log_ratio = r;
      e.argmax = x.colors[k];
    }
    if (k == 0 || r < e.min_log_ratio) {
      e.min_log_ratio = r;
      e.argmin = x.colors[k];
    }
  }
  e.value = e.max_log_ratio - e.min_log_ratio;
  return e;
}

ApproxCount approx_count(const GraphListPair& pair, int depth) {
  ApproxCount out;
  BoundaryCondition fixed;
  RecursionOptions options;
  options.depth = depth;
  for (Vertex v = 0; v < pair.size(); ++v) {
    MarginalVector p;
    try {
      p = recursive_marginal_vector(pair, fixed, v, options);
    } catch (const UncolorableRegion& e) {
      throw ApproxCountFailure(std::string("step at vertex ") + std::to_string(v) + ": " + e.what(), out.trace);
    }
    auto best = std::max_element(p.probabilities.begin(), p.probabilities.end());
    CountStep step{v, p.colors[static_cast<std::size_t>(best - p.probabilities.begin())], *best};
    if (!(step.probability > 0.0))
      throw ApproxCountFailure("nonpositive marginal at vertex " + std::to_string(v), out.trace);
    out.trace.push_back(step);
    out.log_estimate -= std::log(step.probability);
    fixed.assign(v, step.color);
  }
  out.estimate = std::exp(out.log_estimate);
  return out;
}

}  // namespace listmix
