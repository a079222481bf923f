#include "listmix/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace listmix {

Family parse_family(const std::string& name) {
  if (name == "path") return Family::kPath;
  if (name == "cycle" || name == "cycle-even") return Family::kCycle;
  if (name == "complete-bipartite") return Family::kCompleteBipartite;
  if (name == "random-tree") return Family::kRandomTree;
  if (name == "grid") return Family::kGrid;
  if (name == "random-triangle-free") return Family::kRandomTriangleFree;
  throw ConfigError("unknown family '" + name + "'");
}

std::string to_string(Family f) {
  switch (f) {
    case Family::kPath: return "path";
    case Family::kCycle: return "cycle";
    case Family::kCompleteBipartite: return "complete-bipartite";
    case Family::kRandomTree: return "random-tree";
    case Family::kGrid: return "grid";
    case Family::kRandomTriangleFree: return "random-triangle-free";
  }
  return "unknown";
}

namespace {

using Edges = std::vector<std::pair<Vertex, Vertex>>;

Edges random_tree(int n, std::mt19937_64& rng) {
  Edges edges;
  if (n < 2) return edges;
  if (n == 2) return {{0, 1}};
  // Decode a uniform Pruefer sequence.
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<int> code(static_cast<std::size_t>(n - 2));
  for (int& c : code) c = pick(rng);
  std::vector<int> degree(static_cast<std::size_t>(n), 1);
  for (int c : code) ++degree[static_cast<std::size_t>(c)];
  for (int c : code) {
    int leaf = 0;
    while (degree[static_cast<std::size_t>(leaf)] != 1) ++leaf;
    edges.emplace_back(std::min(leaf, c), std::max(leaf, c));
    --degree[static_cast<std::size_t>(leaf)];
    --degree[static_cast<std::size_t>(c)];
  }
  int u = -1;
  for (int v = 0; v < n; ++v) {
    if (degree[static_cast<std::size_t>(v)] != 1) continue;
    if (u < 0) u = v;
    else edges.emplace_back(u, v);
  }
  return edges;
}

Edges random_triangle_free(int n, double p, std::mt19937_64& rng) {
  Edges proposals;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) proposals.emplace_back(u, v);
  std::shuffle(proposals.begin(), proposals.end(), rng);
  std::bernoulli_distribution propose(p);
  std::vector<std::vector<char>> adj(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  Edges edges;
  for (auto [u, v] : proposals) {
    if (!propose(rng)) continue;
    bool closes_triangle = false;
    for (int w = 0; w < n && !closes_triangle; ++w)
      closes_triangle = adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(w)] &&
                        adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)];
    if (closes_triangle) continue;
    adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = 1;
    adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = 1;
    edges.emplace_back(u, v);
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

std::pair<int, Edges> structure(const GeneratorSpec& spec, std::mt19937_64& rng) {
  const int n = spec.n;
  const int m = spec.m;
  Edges edges;
  switch (spec.family) {
    case Family::kPath:
      if (n < 1) throw ConfigError("path needs at least one vertex");
      for (int v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
      return {n, edges};
    case Family::kCycle:
      if (n < 4) throw ConfigError("cycle needs at least 4 vertices to stay triangle-free");
      for (int v = 0; v < n; ++v) edges.emplace_back(std::min(v, (v + 1) % n), std::max(v, (v + 1) % n));
      return {n, edges};
    case Family::kCompleteBipartite:
      if (n < 1 || m < 1) throw ConfigError("complete-bipartite needs two nonempty sides");
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < m; ++b) edges.emplace_back(a, n + b);
      return {n + m, edges};
    case Family::kRandomTree:
      if (n < 1) throw ConfigError("random-tree needs at least one vertex");
      return {n, random_tree(n, rng)};
    case Family::kGrid:
      if (n < 1 || m < 1) throw ConfigError("grid needs positive dimensions");
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < m; ++c) {
          if (c + 1 < m) edges.emplace_back(r * m + c, r * m + c + 1);
          if (r + 1 < n) edges.emplace_back(r * m + c, (r + 1) * m + c);
        }
      return {n * m, edges};
    case Family::kRandomTriangleFree:
      if (n < 1) throw ConfigError("random-triangle-free needs at least one vertex");
      if (spec.edge_probability < 0.0 || spec.edge_probability > 1.0)
        throw ConfigError("edge probability must lie in [0, 1]");
      return {n, random_triangle_free(n, spec.edge_probability, rng)};
  }
  throw ConfigError("unknown family");
}

}  // namespace

GraphListPair generate(const GeneratorSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  auto [n, edges] = structure(spec, rng);
  const ListPolicy& policy = spec.lists;
  if (policy.q < 1 || policy.q > kMaxColor) throw ConfigError("palette size must lie in 1..64");
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  for (auto [u, v] : edges) {
    ++degree[static_cast<std::size_t>(u)];
    ++degree[static_cast<std::size_t>(v)];
  }
  std::vector<Color> palette(static_cast<std::size_t>(policy.q));
  std::iota(palette.begin(), palette.end(), 1);
  std::vector<ColorSet> lists;
  lists.reserve(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    int size = policy.size;
    if (policy.kind == ListPolicy::Kind::kAssumption)
      size = static_cast<int>(std::ceil(policy.alpha * degree[static_cast<std::size_t>(v)] + policy.beta));
    if (size < 1) throw ConfigError("list size must be positive");
    if (size > policy.q)
      throw ConfigError("vertex " + std::to_string(v) + " needs " + std::to_string(size) +
                        " colors but the palette has " + std::to_string(policy.q));
    std::vector<Color> chosen;
    std::sample(palette.begin(), palette.end(), std::back_inserter(chosen), size, rng);
    ColorSet l;
    for (Color c : chosen) l.insert(c);
    lists.push_back(l);
  }
  return GraphListPair(n, edges, std::move(lists));
}

}  // namespace listmix
