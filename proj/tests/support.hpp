#pragma once

// Independent reference implementations and random instance builders shared
// by the unit tests and the acceptance binary. Nothing here calls the
// library's counter or recursion.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "listmix/graph.hpp"
#include "listmix/oracle.hpp"

namespace listmix::testing {

#ifndef LISTMIX_FIXTURE_DIR
#define LISTMIX_FIXTURE_DIR "tests/fixtures"
#endif

inline std::string fixture(const std::string& name) { return std::string(LISTMIX_FIXTURE_DIR) + "/" + name; }

using Edges = std::vector<std::pair<Vertex, Vertex>>;

/// Visits every proper list coloring consistent with the condition.
inline void enumerate_colorings(const GraphListPair& pair, const BoundaryCondition& cond,
                                const std::function<void(const std::vector<Color>&)>& visit) {
  const int n = pair.size();
  std::vector<Color> col(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<Color>> options(static_cast<std::size_t>(n));
  for (Vertex v = 0; v < n; ++v) {
    if (auto c = cond.color(v)) options[static_cast<std::size_t>(v)] = {*c};
    else options[static_cast<std::size_t>(v)] = pair.list(v).colors();
  }
  std::function<void(int)> rec = [&](int v) {
    if (v == n) {
      visit(col);
      return;
    }
    for (Color c : options[static_cast<std::size_t>(v)]) {
      bool ok = true;
      for (Vertex u : pair.neighbors(v))
        if (u < v && col[static_cast<std::size_t>(u)] == c) ok = false;
      if (!ok) continue;
      col[static_cast<std::size_t>(v)] = c;
      rec(v + 1);
    }
    col[static_cast<std::size_t>(v)] = 0;
  };
  rec(0);
}

inline BigInt brute_count(const GraphListPair& pair, const BoundaryCondition& cond = {}) {
  BigInt total = 0;
  enumerate_colorings(pair, cond, [&](const std::vector<Color>&) { ++total; });
  return total;
}

/// Color -> number of colorings with that color at v.
inline std::map<Color, BigInt> brute_counts_at(const GraphListPair& pair, const BoundaryCondition& cond, Vertex v) {
  std::map<Color, BigInt> out;
  for (Color c : pair.list(v).colors()) out[c] = 0;
  enumerate_colorings(pair, cond, [&](const std::vector<Color>& col) { ++out[col[static_cast<std::size_t>(v)]]; });
  return out;
}

inline Rational brute_marginal(const GraphListPair& pair, const BoundaryCondition& cond, Vertex v, Color j) {
  auto counts = brute_counts_at(pair, cond, v);
  BigInt total = 0;
  for (auto& [c, k] : counts) total += k;
  if (total == 0) throw UncolorableRegion("brute force: no coloring");
  auto it = counts.find(j);
  return it == counts.end() ? Rational(0) : Rational(it->second, total);
}

inline std::vector<int> degrees(int n, const Edges& edges) {
  std::vector<int> d(static_cast<std::size_t>(n), 0);
  for (auto [u, v] : edges) {
    ++d[static_cast<std::size_t>(u)];
    ++d[static_cast<std::size_t>(v)];
  }
  return d;
}

/// Smallest edge bitmask over all relabelings; pair (u,v) with u<v maps to
/// bit index u*n+v.
inline std::uint64_t canonical_form(int n, const Edges& edges) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::uint64_t best = ~std::uint64_t{0};
  do {
    std::uint64_t code = 0;
    for (auto [u, v] : edges) {
      int a = perm[static_cast<std::size_t>(u)];
      int b = perm[static_cast<std::size_t>(v)];
      if (a > b) std::swap(a, b);
      code |= std::uint64_t{1} << (a * n + b);
    }
    best = std::min(best, code);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// All connected triangle-free graphs on 1..max_n vertices up to isomorphism.
/// Every connected graph on n vertices arises from one on n-1 vertices by
/// adding a vertex joined to a nonempty independent set.
inline std::vector<std::pair<int, Edges>> connected_triangle_free_graphs(int max_n) {
  std::vector<std::pair<int, Edges>> all{{1, {}}};
  std::vector<Edges> level{{}};
  for (int n = 2; n <= max_n; ++n) {
    std::set<std::uint64_t> seen;
    std::vector<Edges> next;
    const int old = n - 1;
    for (const Edges& g : level) {
      std::vector<std::uint64_t> adj(static_cast<std::size_t>(old), 0);
      for (auto [u, v] : g) {
        adj[static_cast<std::size_t>(u)] |= std::uint64_t{1} << v;
        adj[static_cast<std::size_t>(v)] |= std::uint64_t{1} << u;
      }
      for (std::uint64_t s = 1; s < (std::uint64_t{1} << old); ++s) {
        bool independent = true;
        for (int u = 0; u < old && independent; ++u)
          if ((s >> u & 1) && (adj[static_cast<std::size_t>(u)] & s)) independent = false;
        if (!independent) continue;
        Edges h = g;
        for (int u = 0; u < old; ++u)
          if (s >> u & 1) h.emplace_back(u, old);
        if (seen.insert(canonical_form(n, h)).second) next.push_back(h);
      }
    }
    for (const Edges& h : next) all.emplace_back(n, h);
    level = std::move(next);
  }
  return all;
}

/// Lists of size deg(v) + extra(v) drawn from {1..palette}.
inline std::vector<ColorSet> random_lists(const std::vector<int>& deg, int min_extra, int max_extra, int palette,
                                          std::mt19937_64& rng) {
  std::vector<Color> all(static_cast<std::size_t>(palette));
  std::iota(all.begin(), all.end(), 1);
  std::uniform_int_distribution<int> extra(min_extra, max_extra);
  std::vector<ColorSet> lists;
  for (int d : deg) {
    int size = std::min(palette, d + extra(rng));
    std::vector<Color> pick;
    std::sample(all.begin(), all.end(), std::back_inserter(pick), size, rng);
    ColorSet l;
    for (Color c : pick) l.insert(c);
    lists.push_back(l);
  }
  return lists;
}

inline Color random_color(ColorSet s, std::mt19937_64& rng) {
  auto cs = s.colors();
  std::uniform_int_distribution<std::size_t> pick(0, cs.size() - 1);
  return cs[pick(rng)];
}

/// Assigns each listed vertex a uniform color from its list with probability
/// p; retries until the result has a proper extension.
inline BoundaryCondition random_condition(const GraphListPair& pair, const std::vector<Vertex>& candidates, double p,
                                          std::mt19937_64& rng, int attempts = 200) {
  std::bernoulli_distribution take(p);
  for (int a = 0; a < attempts; ++a) {
    BoundaryCondition c;
    for (Vertex v : candidates)
      if (take(rng)) c.assign(v, random_color(pair.list(v), rng));
    if (brute_count(pair, c) > 0) return c;
  }
  return {};
}

inline std::vector<Vertex> all_vertices(const GraphListPair& pair) {
  std::vector<Vertex> vs(static_cast<std::size_t>(pair.size()));
  std::iota(vs.begin(), vs.end(), 0);
  return vs;
}

}  // namespace listmix::testing
