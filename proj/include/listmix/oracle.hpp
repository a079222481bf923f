#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "listmix/graph.hpp"

namespace listmix {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// The conditioning admits no proper list coloring.
class UncolorableRegion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Partial coloring: vertices absent from the map are free.
class BoundaryCondition {
 public:
  BoundaryCondition() = default;
  BoundaryCondition(std::initializer_list<std::pair<const Vertex, Color>> init) : assigned_(init) {}

  std::optional<Color> color(Vertex v) const;
  bool is_assigned(Vertex v) const { return assigned_.count(v) != 0; }
  std::size_t size() const { return assigned_.size(); }
  bool empty() const { return assigned_.empty(); }
  const std::map<Vertex, Color>& assignments() const { return assigned_; }

  BoundaryCondition with(Vertex v, Color c) const;
  BoundaryCondition without(Vertex v) const;
  void assign(Vertex v, Color c) { assigned_[v] = c; }
  void clear(Vertex v) { assigned_.erase(v); }

  /// Throws std::invalid_argument if an id is out of range or a color is
  /// outside the vertex's list.
  void validate(const GraphListPair& pair) const;

  friend bool operator==(const BoundaryCondition&, const BoundaryCondition&) = default;

 private:
  std::map<Vertex, Color> assigned_;
};

/// "v=c,v=c" (empty string for no assignments).
std::string to_string(const BoundaryCondition& c);
BoundaryCondition parse_condition(const std::string& text);

/// Per-color conditional probabilities at one vertex, colors ascending.
struct MarginalVector {
  Vertex vertex = -1;
  std::vector<Color> colors;
  std::vector<double> probabilities;

  std::size_t size() const { return colors.size(); }
  /// Probability of color j, 0 when j is not listed.
  double operator()(Color j) const;
  double sum() const;
};

/// Exact colorings counts at a vertex: counts[k] colorings with c(v) = colors[k].
struct ExactMarginals {
  Vertex vertex = -1;
  std::vector<Color> colors;
  std::vector<BigInt> counts;
  BigInt total;

  BigInt count(Color j) const;
  Rational probability(Color j) const;
  MarginalVector to_vector() const;
};

/// Counts proper list colorings of the free vertices of one graph.
///
/// Branches on the free vertex with the fewest remaining colors, splits the
/// free subgraph into connected components, and memoizes component counts
/// by (component, residual lists). The memo depends only on the graph, so a
/// counter can be reused across many conditions. Supports up to 64 vertices.
class ColoringCounter {
 public:
  explicit ColoringCounter(const GraphListPair& pair);

  const GraphListPair& pair() const { return pair_; }
  BigInt count(const BoundaryCondition& condition);
  std::size_t memo_size() const { return memo_.size(); }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint64_t>& key) const noexcept;
  };

  BigInt count_free(std::uint64_t free_mask);
  BigInt count_component(std::uint64_t component);

  GraphListPair pair_;
  std::vector<std::uint64_t> neighbor_mask_;
  std::vector<std::uint64_t> residual_;  // residual color mask per vertex
  std::unordered_map<std::vector<std::uint64_t>, BigInt, KeyHash> memo_;
};

BigInt count_colorings(const GraphListPair& pair, const BoundaryCondition& condition = {});

/// Exact counts for every color of L(v). v must be free under the condition.
/// Throws UncolorableRegion when the condition has no extension.
ExactMarginals exact_marginals(ColoringCounter& counter, const BoundaryCondition& condition, Vertex v);
ExactMarginals exact_marginals(const GraphListPair& pair, const BoundaryCondition& condition, Vertex v);

/// P(c(v) = j | condition); 0 when j is not in L(v).
double marginal(const GraphListPair& pair, const BoundaryCondition& condition, Vertex v, Color j);
Rational marginal_exact(const GraphListPair& pair, const BoundaryCondition& condition, Vertex v, Color j);
MarginalVector marginal_vector(const GraphListPair& pair, const BoundaryCondition& condition, Vertex v);

/// Joint counts over the colorings of a vertex subset, in lexicographic order
/// of the joint color tuple (vertices ascending). Tuples with zero count are
/// kept so tables from different conditions align entry by entry.
struct JointCounts {
  std::vector<Vertex> vertices;
  std::vector<std::vector<Color>> tuples;
  std::vector<BigInt> counts;
  BigInt total;
};

JointCounts joint_counts(ColoringCounter& counter, const BoundaryCondition& condition,
                         std::span<const Vertex> lambda);

/// Sum over joint colorings sigma of lambda of |P(sigma | c1) - P(sigma | c2)|.
Rational tv_distance_exact(const GraphListPair& pair, const Region& psi, const BoundaryCondition& c1,
                           const BoundaryCondition& c2, std::span<const Vertex> lambda);
double tv_distance_restricted(const GraphListPair& pair, const Region& psi, const BoundaryCondition& c1,
                              const BoundaryCondition& c2, std::span<const Vertex> lambda);

double to_double(const Rational& r);

}  // namespace listmix
