#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "listmix/graph.hpp"
#include "listmix/oracle.hpp"

namespace listmix {

/// A neighbor of the eliminated vertex is forced onto the denominator color,
/// so a ratio of marginals has a zero denominator.
class DegenerateInstance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ListRemoval {
  Vertex vertex = -1;
  Color color = 0;
  friend bool operator==(const ListRemoval&, const ListRemoval&) = default;
};

/// The graph with one vertex detached and some neighbor lists trimmed.
struct ReducedInstance {
  GraphListPair pair;
  Vertex removed = -1;
  /// The neighbor whose marginal the recursion asks for (v_i).
  Vertex focus = -1;
  /// 1-based rank of focus in the neighbor order.
  int position = 0;
  std::vector<ListRemoval> removals;
};

/// Detach v; remove j1 from the lists of neighbors ranked before i and j2
/// from those ranked after i (ranks are 1-based). An empty order means
/// ascending neighbor ids. Throws std::out_of_range for a bad rank,
/// std::invalid_argument for colors outside L(v), and UncolorableRegion if a
/// removal would leave a list empty.
ReducedInstance reduce_pairwise(const GraphListPair& pair, Vertex v, Color j1, Color j2, int i,
                                std::span<const Vertex> order = {});

/// Detach v and remove j from the lists of neighbors ranked before i.
ReducedInstance reduce_single(const GraphListPair& pair, Vertex v, Color j, int i,
                              std::span<const Vertex> order = {});

/// P(c(v)=j1) / P(c(v)=j2) through the telescoping product over the
/// neighbors, each factor evaluated exactly by the oracle on its reduced
/// instance. Returns 0 when a neighbor is forced onto j1; throws
/// DegenerateInstance when a neighbor is forced onto j2.
Rational ratio_exact_rational(const GraphListPair& pair, Vertex v, Color j1, Color j2,
                              const BoundaryCondition& condition, std::span<const Vertex> order = {});
double ratio_exact(const GraphListPair& pair, Vertex v, Color j1, Color j2, const BoundaryCondition& condition,
                   std::span<const Vertex> order = {});

/// What a free vertex returns once the depth budget runs out.
enum class LeafRule {
  kUniform,  ///< 1/|L(v)| over the current list
  kOracle,   ///< exact conditional marginal from the enumeration oracle
};

struct RecursionOptions {
  int depth = 0;
  LeafRule leaf = LeafRule::kUniform;
  /// When set, every node visits its neighbors in a seeded shuffled order
  /// instead of ascending ids.
  std::optional<std::uint64_t> shuffle_seed;
};

/// Marginal vector at v from the normalized product recursion, truncated at
/// options.depth. Assigned vertices return their indicator at any depth.
MarginalVector recursive_marginal_vector(const GraphListPair& pair, const BoundaryCondition& condition, Vertex v,
                                         const RecursionOptions& options);

double marginal_recursive(const GraphListPair& pair, Vertex v, Color j, const BoundaryCondition& condition,
                          int depth);
double marginal_recursive(const GraphListPair& pair, Vertex v, Color j, const BoundaryCondition& condition,
                          const RecursionOptions& options);

struct ErrorValue {
  double value = 0.0;
  Color argmax = 0;  ///< j1
  Color argmin = 0;  ///< j2
  double max_log_ratio = 0.0;
  double min_log_ratio = 0.0;
};

/// max_j log(x_j/y_j) - min_j log(x_j/y_j) over the shared support.
/// Throws std::invalid_argument on mismatched supports and std::domain_error
/// on a nonpositive entry.
ErrorValue error_functional(const MarginalVector& x, const MarginalVector& y);

struct CountStep {
  Vertex vertex = -1;
  Color color = 0;
  double probability = 0.0;
};

struct ApproxCount {
  double estimate = 0.0;
  double log_estimate = 0.0;
  std::vector<CountStep> trace;
};

/// Self-reducibility failed at some step; carries the steps taken so far.
class ApproxCountFailure : public std::runtime_error {
 public:
  ApproxCountFailure(const std::string& what, std::vector<CountStep> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<CountStep>& trace() const { return trace_; }

 private:
  std::vector<CountStep> trace_;
};

/// Product of inverse recursive marginals along ascending vertex order,
/// fixing each vertex to its most likely color.
ApproxCount approx_count(const GraphListPair& pair, int depth);

}  // namespace listmix
