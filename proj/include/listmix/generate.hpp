#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "listmix/graph.hpp"

namespace listmix {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Family { kPath, kCycle, kCompleteBipartite, kRandomTree, kGrid, kRandomTriangleFree };

Family parse_family(const std::string& name);
std::string to_string(Family f);

struct ListPolicy {
  enum class Kind {
    kUniform,     ///< every list has `size` colors
    kAssumption,  ///< |L(v)| = ceil(alpha * deg(v) + beta)
  };
  Kind kind = Kind::kUniform;
  int size = 3;
  Color q = 3;
  double alpha = 2.0;
  double beta = 10.0;

  static ListPolicy uniform(int size, Color q) { return {Kind::kUniform, size, q, 0.0, 0.0}; }
  static ListPolicy assumption(double alpha, double beta, Color q) { return {Kind::kAssumption, 0, q, alpha, beta}; }
};

/// Family sizes: path/cycle/random-tree/random-triangle-free use n as the
/// vertex count; complete-bipartite is K_{n,m}; grid is n rows by m columns.
struct GeneratorSpec {
  Family family = Family::kPath;
  int n = 1;
  int m = 1;
  /// random-triangle-free: probability of proposing each vertex pair.
  double edge_probability = 0.3;
  ListPolicy lists;
  std::uint64_t seed = 0;
};

/// Deterministic in (spec, seed). Lists are drawn without replacement from
/// {1..q}. Throws ConfigError on invalid sizes or an infeasible list policy.
GraphListPair generate(const GeneratorSpec& spec);

}  // namespace listmix
