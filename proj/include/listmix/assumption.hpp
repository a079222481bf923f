#pragma once

#include <optional>
#include <string>
#include <vector>

#include "listmix/graph.hpp"

namespace listmix {

/// Unique root of x * exp(-1/x) = 1 (about 1.7632).
double alpha_star();

/// Smallest admissible beta, sqrt(2)/(sqrt(2)-1) = 2 + sqrt(2).
inline double beta_min() { return 2.0 + 1.4142135623730951; }

/// (1 - 1/beta) * alpha * exp(-(1 + 1/beta) / alpha); must exceed 1.
double contraction_product(double alpha, double beta);

/// Contraction rate eps with (1 - eps) * contraction_product = 1.
/// Throws std::domain_error unless contraction_product(alpha, beta) > 1.
double epsilon_of(double alpha, double beta);

enum class AssumptionFailure {
  kTriangle,
  kAlphaNotAboveThreshold,
  kBetaBelowMinimum,
  kProductNotAboveOne,
  kListTooSmall,
};

std::string to_string(AssumptionFailure f);

struct AssumptionReport {
  double alpha = 0.0;
  double beta = 0.0;
  bool satisfied = false;
  std::optional<double> epsilon;
  /// |L(v)| - (alpha * deg(v) + beta), one entry per vertex.
  std::vector<double> slack;
  std::vector<AssumptionFailure> failures;
  /// Vertices with negative slack.
  std::vector<Vertex> failing_vertices;

  bool has_failure(AssumptionFailure f) const;
  /// Line-oriented key=value summary.
  std::string summary() const;
};

AssumptionReport check_assumption(const GraphListPair& pair, double alpha, double beta);

}  // namespace listmix
