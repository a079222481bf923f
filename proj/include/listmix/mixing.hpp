#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "listmix/graph.hpp"
#include "listmix/oracle.hpp"

namespace listmix {

/// Every verifier accepts an inequality that is off by at most this much.
inline constexpr double kSlackTolerance = 1e-9;
/// Observed deviations at or below this are treated as numerical zero in fits.
inline constexpr double kFitFloor = 1e-14;

// Marginal bounds at a vertex ------------------------------------------------

struct BoundsReport {
  Vertex vertex = -1;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t conditions = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  /// Smallest (bound - p) for the two upper bounds and (p - bound) for the
  /// lower bound; +inf when a bound was never applicable.
  double worst_easy_slack = std::numeric_limits<double>::infinity();
  double worst_upper_slack = std::numeric_limits<double>::infinity();
  double worst_lower_slack = std::numeric_limits<double>::infinity();
  double easy_bound = 0.0;
  double lower_bound = 0.0;

  bool passed() const { return violations == 0; }
  std::string summary() const;
};

/// Checks P(c(v)=j) <= 1/beta, <= (m alpha exp(-(1+1/beta)/alpha))^-1 and
/// >= q^-1 (1-1/beta)^Delta under every condition. Assigned vertices are
/// stripped first: m counts free neighbors and colors taken by assigned
/// neighbors (probability 0) are skipped. Throws std::domain_error if the
/// pair does not satisfy the list-size assumption for (alpha, beta).
BoundsReport bounds_check(const GraphListPair& pair, Vertex v, std::span<const BoundaryCondition> conditions,
                          double alpha, double beta);

// One contraction step -------------------------------------------------------

struct NeighborTerm {
  Vertex vertex = -1;
  /// Neighbors of v_i in G_v that are not pinned to the same color by both
  /// conditions.
  int effective_degree = 0;
  /// E(x_i, y_i); +inf when one condition gives a color probability 0 and the
  /// other does not.
  double error = 0.0;
};

struct ContractionReport {
  Vertex vertex = -1;
  int degree = 0;
  double epsilon = 0.0;
  double error = 0.0;
  Color j1 = 0;
  Color j2 = 0;
  double lhs = 0.0;  ///< E(x,y) / m
  double rhs = 0.0;  ///< (1-eps) max_{i: m_i>0} E(x_i,y_i) / m_i, 0 if no m_i > 0
  std::vector<NeighborTerm> neighbors;

  bool passed() const { return lhs <= rhs + kSlackTolerance; }
  std::string summary() const;
};

/// v and all its neighbors must be free under both conditions and v must
/// have a neighbor. Throws std::domain_error if the assumption fails.
ContractionReport contraction_check(const GraphListPair& pair, Vertex v, const BoundaryCondition& c1,
                                    const BoundaryCondition& c2, double alpha, double beta);

// Boundary stripping ---------------------------------------------------------

struct StripResult {
  GraphListPair pair;
  std::vector<Vertex> deleted;
};

/// Detaches every assigned boundary vertex of psi closer than d to v and
/// removes its color from its neighbors' lists.
StripResult strip_near_boundary_detail(const GraphListPair& pair, const Region& psi, Vertex v,
                                       const BoundaryCondition& common, int d);
GraphListPair strip_near_boundary(const GraphListPair& pair, const Region& psi, Vertex v,
                                  const BoundaryCondition& common, int d);

/// The condition with the given vertices made free.
BoundaryCondition drop_vertices(const BoundaryCondition& c, std::span<const Vertex> vertices);

// Decay experiments ----------------------------------------------------------

struct DecaySample {
  int distance = 0;
  double epsilon = 0.0;
  /// B exp(-gamma d) from the theoretical envelope, NaN when unavailable.
  double envelope = std::numeric_limits<double>::quiet_NaN();
  std::string instance;
  std::uint64_t seed = 0;
};

struct ExperimentOptions {
  int samples = 16;
  std::uint64_t seed = 1;
  double free_probability = 0.2;
  int max_attempts = 1000;
  /// Used only for the envelope column.
  double alpha = 2.0;
  double beta = 10.0;
  std::string instance = "instance";
  /// ssm only: route every sample through strip_near_boundary and compare.
  bool verify_strip = false;
};

struct ExperimentResult {
  std::vector<DecaySample> samples;
  std::size_t rejected = 0;
  std::size_t strip_checks = 0;
  std::size_t strip_mismatches = 0;
};

/// max_j |P(c(v)=j | c1) / P(c(v)=j | c2) - 1| over colors not zero under
/// both; +inf when only the denominator is zero.
double ratio_deviation(ColoringCounter& counter, const BoundaryCondition& c1, const BoundaryCondition& c2,
                       Vertex v);

/// Independent random conditions on the complement of psi.
ExperimentResult wsm_experiment(const GraphListPair& pair, const Region& psi, Vertex v,
                                const ExperimentOptions& options);
/// Conditions that agree outside w (a subset of the boundary of psi).
ExperimentResult ssm_experiment(const GraphListPair& pair, const Region& psi, Vertex v, std::span<const Vertex> w,
                                const ExperimentOptions& options);

// Multi-vertex verifiers -----------------------------------------------------

struct TvScalingReport {
  double tv = 0.0;
  /// Largest single-vertex ratio deviation along the chain v_1..v_t, each
  /// vertex conditioned on every joint coloring of the earlier ones.
  double epsilon = 0.0;
  std::size_t lambda_size = 0;
  double bound = 0.0;

  bool passed() const { return tv <= bound + kSlackTolerance; }
  std::string summary() const;
};

TvScalingReport tv_scaling_check(const GraphListPair& pair, const Region& psi, std::span<const Vertex> lambda,
                                 const BoundaryCondition& c1, const BoundaryCondition& c2);

struct CorollaryReport {
  double tv = 0.0;
  /// max over sigma and j in {j1, j2} of |P(c(f)=j | sigma) / P(c(f)=j) - 1|,
  /// with f free.
  double epsilon = 0.0;
  double bound = 0.0;

  bool passed() const { return tv <= bound + kSlackTolerance; }
  std::string summary() const;
};

/// Conditions common.with(f, j1) and common.with(f, j2).
CorollaryReport single_point_corollary_check(const GraphListPair& pair, const Region& psi,
                                             std::span<const Vertex> lambda, const BoundaryCondition& common,
                                             Vertex f, Color j1, Color j2);

// Envelope and fit -----------------------------------------------------------

struct Envelope {
  double F = 0.0;
  double epsilon = 0.0;
  double gamma = 0.0;
  int d0 = 0;
  double B = 0.0;
  double log_B = 0.0;

  /// B exp(-gamma d), evaluated in log space.
  double at(int d) const;
  std::string summary() const;
};

/// Throws std::domain_error if the assumption fails and std::runtime_error
/// when no d0 is found within 10^6 steps.
Envelope theoretical_envelope(const GraphListPair& pair, double alpha, double beta);

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DecayFit {
  double B = 0.0;
  double gamma = 0.0;
  double residual = 0.0;
  std::size_t points = 0;
  std::optional<Envelope> theory;

  std::string summary() const;
};

/// Least squares on (d, log eps) over finite samples above kFitFloor.
DecayFit fit_decay(std::span<const DecaySample> samples);

/// "distance,epsilon_observed,epsilon_envelope,instance_id,seed" plus rows.
void write_csv(std::ostream& out, std::span<const DecaySample> samples);
std::string format_double(double x);

}  // namespace listmix
