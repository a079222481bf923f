#include "listmix/assumption.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace listmix {

double alpha_star() {
  // x * exp(-1/x) is increasing on [1, 3] and crosses 1 inside.
  auto f = [](double x) { return x * std::exp(-1.0 / x) - 1.0; };
  double lo = 1.0;
  double hi = 3.0;
  for (int iter = 0; iter < 200 && hi - lo > 0.0; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0) lo = mid; else hi = mid;
  }
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

double contraction_product(double alpha, double beta) {
  return (1.0 - 1.0 / beta) * alpha * std::exp(-(1.0 + 1.0 / beta) / alpha);
}

double epsilon_of(double alpha, double beta) {
  double p = contraction_product(alpha, beta);
  if (!(p > 1.0))
    throw std::domain_error("no contraction rate: (1-1/beta)*alpha*exp(-(1+1/beta)/alpha) = " +
                            std::to_string(p) + " is not above 1");
  return 1.0 - 1.0 / p;
}

std::string to_string(AssumptionFailure f) {
  switch (f) {
    case AssumptionFailure::kTriangle: return "triangle";
    case AssumptionFailure::kAlphaNotAboveThreshold: return "alpha_not_above_alpha_star";
    case AssumptionFailure::kBetaBelowMinimum: return "beta_below_minimum";
    case AssumptionFailure::kProductNotAboveOne: return "product_not_above_one";
    case AssumptionFailure::kListTooSmall: return "list_too_small";
  }
  return "unknown";
}

bool AssumptionReport::has_failure(AssumptionFailure f) const {
  return std::find(failures.begin(), failures.end(), f) != failures.end();
}

std::string AssumptionReport::summary() const {
  std::ostringstream out;
  out.precision(17);
  out << "alpha=" << alpha << '\n' << "beta=" << beta << '\n';
  out << "satisfied=" << (satisfied ? "true" : "false") << '\n';
  if (epsilon) out << "epsilon=" << *epsilon << '\n';
  if (!slack.empty()) out << "min_slack=" << *std::min_element(slack.begin(), slack.end()) << '\n';
  for (auto f : failures) out << "failure=" << to_string(f) << '\n';
  for (Vertex v : failing_vertices) out << "failing_vertex=" << v << " slack=" << slack[static_cast<std::size_t>(v)] << '\n';
  return out.str();
}

AssumptionReport check_assumption(const GraphListPair& pair, double alpha, double beta) {
  AssumptionReport r;
  r.alpha = alpha;
  r.beta = beta;
  if (!is_triangle_free(pair)) r.failures.push_back(AssumptionFailure::kTriangle);
  if (!(alpha > alpha_star())) r.failures.push_back(AssumptionFailure::kAlphaNotAboveThreshold);
  if (!(beta >= beta_min())) r.failures.push_back(AssumptionFailure::kBetaBelowMinimum);
  if (!(contraction_product(alpha, beta) > 1.0)) r.failures.push_back(AssumptionFailure::kProductNotAboveOne);
  r.slack.reserve(static_cast<std::size_t>(pair.size()));
  for (Vertex v = 0; v < pair.size(); ++v) {
    double s = pair.list(v).size() - (alpha * pair.degree(v) + beta);
    r.slack.push_back(s);
    if (s < 0.0) r.failing_vertices.push_back(v);
  }
  if (!r.failing_vertices.empty()) r.failures.push_back(AssumptionFailure::kListTooSmall);
  r.satisfied = r.failures.empty();
  if (r.satisfied) r.epsilon = epsilon_of(alpha, beta);
  return r;
}

}  // namespace listmix
