#include "listmix/mixing.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "listmix/assumption.hpp"
#include "listmix/recursion.hpp"

namespace listmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_assumption(const GraphListPair& pair, double alpha, double beta) {
  auto report = check_assumption(pair, alpha, beta);
  if (!report.satisfied) {
    std::string reasons;
    for (auto f : report.failures) reasons += (reasons.empty() ? "" : ",") + to_string(f);
    throw std::domain_error("list-size assumption not satisfied: " + reasons);
  }
}

void require_free(const BoundaryCondition& c, Vertex v, const char* who) {
  if (c.is_assigned(v))
    throw std::invalid_argument(std::string(who) + ": vertex " + std::to_string(v) + " must be free");
}

bool pinned_identically(const BoundaryCondition& c1, const BoundaryCondition& c2, Vertex u) {
  auto a = c1.color(u);
  auto b = c2.color(u);
  return a && b && *a == *b;
}

/// |a * db / (b * da) - 1| computed exactly; +inf when b == 0 < a.
double exact_deviation(const BigInt& a, const BigInt& da, const BigInt& b, const BigInt& db) {
  if (b == 0) return a == 0 ? 0.0 : kInf;
  Rational r(a * db, b * da);
  r -= 1;
  return to_double(abs(r));
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

void draw_vertex(std::mt19937_64& rng, const GraphListPair& pair, Vertex u, double free_probability,
                 BoundaryCondition& out) {
  std::bernoulli_distribution free(free_probability);
  if (free(rng)) {
    out.clear(u);
    return;
  }
  auto colors = pair.list(u).colors();
  std::uniform_int_distribution<std::size_t> pick(0, colors.size() - 1);
  out.assign(u, colors[pick(rng)]);
}

std::string fmt(double x) { return format_double(x); }

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------

std::string BoundsReport::summary() const {
  std::ostringstream out;
  out << "check=bounds\nvertex=" << vertex << "\nalpha=" << fmt(alpha) << "\nbeta=" << fmt(beta)
      << "\nconditions=" << conditions << "\nchecks=" << checks << "\nviolations=" << violations
      << "\neasy_bound=" << fmt(easy_bound) << "\nlower_bound=" << fmt(lower_bound)
      << "\nworst_easy_slack=" << fmt(worst_easy_slack) << "\nworst_upper_slack=" << fmt(worst_upper_slack)
      << "\nworst_lower_slack=" << fmt(worst_lower_slack) << "\npassed=" << (passed() ? "true" : "false") << '\n';
  return out.str();
}

BoundsReport bounds_check(const GraphListPair& pair, Vertex v, std::span<const BoundaryCondition> conditions,
                          double alpha, double beta) {
  require_assumption(pair, alpha, beta);
  BoundsReport r;
  r.vertex = v;
  r.alpha = alpha;
  r.beta = beta;
  r.easy_bound = 1.0 / beta;
  r.lower_bound = std::pow(1.0 - 1.0 / beta, pair.max_degree()) / pair.q();
  const double shrink = alpha * std::exp(-(1.0 + 1.0 / beta) / alpha);
  ColoringCounter counter(pair);
  for (const auto& c : conditions) {
    require_free(c, v, "bounds_check");
    ++r.conditions;
    int m = 0;
    ColorSet blocked;
    for (Vertex u : pair.neighbors(v)) {
      if (auto col = c.color(u)) blocked.insert(*col);
      else ++m;
    }
    auto exact = exact_marginals(counter, c, v);
    for (std::size_t k = 0; k < exact.colors.size(); ++k) {
      if (blocked.contains(exact.colors[k])) continue;
      double p = to_double(Rational(exact.counts[k], exact.total));
      ++r.checks;
      bool bad = false;
      r.worst_easy_slack = std::min(r.worst_easy_slack, r.easy_bound - p);
      bad |= p > r.easy_bound + kSlackTolerance;
      if (m >= 1) {
        double ub = 1.0 / (m * shrink);
        r.worst_upper_slack = std::min(r.worst_upper_slack, ub - p);
        bad |= p > ub + kSlackTolerance;
      }
      r.worst_lower_slack = std::min(r.worst_lower_slack, p - r.lower_bound);
      bad |= p < r.lower_bound - kSlackTolerance;
      if (bad) ++r.violations;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

std::string ContractionReport::summary() const {
  std::ostringstream out;
  out << "check=contraction\nvertex=" << vertex << "\ndegree=" << degree << "\nepsilon=" << fmt(epsilon)
      << "\nerror=" << fmt(error) << "\nj1=" << j1 << "\nj2=" << j2 << "\nlhs=" << fmt(lhs) << "\nrhs=" << fmt(rhs)
      << '\n';
  for (const auto& t : neighbors)
    out << "neighbor=" << t.vertex << " m=" << t.effective_degree << " error=" << fmt(t.error) << '\n';
  out << "passed=" << (passed() ? "true" : "false") << '\n';
  return out.str();
}

namespace {

/// E over colors that are not zero under both vectors; +inf on a one-sided zero.
double support_error(const ExactMarginals& x, const ExactMarginals& y) {
  double hi = -kInf;
  double lo = kInf;
  for (std::size_t k = 0; k < x.colors.size(); ++k) {
    const bool zx = x.counts[k] == 0;
    const bool zy = y.counts[k] == 0;
    if (zx && zy) continue;
    if (zx || zy) return kInf;
    double r = std::log(to_double(Rational(x.counts[k], x.total))) - std::log(to_double(Rational(y.counts[k], y.total)));
    hi = std::max(hi, r);
    lo = std::min(lo, r);
  }
  return hi >= lo ? hi - lo : 0.0;
}

}  // namespace

ContractionReport contraction_check(const GraphListPair& pair, Vertex v, const BoundaryCondition& c1,
                                    const BoundaryCondition& c2, double alpha, double beta) {
  require_assumption(pair, alpha, beta);
  require_free(c1, v, "contraction_check");
  require_free(c2, v, "contraction_check");
  for (Vertex u : pair.neighbors(v)) {
    require_free(c1, u, "contraction_check neighbor");
    require_free(c2, u, "contraction_check neighbor");
  }
  ContractionReport r;
  r.vertex = v;
  r.degree = pair.degree(v);
  if (r.degree == 0) throw std::invalid_argument("contraction_check: vertex has no neighbors");
  r.epsilon = epsilon_of(alpha, beta);

  ColoringCounter counter(pair);
  auto x = exact_marginals(counter, c1, v).to_vector();
  auto y = exact_marginals(counter, c2, v).to_vector();
  auto e = error_functional(x, y);
  r.error = e.value;
  r.j1 = e.argmax;
  r.j2 = e.argmin;
  r.lhs = e.value / r.degree;

  double best = 0.0;
  for (int i = 1; i <= r.degree; ++i) {
    auto sub = reduce_pairwise(pair, v, r.j1, r.j2, i);
    NeighborTerm term;
    term.vertex = sub.focus;
    for (Vertex u : sub.pair.neighbors(sub.focus))
      if (!pinned_identically(c1, c2, u)) ++term.effective_degree;
    ColoringCounter sub_counter(sub.pair);
    auto xi = exact_marginals(sub_counter, c1, sub.focus);
    auto yi = exact_marginals(sub_counter, c2, sub.focus);
    term.error = support_error(xi, yi);
    if (term.effective_degree > 0) best = std::max(best, term.error / term.effective_degree);
    r.neighbors.push_back(term);
  }
  r.rhs = (1.0 - r.epsilon) * best;
  return r;
}

// ---------------------------------------------------------------------------

StripResult strip_near_boundary_detail(const GraphListPair& pair, const Region& psi, Vertex v,
                                       const BoundaryCondition& common, int d) {
  if (d < 1) throw std::invalid_argument("strip distance must be positive");
  if (!psi.contains(v)) throw std::invalid_argument("strip center must lie in psi");
  auto dist = bfs_distances(pair, v);
  StripResult out{pair, {}};
  auto lists = pair.lists();
  for (Vertex u : psi.boundary()) {
    int du = dist[static_cast<std::size_t>(u)];
    if (du < 0 || du >= d) continue;
    auto c = common.color(u);
    if (!c) continue;
    out.deleted.push_back(u);
  }
  GraphListPair g = pair;
  for (Vertex u : out.deleted) {
    Color c = *common.color(u);
    for (Vertex w : pair.neighbors(u)) {
      auto& l = lists[static_cast<std::size_t>(w)];
      if (l.contains(c) && l.size() == 1)
        throw UncolorableRegion("stripping vertex " + std::to_string(u) + " empties the list of " +
                                std::to_string(w));
      l.erase(c);
    }
    g = g.detached(u);
  }
  out.pair = g.with_lists(std::move(lists));
  return out;
}

GraphListPair strip_near_boundary(const GraphListPair& pair, const Region& psi, Vertex v,
                                  const BoundaryCondition& common, int d) {
  return strip_near_boundary_detail(pair, psi, v, common, d).pair;
}

BoundaryCondition drop_vertices(const BoundaryCondition& c, std::span<const Vertex> vertices) {
  BoundaryCondition out = c;
  for (Vertex u : vertices) out.clear(u);
  return out;
}

// ---------------------------------------------------------------------------

double ratio_deviation(ColoringCounter& counter, const BoundaryCondition& c1, const BoundaryCondition& c2,
                       Vertex v) {
  auto x = exact_marginals(counter, c1, v);
  auto y = exact_marginals(counter, c2, v);
  double worst = 0.0;
  for (std::size_t k = 0; k < x.colors.size(); ++k)
    worst = std::max(worst, exact_deviation(x.counts[k], x.total, y.counts[k], y.total));
  return worst;
}

namespace {

std::optional<Envelope> envelope_if_valid(const GraphListPair& pair, const ExperimentOptions& options) {
  if (!check_assumption(pair, options.alpha, options.beta).satisfied) return std::nullopt;
  try {
    return theoretical_envelope(pair, options.alpha, options.beta);
  } catch (const std::runtime_error&) {
    return std::nullopt;
  }
}

template <class Draw, class Measure>
ExperimentResult run_experiment(const GraphListPair& pair, int distance, const ExperimentOptions& options,
                                Draw draw, Measure measure) {
  if (options.samples < 0) throw std::invalid_argument("sample count must be nonnegative");
  ExperimentResult result;
  auto envelope = envelope_if_valid(pair, options);
  ColoringCounter counter(pair);
  for (int s = 0; s < options.samples; ++s) {
    auto rng = sample_rng(options.seed, static_cast<std::size_t>(s));
    int attempts = 0;
    while (true) {
      if (attempts++ >= options.max_attempts)
        throw std::runtime_error("no colorable condition pair after " + std::to_string(options.max_attempts) +
                                 " attempts");
      auto [c1, c2] = draw(rng);
      if (counter.count(c1) == 0 || counter.count(c2) == 0) {
        ++result.rejected;
        continue;
      }
      DecaySample sample;
      sample.distance = distance;
      sample.epsilon = measure(counter, c1, c2, result);
      if (envelope) sample.envelope = envelope->at(distance);
      sample.instance = options.instance;
      sample.seed = options.seed;
      result.samples.push_back(std::move(sample));
      break;
    }
  }
  return result;
}

}  // namespace

ExperimentResult wsm_experiment(const GraphListPair& pair, const Region& psi, Vertex v,
                                const ExperimentOptions& options) {
  if (!psi.contains(v)) throw std::invalid_argument("wsm_experiment: v must lie in psi");
  if (psi.boundary().empty()) throw std::invalid_argument("wsm_experiment: psi has an empty boundary");
  Distance d = distance(pair, std::span<const Vertex>(&v, 1), psi.boundary());
  if (d.is_infinite()) throw std::invalid_argument("wsm_experiment: boundary unreachable from v");
  std::vector<Vertex> outside;
  for (Vertex u = 0; u < pair.size(); ++u)
    if (!psi.contains(u)) outside.push_back(u);
  auto draw = [&](std::mt19937_64& rng) {
    BoundaryCondition c1;
    BoundaryCondition c2;
    for (Vertex u : outside) draw_vertex(rng, pair, u, options.free_probability, c1);
    for (Vertex u : outside) draw_vertex(rng, pair, u, options.free_probability, c2);
    return std::pair{c1, c2};
  };
  auto measure = [&](ColoringCounter& counter, const BoundaryCondition& c1, const BoundaryCondition& c2,
                     ExperimentResult&) { return ratio_deviation(counter, c1, c2, v); };
  return run_experiment(pair, d.value(), options, draw, measure);
}

ExperimentResult ssm_experiment(const GraphListPair& pair, const Region& psi, Vertex v, std::span<const Vertex> w,
                                const ExperimentOptions& options) {
  if (!psi.contains(v)) throw std::invalid_argument("ssm_experiment: v must lie in psi");
  if (w.empty()) throw std::invalid_argument("ssm_experiment: W must be nonempty");
  for (Vertex u : w)
    if (!psi.on_boundary(u)) throw std::invalid_argument("ssm_experiment: W must lie on the boundary of psi");
  Distance d = distance(pair, std::span<const Vertex>(&v, 1), w);
  if (d.is_infinite()) throw std::invalid_argument("ssm_experiment: W unreachable from v");
  std::vector<Vertex> common_part;
  for (Vertex u = 0; u < pair.size(); ++u)
    if (!psi.contains(u) && std::find(w.begin(), w.end(), u) == w.end()) common_part.push_back(u);
  auto draw = [&](std::mt19937_64& rng) {
    BoundaryCondition c1;
    for (Vertex u : common_part) draw_vertex(rng, pair, u, options.free_probability, c1);
    BoundaryCondition c2 = c1;
    for (Vertex u : w) draw_vertex(rng, pair, u, options.free_probability, c1);
    for (Vertex u : w) draw_vertex(rng, pair, u, options.free_probability, c2);
    return std::pair{c1, c2};
  };
  const int dv = d.value();
  auto measure = [&](ColoringCounter& counter, const BoundaryCondition& c1, const BoundaryCondition& c2,
                     ExperimentResult& result) {
    double eps = ratio_deviation(counter, c1, c2, v);
    if (options.verify_strip) {
      auto stripped = strip_near_boundary_detail(pair, psi, v, c1, dv);
      ColoringCounter stripped_counter(stripped.pair);
      for (const auto* c : {&c1, &c2}) {
        auto before = exact_marginals(counter, *c, v);
        auto after = exact_marginals(stripped_counter, drop_vertices(*c, stripped.deleted), v);
        ++result.strip_checks;
        for (Color j : before.colors)
          if (before.probability(j) != after.probability(j)) {
            ++result.strip_mismatches;
            break;
          }
      }
    }
    return eps;
  };
  return run_experiment(pair, dv, options, draw, measure);
}

// ---------------------------------------------------------------------------

std::string TvScalingReport::summary() const {
  std::ostringstream out;
  out << "check=tvscale\ntv=" << fmt(tv) << "\nepsilon=" << fmt(epsilon) << "\nlambda_size=" << lambda_size
      << "\nbound=" << fmt(bound) << "\npassed=" << (passed() ? "true" : "false") << '\n';
  return out.str();
}

namespace {

using PrefixTable = std::map<std::vector<Color>, BigInt>;

PrefixTable prefix_sums(const JointCounts& t) {
  PrefixTable out;
  for (std::size_t k = 0; k < t.tuples.size(); ++k) {
    const auto& tuple = t.tuples[k];
    for (std::size_t len = 0; len <= tuple.size(); ++len)
      out[std::vector<Color>(tuple.begin(), tuple.begin() + static_cast<std::ptrdiff_t>(len))] += t.counts[k];
  }
  return out;
}

Rational tv_of(const JointCounts& a, const JointCounts& b) {
  BigInt numerator = 0;
  for (std::size_t k = 0; k < a.counts.size(); ++k) numerator += abs(a.counts[k] * b.total - b.counts[k] * a.total);
  return Rational(numerator, a.total * b.total);
}

void check_region_conditions(const Region& psi, std::span<const Vertex> lambda,
                             std::initializer_list<const BoundaryCondition*> conditions) {
  for (Vertex u : lambda)
    if (!psi.contains(u)) throw std::invalid_argument("lambda vertex " + std::to_string(u) + " outside psi");
  for (const auto* c : conditions)
    for (auto [u, col] : c->assignments())
      if (psi.contains(u)) throw std::invalid_argument("condition assigns vertex " + std::to_string(u) + " in psi");
}

}  // namespace

TvScalingReport tv_scaling_check(const GraphListPair& pair, const Region& psi, std::span<const Vertex> lambda,
                                 const BoundaryCondition& c1, const BoundaryCondition& c2) {
  check_region_conditions(psi, lambda, {&c1, &c2});
  ColoringCounter counter(pair);
  auto a = joint_counts(counter, c1, lambda);
  auto b = joint_counts(counter, c2, lambda);
  TvScalingReport r;
  r.lambda_size = a.vertices.size();
  r.tv = to_double(tv_of(a, b));
  auto pa = prefix_sums(a);
  auto pb = prefix_sums(b);
  for (const auto& [prefix, za] : pa) {
    if (prefix.size() >= a.vertices.size() || za == 0) continue;
    const BigInt& zb = pb.at(prefix);
    if (zb == 0) continue;
    auto child = prefix;
    child.push_back(0);
    for (Color j : pair.list(a.vertices[prefix.size()]).colors()) {
      child.back() = j;
      r.epsilon = std::max(r.epsilon, exact_deviation(pa.at(child), za, pb.at(child), zb));
    }
  }
  r.bound = static_cast<double>(r.lambda_size) * r.epsilon;
  if (r.lambda_size == 0) r.bound = 0.0;
  return r;
}

std::string CorollaryReport::summary() const {
  std::ostringstream out;
  out << "check=single_point\ntv=" << fmt(tv) << "\nepsilon=" << fmt(epsilon) << "\nbound=" << fmt(bound)
      << "\npassed=" << (passed() ? "true" : "false") << '\n';
  return out.str();
}

CorollaryReport single_point_corollary_check(const GraphListPair& pair, const Region& psi,
                                             std::span<const Vertex> lambda, const BoundaryCondition& common,
                                             Vertex f, Color j1, Color j2) {
  if (!psi.on_boundary(f)) throw std::invalid_argument("single_point_corollary_check: f must lie on the boundary of psi");
  if (common.is_assigned(f)) throw std::invalid_argument("single_point_corollary_check: the common condition must leave f free");
  if (!pair.list(f).contains(j1) || !pair.list(f).contains(j2))
    throw std::invalid_argument("single_point_corollary_check: j1 and j2 must belong to L(f)");
  check_region_conditions(psi, lambda, {&common});
  ColoringCounter counter(pair);
  auto zero = joint_counts(counter, common, lambda);
  auto a = joint_counts(counter, common.with(f, j1), lambda);
  auto b = joint_counts(counter, common.with(f, j2), lambda);
  CorollaryReport r;
  r.tv = to_double(tv_of(a, b));
  for (std::size_t k = 0; k < zero.counts.size(); ++k) {
    if (zero.counts[k] == 0) continue;
    for (const auto* t : {&a, &b})
      r.epsilon = std::max(r.epsilon, exact_deviation(t->counts[k], zero.counts[k], t->total, zero.total));
  }
  r.bound = 2.0 * r.epsilon;
  return r;
}

// ---------------------------------------------------------------------------

double Envelope::at(int d) const { return std::exp(log_B - gamma * d); }

std::string Envelope::summary() const {
  std::ostringstream out;
  out << "F=" << fmt(F) << "\nepsilon=" << fmt(epsilon) << "\ngamma=" << fmt(gamma) << "\nd0=" << d0
      << "\nB=" << fmt(B) << "\nlog_B=" << fmt(log_B) << '\n';
  return out.str();
}

Envelope theoretical_envelope(const GraphListPair& pair, double alpha, double beta) {
  require_assumption(pair, alpha, beta);
  Envelope e;
  const double delta = pair.max_degree();
  e.F = 2.0 * delta * (std::log(static_cast<double>(pair.q())) - delta * std::log(1.0 - 1.0 / beta));
  e.epsilon = epsilon_of(alpha, beta);
  e.gamma = -std::log(1.0 - e.epsilon);
  constexpr int kMaxSteps = 1'000'000;
  int d0 = 0;
  for (; d0 <= kMaxSteps; ++d0) {
    double s = e.F * std::exp(-e.gamma * d0);
    if (std::exp(s) <= 1.0 + 2.0 * s) break;
  }
  if (d0 > kMaxSteps) throw std::runtime_error("no d0 found within 10^6 steps");
  e.d0 = d0;
  e.log_B = std::max(e.F + e.gamma * d0, e.F > 0.0 ? std::log(2.0 * e.F) : -kInf);
  e.B = std::exp(e.log_B);
  return e;
}

std::string DecayFit::summary() const {
  std::ostringstream out;
  out << "fit_B=" << fmt(B) << "\nfit_gamma=" << fmt(gamma) << "\nfit_residual=" << fmt(residual)
      << "\nfit_points=" << points << '\n';
  if (theory) {
    out << "theory_F=" << fmt(theory->F) << "\ntheory_gamma=" << fmt(theory->gamma) << "\ntheory_d0=" << theory->d0
        << "\ntheory_B=" << fmt(theory->B) << '\n';
  }
  return out.str();
}

DecayFit fit_decay(std::span<const DecaySample> samples) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : samples)
    if (std::isfinite(s.epsilon) && s.epsilon > kFitFloor) pts.emplace_back(s.distance, std::log(s.epsilon));
  if (pts.size() < 2) throw FitError("need at least two samples above the floor");
  double mean_d = 0.0;
  double mean_y = 0.0;
  for (auto [d, y] : pts) {
    mean_d += d;
    mean_y += y;
  }
  mean_d /= static_cast<double>(pts.size());
  mean_y /= static_cast<double>(pts.size());
  double sdd = 0.0;
  double sdy = 0.0;
  for (auto [d, y] : pts) {
    sdd += (d - mean_d) * (d - mean_d);
    sdy += (d - mean_d) * (y - mean_y);
  }
  if (sdd == 0.0) throw FitError("need samples at two distinct distances");
  const double slope = sdy / sdd;
  const double intercept = mean_y - slope * mean_d;
  double sq = 0.0;
  for (auto [d, y] : pts) sq += (y - intercept - slope * d) * (y - intercept - slope * d);
  DecayFit fit;
  fit.gamma = -slope;
  fit.B = std::exp(intercept);
  fit.residual = std::sqrt(sq / static_cast<double>(pts.size()));
  fit.points = pts.size();
  return fit;
}

void write_csv(std::ostream& out, std::span<const DecaySample> samples) {
  out << "distance,epsilon_observed,epsilon_envelope,instance_id,seed\n";
  for (const auto& s : samples) {
    out << s.distance << ',' << format_double(s.epsilon) << ',';
    if (!std::isnan(s.envelope)) out << format_double(s.envelope);
    out << ',' << s.instance << ',' << s.seed << '\n';
  }
}

}  // namespace listmix
