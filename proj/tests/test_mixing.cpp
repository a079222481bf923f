#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "listmix/assumption.hpp"
#include "listmix/generate.hpp"
#include "listmix/mixing.hpp"
#include "support.hpp"

using namespace listmix;
namespace t = listmix::testing;

namespace {

GraphListPair assumption_path(int n, std::uint64_t seed, Color q = 16) {
  GeneratorSpec spec;
  spec.family = Family::kPath;
  spec.n = n;
  spec.seed = seed;
  spec.lists = ListPolicy::assumption(2.0, 10.0, q);
  return generate(spec);
}

std::vector<Vertex> range(int lo, int hi) {
  std::vector<Vertex> out;
  for (int v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

}  // namespace

TEST_CASE("bounds hold on an assumption-satisfying star") {
  auto star = read_graph_file(t::fixture("star.txt"));
  std::vector<BoundaryCondition> conds{{}, {{1, 3}}, {{1, 3}, {2, 5}}, {{2, 14}}};
  auto r = bounds_check(star, 0, conds, 2.0, 10.0);
  CHECK(r.passed());
  CHECK(r.conditions == 4);
  CHECK(r.checks > 40);
  CHECK(r.easy_bound == doctest::Approx(0.1));
  CHECK(r.lower_bound == doctest::Approx(0.81 / 16.0));
  CHECK(r.worst_easy_slack >= 0.0);
  CHECK(r.worst_lower_slack >= 0.0);
  CHECK(r.summary().find("passed=true") != std::string::npos);

  auto c4 = read_graph_file(t::fixture("c4.txt"));
  CHECK_THROWS_AS(bounds_check(c4, 0, conds, 2.0, 10.0), std::domain_error);
  CHECK_THROWS_AS(bounds_check(star, 1, conds, 2.0, 10.0), std::invalid_argument);
}

TEST_CASE("bounds hold on random trees") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    GeneratorSpec spec;
    spec.family = Family::kRandomTree;
    spec.n = 6;
    spec.seed = rng();
    spec.lists = ListPolicy::assumption(2.0, 10.0, 24);
    auto g = generate(spec);
    Vertex v = static_cast<Vertex>(rng() % 6);
    std::vector<Vertex> others;
    for (Vertex u = 0; u < 6; ++u)
      if (u != v) others.push_back(u);
    std::vector<BoundaryCondition> conds;
    for (int k = 0; k < 3; ++k) conds.push_back(t::random_condition(g, others, 0.5, rng));
    CHECK(bounds_check(g, v, conds, 2.0, 10.0).passed());
  }
}

TEST_CASE("contraction step on a path") {
  auto p = assumption_path(7, 3);
  std::mt19937_64 rng(12);
  std::vector<Vertex> far{0, 5, 6};
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto c1 = t::random_condition(p, far, 0.7, rng);
    auto c2 = t::random_condition(p, far, 0.7, rng);
    auto r = contraction_check(p, 2, c1, c2, 2.0, 10.0);
    CHECK(r.passed());
    CHECK(r.degree == 2);
    CHECK(r.neighbors.size() == 2);
    CHECK(r.lhs == doctest::Approx(r.error / 2.0));
    CHECK(r.epsilon == doctest::Approx(epsilon_of(2.0, 10.0)));
    ++checked;
  }
  CHECK(checked == 20);
  BoundaryCondition touching{{1, *p.list(1).colors().begin()}};
  CHECK_THROWS_AS(contraction_check(p, 2, touching, {}, 2.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(contraction_check(read_graph_file(t::fixture("c4.txt")), 0, {}, {}, 2.0, 10.0), std::domain_error);
}

TEST_CASE("identical conditions give zero error") {
  auto p = assumption_path(5, 9);
  auto r = contraction_check(p, 2, {{0, p.list(0).max()}}, {{0, p.list(0).max()}}, 2.0, 10.0);
  CHECK(r.error == 0.0);
  CHECK(r.passed());
}

TEST_CASE("stripping preserves the marginal exactly") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    GeneratorSpec spec;
    spec.family = Family::kGrid;
    spec.n = 3;
    spec.m = 3;
    spec.seed = rng();
    spec.lists = ListPolicy::uniform(4, 6);
    auto g = generate(spec);
    Region psi(g, {3, 4, 5});
    std::vector<Vertex> outside{0, 1, 2, 6, 7, 8};
    auto common = t::random_condition(g, outside, 0.7, rng);
    if (t::brute_count(g, common) == 0) continue;
    for (int d = 1; d <= 3; ++d) {
      auto s = strip_near_boundary_detail(g, psi, 4, common, d);
      auto reduced = drop_vertices(common, s.deleted);
      for (Vertex u : s.deleted) {
        CHECK(s.pair.degree(u) == 0);
        CHECK(distance(g, u, 4).value() < d);
      }
      for (Color c : g.list(4).colors())
        CHECK(marginal_exact(s.pair, reduced, 4, c) == t::brute_marginal(g, common, 4, c));
    }
  }
}

TEST_CASE("stripping details") {
  auto p = assumption_path(6, 1);
  Region psi(p, {1, 2, 3, 4});
  Color c0 = p.list(0).colors().front();
  BoundaryCondition common{{0, c0}, {5, p.list(5).colors().front()}};
  auto s = strip_near_boundary_detail(p, psi, 2, common, 3);
  CHECK(s.deleted == std::vector<Vertex>{0});
  CHECK_FALSE(s.pair.list(1).contains(c0));
  CHECK(s.pair.degree(0) == 0);
  CHECK(strip_near_boundary(p, psi, 2, common, 1) == p);
  CHECK(strip_near_boundary_detail(p, psi, 2, common, 10).deleted == std::vector<Vertex>{0, 5});
  CHECK_THROWS_AS(strip_near_boundary(p, psi, 2, common, 0), std::invalid_argument);
  CHECK_THROWS_AS(strip_near_boundary(p, psi, 0, common, 2), std::invalid_argument);
  CHECK(drop_vertices(common, std::vector<Vertex>{0}) == BoundaryCondition{{5, common.color(5).value()}});
}

TEST_CASE("ratio deviation") {
  auto c4 = read_graph_file(t::fixture("c4.txt"));
  ColoringCounter counter(c4);
  CHECK(ratio_deviation(counter, {{2, 1}}, {{2, 1}}, 0) == 0.0);
  // P(c0 = j | c2 = 1) = (4, 1, 1)/6 and P(c0 = j | c2 = 2) = (1, 4, 1)/6.
  CHECK(ratio_deviation(counter, {{2, 1}}, {{2, 2}}, 0) == doctest::Approx(3.0));
  // (0, 1/2, 1/2) against (0, 0, 1): color 2 has a zero denominator only.
  CHECK(std::isinf(ratio_deviation(counter, {{1, 1}, {3, 1}}, {{1, 1}, {3, 2}}, 0)));
  // (0, 1/2, 1/2) against (1/2, 0, 1/2) after swapping the roles.
  CHECK(std::isinf(ratio_deviation(counter, {{1, 2}, {3, 2}}, {{1, 1}, {3, 1}}, 0)));
}

TEST_CASE("weak and strong mixing experiments") {
  auto p = assumption_path(7, 5);
  Region psi(p, range(0, 5));
  ExperimentOptions opt;
  opt.samples = 6;
  opt.seed = 99;
  opt.instance = "p7";
  auto w = wsm_experiment(p, psi, 0, opt);
  REQUIRE(w.samples.size() == 6);
  for (const auto& s : w.samples) {
    CHECK(s.distance == 6);
    CHECK(s.epsilon >= 0.0);
    CHECK(s.epsilon <= s.envelope);
    CHECK(s.instance == "p7");
  }
  auto w2 = wsm_experiment(p, psi, 0, opt);
  std::ostringstream a, b;
  write_csv(a, w.samples);
  write_csv(b, w2.samples);
  CHECK(a.str() == b.str());

  Region inner(p, range(1, 5));
  std::vector<Vertex> far{6};
  opt.verify_strip = true;
  auto s = ssm_experiment(p, inner, 1, far, opt);
  CHECK(s.samples.size() == 6);
  CHECK(s.strip_checks > 0);
  CHECK(s.strip_mismatches == 0);
  for (const auto& x : s.samples) CHECK(x.distance == 5);
  std::vector<Vertex> not_boundary{3};
  CHECK_THROWS_AS(ssm_experiment(p, inner, 1, not_boundary, opt), std::invalid_argument);

  auto c4 = read_graph_file(t::fixture("c4.txt"));
  Region r(c4, {0, 1});
  auto no_env = wsm_experiment(c4, r, 0, opt);
  for (const auto& x : no_env.samples) CHECK(std::isnan(x.envelope));
}

TEST_CASE("total variation scaling and single-point disagreement") {
  std::mt19937_64 rng(31);
  auto graphs = t::connected_triangle_free_graphs(6);
  int done = 0;
  for (int trial = 0; trial < 300 && done < 60; ++trial) {
    auto& [n, edges] = graphs[rng() % graphs.size()];
    if (n < 4) continue;
    GraphListPair g(n, edges, t::random_lists(t::degrees(n, edges), 1, 2, 5, rng));
    std::vector<Vertex> psi_v{0, 1};
    Region psi(g, psi_v);
    if (psi.boundary().empty()) continue;
    std::vector<Vertex> outside;
    for (Vertex v = 2; v < n; ++v) outside.push_back(v);
    auto c1 = t::random_condition(g, outside, 0.6, rng);
    auto c2 = t::random_condition(g, outside, 0.6, rng);
    if (t::brute_count(g, c1) == 0 || t::brute_count(g, c2) == 0) continue;
    auto r = tv_scaling_check(g, psi, psi_v, c1, c2);
    CHECK(r.passed());
    CHECK(r.lambda_size == 2);

    Vertex f = psi.boundary().front();
    auto common = t::random_condition(g, outside, 0.5, rng).without(f);
    auto colors = g.list(f).colors();
    Color j1 = colors.front(), j2 = colors.back();
    if (t::brute_count(g, common.with(f, j1)) == 0 || t::brute_count(g, common.with(f, j2)) == 0) continue;
    auto cr = single_point_corollary_check(g, psi, psi_v, common, f, j1, j2);
    CHECK(cr.passed());
    CHECK(cr.bound == doctest::Approx(2.0 * cr.epsilon));
    ++done;
  }
  CHECK(done >= 30);
}

TEST_CASE("theoretical envelope") {
  t::Edges e{{0, 1}, {1, 2}};
  GraphListPair g(3, e, {ColorSet::palette(12), ColorSet::palette(14), ColorSet::palette(15).without(1)});
  REQUIRE(g.q() == 15);
  auto env = theoretical_envelope(g, 2.0, 10.0);
  double F = 2.0 * 2.0 * (std::log(15.0) - 2.0 * std::log(0.9));
  CHECK(env.F == doctest::Approx(F).epsilon(1e-12));
  CHECK(env.F == doctest::Approx(11.7).epsilon(0.01));
  double gamma = -std::log(1.0 / contraction_product(2.0, 10.0));
  CHECK(env.gamma == doctest::Approx(gamma).epsilon(1e-12));
  int d0 = 0;
  while (std::exp(F * std::exp(-gamma * d0)) > 1.0 + 2.0 * F * std::exp(-gamma * d0)) ++d0;
  CHECK(env.d0 == d0);
  CHECK(env.d0 == doctest::Approx(59).epsilon(0.05));
  CHECK(env.log_B == doctest::Approx(F + gamma * d0));
  CHECK(std::log10(env.B) == doctest::Approx(6.0).epsilon(0.05));
  CHECK(env.at(0) == doctest::Approx(env.B));
  CHECK(env.at(10) < env.at(9));
  CHECK_THROWS_AS(theoretical_envelope(read_graph_file(t::fixture("c4.txt")), 2.0, 10.0), std::domain_error);
}

TEST_CASE("decay fit") {
  std::vector<DecaySample> s;
  for (int d = 1; d <= 8; ++d) s.push_back({d, 3.0 * std::exp(-0.7 * d)});
  auto fit = fit_decay(s);
  CHECK(fit.gamma == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(fit.B == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.residual < 1e-12);
  CHECK(fit.points == 8);
  s.push_back({9, 0.0});
  s.push_back({9, std::numeric_limits<double>::infinity()});
  CHECK(fit_decay(s).points == 8);
  std::vector<DecaySample> flat{{2, 0.1}, {2, 0.2}};
  CHECK_THROWS_AS(fit_decay(flat), FitError);
  CHECK_THROWS_AS(fit_decay(std::vector<DecaySample>{}), FitError);
}

TEST_CASE("csv format") {
  std::vector<DecaySample> s{{3, 0.25, 2.5, "a", 7}, {4, std::numeric_limits<double>::infinity(), std::nan(""), "b", 8}};
  std::ostringstream out;
  write_csv(out, s);
  CHECK(out.str() ==
        "distance,epsilon_observed,epsilon_envelope,instance_id,seed\n"
        "3,0.25,2.5,a,7\n"
        "4,inf,,b,8\n");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("small worked examples") {
  // Isolated vertex: only the easy upper bound and the lower bound apply.
  GraphListPair lone(1, {}, {ColorSet::palette(12)});
  std::vector<BoundaryCondition> none{{}};
  auto b = bounds_check(lone, 0, none, 2.0, 10.0);
  CHECK(b.passed());
  CHECK(std::isinf(b.worst_upper_slack));
  CHECK(b.lower_bound > 0.0);

  // Star whose leaves touch nothing else: every m_i is 0, so both sides vanish.
  auto star = read_graph_file(t::fixture("star.txt"));
  auto c = contraction_check(star, 0, {}, {}, 2.0, 10.0);
  CHECK(c.rhs == 0.0);
  CHECK(c.lhs == 0.0);
  for (const auto& n : c.neighbors) CHECK(n.effective_degree == 0);

  // b - u - v with b pinned to 1.
  t::Edges e{{0, 1}, {1, 2}};
  GraphListPair p(3, e, std::vector<ColorSet>(3, ColorSet{1, 2, 3}));
  Region psi(p, {1, 2});
  BoundaryCondition pin{{0, 1}};
  CHECK(strip_near_boundary_detail(p, psi, 2, pin, 2).deleted.empty());
  auto s = strip_near_boundary_detail(p, psi, 2, pin, 3);
  CHECK(s.deleted == std::vector<Vertex>{0});
  CHECK(s.pair.list(1) == ColorSet{2, 3});
  for (Color j = 1; j <= 3; ++j) CHECK(marginal_exact(s.pair, {}, 2, j) == marginal_exact(p, pin, 2, j));

  // Identical conditions, equal colors, empty lambda.
  auto p5 = read_graph_file(t::fixture("path5.txt"));
  Region mid(p5, {1, 2, 3});
  std::vector<Vertex> lam{2, 3};
  CHECK(tv_scaling_check(p5, mid, lam, {{0, 2}}, {{0, 2}}).tv == 0.0);
  CHECK(single_point_corollary_check(p5, mid, lam, {{0, 1}}, 4, 2, 2).tv == 0.0);
  CHECK(single_point_corollary_check(p5, mid, {}, {{0, 1}}, 4, 1, 2).tv == 0.0);
}

TEST_CASE("experiment samples respect the ratio range implied by the bounds") {
  // Center at distance >= 2 from the boundary so no color is blocked on one side only.
  for (int n : {5, 7, 9}) {
    auto p = assumption_path(n, 40 + static_cast<std::uint64_t>(n));
    Vertex center = n / 2;
    std::vector<Vertex> psi_v;
    for (Vertex v = 1; v + 1 < n; ++v) psi_v.push_back(v);
    ExperimentOptions opt;
    opt.samples = 20;
    opt.seed = 5;
    auto r = wsm_experiment(p, Region(p, psi_v), center, opt);
    double cap = p.q() * std::pow(1.0 - 0.1, -p.max_degree()) / 10.0;
    for (const auto& s : r.samples) CHECK(s.epsilon <= cap);
  }
}

TEST_CASE("longer paths decay further under the same protocol") {
  auto mean_eps = [](int n) {
    auto p = assumption_path(n, 77);
    std::vector<Vertex> psi_v;
    for (Vertex v = 1; v + 1 < n; ++v) psi_v.push_back(v);
    ExperimentOptions opt;
    opt.samples = 40;
    opt.seed = 3;
    auto r = wsm_experiment(p, Region(p, psi_v), n / 2, opt);
    double sum = 0.0;
    for (const auto& s : r.samples) sum += s.epsilon;
    return sum / static_cast<double>(r.samples.size());
  };
  CHECK(mean_eps(9) < mean_eps(5));
}

TEST_CASE("fit anchors") {
  std::vector<DecaySample> unit, flat;
  for (int d = 1; d <= 6; ++d) {
    unit.push_back({d, std::exp(-static_cast<double>(d))});
    flat.push_back({d, 0.01});
  }
  auto f = fit_decay(unit);
  CHECK(std::abs(f.gamma - 1.0) < 1e-9);
  CHECK(std::abs(f.B - 1.0) < 1e-9);
  CHECK(std::abs(fit_decay(flat).gamma) < 1e-12);
}
