#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "listmix/assumption.hpp"
#include "listmix/generate.hpp"
#include "support.hpp"

using namespace listmix;

namespace {

// Newton iteration on g(x) = log x - 1/x, which has the same root.
double newton_root() {
  double x = 2.0;
  for (int i = 0; i < 50; ++i) x -= (std::log(x) - 1.0 / x) / (1.0 / x + 1.0 / (x * x));
  return x;
}

GraphListPair star_with_lists(int leaves, int center_size, int leaf_size) {
  testing::Edges e;
  for (int i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  std::vector<ColorSet> lists{ColorSet::palette(center_size)};
  for (int i = 1; i <= leaves; ++i) lists.push_back(ColorSet::palette(leaf_size));
  return GraphListPair(leaves + 1, e, lists);
}

}  // namespace

TEST_CASE("threshold constant") {
  double a = alpha_star();
  CHECK(a == doctest::Approx(newton_root()).epsilon(1e-14));
  CHECK(std::abs(a * std::exp(-1.0 / a) - 1.0) < 1e-12);
  CHECK(std::round(a * 1000.0) / 1000.0 == doctest::Approx(1.763).epsilon(1e-12));
  CHECK(beta_min() == doctest::Approx(2.0 + std::sqrt(2.0)));
}

TEST_CASE("contraction product and rate") {
  double p = 0.9 * 2.0 * std::exp(-0.55);
  CHECK(contraction_product(2.0, 10.0) == doctest::Approx(p).epsilon(1e-15));
  CHECK(epsilon_of(2.0, 10.0) == doctest::Approx(1.0 - 1.0 / p).epsilon(1e-15));
  CHECK(epsilon_of(2.0, 10.0) == doctest::Approx(0.0371).epsilon(1e-3));
  CHECK_THROWS_AS(epsilon_of(2.0, 4.0), std::domain_error);
  CHECK_THROWS_AS(epsilon_of(1.7, 100.0), std::domain_error);
  // The product grows with alpha and beta; eps stays in (0, 1).
  for (double alpha = 2.0; alpha < 6.0; alpha += 0.5)
    for (double beta = 12.0; beta < 40.0; beta += 4.0) {
      CHECK(contraction_product(alpha + 0.1, beta) > contraction_product(alpha, beta));
      CHECK(contraction_product(alpha, beta + 1.0) > contraction_product(alpha, beta));
      double e = epsilon_of(alpha, beta);
      CHECK(e > 0.0);
      CHECK(e < 1.0);
    }
}

TEST_CASE("assumption satisfied on a star with generous lists") {
  auto s = star_with_lists(2, 14, 12);
  auto r = check_assumption(s, 2.0, 10.0);
  CHECK(r.satisfied);
  REQUIRE(r.epsilon.has_value());
  CHECK(*r.epsilon == doctest::Approx(epsilon_of(2.0, 10.0)));
  CHECK(r.slack == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(r.summary().find("satisfied=true") != std::string::npos);
}

TEST_CASE("assumption failures are reported individually") {
  auto s = star_with_lists(2, 13, 12);
  auto r = check_assumption(s, 2.0, 10.0);
  CHECK_FALSE(r.satisfied);
  CHECK(r.has_failure(AssumptionFailure::kListTooSmall));
  CHECK(r.failing_vertices == std::vector<Vertex>{0});
  CHECK_FALSE(r.epsilon.has_value());

  auto big = star_with_lists(2, 30, 30);
  auto low_beta = check_assumption(big, 2.0, 4.0);
  CHECK(low_beta.has_failure(AssumptionFailure::kProductNotAboveOne));
  CHECK_FALSE(low_beta.has_failure(AssumptionFailure::kBetaBelowMinimum));
  CHECK(check_assumption(big, 2.0, 3.0).has_failure(AssumptionFailure::kBetaBelowMinimum));
  CHECK(check_assumption(big, 1.5, 10.0).has_failure(AssumptionFailure::kAlphaNotAboveThreshold));

  std::vector<std::pair<Vertex, Vertex>> tri{{0, 1}, {1, 2}, {0, 2}};
  GraphListPair t(3, tri, std::vector<ColorSet>(3, ColorSet::palette(30)));
  auto rt = check_assumption(t, 2.0, 10.0);
  CHECK(rt.has_failure(AssumptionFailure::kTriangle));
  CHECK_FALSE(rt.satisfied);
}

TEST_CASE("assumption policy instances satisfy the assumption") {
  for (int seed = 0; seed < 30; ++seed) {
    GeneratorSpec spec;
    spec.family = static_cast<Family>(seed % 6);
    spec.n = 5;
    spec.m = 2;
    spec.seed = static_cast<std::uint64_t>(seed);
    spec.lists = ListPolicy::assumption(2.0, 10.0, 40);
    auto g = generate(spec);
    CHECK(check_assumption(g, 2.0, 10.0).satisfied);
  }
}
