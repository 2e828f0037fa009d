#include <doctest.h>

#include <cmath>
#include <vector>

#include "srm/errors.hpp"
#include "srm/outer/conjugate.hpp"
#include "srm/risk/risk.hpp"
#include "support.hpp"

using namespace srm;
using srm::test::Rng;

namespace {

DiscreteDistribution four_point() { return DiscreteDistribution({1, 2, 3, 4}, {0.25, 0.25, 0.25, 0.25}); }
DiscreteDistribution coin(double hi) { return DiscreteDistribution({0, hi}, {0.5, 0.5}); }

}  // namespace

TEST_CASE("distribution merges duplicates, drops dust and sorts") {
  DiscreteDistribution d({3, 1, 3, 2, 5}, {0.2, 0.3, 0.2, 0.3 - 1e-17, 1e-17});
  REQUIRE(d.size() == 3);
  CHECK(d.atoms()[0] == 1);
  CHECK(d.atoms()[2] == 3);
  CHECK(d.probs()[2] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(d.cumulative().back() == 1.0);
  CHECK_THROWS_AS(DiscreteDistribution({1, 2}, {0.5, 0.6}), ConfigError);
  CHECK_THROWS_AS(DiscreteDistribution({1}, {-0.1}), ConfigError);
}

TEST_CASE("quantile") {
  CHECK(quantile(four_point(), 0.5) == 2);
  CHECK(quantile(coin(10), 0.75) == 10);
  CHECK(quantile(coin(10), 0.5) == 0);
  for (double u : {1e-9, 0.3, 1.0}) CHECK(quantile(DiscreteDistribution::point_mass(7.5), u) == 7.5);
  CHECK_THROWS_AS(quantile(four_point(), 0.0), DomainError);
  CHECK_THROWS_AS(quantile(four_point(), 1.5), DomainError);

  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto d = test::random_dist(rng, 12);
    const double u = rng.uniform(1e-6, 1.0);
    CHECK(quantile(d, u) == test::brute_quantile(d, u));
  }
}

TEST_CASE("expected shortfall") {
  CHECK(expected_shortfall(four_point(), 0.5) == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(expected_shortfall(coin(2.2), 0.5) == doctest::Approx(2.2).epsilon(1e-15));
  CHECK(expected_shortfall(four_point(), 0.0) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK_THROWS_AS(expected_shortfall(four_point(), 1.0), DomainError);
  CHECK_THROWS_AS(expected_shortfall(four_point(), -0.1), DomainError);

  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const auto d = test::random_dist(rng, 10);
    const double alpha = rng.integer(0, 99) / 100.0;
    const double ref = test::brute_spectral(d, StepSpectrum::expected_shortfall(alpha), 20000);
    CHECK(std::abs(expected_shortfall(d, alpha) - ref) <= 1e-3 * (1.0 + d.max()) / (1.0 - alpha));
  }
}

TEST_CASE("spectral risk") {
  const auto d = four_point();
  CHECK(spectral_risk(d, StepSpectrum::expectation()) == doctest::Approx(d.mean()).epsilon(1e-15));
  CHECK(spectral_risk(d, StepSpectrum::expected_shortfall(0.5)) == doctest::Approx(3.5).epsilon(1e-15));
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const auto spec = test::random_spectrum(rng, 6);
    CHECK(spectral_risk(DiscreteDistribution::point_mass(4.25), spec) == doctest::Approx(4.25).epsilon(1e-12));
    const auto dist = test::random_dist(rng, 10);
    const double ref = test::brute_spectral(dist, spec, 20000);
    CHECK(std::abs(spectral_risk(dist, spec) - ref) <= 2e-3 * spec.max_value() * (1.0 + dist.max()));
  }
}

TEST_CASE("spectrum construction") {
  CHECK_THROWS_AS(StepSpectrum({0, 0.5, 1}, {1.5, 0.5}), ConfigError);   // decreasing
  CHECK_THROWS_AS(StepSpectrum({0, 0.5, 1}, {0.5, 0.5}), ConfigError);   // mass 0.5
  CHECK_THROWS_AS(StepSpectrum({0, 1}, {-1}), ConfigError);
  const auto es = StepSpectrum::expected_shortfall(0.5);
  CHECK(es(0.25) == 0.0);
  CHECK(es(0.5) == 2.0);
  CHECK(es(1.0) == 2.0);
  CHECK(distortion(es, 0.75) == doctest::Approx(0.5));
  CHECK(distortion(es, 0.0) == 0.0);
  CHECK(distortion(es, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(distortion(StepSpectrum::expectation(), 0.3) == doctest::Approx(0.3));
}

TEST_CASE("mixture measure") {
  auto single = mixture_measure(StepSpectrum::expected_shortfall(0.9));
  REQUIRE(single.levels.size() == 1);
  CHECK(single.levels[0] == doctest::Approx(0.9));
  CHECK(single.weights[0] == doctest::Approx(1.0).epsilon(1e-12));

  auto flat = mixture_measure(StepSpectrum::expectation());
  REQUIRE(flat.levels.size() == 1);
  CHECK(flat.levels[0] == 0.0);
  CHECK(flat.weights[0] == doctest::Approx(1.0));

  auto two = mixture_measure(StepSpectrum({0, 0.5, 1}, {0.5, 1.5}));
  REQUIRE(two.levels.size() == 2);
  CHECK(two.levels[0] == 0.0);
  CHECK(two.weights[0] == doctest::Approx(0.5));
  CHECK(two.levels[1] == 0.5);
  CHECK(two.weights[1] == doctest::Approx(0.5));

  const std::vector<EsComponent> comps{{0.0, 0.5}, {0.5, 0.5}};
  CHECK(StepSpectrum::es_mixture(comps) == StepSpectrum({0, 0.5, 1}, {0.5, 1.5}));
}

TEST_CASE("properties of spectral risk on random inputs") {
  Rng rng(14);
  for (int i = 0; i < 300; ++i) {
    const auto spec = test::random_spectrum(rng, 6);
    const auto d = test::random_dist(rng, 15, -5.0, 10.0);
    const double r = spectral_risk(d, spec);
    const double m = rng.uniform(-20, 20);
    const double lambda = rng.uniform(0, 5);
    CHECK(std::abs(spectral_risk(d.shifted(m), spec) - (r + m)) <= 1e-10 * (1 + std::abs(r) + std::abs(m)));
    CHECK(std::abs(spectral_risk(d.scaled(lambda), spec) - lambda * r) <= 1e-10 * (1 + lambda * std::abs(r)));
    CHECK(r >= d.mean() - 1e-10 * (1 + std::abs(d.mean())));
    CHECK(std::abs(r - spectral_risk_via_mixture(d, spec)) <= 1e-10 * (1 + std::abs(r)));

    // comonotone domination: same probabilities, every atom raised
    std::vector<double> up(d.atoms().begin(), d.atoms().end());
    for (double& a : up) a += rng.uniform(0, 1);
    const DiscreteDistribution bigger(up, {d.probs().begin(), d.probs().end()});
    CHECK(spectral_risk(bigger, spec) >= r - 1e-12);

    const auto x = test::random_dist(rng, 6, 0.0, 5.0, 0.5);
    const auto y = test::random_dist(rng, 6, 0.0, 5.0, 0.5);
    const double sum = spectral_risk(DiscreteDistribution::sum_independent(x, y), spec);
    CHECK(sum <= spectral_risk(x, spec) + spectral_risk(y, spec) + 1e-10);
  }
}

TEST_CASE("q-objective") {
  CHECK(ru_objective(coin(10), 0.5, 0.0) == doctest::Approx(10));
  CHECK(ru_objective(DiscreteDistribution::point_mass(3), 0.7, 3) == doctest::Approx(3));
  Rng rng(15);
  for (int i = 0; i < 100; ++i) {
    const auto d = test::random_dist(rng, 12);
    const double alpha = rng.integer(0, 99) / 100.0;
    CHECK(ru_objective(d, alpha, quantile(d, std::max(alpha, 1e-15))) ==
          doctest::Approx(expected_shortfall(d, alpha)).epsilon(1e-12));
    // fine q-grid minimum within the grid step times phi(1) = 1 / (1 - alpha)
    double best = 1e300;
    for (int k = 0; k <= 2000; ++k) best = std::min(best, ru_objective(d, alpha, k * 0.005));
    CHECK(best - expected_shortfall(d, alpha) <= 0.005 / (1 - alpha) + 1e-12);
    CHECK(best >= expected_shortfall(d, alpha) - 1e-12);
  }
}

TEST_CASE("optimal disutility for a fixed law") {
  const auto d = four_point();
  const GPoly es = minimizer_g(StepSpectrum::expected_shortfall(0.5), d);
  for (double x : {0.0, 1.0, 2.0, 2.5, 3.0, 4.0}) {
    CHECK(es(x) == doctest::Approx(2.0 + std::max(x - 2.0, 0.0) / 0.5));
  }
  const GPoly flat = minimizer_g(StepSpectrum::expectation(), d);
  for (double x : {1.0, 2.0, 3.5, 4.0}) CHECK(flat(x) == doctest::Approx(x));
  CHECK(flat.cap() == 4.0);
  CHECK_THROWS_AS(minimizer_g(StepSpectrum::expectation(), DiscreteDistribution({-1, 1}, {0.5, 0.5})),
                  DomainError);

  Rng rng(16);
  for (int i = 0; i < 200; ++i) {
    const auto spec = test::random_spectrum(rng, 6);
    const auto dist = test::random_dist(rng, 15);
    const GPoly g = minimizer_g(spec, dist, std::nullopt, rng.coin() ? 0 : 17);
    CHECK(g.in_gamma(1e-9));
    const double r = spectral_risk(dist, spec);
    for (int k = 0; k <= 20; ++k) {
      const double x = g.cap() * k / 20.0;
      CHECK(g(x) <= spec.max_value() * x + r + 1e-9);
    }
    CHECK(dist.expectation([&](double x) { return g(x); }) + outer::conjugate_integral(g, spec) ==
          doctest::Approx(r).epsilon(1e-9));
  }
}
