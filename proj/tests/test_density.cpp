#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "swk/density.hpp"

using namespace swk;

TEST_CASE("grid positions and edges") {
  const Grid1D g(-1.0, 0.5, 5);
  CHECK(g.position(0) == -1.0);
  CHECK(g.position(4) == 1.0);
  CHECK(g.lower() == doctest::Approx(-1.25));
  CHECK(g.upper() == doctest::Approx(1.25));
  const auto c = Grid1D::covering(0.0, 1.0, 4);
  CHECK(c.lower() == doctest::Approx(0.0));
  CHECK(c.upper() == doctest::Approx(1.0));
  CHECK_THROWS(Grid1D(0.0, 0.0, 4));
  CHECK_THROWS(Grid1D(0.0, 1.0, 1));
}

TEST_CASE("normalize uniform ones") {
  const Grid1D g(0.0, 0.25, 8);
  const auto d = normalize(g, std::vector<double>(8, 1.0), 0.0);
  for (std::size_t k = 0; k < 8; ++k) CHECK(d[k] == doctest::Approx(1.0 / (8 * 0.25)).epsilon(1e-14));
}

TEST_CASE("normalize adds epsilon floor") {
  const Grid1D g(0.0, 1.0, 4);
  const auto d = normalize(g, std::vector<double>{0.0, 1.0, 0.0, 0.0}, 0.04);
  const double expected[] = {0.01, 1.01, 0.01, 0.01};
  const double sum = 1.04;
  for (std::size_t k = 0; k < 4; ++k) CHECK(d[k] == doctest::Approx(expected[k] / sum).epsilon(1e-14));
  CHECK(d.strictly_positive());
}

TEST_CASE("normalize errors") {
  const Grid1D g(0.0, 1.0, 3);
  CHECK_THROWS_WITH(normalize(g, std::vector<double>(3, 0.0)), "degenerate density");
  CHECK_THROWS_WITH(normalize(g, std::vector<double>{1.0, -0.5, 1.0}), "negative mass");
  CHECK_THROWS(normalize(g, std::vector<double>{1.0, 1.0}));
  CHECK_THROWS_WITH(normalize(2, 2, 1.0, std::vector<double>(4, 0.0)), "degenerate density");
}

TEST_CASE("2D normalize gives unit mass") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::vector<double> raw(35);
  for (double& v : raw) v = u(rng);
  const auto d = normalize(5, 7, 0.3, raw);
  double mass = 0.0;
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 7; ++c) mass += d.cell_mass(r, c);
  CHECK(std::fabs(mass - 1.0) <= 1e-12);
  CHECK(d.x(3) == doctest::Approx(0.0));
  CHECK(d.y(0) == doctest::Approx(-0.6));
}

TEST_CASE("constructor rejects non-unit mass") {
  CHECK_THROWS(DiscreteDensity1D(Grid1D(0.0, 1.0, 2), {0.5, 0.6}));
  CHECK_THROWS(DiscreteDensity2D(2, 2, 1.0, {0.25, 0.25, 0.25, 0.2}));
}

TEST_CASE("cdf of a point-like density is a step") {
  const Grid1D g(0.0, 1.0, 6);
  const auto d = normalize(g, std::vector<double>{0, 0, 0, 1, 0, 0}, 0.0);
  const auto c = cdf(d);
  const double expected[] = {0, 0, 0, 1, 1, 1};
  for (std::size_t k = 0; k < 6; ++k) CHECK(c.values()[k] == expected[k]);
}

TEST_CASE("cdf of uniform density") {
  const std::size_t n = 10;
  const auto d = normalize(Grid1D(0.0, 0.1, n), std::vector<double>(n, 1.0), 0.0);
  const auto c = cdf(d);
  for (std::size_t k = 0; k < n; ++k) CHECK(c.values()[k] == doctest::Approx(double(k + 1) / n).epsilon(1e-13));
}

TEST_CASE("cdf of standard normal at zero") {
  const auto g = Grid1D::covering(-6.0, 6.0, 512);
  const auto c = cdf(test::gaussian_1d(g, 0.0, 1.0));
  CHECK(std::fabs(c(0.0) - 0.5) <= 2e-3);
  CHECK(std::fabs(c.values().back() - 1.0) <= 1e-12);
  // Cross-check against erf at a few points.
  for (double t : {-2.0, -0.7, 1.3}) CHECK(std::fabs(c(t) - 0.5 * std::erfc(-t / std::sqrt(2.0))) <= 2e-3);
}

TEST_CASE("quantile examples") {
  const auto g = Grid1D::covering(-5.0, 5.0, 201);
  const auto c = cdf(test::gaussian_1d(g, 0.0, 1.0));
  CHECK(std::fabs(quantile(c, 0.5)) <= g.spacing);
  CHECK(quantile(c, 1.0) <= g.upper() + 1e-12);
  CHECK(quantile(c, 1.0) >= g.position(g.count - 1));

  const auto u = cdf(normalize(Grid1D::covering(0.0, 1.0, 100), std::vector<double>(100, 1.0), 0.0));
  CHECK(std::fabs(quantile(u, 0.25) - 0.25) <= 1e-2);
  CHECK_THROWS(quantile(u, -0.1));
  CHECK_THROWS(quantile(u, 1.1));
}

TEST_CASE("quantile picks the smallest t on flat stretches") {
  const Grid1D g(0.0, 1.0, 5);
  const auto c = cdf(normalize(g, std::vector<double>{1, 0, 0, 0, 1}, 0.0));
  // CDF reaches 0.5 at the right edge of cell 0 and stays there.
  CHECK(quantile(c, 0.5) == doctest::Approx(g.edge(1)));
}

TEST_CASE("cdf monotone and Galois bound on random densities") {
  std::mt19937_64 rng(11);
  const auto g = Grid1D::covering(-8.0, 8.0, 300);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = test::random_mixture_1d(g, rng);
    const auto c = cdf(d);
    for (std::size_t k = 1; k < c.size(); ++k) CHECK(c.values()[k] > c.values()[k - 1]);
    CHECK(std::fabs(c.values().back() - 1.0) <= 1e-12);
    for (std::size_t k = 0; k < g.count; ++k) {
      const double x = g.position(k);
      const double q = quantile(c, c(x));
      CHECK(q <= x + g.spacing);
      if (k > 0 && k + 1 < g.count) CHECK(std::fabs(q - x) <= g.spacing);
    }
  }
}
