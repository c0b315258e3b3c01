#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "mmc/dimension.hpp"
#include "mmc/error.hpp"
#include "mmc/oracle.hpp"

using namespace mmc;
using fixtures::load;

TEST_CASE("middle third dimension") {
  const auto r = solve_dimension(load("middle_third"));
  CHECK(std::abs(r.dimension - std::log(2.0) / std::log(3.0)) < 1e-11);
  CHECK(r.bracket_hi - r.bracket_lo <= 1e-12);
  CHECK(r.bracket_lo <= r.dimension);
  CHECK(r.dimension <= r.bracket_hi);
  CHECK(r.left_eigenvector(0) == doctest::Approx(1.0));
}

TEST_CASE("four quarters have dimension one") {
  const auto r = solve_dimension(fixtures::moran({"1/4", "1/4", "1/4", "1/4"}));
  CHECK(std::abs(r.dimension - 1.0) < 1e-11);
}

TEST_CASE("bracket sign condition") {
  for (const auto& name : fixtures::irreducible) {
    const auto s = load(name);
    const auto r = solve_dimension(s);
    CHECK(r.bracket_lo <= r.dimension);
    CHECK(r.dimension <= r.bracket_hi);
    CHECK(frobenius_eigenvalue(s, r.bracket_lo) >= 1.0);
    CHECK(frobenius_eigenvalue(s, r.bracket_hi) <= 1.0);
  }
}

TEST_CASE("reducible structures are rejected") {
  CHECK_THROWS_AS(solve_dimension(load("figure_reducible")), ComputeError);
}

TEST_CASE("eigenvalue curve") {
  const auto mt = load("middle_third");
  const double dstar = std::log(2.0) / std::log(3.0);
  const std::vector<double> grid{0.0, dstar, 1.0};
  const auto c = eigenvalue_curve(mt, grid);
  CHECK(c[0].lambda == doctest::Approx(2.0));
  CHECK(c[1].lambda == doctest::Approx(1.0));
  CHECK(c[2].lambda == doctest::Approx(2.0 / 3));

  const std::vector<double> zero{0.0};
  CHECK(std::abs(eigenvalue_curve(load("figure_matrix"), zero)[0].lambda - (3 + std::sqrt(5.0)) / 2) < 1e-12);

  for (const auto& name : fixtures::irreducible) {
    const auto s = load(name);
    const auto curve = eigenvalue_curve(s, linear_grid(0.0, 3.0, 60));
    int crossings = 0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
      CHECK(curve[i].lambda < curve[i - 1].lambda);
      if ((curve[i - 1].lambda > 1) != (curve[i].lambda > 1)) ++crossings;
    }
    CHECK(crossings == 1);
  }
}

TEST_CASE("power structure has the same dimension") {
  for (const auto& name : fixtures::irreducible) {
    const auto s = load(name);
    const double d = solve_dimension(s).dimension;
    for (int k = 2; k <= 3; ++k) CHECK(std::abs(solve_dimension(power_structure(s, k)).dimension - d) <= 2e-12);
  }
}

TEST_CASE("single-model structures satisfy the Moran equation") {
  const std::vector<std::vector<std::string>> cases{{"1/2", "1/4"}, {"1/3", "1/5", "1/7"}, {"2/5", "1/3"}};
  for (const auto& scales : cases) {
    const auto s = fixtures::moran(scales);
    const double d = solve_dimension(s).dimension;
    double sum = 0;
    for (const auto& c : s.clones()) sum += std::pow(c.inverse_scale.value, d);
    CHECK(std::abs(sum - 1.0) < 1e-10);
  }
  const double golden = std::log2((1 + std::sqrt(5.0)) / 2);
  CHECK(std::abs(solve_dimension(fixtures::moran({"1/2", "1/4"})).dimension - golden) < 1e-11);
}
