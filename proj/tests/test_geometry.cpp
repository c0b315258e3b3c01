#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "mmc/dimension.hpp"
#include "mmc/error.hpp"
#include "mmc/geometry.hpp"

using namespace mmc;
using fixtures::load;

namespace {

CloneStructure with_placement(const std::string& name, int clone, PlanarSimilarity p) {
  auto def = fixtures::definition(name);
  def.clones[static_cast<std::size_t>(clone - 1)].placement = p;
  return CloneStructure(def);
}

}  // namespace

TEST_CASE("middle third embedding is valid") {
  const auto s = load("middle_third");
  CHECK(validate_embedding(s).ok());
  const auto pts = sample_points(s, 1);
  REQUIRE(pts.size() == 2);
  CHECK(std::abs(pts.points[0].x - 1.0 / 6) < 1e-15);
  CHECK(std::abs(pts.points[1].x - 5.0 / 6) < 1e-15);
  CHECK(pts.reach[0] == doctest::Approx(1.0 / 6));
  CHECK(validate_embedding(load("figure_matrix")).ok());
  CHECK(validate_embedding(load("planar_multi")).ok());
}

TEST_CASE("embedding violations") {
  // Discs of radius 1/6 centred at 1/6 and 1/2 touch.
  const auto touching = with_placement("middle_third", 2, PlanarSimilarity{1.0 / 3, 0, false, {1.0 / 3, 0}});
  const auto r1 = validate_embedding(touching);
  REQUIRE(r1.violations.size() == 1);
  CHECK(r1.violations[0] == "clones 1 and 2 overlap in model 1");

  // A placement scale that disagrees with the inverse scale is rejected on construction.
  CHECK_THROWS_WITH_AS(with_placement("middle_third", 2, PlanarSimilarity{0.3, 0, false, {2.0 / 3, 0}}),
                       doctest::Contains("placement scale"), ValidationError);

  const auto outside = with_placement("middle_third", 2, PlanarSimilarity{1.0 / 3, 0, false, {0.9, 0}});
  CHECK(validate_embedding(outside).violations[0] == "clone 2 is not contained in model 1");
  CHECK_THROWS_AS(separation_report(outside, 4), ValidationError);
}

TEST_CASE("sampling") {
  const auto s = load("planar_multi");
  const auto zero = sample_points(s, 0);
  REQUIRE(zero.size() == 3);
  CHECK(zero.points[2] == Point{6, 0});

  const auto mt = load("middle_third");
  for (int k = 1; k <= 8; ++k) {
    const auto c = sample_points(mt, k);
    CHECK(c.size() == (1u << k));
    double gap = 1e9;
    for (std::size_t i = 1; i < c.size(); ++i) gap = std::min(gap, c.points[i].x - c.points[i - 1].x);
    CHECK(gap >= std::pow(3.0, -k) * (1.0 / 3) * (1 - 1e-9));
  }
  CHECK_THROWS_AS(sample_points(mt, 25), ComputeError);
}

TEST_CASE("similarity exactness under composed placements") {
  const auto s = load("planar_multi");
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-3, 3);
  const auto cloud = kernels::sample_serial(s, 4, kernels::SampleMode::DiscCenter);
  for (std::size_t i = 0; i < cloud.size(); i += 17) {
    const auto addr = cloud.address(i);
    PlanarSimilarity p;
    for (int id : addr.word()) p = p.compose(*s.clone(id).placement);
    const double scale = addr.cumulative_inverse_scale(s).value;
    for (int t = 0; t < 5; ++t) {
      const Point a{u(rng), u(rng)}, b{u(rng), u(rng)};
      CHECK(std::abs(distance(p.apply(a), p.apply(b)) - scale * distance(a, b)) <= 1e-12);
    }
  }
  const PlanarSimilarity g{0.5, 1.1, true, {2, -1}};
  const Point x{0.3, -0.7};
  const Point back = g.inverse().apply(g.apply(x));
  CHECK(distance(back, x) < 1e-14);
}

TEST_CASE("middle third separation") {
  const auto r = separation_report(load("middle_third"), 12);
  const double third = 1.0 / 3;
  const auto& a1 = r.entries[1];
  REQUIRE(a1.address.word() == std::vector<int>{1});
  CHECK(a1.sep_lo <= third);
  CHECK(third <= a1.sep);
  CHECK(a1.sep - a1.sep_lo <= 2 * r.error_radius);
  CHECK(a1.diameter == doctest::Approx(third));
  CHECK(a1.rel_lo <= 1.0);
  CHECK(1.0 <= a1.rel_hi);
  CHECK(r.alpha_lo <= third);
  CHECK(third <= r.alpha);
  CHECK(r.beta_lo <= 3.0);
  CHECK(3.0 <= r.beta_hi);
  CHECK(r.beta >= 1.0);
  CHECK(std::isinf(r.entries[0].sep));
  for (const auto& e : r.entries) {
    if (std::isfinite(e.sep)) CHECK(e.rel == doctest::Approx(e.sep / e.diameter));
  }
}

TEST_CASE("relative separation is invariant under a global similarity") {
  const auto s = load("planar_multi");
  const auto moved = transform_embedding(s, PlanarSimilarity{2.0, 0.4, true, {1.5, -3}});
  CHECK(validate_embedding(moved).ok());
  const auto a = separation_report(s, 7, 4);
  const auto b = separation_report(moved, 7, 4);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 1; i < a.entries.size(); ++i) CHECK(std::abs(a.entries[i].rel - b.entries[i].rel) <= 1e-12);
  CHECK(std::abs(a.beta - b.beta) <= 1e-12 * a.beta);
}

TEST_CASE("certified interval contains the refined value") {
  for (const char* name : {"middle_third", "figure_matrix", "planar_multi"}) {
    const auto s = load(name);
    for (int level = 4; level <= 8; level += 2) {
      const auto coarse = separation_report(s, level, 3);
      const auto fine = separation_report(s, level + 2, 3);
      REQUIRE(coarse.entries.size() == fine.entries.size());
      for (std::size_t i = 0; i < coarse.entries.size(); ++i) {
        const auto& c = coarse.entries[i];
        if (!std::isfinite(c.sep)) continue;
        CHECK(fine.entries[i].sep <= c.sep * (1 + 1e-12));
        CHECK(fine.entries[i].sep >= c.sep_lo);
      }
    }
  }
}

TEST_CASE("empirical xi is finite and settles") {
  const auto s = load("figure_matrix");
  double prev = 0;
  for (int level = 6; level <= 10; level += 2) {
    const double xi = separation_report(s, level, 6).xi_bound;
    CHECK(std::isfinite(xi));
    CHECK(xi >= 1.0);
    if (prev > 0) CHECK(xi <= prev * (1 + 1e-12));
    prev = xi;
  }
}

TEST_CASE("box counting") {
  const auto mt = box_counting_dimension(load("middle_third"), 10);
  CHECK(std::abs(mt.estimate - std::log(2.0) / std::log(3.0)) < 0.05);
  CHECK_FALSE(mt.degenerate);

  const auto zero = box_counting_dimension(load("middle_third"), 0);
  CHECK(zero.degenerate);
  CHECK(std::abs(zero.estimate) < 1e-12);

  const auto fm = load("figure_matrix");
  const auto est = box_counting_dimension(fm, 10);
  CHECK(std::abs(est.estimate - solve_dimension(fm).dimension) < 0.08);

  CHECK_THROWS_AS(box_counting_dimension(load("middle_third"), 3, {0.1, 0.001}), ValidationError);
  CHECK_THROWS_AS(box_counting_dimension(load("middle_third"), 8, {0.01, 0.1}), ValidationError);
}

TEST_CASE("svg rendering") {
  const auto mt = render_svg(load("middle_third"), 3);
  std::size_t circles = 0;
  for (std::size_t p = mt.find("<circle"); p != std::string::npos; p = mt.find("<circle", p + 1)) ++circles;
  CHECK(circles == 15);
  CHECK(mt == render_svg(load("middle_third"), 3));

  const auto planar = render_svg(load("planar_multi"), 0);
  std::size_t shapes = 0;
  for (const char* tag : {"<circle", "<polygon"}) {
    for (std::size_t p = planar.find(tag); p != std::string::npos; p = planar.find(tag, p + 1)) ++shapes;
  }
  CHECK(shapes == 3);
  CHECK(planar.find("level-1") == std::string::npos);
  CHECK(render_svg(load("planar_multi"), 2).find("level-2") != std::string::npos);
}
