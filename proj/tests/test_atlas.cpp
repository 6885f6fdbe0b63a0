#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "mixext/atlas.hpp"
#include "mixext/errors.hpp"
#include "oracles.hpp"

using namespace mixext;

namespace {

ChartPoint make_point(ChartId chart, std::vector<std::vector<double>> coords) {
  ChartPoint p{std::move(chart), {}};
  for (const auto& c : coords) p.coords.push_back(Eigen::Map<const Eigen::VectorXd>(c.data(), c.size()));
  return p;
}

}  // namespace

TEST_CASE("chart enumeration and complement") {
  const auto charts = all_charts({2, 3});
  CHECK(charts.size() == 6);
  CHECK(charts.front() == standard_chart(2));
  CHECK(charts.back().l == std::vector<std::size_t>{1, 2});
  CHECK_THROWS(validate_chart(ChartId{{2, 0}}, {2, 3}));
  const auto complement = chart_complement(ChartId{{0, 2}});
  REQUIRE(complement.size() == 2);
  CHECK(to_string(complement[0]) == "C:1:inf");
  CHECK(to_string(complement[1]) == "C:2:2");
}

TEST_CASE("lift on the standard chart identifies it with the affine span") {
  const ChartPoint p = make_point(standard_chart(2), {{0.25}, {0.1, 0.6}});
  const auto t = lift(p);
  CHECK(t[0](0) == 1.0);
  CHECK(t[0](1) == 0.25);
  CHECK(t[1](0) == 1.0);
  CHECK(t[1](2) == 0.6);

  const ChartPoint origin = make_point(ChartId{{1, 2}}, {{0.0}, {0.0, 0.0}});
  const auto e = lift(origin);
  CHECK(e[0] == Eigen::Vector2d(0, 1));
  CHECK(e[1] == Eigen::Vector3d(0, 0, 1));

  const ChartPoint q = make_point(ChartId{{1, 0}}, {{-2.0}, {0.5, 3.0}});
  const ChartPoint back = chart_read(lift(q), q.chart);
  CHECK(back.coords[0] == q.coords[0]);
  CHECK(back.coords[1] == q.coords[1]);
}

TEST_CASE("transition between charts") {
  const ChartPoint p = make_point(standard_chart(2), {{2.0}, {3.0}});
  const ChartPoint same = transition(p, p.chart);
  CHECK(same.coords[0] == p.coords[0]);

  const ChartPoint q = transition(p, ChartId{{1, 1}});
  CHECK(q.coords[0](0) == doctest::Approx(0.5));
  CHECK(q.coords[1](0) == doctest::Approx(1.0 / 3.0));

  const ChartPoint z = make_point(standard_chart(2), {{0.0}, {3.0}});
  CHECK_THROWS_AS(transition(z, ChartId{{1, 0}}), DivisionByZero);
}

TEST_CASE("flatten and unflatten") {
  const ChartPoint p = make_point(ChartId{{1, 0}}, {{4.0}, {5.0, 6.0}});
  const Eigen::VectorXd flat = flatten(p);
  CHECK(flat.size() == 3);
  const ChartPoint back = unflatten(flat, p.chart, {2, 3});
  CHECK(back.coords[1] == p.coords[1]);
}

TEST_CASE("hypersurface labels") {
  for (const std::string s : {"C:1:0", "C:2:inf", "C:1:3", "D:2:0:1"}) {
    CHECK(to_string(parse_hypersurface(s)) == s);
  }
  CHECK_THROWS(validate_hypersurface(parse_hypersurface("D:1:1:0"), {2, 2}));
  CHECK_THROWS(parse_hypersurface("C:0:1"));
  CHECK_THROWS(parse_hypersurface("X:1:1"));
  CHECK_THROWS(validate_hypersurface(parse_hypersurface("C:1:2"), {2, 2}));
}

TEST_CASE("payoff-difference defining map of matching pennies") {
  const FiniteGame g = fixtures::matching_pennies();
  const DefiningMap f = defining_map(g, parse_hypersurface("D:1:0:1"), standard_chart(2));
  // The zero set is gamma^2_1 = 1/2; the function is affine in gamma^2_1 with slope 4 up to sign.
  for (double y : {0.0, 0.25, 0.5, 1.0, 3.0}) {
    const ChartPoint p = make_point(standard_chart(2), {{0.7}, {y}});
    CHECK(std::abs(f.value(p)) == doctest::Approx(std::abs(-2 + 4 * y)));
  }
  const ChartPoint p = make_point(standard_chart(2), {{0.7}, {0.1}});
  const Eigen::VectorXd grad = f.gradient(p);
  CHECK(grad(0) == 0.0);
  CHECK(std::abs(grad(1)) == doctest::Approx(4.0));
}

TEST_CASE("coordinate hyperplanes in the standard chart") {
  const FiniteGame g = fixtures::matching_pennies();
  const DefiningMap inf = defining_map(g, parse_hypersurface("C:1:inf"), ChartId{{1, 0}});
  CHECK(inf.value(make_point(ChartId{{1, 0}}, {{0.0}, {0.3}})) == 0.0);
  CHECK_THROWS_AS(defining_map(g, parse_hypersurface("C:1:inf"), standard_chart(2)),
                  ChartExcludesHypersurface);
  const DefiningMap c11 = defining_map(g, parse_hypersurface("C:1:1"), standard_chart(2));
  CHECK(c11.value(make_point(standard_chart(2), {{0.3}, {0.9}})) == doctest::Approx(0.3));
  const DefiningMap c10 = defining_map(g, parse_hypersurface("C:1:0"), standard_chart(2));
  CHECK(c10.value(make_point(standard_chart(2), {{0.3}, {0.9}})) == doctest::Approx(0.7));
  CHECK_THROWS_AS(defining_map(g, parse_hypersurface("C:2:1"), ChartId{{0, 1}}),
                  ChartExcludesHypersurface);
}

TEST_CASE("on_hypersurface") {
  const FiniteGame g = fixtures::matching_pennies();
  const auto h = parse_hypersurface("D:1:0:1");
  CHECK(on_hypersurface(g, h, make_point(standard_chart(2), {{0.9}, {0.5}})));
  CHECK_FALSE(on_hypersurface(g, h, make_point(standard_chart(2), {{0.9}, {0.0}})));
  // An identically zero form contains every point.
  CHECK(on_hypersurface(fixtures::duplicate_row(), h, make_point(standard_chart(2), {{0.2}, {0.7}})));
}

TEST_CASE("membership agrees across overlapping charts") {
  const FiniteGame g = fixtures::matching_pennies();
  const auto h = parse_hypersurface("D:1:0:1");
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const ChartPoint p = make_point(standard_chart(2), {{u(rng)}, {0.5}});
    for (const auto& chart : all_charts({2, 2})) {
      try {
        CHECK(on_hypersurface(g, h, transition(p, chart)));
      } catch (const DivisionByZero&) {
      }
    }
  }
}

TEST_CASE("defining-map gradients match finite differences in every chart") {
  const FiniteGame g = random_game({2, 3, 2}, 12);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2, 2);
  for (const auto& chart : all_charts(g.strategy_counts())) {
    for (const auto& h : {parse_hypersurface("D:2:0:2"), parse_hypersurface("D:3:0:1"),
                          parse_hypersurface("C:2:0")}) {
      const DefiningMap f = defining_map(g, h, chart);
      std::vector<double> x(g.dimension());
      for (auto& v : x) v = u(rng);
      const Eigen::VectorXd flat = Eigen::Map<Eigen::VectorXd>(x.data(), x.size());
      const Eigen::VectorXd analytic = f.gradient(unflatten(flat, chart, g.strategy_counts()));
      const auto numeric = oracle::finite_difference(
          [&](const std::vector<double>& y) {
            return f.value(unflatten(Eigen::Map<const Eigen::VectorXd>(y.data(), y.size()), chart,
                                     g.strategy_counts()));
          },
          x, 1e-6);
      for (std::size_t k = 0; k < x.size(); ++k) {
        CHECK(std::abs(analytic(k) - numeric[k]) <= 1e-5 * std::max(1.0, std::abs(analytic(k))));
      }
    }
  }
}
