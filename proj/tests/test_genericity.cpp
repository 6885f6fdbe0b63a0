#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "mixext/equilibrium.hpp"
#include "mixext/genericity.hpp"
#include "oracles.hpp"

using namespace mixext;

namespace {

ChartPoint at(const std::vector<std::vector<double>>& w) {
  return chart_point_from_weights(w, standard_chart(w.size()));
}

}  // namespace

TEST_CASE("is_good") {
  GoodFamily f = GoodFamily::empty(1);
  CHECK(is_good(f));
  f.R[0] = {{0, 1}, {1, 2}};
  CHECK(is_good(f));
  f.R[0] = {{0, 1}, {0, 2}, {1, 2}};
  CHECK_FALSE(is_good(f));
  const auto cycle = find_cycle(f.R[0]);
  REQUIRE(cycle.has_value());
  CHECK(*cycle == std::vector<std::size_t>{0, 1, 2});
  CHECK(find_cycle({{0, 1}, {0, 1}}).has_value());
}

TEST_CASE("equilibrium family") {
  const GoodFamily f = equilibrium_family(SupportProfile{{{1, 2}, {0}}}, {3, 2});
  CHECK(f.T[0] == std::vector<std::optional<std::size_t>>{0});
  CHECK(f.R[0] == std::vector<Edge>{{1, 2}});
  CHECK(f.T[1] == std::vector<std::optional<std::size_t>>{1});
  CHECK(f.R[1].empty());
  CHECK(is_good(f));
  CHECK(members(f).size() == 3);
}

TEST_CASE("transversality at the matching-pennies equilibrium") {
  const FiniteGame g = fixtures::matching_pennies();
  GoodFamily f = GoodFamily::empty(2);
  f.R = {{{0, 1}}, {{0, 1}}};
  const TransversalityReport r = transversal_at(g, f, at({{0.5, 0.5}, {0.5, 0.5}}));
  REQUIRE(r.active.size() == 2);
  CHECK(r.rank == 2);
  CHECK(r.transversal);
  // Rows are (0, 4) and (-4, 0) up to the sign of each defining map.
  CHECK(r.jacobian(0, 0) == doctest::Approx(0.0));
  CHECK(std::abs(r.jacobian(0, 1)) == doctest::Approx(4.0));
  CHECK(std::abs(r.jacobian(1, 0)) == doctest::Approx(4.0));
  CHECK(r.jacobian(1, 1) == doctest::Approx(0.0));
  CHECK(r.smallest_singular_value == doctest::Approx(4.0));
}

TEST_CASE("points off the family are vacuously transversal") {
  const FiniteGame g = fixtures::matching_pennies();
  GoodFamily f = GoodFamily::empty(2);
  f.R = {{{0, 1}}, {{0, 1}}};
  const TransversalityReport r = transversal_at(g, f, at({{0.3, 0.7}, {0.2, 0.8}}));
  CHECK(r.active.empty());
  CHECK(r.transversal);
}

TEST_CASE("more active hypersurfaces than dimensions is degenerate") {
  const FiniteGame g = fixtures::matching_pennies();
  GoodFamily f = GoodFamily::empty(2);
  f.T = {{1}, {1}};
  f.R = {{{0, 1}}, {}};
  // Pure profile where player 1 is also indifferent: three active in dimension two.
  const FiniteGame h = make_game({2, 2}, std::vector<std::vector<double>>{{1, 0, 1, 0}, {1, 0, 0, 1}});
  const TransversalityReport r = transversal_at(h, f, at({{1, 0}, {1, 0}}));
  CHECK(r.active.size() == 3);
  CHECK_FALSE(r.transversal);
  (void)g;
}

TEST_CASE("certify_equilibrium") {
  const NashResult mp = enumerate_nash(fixtures::matching_pennies());
  const TransversalityReport r = certify_equilibrium(fixtures::matching_pennies(), mp.equilibria[0]);
  CHECK(r.transversal);
  const JacobianVerdict v = jacobian_verdict(r, 2);
  CHECK(v.regular);
  CHECK(v.smallest_singular_value == doctest::Approx(4.0));

  const FiniteGame bos = fixtures::battle_of_sexes();
  for (const auto& c : enumerate_nash(bos).equilibria) {
    if (c.support.supports[0].size() == 1) {
      const TransversalityReport p = certify_equilibrium(bos, c);
      CHECK(jacobian_verdict(p, 2).regular);
    }
  }

  const FiniteGame dup = fixtures::duplicate_row();
  EquilibriumCertificate cert;
  cert.point = MixedProfile<double>{{{0.5, 0.5}, {0.5, 0.5}}};
  cert.support = SupportProfile{{{0, 1}, {0, 1}}};
  const TransversalityReport d = certify_equilibrium(dup, cert);
  CHECK_FALSE(d.transversal);
  CHECK_FALSE(jacobian_verdict(d, 2).regular);
}

TEST_CASE("regular_value_probe") {
  GoodFamily f = GoodFamily::empty(2);
  f.R[0] = {{0, 1}};
  const RegularValueReport mp =
      regular_value_probe(fixtures::matching_pennies(), f, standard_chart(2), 1);
  CHECK(mp.equations == 1);
  CHECK(mp.face_dimension == 2);
  CHECK_FALSE(mp.roots.empty());
  CHECK_FALSE(mp.degeneracy_witnessed);
  for (const auto& root : mp.roots) CHECK(root.regular);

  const RegularValueReport zero = regular_value_probe(fixtures::zero_game(), f, standard_chart(2), 1);
  CHECK(zero.degeneracy_witnessed);

  const FiniteGame g = random_game({2, 2, 2}, 42);
  const NashResult r = enumerate_nash(g);
  for (const auto& c : r.equilibria) {
    const GoodFamily e = equilibrium_family(c.support, g.strategy_counts());
    bool has_edge = false;
    for (const auto& edges : e.R) has_edge = has_edge || !edges.empty();
    if (!has_edge) continue;
    const RegularValueReport p = regular_value_probe(g, e, standard_chart(3), 42);
    CHECK_FALSE(p.degeneracy_witnessed);
  }

  GoodFamily bad = GoodFamily::empty(1);
  bad.R[0] = {{0, 1}, {1, 2}, {0, 2}};
  CHECK_THROWS(regular_value_probe(make_game({3}, std::vector<std::vector<double>>{{1, 2, 3}}), bad,
                                   standard_chart(1), 0));
}

TEST_CASE("rank split equivalence") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd m(4, 5);
    for (Eigen::Index r = 0; r < 4; ++r)
      for (Eigen::Index c = 0; c < 5; ++c) m(r, c) = n(rng);
    CHECK(rank_split_equivalence_test(m, 2));
  }
  // Rank-deficient remainder: last row is a combination of the others.
  Eigen::MatrixXd d(3, 3);
  d << 1, 0, 0, 0, 1, 2, 1, 1, 2;
  CHECK(rank_split_equivalence_test(d, 1));
  CHECK(rank_split_equivalence_test(Eigen::MatrixXd::Identity(3, 3), 3));
}
