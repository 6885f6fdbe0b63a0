// Property checks over seeded random games. Prints one PASS/FAIL line per
// criterion and exits nonzero when any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "commands.hpp"
#include "mixext/atlas.hpp"
#include "mixext/equilibrium.hpp"
#include "mixext/errors.hpp"
#include "mixext/genericity.hpp"
#include "mixext/multilinear.hpp"
#include "oracles.hpp"

using namespace mixext;

namespace {

using Shape = std::vector<std::size_t>;
using Weights = std::vector<std::vector<double>>;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string data_file(const std::string& name) {
  return std::string(MIXEXT_DATA_DIR) + "/games/" + name;
}

Weights random_affine_point(const Shape& counts, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  Weights w;
  for (auto c : counts) {
    std::vector<double> x(c);
    double rest = 0;
    for (std::size_t j = 1; j < c; ++j) rest += x[j] = u(rng);
    x[0] = 1 - rest;
    w.push_back(x);
  }
  return w;
}

Rational fraction(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

double rel_error(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

// ---- 1 --------------------------------------------------------------------

Outcome decomposition_identities() {
  const std::vector<Shape> shapes{{2, 2}, {3, 3}, {2, 2, 2}, {2, 3, 2}};
  constexpr std::size_t kGames = 500, kPoints = 1000;
  double worst_affine = 0, worst_homogeneous = 0;
  std::size_t exact_failures = 0, exact_checks = 0;
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> small(-9, 9);
  std::normal_distribution<double> normal;
  for (std::size_t g = 0; g < kGames; ++g) {
    const Shape& shape = shapes[g % shapes.size()];
    const FiniteGame game = random_game(shape, 1000 + g);
    for (std::size_t i = 0; i < shape.size(); ++i) {
      const auto ld = lambda_decomposition<double>(game, i);
      const auto hd = homogeneous_decomposition<double>(game, i);
      for (std::size_t p = 0; p < kPoints; ++p) {
        const Weights w = random_affine_point(shape, rng);
        const auto others = restrict_to_blocks(ld.kappa, augmented_coordinates(w));
        double rebuilt = eval(ld.kappa, others);
        for (std::size_t j = 1; j < shape[i]; ++j) rebuilt += w[i][j] * eval(ld.lambdas[j], others);
        worst_affine = std::max(worst_affine, rel_error(rebuilt, oracle::payoff(game, i, w)));

        Weights tilde(shape.size()), gamma(shape.size());
        for (std::size_t k = 0; k < shape.size(); ++k) {
          tilde[k].resize(shape[k]);
          for (auto& x : tilde[k]) x = normal(rng);
          gamma[k] = gamma_coordinates<double>(tilde[k]);
        }
        const auto t_others = restrict_to_blocks(hd.K, tilde);
        double homogeneous = tilde[i][0] * eval(hd.K, t_others);
        for (std::size_t j = 1; j < shape[i]; ++j) {
          homogeneous += tilde[i][j] * eval(hd.Lambdas[j], t_others);
        }
        worst_homogeneous =
            std::max(worst_homogeneous, rel_error(homogeneous, oracle::payoff(game, i, gamma)));
      }
    }
    if (shape.size() != 2) continue;
    // Exact check on a game with small rational payoffs.
    std::vector<std::vector<Rational>> u(2);
    for (auto& t : u) {
      t.resize(shape[0] * shape[1]);
      for (auto& x : t) x = fraction(small(rng), 1 + std::abs(small(rng)));
    }
    const FiniteGame exact = make_game(shape, u);
    for (std::size_t i = 0; i < 2; ++i) {
      const auto ld = lambda_decomposition<Rational>(exact, i);
      const auto hd = homogeneous_decomposition<Rational>(exact, i);
      for (std::size_t p = 0; p < kPoints; ++p) {
        std::vector<std::vector<Rational>> w(2), tilde(2), gamma(2);
        for (std::size_t k = 0; k < 2; ++k) {
          w[k].resize(shape[k]);
          tilde[k].resize(shape[k]);
          Rational rest = 0;
          for (std::size_t j = 0; j < shape[k]; ++j) tilde[k][j] = fraction(small(rng), 1 + std::abs(small(rng)));
          for (std::size_t j = 1; j < shape[k]; ++j) rest += w[k][j] = fraction(small(rng), 7);
          w[k][0] = 1 - rest;
          gamma[k] = gamma_coordinates<Rational>(tilde[k]);
        }
        const auto others = restrict_to_blocks(ld.kappa, augmented_coordinates(w));
        Rational rebuilt = eval(ld.kappa, others);
        for (std::size_t j = 1; j < shape[i]; ++j) rebuilt += w[i][j] * eval(ld.lambdas[j], others);
        const auto t_others = restrict_to_blocks(hd.K, tilde);
        Rational homogeneous = tilde[i][0] * eval(hd.K, t_others);
        for (std::size_t j = 1; j < shape[i]; ++j) homogeneous += tilde[i][j] * eval(hd.Lambdas[j], t_others);
        exact_checks += 2;
        exact_failures += (rebuilt != oracle::payoff(exact, i, w)) +
                          (homogeneous != oracle::payoff(exact, i, gamma));
      }
    }
  }
  std::ostringstream d;
  d << "max rel error affine " << worst_affine << ", homogeneous " << worst_homogeneous
    << "; exact mismatches " << exact_failures << "/" << exact_checks;
  return {worst_affine <= 1e-10 && worst_homogeneous <= 1e-10 && exact_failures == 0, d.str()};
}

// ---- 2 --------------------------------------------------------------------

Outcome known_games() {
  const FiniteGame mp = parse_game(
      "players 2\nstrategies 2 2\npayoff 1\n1 -1 -1 1\npayoff 2\n-1 1 1 -1\n", NumericMode::kRational);
  const FiniteGame bos = parse_game(
      "players 2\nstrategies 2 2\npayoff 1\n2 0 0 1\npayoff 2\n1 0 0 2\n", NumericMode::kRational);
  bool ok = true;
  std::ostringstream d;
  for (const auto* g : {&mp, &bos}) {
    const NashResult r = enumerate_nash(*g);
    std::vector<std::vector<std::vector<Rational>>> got;
    for (const auto& c : r.equilibria) {
      if (c.exact_point) got.push_back(c.exact_point->weights);
    }
    std::sort(got.begin(), got.end());
    ok = ok && r.exact && r.warnings.empty() && got == oracle::bimatrix_equilibria(*g);
    d << got.size() << (g == &mp ? " (matching pennies), " : " (battle of the sexes)");
  }
  using Q = Rational;
  const NashResult m = enumerate_nash(mp);
  ok = ok && m.equilibria.size() == 1 &&
       m.equilibria[0].exact_point->weights ==
           std::vector<std::vector<Q>>{{Q(1, 2), Q(1, 2)}, {Q(1, 2), Q(1, 2)}};
  const NashResult b = enumerate_nash(bos);
  const std::vector<std::vector<Q>> mixed{{Q(2, 3), Q(1, 3)}, {Q(1, 3), Q(2, 3)}};
  ok = ok && b.equilibria.size() == 3 &&
       std::any_of(b.equilibria.begin(), b.equilibria.end(),
                   [&](const auto& c) { return c.exact_point->weights == mixed; });
  return {ok, "equilibria " + d.str()};
}

// ---- 3 --------------------------------------------------------------------

Outcome grid_completeness() {
  constexpr std::size_t kSteps = 200;
  constexpr double kRegret = 1e-8;  // best-reply tolerance of the enumerator
  constexpr double kDistance = 1e-2;
  std::size_t passing = 0, unexplained = 0;
  double worst = 0;
  for (std::size_t g = 0; g < 50; ++g) {
    const Shape shape = g % 2 == 0 ? Shape{2, 2} : Shape{2, 3};
    const FiniteGame game = random_game(shape, 3000 + g);
    const NashResult r = enumerate_nash(game);
    const auto grid0 = oracle::simplex_grid(shape[0], kSteps);
    const auto grid1 = oracle::simplex_grid(shape[1], kSteps);
    const auto& a = game.utility<double>(0).data();
    const auto& b = game.utility<double>(1).data();
    for (const auto& x : grid0) {
      // Payoffs of player 2's pure strategies against x.
      std::vector<double> col(shape[1], 0.0);
      for (std::size_t c = 0; c < shape[1]; ++c)
        for (std::size_t row = 0; row < shape[0]; ++row) col[c] += x[row] * b[row * shape[1] + c];
      const double best_col = *std::max_element(col.begin(), col.end());
      for (const auto& y : grid1) {
        double v2 = 0;
        for (std::size_t c = 0; c < shape[1]; ++c) v2 += y[c] * col[c];
        if (v2 < best_col - kRegret) continue;
        std::vector<double> rowp(shape[0], 0.0);
        for (std::size_t row = 0; row < shape[0]; ++row)
          for (std::size_t c = 0; c < shape[1]; ++c) rowp[row] += y[c] * a[row * shape[1] + c];
        double v1 = 0;
        for (std::size_t row = 0; row < shape[0]; ++row) v1 += x[row] * rowp[row];
        if (v1 < *std::max_element(rowp.begin(), rowp.end()) - kRegret) continue;
        ++passing;
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& c : r.equilibria) {
          double s = 0;
          for (std::size_t j = 0; j < shape[0]; ++j) s += std::pow(c.point.weights[0][j] - x[j], 2);
          for (std::size_t j = 0; j < shape[1]; ++j) s += std::pow(c.point.weights[1][j] - y[j], 2);
          nearest = std::min(nearest, std::sqrt(s));
        }
        worst = std::max(worst, nearest);
        unexplained += nearest > kDistance;
      }
    }
  }
  std::ostringstream d;
  d << passing << " grid points pass (regret <= " << kRegret << "), " << unexplained
    << " farther than " << kDistance << " from an equilibrium, worst distance " << worst;
  return {passing > 0 && unexplained == 0, d.str()};
}

// ---- 4 and 5 --------------------------------------------------------------

struct OddnessStats {
  std::size_t runs = 0, odd = 0, unwarned_exceptions = 0, nonregular_unwarned = 0, warned = 0;
  std::string per_shape;
};

OddnessStats oddness_runs() {
  OddnessStats s;
  for (const Shape& shape : std::vector<Shape>{{2, 2}, {3, 3}, {2, 2, 2}}) {
    std::size_t odd = 0;
    for (std::size_t g = 0; g < 200; ++g) {
      const FiniteGame game = random_game(shape, 5000 + g);
      const NashResult r = enumerate_nash(game);
      const bool is_odd = !r.continuum && r.equilibria.size() % 2 == 1;
      const bool warned = !r.warnings.empty();
      ++s.runs;
      odd += is_odd;
      s.warned += warned;
      if (!is_odd && !warned) ++s.unwarned_exceptions;
      if (!warned) {
        for (const auto& c : r.equilibria) {
          s.nonregular_unwarned += !(c.jacobian.regular && c.jacobian.smallest_singular_value > 1e-8);
        }
      }
    }
    s.odd += odd;
    s.per_shape += format_shape(shape) + " " + std::to_string(odd) + "/200 ";
  }
  return s;
}

// ---- 6 --------------------------------------------------------------------

Outcome jacobian_correctness() {
  const std::vector<Shape> shapes{{2, 2}, {3, 3}, {2, 2, 2}, {2, 3, 2}};
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-2, 2);
  double worst = 0;
  std::size_t maps = 0;
  for (std::size_t p = 0; p < 1000; ++p) {
    const Shape& shape = shapes[p % shapes.size()];
    const FiniteGame game = random_game(shape, 6000 + p);
    const auto charts = all_charts(shape);
    const ChartId chart = charts[p % charts.size()];
    std::vector<double> x(game.dimension());
    for (auto& v : x) v = u(rng);
    const Eigen::VectorXd flat = Eigen::Map<Eigen::VectorXd>(x.data(), x.size());
    const ChartPoint point = unflatten(flat, chart, shape);
    std::vector<HypersurfaceId> surfaces;
    for (std::size_t i = 0; i < shape.size(); ++i) {
      surfaces.emplace_back(CoordinateHyperplane{i, std::nullopt});
      for (std::size_t j = 0; j < shape[i]; ++j) {
        surfaces.emplace_back(CoordinateHyperplane{i, j});
        for (std::size_t k = j + 1; k < shape[i]; ++k) surfaces.emplace_back(PayoffDifference{i, j, k});
      }
    }
    for (const auto& h : surfaces) {
      if (chart_excludes(chart, h)) continue;
      const DefiningMap f = defining_map(game, h, chart);
      const Eigen::VectorXd analytic = f.gradient(point);
      const auto numeric = oracle::finite_difference(
          [&](const std::vector<double>& y) {
            return f.value(unflatten(Eigen::Map<const Eigen::VectorXd>(y.data(), y.size()), chart, shape));
          },
          x, 1e-6);
      const Eigen::VectorXd n = Eigen::Map<const Eigen::VectorXd>(numeric.data(), numeric.size());
      worst = std::max(worst, (analytic - n).norm() / std::max(1.0, analytic.norm()));
      ++maps;
    }
  }
  std::ostringstream d;
  d << maps << " defining maps at 1000 chart points, max rel error " << worst;
  return {worst <= 1e-5, d.str()};
}

// ---- 7 --------------------------------------------------------------------

Outcome rank_split() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  std::uniform_int_distribution<int> pick(0, 1000);
  std::size_t ok = 0, deficient = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index d = 2 + pick(rng) % 5;             // columns
    const Eigen::Index a = 1 + pick(rng) % (d + 1);        // rows, possibly d + 1
    const Eigen::Index b = pick(rng) % std::min(a, d) + 1; // independent top rows
    Eigen::MatrixXd m(a, d);
    for (Eigen::Index r = 0; r < a; ++r)
      for (Eigen::Index c = 0; c < d; ++c) m(r, c) = n(rng);
    if (trial % 2 == 1 && a > b) {
      // Make the last row a combination of the others.
      m.row(a - 1) = m.topRows(a - 1).transpose() * Eigen::VectorXd::Random(a - 1);
      ++deficient;
    }
    ok += rank_split_equivalence_test(m, static_cast<std::size_t>(b));
  }
  return {ok == 1000, std::to_string(ok) + "/1000 true (" + std::to_string(deficient) +
                          " built rank-deficient)"};
}

// ---- 8 --------------------------------------------------------------------

Outcome chart_covariance() {
  const std::vector<Shape> shapes{{2, 2}, {3, 3}, {2, 2, 2}, {2, 3, 2}};
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::size_t comparisons = 0, disagreements = 0, points = 0;
  for (const Shape& shape : shapes) {
    const std::size_t m = shape.size();
    for (std::size_t p = 0; p < 200; ++p) {
      const FiniteGame game = random_game(shape, 8000 + points);
      ++points;
      const std::size_t i = rng() % m;
      const std::size_t q = (i + 1 + rng() % (m - 1)) % m;  // player carrying the free coordinate
      const std::size_t k = 1 + rng() % (shape[i] - 1);
      const PayoffDifference diff{i, 0, k};
      // A random point of A; then solve the defining equation for gamma^q_1.
      Weights w(m);
      for (std::size_t r = 0; r < m; ++r) {
        w[r].assign(shape[r], 0.0);
        for (std::size_t j = 1; j < shape[r]; ++j) w[r][j] = u(rng);
      }
      const bool also_coordinate = p % 2 == 1;
      std::size_t c_player = i, c_index = 1 + rng() % (shape[i] - 1);
      if (also_coordinate) w[c_player][c_index] = 0.0;
      auto normalized = [&](Weights v) {
        for (auto& x : v) {
          double rest = 0;
          for (std::size_t j = 1; j < x.size(); ++j) rest += x[j];
          x[0] = 1 - rest;
        }
        return v;
      };
      const ChartId zero = standard_chart(m);
      const DefiningMap f = defining_map(game, diff, zero);
      auto value_at = [&](double t) {
        Weights v = w;
        v[q][1] = t;
        return f.value(chart_point_from_weights(normalized(v), zero));
      };
      const double f0 = value_at(0.0), f1 = value_at(1.0);
      if (std::abs(f1 - f0) < 1e-9) continue;
      w[q][1] = -f0 / (f1 - f0);
      const Weights point = normalized(w);

      GoodFamily family = GoodFamily::empty(m);
      family.R[i] = {{0, k}};
      if (also_coordinate) family.T[c_player] = {c_index};
      // A member that does not pass through the point in general.
      family.T[q].push_back(0);

      std::optional<std::vector<bool>> membership;
      std::optional<std::pair<bool, std::size_t>> verdict;
      for (const auto& chart : all_charts(shape)) {
        ChartPoint cp;
        try {
          cp = chart_point_from_weights(point, chart);
        } catch (const DivisionByZero&) {
          continue;
        }
        std::vector<bool> member;
        for (const auto& h : members(family)) {
          member.push_back(!chart_excludes(chart, h) && on_hypersurface(game, h, cp));
        }
        const TransversalityReport report = transversal_at(game, family, cp);
        const std::pair<bool, std::size_t> v{report.transversal, report.rank};
        if (membership) {
          ++comparisons;
          disagreements += (*membership != member) || (*verdict != v);
        } else {
          membership = member;
          verdict = v;
          // Constructed on the payoff surface (and the coordinate plane when chosen).
          const auto list = members(family);
          for (std::size_t e = 0; e < list.size(); ++e) {
            const bool expected = std::holds_alternative<PayoffDifference>(list[e]) ||
                                  (also_coordinate &&
                                   list[e] == HypersurfaceId{CoordinateHyperplane{c_player, c_index}});
            if (expected && !member[e]) ++disagreements;
          }
        }
      }
    }
  }
  std::ostringstream d;
  d << points << " on-surface points, " << comparisons << " chart pairs compared, "
    << disagreements << " disagreements";
  return {disagreements == 0 && comparisons > 0, d.str()};
}

// ---- 9 --------------------------------------------------------------------

Outcome degenerate_detection() {
  bool ok = true;
  std::ostringstream d;
  for (const char* name : {"duplicate_row.game", "zero.game"}) {
    std::ostringstream out, err;
    const int code = cli::run({"solve", data_file(name)}, out, err);
    const bool witnessed = out.str().find("non-generic: continuum detected") != std::string::npos &&
                           out.str().find("warning: ") != std::string::npos;
    ok = ok && code == cli::kExitDegenerate && witnessed;
    d << name << " exit " << code << (witnessed ? " with witness; " : " without witness; ");
  }
  std::ostringstream out, err;
  const int code = cli::run({"certify", data_file("duplicate_row.game"), "--point", "1/2,1/2;1/2,1/2"}, out, err);
  ok = ok && code == cli::kExitDegenerate;
  d << "certify exit " << code;
  return {ok, d.str()};
}

// ---- 10 -------------------------------------------------------------------

Outcome good_family_combinatorics() {
  std::size_t checked = 0, mismatches = 0;
  auto pairs_of = [](std::size_t n) {
    std::vector<Edge> all;
    for (std::size_t j = 0; j <= n; ++j)
      for (std::size_t k = j + 1; k <= n; ++k) all.push_back({j, k});
    return all;
  };
  auto subset = [](const std::vector<Edge>& all, unsigned mask) {
    std::vector<Edge> out;
    for (std::size_t e = 0; e < all.size(); ++e)
      if (mask >> e & 1u) out.push_back(all[e]);
    return out;
  };
  for (std::size_t n1 = 1; n1 <= 3; ++n1) {
    const auto a = pairs_of(n1);
    for (unsigned s = 0; s < (1u << a.size()); ++s) {
      GoodFamily f = GoodFamily::empty(1);
      f.R[0] = subset(a, s);
      ++checked;
      mismatches += is_good(f) != oracle::is_forest(f.R[0]);
      for (std::size_t n2 = 1; n2 <= 3; ++n2) {
        const auto b = pairs_of(n2);
        for (unsigned t = 0; t < (1u << b.size()); ++t) {
          GoodFamily g = GoodFamily::empty(2);
          g.R = {f.R[0], subset(b, t)};
          ++checked;
          mismatches += is_good(g) != (oracle::is_forest(g.R[0]) && oracle::is_forest(g.R[1]));
        }
      }
    }
  }
  return {mismatches == 0, std::to_string(checked) + " families, " + std::to_string(mismatches) +
                               " mismatches"};
}

template <class F>
bool report(int id, const std::string& name, double limit_seconds, F&& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o = check();
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = limit_seconds <= 0 || seconds <= limit_seconds;
  const bool pass = o.pass && in_time;
  std::printf("[%s] %2d %-32s %s (%.2fs%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), seconds, in_time ? "" : ", over time limit");
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main() {
  bool all = true;
  all &= report(1, "decomposition identities", 60, decomposition_identities);
  all &= report(2, "known-game equilibria", 1, known_games);
  all &= report(3, "grid-oracle completeness", 120, grid_completeness);

  OddnessStats stats;
  all &= report(4, "oddness and finiteness", 600, [&] {
    stats = oddness_runs();
    const double rate = static_cast<double>(stats.odd) / static_cast<double>(stats.runs);
    std::ostringstream d;
    d << stats.per_shape << "rate " << rate << ", unwarned exceptions " << stats.unwarned_exceptions
      << ", warned games " << stats.warned;
    return Outcome{rate >= 0.98 && stats.unwarned_exceptions == 0, d.str()};
  });
  all &= report(5, "regularity", 0, [&] {
    return Outcome{stats.runs > 0 && stats.nonregular_unwarned == 0,
                   std::to_string(stats.nonregular_unwarned) +
                       " non-regular equilibria in unwarned games"};
  });
  all &= report(6, "jacobian correctness", 0, jacobian_correctness);
  all &= report(7, "rank split equivalence", 0, rank_split);
  all &= report(8, "chart covariance", 0, chart_covariance);
  all &= report(9, "degenerate detection", 0, degenerate_detection);
  all &= report(10, "good-family combinatorics", 0, good_family_combinatorics);
  return all ? 0 : 1;
}
