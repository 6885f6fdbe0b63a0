#include "mixext/genericity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "mixext/linalg.hpp"

namespace mixext {

GoodFamily GoodFamily::empty(std::size_t num_players) {
  return GoodFamily{std::vector<std::vector<std::optional<std::size_t>>>(num_players),
                    std::vector<std::vector<Edge>>(num_players)};
}

std::optional<std::vector<std::size_t>> find_cycle(const std::vector<Edge>& edges) {
  // Union-find detects the closing edge; the cycle is that edge plus the tree
  // path between its endpoints.
  std::map<std::size_t, std::size_t> parent;
  std::function<std::size_t(std::size_t)> root = [&](std::size_t v) {
    if (!parent.count(v)) parent[v] = v;
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::map<std::size_t, std::vector<std::size_t>> tree;
  for (const auto& [a, b] : edges) {
    const std::size_t ra = root(a);
    const std::size_t rb = root(b);
    if (ra != rb) {
      parent[ra] = rb;
      tree[a].push_back(b);
      tree[b].push_back(a);
      continue;
    }
    if (a == b) return std::vector<std::size_t>{a};
    // Path from a to b in the forest built so far.
    std::map<std::size_t, std::size_t> previous{{a, a}};
    std::vector<std::size_t> stack{a};
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      if (v == b) break;
      for (auto w : tree[v]) {
        if (!previous.count(w)) {
          previous[w] = v;
          stack.push_back(w);
        }
      }
    }
    std::vector<std::size_t> cycle;
    for (std::size_t v = b; v != a; v = previous[v]) cycle.push_back(v);
    cycle.push_back(a);
    // Start at the smallest vertex, walking towards its smaller neighbour.
    std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
    if (cycle.size() > 2 && cycle.back() < cycle[1]) std::reverse(cycle.begin() + 1, cycle.end());
    return cycle;
  }
  return std::nullopt;
}

bool is_good(const GoodFamily& family) {
  return std::none_of(family.R.begin(), family.R.end(),
                      [](const auto& edges) { return find_cycle(edges).has_value(); });
}

void validate_family(const GoodFamily& family, const std::vector<std::size_t>& strategy_counts) {
  if (family.T.size() != strategy_counts.size() || family.R.size() != strategy_counts.size()) {
    throw DimensionError("family needs one T and one R entry per player");
  }
  for (const auto& h : members(family)) validate_hypersurface(h, strategy_counts);
}

std::vector<HypersurfaceId> members(const GoodFamily& family) {
  std::vector<HypersurfaceId> out;
  for (std::size_t i = 0; i < family.T.size(); ++i) {
    for (const auto& j : family.T[i]) out.emplace_back(CoordinateHyperplane{i, j});
  }
  for (std::size_t i = 0; i < family.R.size(); ++i) {
    for (const auto& [j, k] : family.R[i]) out.emplace_back(PayoffDifference{i, j, k});
  }
  return out;
}

GoodFamily equilibrium_family(const SupportProfile& support,
                              const std::vector<std::size_t>& strategy_counts) {
  GoodFamily family = GoodFamily::empty(strategy_counts.size());
  for (std::size_t i = 0; i < strategy_counts.size(); ++i) {
    for (std::size_t j = 0; j < strategy_counts[i]; ++j) {
      if (!support.contains(i, j)) family.T[i].push_back(j);
    }
    const auto& supp = support.supports[i];
    for (std::size_t t = 1; t < supp.size(); ++t) family.R[i].push_back({supp.front(), supp[t]});
  }
  return family;
}

TransversalityReport transversal_at(const FiniteGame& game,
                                    const std::vector<HypersurfaceId>& surfaces,
                                    const ChartPoint& point,
                                    const TransversalityOptions& options) {
  validate_chart(point.chart, game.strategy_counts());
  TransversalityReport report;
  report.chart = point.chart;
  report.point = point;
  std::vector<Eigen::VectorXd> rows;
  for (const auto& h : surfaces) {
    validate_hypersurface(h, game.strategy_counts());
    if (chart_excludes(point.chart, h)) continue;
    const DefiningMap map = defining_map(game, h, point.chart);
    if (std::fabs(map.normalized_value(point)) > options.membership_tol) continue;
    report.active.push_back(h);
    rows.push_back(map.gradient(point));
  }
  const auto dim = static_cast<Eigen::Index>(game.dimension());
  report.jacobian.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    report.jacobian.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  }
  const Eigen::VectorXd sigma = singular_values(report.jacobian);
  report.rank = numerical_rank(sigma, options.rank_tol);
  report.smallest_singular_value = smallest_row_singular_value(report.jacobian);
  report.transversal = report.rank == rows.size();
  return report;
}

TransversalityReport transversal_at(const FiniteGame& game, const GoodFamily& family,
                                    const ChartPoint& point,
                                    const TransversalityOptions& options) {
  validate_family(family, game.strategy_counts());
  return transversal_at(game, members(family), point, options);
}

TransversalityReport certify_equilibrium(const FiniteGame& game,
                                         const EquilibriumCertificate& certificate,
                                         const TransversalityOptions& options) {
  const GoodFamily family = equilibrium_family(certificate.support, game.strategy_counts());
  const ChartPoint point = chart_point_from_weights(certificate.point.weights,
                                                    standard_chart(game.num_players()));
  return transversal_at(game, family, point, options);
}

JacobianVerdict jacobian_verdict(const TransversalityReport& report, std::size_t dimension) {
  JacobianVerdict v;
  v.rank = report.rank;
  v.size = report.active.size();
  v.smallest_singular_value = report.smallest_singular_value;
  v.regular = report.transversal && report.active.size() == dimension;
  return v;
}

namespace {

// Affine parametrisation x = origin + basis * y of the face L in chart coordinates.
struct AffineFace {
  bool empty = false;
  Eigen::VectorXd origin;
  Eigen::MatrixXd basis;
};

AffineFace face_of(const FiniteGame& game, const GoodFamily& family, const ChartId& chart,
                   double rank_tol) {
  const auto dim = static_cast<Eigen::Index>(game.dimension());
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> offsets;
  ChartPoint zero = unflatten(Eigen::VectorXd::Zero(dim), chart, game.strategy_counts());
  for (std::size_t i = 0; i < family.T.size(); ++i) {
    for (const auto& j : family.T[i]) {
      const HypersurfaceId h = CoordinateHyperplane{i, j};
      const DefiningMap map = defining_map(game, h, chart);
      rows.push_back(map.gradient(zero));
      offsets.push_back(map.value(zero));
    }
  }
  AffineFace face;
  Eigen::MatrixXd c(static_cast<Eigen::Index>(rows.size()), dim);
  Eigen::VectorXd d(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    c.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    d[static_cast<Eigen::Index>(r)] = offsets[r];
  }
  if (rows.empty()) {
    face.origin = Eigen::VectorXd::Zero(dim);
    face.basis = Eigen::MatrixXd::Identity(dim, dim);
    return face;
  }
  // The coordinate rows are affine, so c x + d = 0 describes L exactly.
  face.origin = c.completeOrthogonalDecomposition().solve(-d);
  if ((c * face.origin + d).lpNorm<Eigen::Infinity>() > 1e-10) {
    face.empty = true;
    return face;
  }
  face.basis = null_space(c, rank_tol);
  return face;
}

}  // namespace

RegularValueReport regular_value_probe(const FiniteGame& game, const GoodFamily& family,
                                       const ChartId& chart, std::uint64_t seed,
                                       const ProbeOptions& options) {
  validate_chart(chart, game.strategy_counts());
  validate_family(family, game.strategy_counts());
  if (!is_good(family)) throw std::invalid_argument("regular_value_probe needs a good family");
  std::vector<DefiningMap> maps;
  for (std::size_t i = 0; i < family.R.size(); ++i) {
    for (const auto& [j, k] : family.R[i]) {
      maps.push_back(defining_map(game, PayoffDifference{i, j, k}, chart));
    }
  }
  if (maps.empty()) throw std::invalid_argument("regular_value_probe needs at least one edge");

  RegularValueReport report;
  report.chart = chart;
  report.equations = maps.size();
  const AffineFace face = face_of(game, family, chart, options.rank_tol);
  if (face.empty) {
    report.face_empty = true;
    return report;
  }
  report.face_dimension = static_cast<std::size_t>(face.basis.cols());
  const auto& counts = game.strategy_counts();

  auto point_at = [&](const Eigen::VectorXd& y) {
    return unflatten(face.origin + face.basis * y, chart, counts);
  };
  auto residual = [&](const Eigen::VectorXd& y) {
    const ChartPoint p = point_at(y);
    Eigen::VectorXd f(static_cast<Eigen::Index>(maps.size()));
    for (std::size_t r = 0; r < maps.size(); ++r) f[static_cast<Eigen::Index>(r)] = maps[r].value(p);
    return f;
  };
  auto jacobian = [&](const Eigen::VectorXd& y) {
    const ChartPoint p = point_at(y);
    Eigen::MatrixXd jx(static_cast<Eigen::Index>(maps.size()), static_cast<Eigen::Index>(game.dimension()));
    for (std::size_t r = 0; r < maps.size(); ++r) {
      jx.row(static_cast<Eigen::Index>(r)) = maps[r].gradient(p).transpose();
    }
    return Eigen::MatrixXd(jx * face.basis);
  };

  const Eigen::Index n = face.basis.cols();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::VectorXd> starts{Eigen::VectorXd::Zero(n)};
  for (std::size_t s = 0; s < options.starts; ++s) {
    Eigen::VectorXd y(n);
    for (Eigen::Index t = 0; t < n; ++t) y[t] = normal(rng);
    starts.push_back(std::move(y));
  }
  report.starts = starts.size();

  std::vector<Eigen::VectorXd> roots;
  for (Eigen::VectorXd y : starts) {
    Eigen::VectorXd f = residual(y);
    bool converged = false;
    for (std::size_t it = 0; it <= options.max_iterations; ++it) {
      if (f.lpNorm<Eigen::Infinity>() <= options.residual_tol) {
        converged = true;
        break;
      }
      if (it == options.max_iterations || n == 0) break;
      // Minimum-norm Gauss-Newton step with backtracking.
      const Eigen::VectorXd step = jacobian(y).completeOrthogonalDecomposition().solve(f);
      double t = 1.0;
      bool improved = false;
      while (t > 1e-6) {
        Eigen::VectorXd trial = y - t * step;
        Eigen::VectorXd ft = residual(trial);
        if (ft.allFinite() && ft.norm() < f.norm()) {
          y = std::move(trial);
          f = std::move(ft);
          improved = true;
          break;
        }
        t *= 0.5;
      }
      if (!improved) break;
    }
    if (!converged) continue;
    const bool duplicate = std::any_of(roots.begin(), roots.end(), [&](const auto& r) {
      return (r - y).template lpNorm<Eigen::Infinity>() <= options.dedup_distance;
    });
    if (!duplicate) roots.push_back(y);
  }

  for (const auto& y : roots) {
    ProbeRoot root;
    root.point = point_at(y);
    root.residual = residual(y).lpNorm<Eigen::Infinity>();
    const Eigen::MatrixXd jac = jacobian(y);
    root.rank = numerical_rank(singular_values(jac), options.rank_tol);
    root.smallest_singular_value = smallest_row_singular_value(jac);
    root.regular = root.rank == maps.size();
    report.degeneracy_witnessed = report.degeneracy_witnessed || !root.regular;
    report.roots.push_back(std::move(root));
  }
  return report;
}

bool rank_split_equivalence_test(const Eigen::MatrixXd& full_jacobian,
                                 std::size_t coordinate_rows, double rank_tol) {
  const Eigen::Index a = full_jacobian.rows();
  const Eigen::Index n = full_jacobian.cols();
  const auto b = static_cast<Eigen::Index>(coordinate_rows);
  if (b > a) throw DimensionError("more coordinate rows than rows");
  const Eigen::MatrixXd top = full_jacobian.topRows(b);
  if (numerical_rank(singular_values(top), rank_tol) != coordinate_rows) {
    throw std::invalid_argument("coordinate rows must be independent");
  }
  // New coordinates (top x, N^T x) with N an orthonormal kernel basis of top.
  // In them the top block reads [I 0] and the lower-right block is the
  // Jacobian of the remaining maps restricted to the common zero set.
  Eigen::MatrixXd change(n, n);
  change.topRows(b) = top;
  change.bottomRows(n - b) = null_space(top, rank_tol).transpose();
  const Eigen::MatrixXd straightened = full_jacobian * change.inverse();
  const Eigen::MatrixXd lower_right = straightened.bottomRightCorner(a - b, n - b);

  const bool stacked_full = numerical_rank(singular_values(full_jacobian), rank_tol) ==
                            static_cast<std::size_t>(a);
  const bool restricted_full = numerical_rank(singular_values(lower_right), rank_tol) ==
                               static_cast<std::size_t>(a - b);
  return stacked_full == restricted_full;
}

}  // namespace mixext
