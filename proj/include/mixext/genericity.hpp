#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mixext/atlas.hpp"
#include "mixext/equilibrium.hpp"
#include "mixext/game.hpp"

namespace mixext {

using Edge = std::pair<std::size_t, std::size_t>;

/// A selection of hypersurfaces: coordinate hyperplanes C:i:j for j in T^i
/// (nullopt = infinity) and payoff differences D:i:j:k for (j, k) in R^i.
struct GoodFamily {
  std::vector<std::vector<std::optional<std::size_t>>> T;
  std::vector<std::vector<Edge>> R;

  static GoodFamily empty(std::size_t num_players);
  std::size_t num_players() const { return T.size(); }
};

/// Vertices of one cycle in the graph, or nullopt when it is a forest.
std::optional<std::vector<std::size_t>> find_cycle(const std::vector<Edge>& edges);

/// True when every (J^i_0, R^i) is a forest.
bool is_good(const GoodFamily& family);

void validate_family(const GoodFamily& family, const std::vector<std::size_t>& strategy_counts);
std::vector<HypersurfaceId> members(const GoodFamily& family);

/// T^i = J^i_0 - supp_i and R^i = star tree rooted at min(supp_i).
GoodFamily equilibrium_family(const SupportProfile& support,
                              const std::vector<std::size_t>& strategy_counts);

struct TransversalityOptions {
  double membership_tol = kDefaultMembershipTol;
  double rank_tol = 1e-8;
};

struct TransversalityReport {
  ChartId chart;
  ChartPoint point;
  std::vector<HypersurfaceId> active;
  Eigen::MatrixXd jacobian;  // one gradient row per active hypersurface
  std::size_t rank = 0;
  double smallest_singular_value = 0.0;  // infinity when nothing is active
  bool transversal = false;
};

/// Transversality of the members through `point`. Members excluded from the
/// point's chart cannot contain it and are skipped; inactive members are
/// ignored.
TransversalityReport transversal_at(const FiniteGame& game,
                                    const std::vector<HypersurfaceId>& surfaces,
                                    const ChartPoint& point,
                                    const TransversalityOptions& options = {});
TransversalityReport transversal_at(const FiniteGame& game, const GoodFamily& family,
                                    const ChartPoint& point,
                                    const TransversalityOptions& options = {});

/// Jacobian of the equilibrium family at the equilibrium in the standard chart.
TransversalityReport certify_equilibrium(const FiniteGame& game,
                                         const EquilibriumCertificate& certificate,
                                         const TransversalityOptions& options = {});
/// Regular when every member is active and the square Jacobian has full rank.
JacobianVerdict jacobian_verdict(const TransversalityReport& report, std::size_t dimension);

struct ProbeRoot {
  ChartPoint point;
  double residual = 0.0;
  std::size_t rank = 0;
  double smallest_singular_value = 0.0;
  bool regular = false;
};

struct RegularValueReport {
  ChartId chart;
  std::size_t face_dimension = 0;  // dim L
  std::size_t equations = 0;       // sum_i |R^i|
  bool face_empty = false;
  std::size_t starts = 0;
  std::vector<ProbeRoot> roots;
  bool degeneracy_witnessed = false;
};

struct ProbeOptions {
  std::size_t starts = 32;
  std::size_t max_iterations = 100;
  double residual_tol = 1e-10;
  double rank_tol = 1e-8;
  double dedup_distance = 1e-6;
};

/// Restricts the payoff-difference maps of the family to the face L cut out by
/// its coordinate hyperplanes in `chart`, searches for zeros of the restricted
/// map by multistart Gauss-Newton and checks surjectivity of its differential
/// at every root found. Requires a good family with at least one edge and no
/// coordinate hyperplane excluded by the chart.
RegularValueReport regular_value_probe(const FiniteGame& game, const GoodFamily& family,
                                       const ChartId& chart, std::uint64_t seed,
                                       const ProbeOptions& options = {});

/// Checks that full rank of `full_jacobian` is equivalent to full rank of the
/// lower-right block obtained after straightening its first
/// `coordinate_rows` rows (which must be independent) to [I 0].
bool rank_split_equivalence_test(const Eigen::MatrixXd& full_jacobian,
                                 std::size_t coordinate_rows, double rank_tol = 1e-8);

}  // namespace mixext
