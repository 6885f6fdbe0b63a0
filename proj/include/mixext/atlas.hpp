#pragma once

// Affine charts of the product of projective spaces P(W^1) x ... x P(W^m),
// written in tilde coordinates. Chart l = (l_1, ..., l_m) is the set where
// tilde^i_{l_i} = 1 for every player; its coordinates are the remaining
// tilde entries of each player in ascending index order, player-major.
//
// Hypersurfaces carry the public labels:
//   C:i:j   gamma^i_j = 0 (bounding hyperplane of the simplex, j finite)
//   C:i:inf the hyperplane at infinity of player i
//   D:i:j:k Lambda^i_j - Lambda^i_k = 0, j < k
// Internally C:i:j (j >= 1) is tilde^i_j = 0, C:i:inf is tilde^i_0 = 0 and
// C:i:0 is tilde^i_0 - sum_{j>=1} tilde^i_j = 0.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mixext/game.hpp"
#include "mixext/multilinear.hpp"

namespace mixext {

struct ChartId {
  std::vector<std::size_t> l;
  friend bool operator==(const ChartId&, const ChartId&) = default;
  friend auto operator<=>(const ChartId&, const ChartId&) = default;
};

/// The standard chart 0 = (0, ..., 0), identified with the affine space A.
ChartId standard_chart(std::size_t num_players);
/// All prod_i (n_i + 1) charts in lexicographic order.
std::vector<ChartId> all_charts(const std::vector<std::size_t>& strategy_counts);
void validate_chart(const ChartId& chart, const std::vector<std::size_t>& strategy_counts);

struct ChartPoint {
  ChartId chart;
  std::vector<Eigen::VectorXd> coords;  // player i: n_i entries
};

/// Player i's tilde vector with 1 inserted at position l_i.
std::vector<Eigen::VectorXd> lift(const ChartPoint& point);
/// Reads a tilde tuple in `chart` after dividing each player by tilde^i_{l_i}.
ChartPoint chart_read(const std::vector<Eigen::VectorXd>& tilde, const ChartId& chart);
/// Same projective point in `target`. Throws DivisionByZero when some
/// tilde^i_{t_i} vanishes, i.e. the point lies outside the target chart.
ChartPoint transition(const ChartPoint& point, const ChartId& target);

/// A mixed profile (or any point of W with nonzero player vectors) in `chart`.
ChartPoint chart_point_from_weights(const std::vector<std::vector<double>>& weights,
                                    const ChartId& chart);
/// The flat coordinate vector used for Jacobians.
Eigen::VectorXd flatten(const ChartPoint& point);
ChartPoint unflatten(const Eigen::VectorXd& flat, const ChartId& chart,
                     const std::vector<std::size_t>& strategy_counts);

struct CoordinateHyperplane {
  std::size_t player = 0;
  std::optional<std::size_t> strategy;  // nullopt: the hyperplane at infinity
  friend bool operator==(const CoordinateHyperplane&, const CoordinateHyperplane&) = default;
};

struct PayoffDifference {
  std::size_t player = 0;
  std::size_t first = 0;
  std::size_t second = 1;
  friend bool operator==(const PayoffDifference&, const PayoffDifference&) = default;
};

using HypersurfaceId = std::variant<CoordinateHyperplane, PayoffDifference>;

/// `C:i:j`, `C:i:inf`, `D:i:j:k` with 1-based players.
std::string to_string(const HypersurfaceId& h);
HypersurfaceId parse_hypersurface(std::string_view text);
void validate_hypersurface(const HypersurfaceId& h,
                           const std::vector<std::size_t>& strategy_counts);

/// Index of the tilde coordinate whose vanishing defines a coordinate
/// hyperplane; nullopt for C:i:0, whose tilde form is not a single coordinate.
std::optional<std::size_t> tilde_index(const CoordinateHyperplane& h);
/// True when the hyperplane lies in the complement of the chart.
bool chart_excludes(const ChartId& chart, const HypersurfaceId& h);
/// The coordinate hyperplanes whose union is the complement of the chart.
std::vector<HypersurfaceId> chart_complement(const ChartId& chart);

/// Chart-local defining function: a homogeneous form in tilde coordinates
/// composed with the chart embedding.
class DefiningMap {
 public:
  DefiningMap(HypersurfaceId surface, ChartId chart, MultilinearForm<double> form,
              std::vector<std::size_t> strategy_counts);

  const HypersurfaceId& surface() const { return surface_; }
  const ChartId& chart() const { return chart_; }
  const MultilinearForm<double>& form() const { return form_; }
  /// Largest coefficient magnitude, used to normalise membership tests.
  double scale() const { return scale_; }

  double value(const ChartPoint& point) const;
  double normalized_value(const ChartPoint& point) const;
  /// Gradient with respect to the flat chart coordinates.
  Eigen::VectorXd gradient(const ChartPoint& point) const;

 private:
  HypersurfaceId surface_;
  ChartId chart_;
  MultilinearForm<double> form_;
  std::vector<std::size_t> counts_;
  double scale_;
};

/// Throws ChartExcludesHypersurface for a coordinate hyperplane outside the chart.
DefiningMap defining_map(const FiniteGame& game, const HypersurfaceId& h, const ChartId& chart);

inline constexpr double kDefaultMembershipTol = 1e-8;

/// |value| / max|coeff| <= tol; an identically zero form contains every point.
bool on_hypersurface(const FiniteGame& game, const HypersurfaceId& h, const ChartPoint& point,
                     double tol = kDefaultMembershipTol);

}  // namespace mixext
