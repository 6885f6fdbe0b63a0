#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mixext/errors.hpp"
#include "mixext/scalar.hpp"
#include "mixext/tensor.hpp"

namespace mixext {

/// A finite game in normal form. Player i has strategy_counts()[i] = n_i + 1
/// pure strategies; utility(i) is indexed by one pure strategy per player.
/// Immutable after construction.
class FiniteGame {
 public:
  FiniteGame(std::vector<std::size_t> strategy_counts,
             std::vector<Tensor<double>> utilities);
  FiniteGame(std::vector<std::size_t> strategy_counts,
             std::vector<Tensor<Rational>> utilities);

  NumericMode mode() const { return mode_; }
  bool exact() const { return mode_ == NumericMode::kRational; }
  std::size_t num_players() const { return counts_.size(); }
  const std::vector<std::size_t>& strategy_counts() const { return counts_; }
  std::size_t strategy_count(std::size_t player) const { return counts_.at(player); }
  /// Total dimension sum_i n_i of the strategy space.
  std::size_t dimension() const;

  /// Utility tensor of `player`. The Rational overload requires rational mode;
  /// the double overload is always available (converted in rational mode).
  template <class Scalar>
  const Tensor<Scalar>& utility(std::size_t player) const;

  const std::vector<std::vector<std::string>>& labels() const { return labels_; }
  FiniteGame with_labels(std::vector<std::vector<std::string>> labels) const;

  friend bool operator==(const FiniteGame& a, const FiniteGame& b);

 private:
  void validate_shapes(std::size_t tensor_count,
                       const std::vector<std::vector<std::size_t>>& shapes) const;

  NumericMode mode_;
  std::vector<std::size_t> counts_;
  std::vector<Tensor<double>> float_utilities_;
  std::vector<Tensor<Rational>> exact_utilities_;
  std::vector<std::vector<std::string>> labels_;
};

template <>
const Tensor<double>& FiniteGame::utility<double>(std::size_t player) const;
template <>
const Tensor<Rational>& FiniteGame::utility<Rational>(std::size_t player) const;

/// Builds a validated game from flat row-major payoff lists.
FiniteGame make_game(std::vector<std::size_t> strategy_counts,
                     const std::vector<std::vector<double>>& utilities);
FiniteGame make_game(std::vector<std::size_t> strategy_counts,
                     const std::vector<std::vector<Rational>>& utilities);

/// Per player weights (gamma^i_0, ..., gamma^i_{n_i}).
template <class Scalar>
struct MixedProfile {
  std::vector<std::vector<Scalar>> weights;

  std::size_t num_players() const { return weights.size(); }
  friend bool operator==(const MixedProfile&, const MixedProfile&) = default;
};

/// Sum-to-one per player (the affine space A). Exact for Rational.
template <class Scalar>
bool in_affine_span(const MixedProfile<Scalar>& profile, double tol = 1e-12);
/// Membership in the product of simplices G.
template <class Scalar>
bool in_simplex_product(const MixedProfile<Scalar>& profile, double tol = 1e-12);

MixedProfile<double> to_double(const MixedProfile<Rational>& profile);

/// Per player a nonempty ascending subset of {0, ..., n_i}.
struct SupportProfile {
  std::vector<std::vector<std::size_t>> supports;

  std::size_t num_players() const { return supports.size(); }
  bool contains(std::size_t player, std::size_t strategy) const;
  friend bool operator==(const SupportProfile&, const SupportProfile&) = default;
  friend auto operator<=>(const SupportProfile&, const SupportProfile&) = default;
};

inline constexpr double kDefaultZeroTol = 1e-9;

/// Indices with |gamma^i_j| > zero_tol. Rational profiles compare to exact zero.
SupportProfile support_of(const MixedProfile<double>& profile,
                          double zero_tol = kDefaultZeroTol);
SupportProfile support_of(const MixedProfile<Rational>& profile);

std::string format_support(const SupportProfile& support);

/// Reads the game file format. Decimals are exact in rational mode.
FiniteGame parse_game(std::string_view text, NumericMode mode = NumericMode::kFloat);
std::string serialize_game(const FiniteGame& game);

enum class Distribution { kUniform, kNormal };

/// I.i.d. utilities from uniform[-1,1] or N(0,1), reproducible from `seed`.
FiniteGame random_game(std::vector<std::size_t> strategy_counts, std::uint64_t seed,
                       Distribution distribution = Distribution::kUniform);

/// Parses shapes such as `2x3x2`; every count must be at least 2.
std::vector<std::size_t> parse_shape(std::string_view text);
std::string format_shape(const std::vector<std::size_t>& counts);

}  // namespace mixext
