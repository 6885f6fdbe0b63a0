#pragma once

// Multilinear forms over per-player coordinate blocks.
//
// A form over blocks B = {k_1 < ... < k_r} is the polynomial
//   sum_{s} coeffs[s_1, ..., s_r] * prod_t x^{k_t}_{s_t}
// in one coordinate vector x^k per participating player. Three coordinate
// systems share this representation:
//   * gamma       : the weights (gamma^k_0, ..., gamma^k_{n_k}) on W^k;
//   * tilde       : (sum_j gamma^k_j, gamma^k_1, ..., gamma^k_{n_k});
//   * augmented   : (1, gamma^k_1, ..., gamma^k_{n_k}) on the affine space A,
//                   so slot 0 carries the constant term of a multi-affine form.
// Augmented vectors are tilde vectors restricted to A, which is why forms
// obtained by affine substitution and by the tilde basis change agree there.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mixext/errors.hpp"
#include "mixext/game.hpp"
#include "mixext/tensor.hpp"

namespace mixext {

template <class Scalar>
struct MultilinearForm {
  std::optional<std::size_t> owner;  // player whose payoff this came from
  std::vector<std::size_t> blocks;   // participating players, ascending
  Tensor<Scalar> coeffs;             // one axis per block

  std::size_t arity() const { return blocks.size(); }
  /// Axis of `player` in coeffs, or nullopt when the form ignores that player.
  std::optional<std::size_t> axis_of(std::size_t player) const {
    auto it = std::find(blocks.begin(), blocks.end(), player);
    if (it == blocks.end()) return std::nullopt;
    return static_cast<std::size_t>(it - blocks.begin());
  }
  friend bool operator==(const MultilinearForm&, const MultilinearForm&) = default;
};

/// One coordinate vector per block of a form, in block order.
template <class Scalar>
using BlockPoint = std::vector<std::vector<Scalar>>;

/// (kappa, lambda_0 = 0, lambda_1, ..., lambda_n) for one player, as
/// multi-affine forms in the augmented coordinates of the other players.
template <class Scalar>
struct LambdaDecomposition {
  std::size_t player = 0;
  MultilinearForm<Scalar> kappa;
  std::vector<MultilinearForm<Scalar>> lambdas;
};

/// (K, Lambda_0 = 0, Lambda_1, ..., Lambda_n) for one player, as homogeneous
/// multilinear forms in the tilde coordinates of the other players.
template <class Scalar>
struct HomogeneousDecomposition {
  std::size_t player = 0;
  MultilinearForm<Scalar> K;
  std::vector<MultilinearForm<Scalar>> Lambdas;
};

template <class Scalar>
MultilinearForm<Scalar> zero_form(std::vector<std::size_t> blocks,
                                  const std::vector<std::size_t>& strategy_counts) {
  std::vector<std::size_t> shape;
  for (auto k : blocks) shape.push_back(strategy_counts.at(k));
  return MultilinearForm<Scalar>{std::nullopt, std::move(blocks), Tensor<Scalar>(shape)};
}

/// V^i_W in gamma coordinates: the coefficient tensor is U^i itself.
template <class Scalar>
MultilinearForm<Scalar> payoff_form(const FiniteGame& game, std::size_t player) {
  std::vector<std::size_t> blocks(game.num_players());
  for (std::size_t k = 0; k < blocks.size(); ++k) blocks[k] = k;
  return MultilinearForm<Scalar>{player, std::move(blocks), game.utility<Scalar>(player)};
}

/// Matrix M with gamma = M * tilde: row 0 is (1, -1, ..., -1), row j >= 1 is e_j.
template <class Scalar>
std::vector<std::vector<Scalar>> gamma_from_tilde(std::size_t size) {
  std::vector<std::vector<Scalar>> m(size, std::vector<Scalar>(size, Scalar(0)));
  m[0][0] = Scalar(1);
  for (std::size_t j = 1; j < size; ++j) {
    m[0][j] = Scalar(-1);
    m[j][j] = Scalar(1);
  }
  return m;
}

/// Inverse of gamma_from_tilde: row 0 is all ones, row j >= 1 is e_j.
template <class Scalar>
std::vector<std::vector<Scalar>> tilde_from_gamma(std::size_t size) {
  std::vector<std::vector<Scalar>> m(size, std::vector<Scalar>(size, Scalar(0)));
  for (std::size_t j = 0; j < size; ++j) m[0][j] = Scalar(1);
  for (std::size_t j = 1; j < size; ++j) m[j][j] = Scalar(1);
  return m;
}

template <class Scalar>
std::vector<Scalar> tilde_coordinates(std::span<const Scalar> gamma) {
  std::vector<Scalar> out(gamma.begin(), gamma.end());
  Scalar sum(0);
  for (const auto& x : gamma) sum += x;
  out[0] = sum;
  return out;
}

template <class Scalar>
std::vector<Scalar> gamma_coordinates(std::span<const Scalar> tilde) {
  std::vector<Scalar> out(tilde.begin(), tilde.end());
  Scalar rest(0);
  for (std::size_t j = 1; j < tilde.size(); ++j) rest += tilde[j];
  out[0] = tilde[0] - rest;
  return out;
}

namespace detail {

// Substituting x = M y into a form with coefficients c gives coefficients
// c'[s] = sum_j c[j] M[j][s] per axis.
template <class Scalar>
MultilinearForm<Scalar> substitute_all(const MultilinearForm<Scalar>& form,
                                       std::vector<std::vector<Scalar>> (*matrix)(std::size_t)) {
  MultilinearForm<Scalar> out = form;
  for (std::size_t a = 0; a < form.arity(); ++a) {
    out.coeffs = mode_product(out.coeffs, a, matrix(out.coeffs.extent(a)));
  }
  return out;
}

}  // namespace detail

/// The same polynomial expressed in tilde coordinates.
template <class Scalar>
MultilinearForm<Scalar> to_tilde_coordinates(const MultilinearForm<Scalar>& form) {
  return detail::substitute_all(form, &gamma_from_tilde<Scalar>);
}

template <class Scalar>
MultilinearForm<Scalar> from_tilde_coordinates(const MultilinearForm<Scalar>& form) {
  return detail::substitute_all(form, &tilde_from_gamma<Scalar>);
}

/// Substitutes gamma^k_0 = 1 - sum_{j>=1} gamma^k_j on one axis. The affine
/// map gamma^k = e_0 + B y (B has columns e_s - e_0) is applied as a constant
/// part, stored in slot 0, plus an (n_k+1) x n_k linear part in slots 1..n_k.
template <class Scalar>
Tensor<Scalar> affine_substitute(const Tensor<Scalar>& t, std::size_t axis) {
  const std::size_t n = t.extent(axis);
  const std::size_t inner = t.stride(axis);
  const std::size_t outer = t.size() / (inner * n);
  Tensor<Scalar> out(t.shape());
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t row = o * n * inner;
    for (std::size_t r = 0; r < inner; ++r) {
      const Scalar& constant = t[row + r];  // coefficient on gamma^k_0
      out[row + r] = constant;
      for (std::size_t s = 1; s < n; ++s) {
        out[row + s * inner + r] = t[row + s * inner + r] - constant;
      }
    }
  }
  return out;
}

/// kappa^i and lambda^i_j of V^i_A = kappa + sum_j gamma^i_j lambda_j, with
/// lambda_0 = 0. Forms live on the augmented coordinates of players != i.
template <class Scalar>
LambdaDecomposition<Scalar> lambda_decomposition(const FiniteGame& game, std::size_t player) {
  Tensor<Scalar> affine = game.utility<Scalar>(player);
  for (std::size_t k = 0; k < game.num_players(); ++k) affine = affine_substitute(affine, k);

  std::vector<std::size_t> others;
  for (std::size_t k = 0; k < game.num_players(); ++k) {
    if (k != player) others.push_back(k);
  }
  LambdaDecomposition<Scalar> out;
  out.player = player;
  out.kappa = MultilinearForm<Scalar>{player, others, slice(affine, player, 0)};
  out.lambdas.push_back(zero_form<Scalar>(others, game.strategy_counts()));
  out.lambdas.back().owner = player;
  for (std::size_t j = 1; j < game.strategy_count(player); ++j) {
    out.lambdas.push_back(MultilinearForm<Scalar>{player, others, slice(affine, player, j)});
  }
  return out;
}

/// K^i and Lambda^i_j as player-i slices of V^i_W in tilde coordinates.
template <class Scalar>
HomogeneousDecomposition<Scalar> homogeneous_decomposition(const FiniteGame& game,
                                                           std::size_t player) {
  const MultilinearForm<Scalar> tilde = to_tilde_coordinates(payoff_form<Scalar>(game, player));
  std::vector<std::size_t> others;
  for (std::size_t k = 0; k < game.num_players(); ++k) {
    if (k != player) others.push_back(k);
  }
  HomogeneousDecomposition<Scalar> out;
  out.player = player;
  out.K = MultilinearForm<Scalar>{player, others, slice(tilde.coeffs, player, 0)};
  out.Lambdas.push_back(zero_form<Scalar>(others, game.strategy_counts()));
  out.Lambdas.back().owner = player;
  for (std::size_t j = 1; j < game.strategy_count(player); ++j) {
    out.Lambdas.push_back(MultilinearForm<Scalar>{player, others, slice(tilde.coeffs, player, j)});
  }
  return out;
}

namespace detail {

template <class Scalar>
void check_point(const MultilinearForm<Scalar>& form, const BlockPoint<Scalar>& point) {
  if (point.size() != form.arity()) {
    throw DimensionError("form has " + std::to_string(form.arity()) + " blocks, point has " +
                         std::to_string(point.size()));
  }
  for (std::size_t a = 0; a < point.size(); ++a) {
    if (point[a].size() != form.coeffs.extent(a)) {
      throw DimensionError("block " + std::to_string(a) + " expects " +
                           std::to_string(form.coeffs.extent(a)) + " coordinates");
    }
  }
}

}  // namespace detail

template <class Scalar>
Scalar eval(const MultilinearForm<Scalar>& form, const BlockPoint<Scalar>& point) {
  detail::check_point(form, point);
  Tensor<Scalar> t = form.coeffs;
  for (std::size_t a = form.arity(); a-- > 0;) {
    t = contract_axis(t, a, std::span<const Scalar>(point[a]));
  }
  return t[0];
}

/// Gradient with respect to the coordinates of `player`: contraction with all
/// other blocks. Zero when the form does not depend on that player.
template <class Scalar>
std::vector<Scalar> grad(const MultilinearForm<Scalar>& form, const BlockPoint<Scalar>& point,
                         std::size_t player) {
  detail::check_point(form, point);
  const auto axis = form.axis_of(player);
  if (!axis) throw DimensionError("form does not depend on the requested block");
  Tensor<Scalar> t = form.coeffs;
  for (std::size_t a = form.arity(); a-- > 0;) {
    if (a == *axis) continue;
    t = contract_axis(t, a, std::span<const Scalar>(point[a]));
  }
  return t.data();
}

/// Picks the vectors of a form's blocks out of a full per-player point.
template <class Scalar>
BlockPoint<Scalar> restrict_to_blocks(const MultilinearForm<Scalar>& form,
                                      const std::vector<std::vector<Scalar>>& full) {
  BlockPoint<Scalar> out;
  out.reserve(form.arity());
  for (auto k : form.blocks) out.push_back(full.at(k));
  return out;
}

/// (1, gamma^k_1, ..., gamma^k_n) for each player of a mixed profile.
template <class Scalar>
std::vector<std::vector<Scalar>> augmented_coordinates(
    const std::vector<std::vector<Scalar>>& weights) {
  std::vector<std::vector<Scalar>> out = weights;
  for (auto& w : out) w[0] = Scalar(1);
  return out;
}

template <class Scalar>
MultilinearForm<Scalar> operator-(const MultilinearForm<Scalar>& a,
                                  const MultilinearForm<Scalar>& b) {
  if (a.blocks != b.blocks || a.coeffs.shape() != b.coeffs.shape()) {
    throw DimensionError("forms over different blocks");
  }
  MultilinearForm<Scalar> out = a;
  for (std::size_t k = 0; k < out.coeffs.size(); ++k) out.coeffs[k] -= b.coeffs[k];
  return out;
}

template <class Scalar>
MultilinearForm<Scalar> operator+(const MultilinearForm<Scalar>& a,
                                  const MultilinearForm<Scalar>& b) {
  if (a.blocks != b.blocks || a.coeffs.shape() != b.coeffs.shape()) {
    throw DimensionError("forms over different blocks");
  }
  MultilinearForm<Scalar> out = a;
  for (std::size_t k = 0; k < out.coeffs.size(); ++k) out.coeffs[k] += b.coeffs[k];
  return out;
}

template <class Scalar>
MultilinearForm<Scalar> operator*(const Scalar& s, const MultilinearForm<Scalar>& a) {
  MultilinearForm<Scalar> out = a;
  for (auto& c : out.coeffs.data()) c *= s;
  return out;
}

template <class Scalar>
double max_abs_coeff(const MultilinearForm<Scalar>& form) {
  double m = 0.0;
  for (const auto& c : form.coeffs.data()) m = std::max(m, to_double(abs_value(c)));
  return m;
}

template <class Scalar>
bool is_zero_form(const MultilinearForm<Scalar>& form) {
  return std::all_of(form.coeffs.data().begin(), form.coeffs.data().end(),
                     [](const Scalar& c) { return is_zero(c); });
}

MultilinearForm<double> to_double(const MultilinearForm<Rational>& form);

}  // namespace mixext
