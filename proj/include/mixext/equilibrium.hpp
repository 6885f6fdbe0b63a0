#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mixext/game.hpp"

namespace mixext {

/// Best-reply test for one player, following the lambda characterisation:
/// lambda_j equal on the support, and no larger off the support.
template <class Scalar>
struct BestReplyVerdict {
  bool best_reply = false;
  Scalar equality_residual{0};      // max |lambda_j - lambda_k|, j, k in support
  std::optional<Scalar> margin;     // min lambda_j - lambda_k, j in, k out; none if full support
};

/// `tol` is ignored for Rational profiles, which are checked exactly.
template <class Scalar>
std::vector<BestReplyVerdict<Scalar>> best_reply_check(const FiniteGame& game,
                                                       const MixedProfile<Scalar>& profile,
                                                       double tol = 1e-8);

/// Every combination of nonempty supports, players in order, each player's
/// subsets in increasing bitmask order.
std::vector<SupportProfile> enumerate_supports(const std::vector<std::size_t>& strategy_counts);

/// The square equality system attached to a support: for every player the
/// star tree pairs (min(supp), j), j in supp - {min(supp)}.
struct SupportSystem {
  SupportProfile support;
  struct Equation {
    std::size_t player;
    std::size_t root;   // min(supp_i)
    std::size_t other;  // j
  };
  std::vector<Equation> equations;
  std::size_t unknowns = 0;
};

SupportSystem build_support_system(const SupportProfile& support);

struct SolverOptions {
  double zero_tol = kDefaultZeroTol;       // strict positivity on the support
  double residual_tol = 1e-10;             // Newton convergence
  double rank_tol = 1e-8;                  // relative singular-value threshold
  double dedup_distance = 1e-6;
  std::size_t random_starts = 32;
  std::size_t max_iterations = 100;
  std::uint64_t seed = 0x5eed;
};

template <class Scalar>
struct SupportSolution {
  std::vector<MixedProfile<Scalar>> candidates;
  /// Rank-deficient system (or singular Newton root) on this face.
  bool singular = false;
  /// Two face roots whose midpoint also solves the system.
  bool continuum = false;
};

/// Solutions of the support system that are strictly positive on the support
/// and zero elsewhere. Two players: exact linear algebra in the scalar type.
/// Otherwise damped Newton from a deterministic multistart set (double only).
template <class Scalar>
SupportSolution<Scalar> solve_support(const FiniteGame& game, const SupportProfile& support,
                                      const SolverOptions& options = {});

struct JacobianVerdict {
  bool regular = false;
  std::size_t rank = 0;
  std::size_t size = 0;
  double smallest_singular_value = 0.0;
};

struct EquilibriumCertificate {
  MixedProfile<double> point;
  std::optional<MixedProfile<Rational>> exact_point;
  SupportProfile support;
  double equality_residual = 0.0;
  std::optional<double> inequality_margin;  // min over players; none if all supports full
  bool boundary_degenerate = false;
  JacobianVerdict jacobian;
  bool exact = false;
  std::vector<double> payoffs;  // V^i at the point
};

struct EnumerationOptions {
  SolverOptions solver;
  double best_reply_tol = 1e-8;
  double boundary_tol = 1e-8;
  double membership_tol = 1e-8;
  /// Use exact arithmetic when the game is in rational mode with two players.
  bool exact = true;
};

struct NashResult {
  std::vector<EquilibriumCertificate> equilibria;
  std::vector<std::string> warnings;
  bool continuum = false;
  bool exact = false;
};

/// All equilibria found over every support, deduplicated and sorted.
NashResult enumerate_nash(const FiniteGame& game, const EnumerationOptions& options = {});

/// V^i at a mixed profile (the multilinear extension of U^i).
template <class Scalar>
std::vector<Scalar> expected_payoffs(const FiniteGame& game, const MixedProfile<Scalar>& profile);

}  // namespace mixext
