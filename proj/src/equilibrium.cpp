#include "mixext/equilibrium.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "mixext/genericity.hpp"
#include "mixext/linalg.hpp"
#include "mixext/multilinear.hpp"

namespace mixext {
namespace {

template <class Scalar>
std::vector<LambdaDecomposition<Scalar>> all_lambdas(const FiniteGame& game) {
  std::vector<LambdaDecomposition<Scalar>> out;
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    out.push_back(lambda_decomposition<Scalar>(game, i));
  }
  return out;
}

template <class Scalar>
SupportProfile support_for_check(const MixedProfile<Scalar>& profile) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return support_of(profile);
  } else {
    return support_of(profile, kDefaultZeroTol);
  }
}

}  // namespace

template <class Scalar>
std::vector<BestReplyVerdict<Scalar>> best_reply_check(const FiniteGame& game,
                                                       const MixedProfile<Scalar>& profile,
                                                       double tol) {
  const std::size_t m = game.num_players();
  if (profile.num_players() != m) throw DimensionError("profile has the wrong player count");
  for (std::size_t i = 0; i < m; ++i) {
    if (profile.weights[i].size() != game.strategy_count(i)) {
      throw DimensionError("profile weights do not match strategy counts");
    }
  }
  const auto lambdas = all_lambdas<Scalar>(game);
  const auto augmented = augmented_coordinates(profile.weights);
  const SupportProfile support = support_for_check(profile);

  std::vector<BestReplyVerdict<Scalar>> verdicts;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<Scalar> values;
    for (const auto& form : lambdas[i].lambdas) {
      values.push_back(eval(form, restrict_to_blocks(form, augmented)));
    }
    const auto& supp = support.supports[i];
    BestReplyVerdict<Scalar> v;
    if (supp.empty()) {
      verdicts.push_back(v);
      continue;
    }
    Scalar lo = values[supp.front()];
    Scalar hi = lo;
    for (auto j : supp) {
      if (values[j] < lo) lo = values[j];
      if (values[j] > hi) hi = values[j];
    }
    v.equality_residual = hi - lo;
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (support.contains(i, k)) continue;
      Scalar gap = lo - values[k];
      if (!v.margin || gap < *v.margin) v.margin = gap;
    }
    if constexpr (std::is_same_v<Scalar, Rational>) {
      v.best_reply = is_zero(v.equality_residual) && (!v.margin || *v.margin >= 0);
    } else {
      v.best_reply = v.equality_residual <= tol && (!v.margin || *v.margin >= -tol);
    }
    verdicts.push_back(std::move(v));
  }
  return verdicts;
}

template std::vector<BestReplyVerdict<double>> best_reply_check(const FiniteGame&,
                                                                const MixedProfile<double>&,
                                                                double);
template std::vector<BestReplyVerdict<Rational>> best_reply_check(const FiniteGame&,
                                                                  const MixedProfile<Rational>&,
                                                                  double);

std::vector<SupportProfile> enumerate_supports(const std::vector<std::size_t>& strategy_counts) {
  std::vector<std::size_t> subset_counts;
  for (auto c : strategy_counts) subset_counts.push_back((std::size_t{1} << c) - 1);
  std::vector<SupportProfile> out;
  std::vector<std::size_t> index(strategy_counts.size(), 0);
  do {
    SupportProfile s;
    for (std::size_t i = 0; i < index.size(); ++i) {
      const std::size_t mask = index[i] + 1;
      std::vector<std::size_t> supp;
      for (std::size_t j = 0; j < strategy_counts[i]; ++j) {
        if (mask & (std::size_t{1} << j)) supp.push_back(j);
      }
      s.supports.push_back(std::move(supp));
    }
    out.push_back(std::move(s));
  } while (next_index(index, subset_counts));
  return out;
}

SupportSystem build_support_system(const SupportProfile& support) {
  SupportSystem system{support, {}, 0};
  for (std::size_t i = 0; i < support.supports.size(); ++i) {
    const auto& supp = support.supports[i];
    if (supp.empty()) throw std::invalid_argument("supports must be nonempty");
    system.unknowns += supp.size() - 1;
    for (std::size_t t = 1; t < supp.size(); ++t) {
      system.equations.push_back({i, supp.front(), supp[t]});
    }
  }
  return system;
}

namespace {

template <class Scalar>
bool strictly_positive(const Scalar& x, double zero_tol) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return sgn(x) > 0;
  } else {
    return x > zero_tol;
  }
}

// Two players: the equalities of player q are linear in player p's weights.
// For each p, the unknowns are gamma^p_t, t in supp_p, subject to the
// equalities of q and sum_t gamma^p_t = 1.
template <class Scalar>
SupportSolution<Scalar> solve_two_player(const FiniteGame& game, const SupportProfile& support,
                                         const SolverOptions& options) {
  const auto lambdas = all_lambdas<Scalar>(game);
  SupportSolution<Scalar> out;
  std::vector<std::vector<Scalar>> block_weights(2);
  bool any_kernel = false;
  std::vector<LinearSolution<Scalar>> solutions;

  for (std::size_t p = 0; p < 2; ++p) {
    const std::size_t q = 1 - p;
    const auto& supp_p = support.supports[p];
    const auto& supp_q = support.supports[q];
    DenseRows<Scalar> a;
    std::vector<Scalar> b;
    for (std::size_t t = 1; t < supp_q.size(); ++t) {
      // lambda^q_j - lambda^q_root as a form over player p's augmented coords.
      const auto diff = lambdas[q].lambdas[supp_q[t]] - lambdas[q].lambdas[supp_q.front()];
      std::vector<Scalar> row;
      for (auto s : supp_p) {
        // On A the constant slot becomes sum_t gamma_t.
        Scalar c = diff.coeffs[0];
        if (s >= 1) c += diff.coeffs[s];
        row.push_back(c);
      }
      a.push_back(std::move(row));
      b.push_back(Scalar(0));
    }
    a.push_back(std::vector<Scalar>(supp_p.size(), Scalar(1)));
    b.push_back(Scalar(1));
    auto sol = solve_linear(std::move(a), std::move(b), supp_p.size());
    if (!sol.consistent) return out;
    any_kernel = any_kernel || !sol.kernel.empty();
    solutions.push_back(std::move(sol));
  }

  for (std::size_t p = 0; p < 2; ++p) {
    const auto& sol = solutions[p];
    std::vector<Scalar> x = sol.particular;
    if (!sol.kernel.empty()) {
      // Representative: the point of the solution set closest to the face
      // centroid, x = x0 + N c with (N^T N) c = N^T (centroid - x0).
      const std::size_t n = x.size();
      const std::size_t k = sol.kernel.size();
      const Scalar centre = Scalar(1) / Scalar(static_cast<long>(n));
      DenseRows<Scalar> gram(k, std::vector<Scalar>(k, Scalar(0)));
      std::vector<Scalar> rhs(k, Scalar(0));
      for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
          for (std::size_t t = 0; t < n; ++t) gram[r][c] += sol.kernel[r][t] * sol.kernel[c][t];
        }
        for (std::size_t t = 0; t < n; ++t) rhs[r] += sol.kernel[r][t] * (centre - x[t]);
      }
      const auto coeffs = solve_linear(std::move(gram), std::move(rhs), k);
      for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t t = 0; t < n; ++t) x[t] += coeffs.particular[r] * sol.kernel[r][t];
      }
    }
    block_weights[p] = std::move(x);
  }

  out.singular = any_kernel;
  MixedProfile<Scalar> profile;
  for (std::size_t p = 0; p < 2; ++p) {
    std::vector<Scalar> w(game.strategy_count(p), Scalar(0));
    const auto& supp = support.supports[p];
    for (std::size_t t = 0; t < supp.size(); ++t) {
      if (!strictly_positive(block_weights[p][t], options.zero_tol)) return out;
      w[supp[t]] = block_weights[p][t];
    }
    profile.weights.push_back(std::move(w));
  }
  out.candidates.push_back(std::move(profile));
  return out;
}

// Face coordinates: per player, y_t = gamma_{supp[t+1]}; gamma_{supp[0]} = 1 - sum y.
struct Face {
  const SupportProfile* support;
  std::vector<std::size_t> counts;
  std::vector<std::size_t> offsets;
  std::size_t dimension = 0;

  Face(const SupportProfile& s, const std::vector<std::size_t>& c) : support(&s), counts(c) {
    for (const auto& supp : s.supports) {
      offsets.push_back(dimension);
      dimension += supp.size() - 1;
    }
  }

  std::vector<std::vector<double>> weights(const Eigen::VectorXd& y) const {
    std::vector<std::vector<double>> w;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const auto& supp = support->supports[i];
      std::vector<double> v(counts[i], 0.0);
      double rest = 1.0;
      for (std::size_t t = 1; t < supp.size(); ++t) {
        v[supp[t]] = y[static_cast<Eigen::Index>(offsets[i] + t - 1)];
        rest -= v[supp[t]];
      }
      v[supp.front()] = rest;
      w.push_back(std::move(v));
    }
    return w;
  }

  Eigen::VectorXd coordinates(const std::vector<std::vector<double>>& w) const {
    Eigen::VectorXd y(static_cast<Eigen::Index>(dimension));
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const auto& supp = support->supports[i];
      for (std::size_t t = 1; t < supp.size(); ++t) {
        y[static_cast<Eigen::Index>(offsets[i] + t - 1)] = w[i][supp[t]];
      }
    }
    return y;
  }
};

class NumericSystem {
 public:
  NumericSystem(const FiniteGame& game, const SupportProfile& support)
      : face_(support, game.strategy_counts()), system_(build_support_system(support)) {
    for (std::size_t i = 0; i < game.num_players(); ++i) {
      lambdas_.push_back(lambda_decomposition<double>(game, i));
    }
    for (const auto& e : system_.equations) {
      forms_.push_back(lambdas_[e.player].lambdas[e.other] - lambdas_[e.player].lambdas[e.root]);
    }
  }

  const Face& face() const { return face_; }
  std::size_t size() const { return system_.unknowns; }

  Eigen::VectorXd residual(const Eigen::VectorXd& y) const {
    const auto aug = augmented_coordinates(face_.weights(y));
    Eigen::VectorXd f(static_cast<Eigen::Index>(forms_.size()));
    for (std::size_t r = 0; r < forms_.size(); ++r) {
      f[static_cast<Eigen::Index>(r)] = eval(forms_[r], restrict_to_blocks(forms_[r], aug));
    }
    return f;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& y) const {
    const auto aug = augmented_coordinates(face_.weights(y));
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(forms_.size()), n);
    for (std::size_t r = 0; r < forms_.size(); ++r) {
      const auto at = restrict_to_blocks(forms_[r], aug);
      for (auto k : forms_[r].blocks) {
        const auto g = grad(forms_[r], at, k);
        const auto& supp = face_.support->supports[k];
        // d aug^k_s / d y_t = [s == supp[t+1]] - [s == supp[0]] for s >= 1.
        for (std::size_t t = 1; t < supp.size(); ++t) {
          double d = 0.0;
          if (supp[t] >= 1) d += g[supp[t]];
          if (supp.front() >= 1) d -= g[supp.front()];
          jac(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(face_.offsets[k] + t - 1)) = d;
        }
      }
    }
    return jac;
  }

 private:
  Face face_;
  SupportSystem system_;
  std::vector<LambdaDecomposition<double>> lambdas_;
  std::vector<MultilinearForm<double>> forms_;
};

std::vector<Eigen::VectorXd> start_points(const Face& face, const SolverOptions& options,
                                          std::uint64_t seed) {
  std::vector<std::vector<double>> centroid;
  for (std::size_t i = 0; i < face.counts.size(); ++i) {
    const auto& supp = face.support->supports[i];
    std::vector<double> v(face.counts[i], 0.0);
    for (auto j : supp) v[j] = 1.0 / static_cast<double>(supp.size());
    centroid.push_back(std::move(v));
  }
  std::vector<Eigen::VectorXd> starts{face.coordinates(centroid)};

  // Vertices of the face, each moved 0.1 of the way to the centroid.
  std::vector<std::size_t> sizes;
  for (const auto& supp : face.support->supports) sizes.push_back(supp.size());
  std::vector<std::size_t> pick(sizes.size(), 0);
  do {
    auto w = centroid;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const std::size_t vertex = face.support->supports[i][pick[i]];
      for (auto j : face.support->supports[i]) {
        w[i][j] = 0.9 * (j == vertex ? 1.0 : 0.0) + 0.1 * centroid[i][j];
      }
    }
    starts.push_back(face.coordinates(w));
  } while (next_index(pick, sizes));

  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> exponential(1.0);
  for (std::size_t r = 0; r < options.random_starts; ++r) {
    auto w = centroid;
    for (std::size_t i = 0; i < w.size(); ++i) {
      double total = 0.0;
      for (auto j : face.support->supports[i]) total += (w[i][j] = exponential(rng));
      for (auto j : face.support->supports[i]) w[i][j] /= total;
    }
    starts.push_back(face.coordinates(w));
  }
  return starts;
}

std::optional<Eigen::VectorXd> damped_newton(const NumericSystem& system, Eigen::VectorXd y,
                                             const SolverOptions& options) {
  Eigen::VectorXd f = system.residual(y);
  for (std::size_t it = 0; it <= options.max_iterations; ++it) {
    if (f.size() == 0 || f.lpNorm<Eigen::Infinity>() <= options.residual_tol) return y;
    if (it == options.max_iterations) break;
    const Eigen::MatrixXd jac = system.jacobian(y);
    const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(f);
    const double norm = f.norm();
    double t = 1.0;
    bool improved = false;
    while (t > 1e-6) {
      Eigen::VectorXd trial = y - t * step;
      Eigen::VectorXd ft = system.residual(trial);
      if (ft.allFinite() && ft.norm() < norm) {
        y = std::move(trial);
        f = std::move(ft);
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved || y.lpNorm<Eigen::Infinity>() > 1e8) break;
  }
  return std::nullopt;
}

std::uint64_t support_seed(std::uint64_t seed, const SupportProfile& support) {
  std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
  for (const auto& supp : support.supports) {
    std::uint64_t mask = 0;
    for (auto j : supp) mask |= std::uint64_t{1} << j;
    h = (h ^ (mask + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2))) * 0xbf58476d1ce4e5b9ULL;
  }
  return h;
}

SupportSolution<double> solve_numeric(const FiniteGame& game, const SupportProfile& support,
                                      const SolverOptions& options) {
  const NumericSystem system(game, support);
  SupportSolution<double> out;
  std::vector<Eigen::VectorXd> roots;
  for (const auto& start : start_points(system.face(), options, support_seed(options.seed, support))) {
    const auto root = damped_newton(system, start, options);
    if (!root) continue;
    const auto weights = system.face().weights(*root);
    bool inside = true;
    for (std::size_t i = 0; i < weights.size() && inside; ++i) {
      for (auto j : support.supports[i]) inside = inside && weights[i][j] > options.zero_tol;
    }
    if (!inside) continue;
    const bool duplicate = std::any_of(roots.begin(), roots.end(), [&](const Eigen::VectorXd& r) {
      return (r - *root).lpNorm<Eigen::Infinity>() <= options.dedup_distance;
    });
    if (duplicate) continue;
    roots.push_back(*root);
  }
  for (const auto& root : roots) {
    if (system.size() == 0) break;
    const Eigen::VectorXd sigma = singular_values(system.jacobian(root));
    if (numerical_rank(sigma, options.rank_tol) < system.size()) out.singular = true;
  }
  for (std::size_t a = 0; a < roots.size() && !out.continuum; ++a) {
    for (std::size_t b = a + 1; b < roots.size(); ++b) {
      const Eigen::VectorXd mid = 0.5 * (roots[a] + roots[b]);
      if (system.residual(mid).lpNorm<Eigen::Infinity>() <= options.residual_tol) {
        out.continuum = true;
        out.singular = true;
        break;
      }
    }
  }
  for (const auto& root : roots) {
    out.candidates.push_back(MixedProfile<double>{system.face().weights(root)});
  }
  return out;
}

}  // namespace

template <class Scalar>
SupportSolution<Scalar> solve_support(const FiniteGame& game, const SupportProfile& support,
                                      const SolverOptions& options) {
  if (support.num_players() != game.num_players()) {
    throw DimensionError("support has the wrong player count");
  }
  for (std::size_t i = 0; i < support.num_players(); ++i) {
    const auto& supp = support.supports[i];
    if (supp.empty() || !std::is_sorted(supp.begin(), supp.end()) ||
        supp.back() >= game.strategy_count(i) ||
        std::adjacent_find(supp.begin(), supp.end()) != supp.end()) {
      throw DimensionError("invalid support for player " + std::to_string(i + 1));
    }
  }
  if (game.num_players() == 2) return solve_two_player<Scalar>(game, support, options);
  if constexpr (std::is_same_v<Scalar, Rational>) {
    throw std::invalid_argument("exact support solving is only available for two players");
  } else {
    return solve_numeric(game, support, options);
  }
}

template SupportSolution<double> solve_support(const FiniteGame&, const SupportProfile&,
                                               const SolverOptions&);
template SupportSolution<Rational> solve_support(const FiniteGame&, const SupportProfile&,
                                                 const SolverOptions&);

template <class Scalar>
std::vector<Scalar> expected_payoffs(const FiniteGame& game, const MixedProfile<Scalar>& profile) {
  std::vector<Scalar> out;
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    out.push_back(eval(payoff_form<Scalar>(game, i), profile.weights));
  }
  return out;
}

template std::vector<double> expected_payoffs(const FiniteGame&, const MixedProfile<double>&);
template std::vector<Rational> expected_payoffs(const FiniteGame&, const MixedProfile<Rational>&);

namespace {

template <class Scalar>
void collect(const FiniteGame& game, const EnumerationOptions& options, NashResult& result) {
  const TransversalityOptions transversality{options.membership_tol, options.solver.rank_tol};
  for (const auto& support : enumerate_supports(game.strategy_counts())) {
    const auto solution = solve_support<Scalar>(game, support, options.solver);
    if (solution.singular) {
      result.warnings.push_back("singular support system at " + format_support(support));
    }
    bool continuum = solution.continuum;
    for (const auto& candidate : solution.candidates) {
      const auto verdicts = best_reply_check(game, candidate, options.best_reply_tol);
      if (!std::all_of(verdicts.begin(), verdicts.end(),
                       [](const auto& v) { return v.best_reply; })) {
        continue;
      }
      EquilibriumCertificate cert;
      if constexpr (std::is_same_v<Scalar, Rational>) {
        cert.exact_point = candidate;
        cert.point = to_double(candidate);
        cert.exact = true;
      } else {
        cert.point = candidate;
      }
      cert.support = support;
      for (const auto& v : verdicts) {
        cert.equality_residual = std::max(cert.equality_residual, to_double(v.equality_residual));
        if (v.margin) {
          const double margin = to_double(*v.margin);
          cert.inequality_margin =
              cert.inequality_margin ? std::min(*cert.inequality_margin, margin) : margin;
        }
      }
      cert.boundary_degenerate =
          cert.inequality_margin && std::fabs(*cert.inequality_margin) < options.boundary_tol;
      if (cert.boundary_degenerate) {
        result.warnings.push_back("boundary-degenerate equilibrium at " + format_support(support));
      }
      for (const auto& p : expected_payoffs(game, candidate)) cert.payoffs.push_back(to_double(p));
      const auto report = certify_equilibrium(game, cert, transversality);
      cert.jacobian = jacobian_verdict(report, game.dimension());
      if (solution.singular && game.num_players() == 2) {
        // A rank-deficient linear face whose representative is a strict
        // equilibrium carries a whole segment of equilibria.
        const bool strict = std::all_of(verdicts.begin(), verdicts.end(), [&](const auto& v) {
          return !v.margin || to_double(*v.margin) > options.boundary_tol;
        });
        continuum = continuum || strict;
      }
      result.equilibria.push_back(std::move(cert));
    }
    if (continuum) {
      result.continuum = true;
      result.warnings.push_back("non-generic: continuum detected at " + format_support(support));
    }
  }
}

bool lexicographically_less(const MixedProfile<double>& a, const MixedProfile<double>& b) {
  for (std::size_t i = 0; i < a.weights.size(); ++i) {
    for (std::size_t j = 0; j < a.weights[i].size(); ++j) {
      if (a.weights[i][j] != b.weights[i][j]) return a.weights[i][j] < b.weights[i][j];
    }
  }
  return false;
}

double distance(const MixedProfile<double>& a, const MixedProfile<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.weights.size(); ++i) {
    for (std::size_t j = 0; j < a.weights[i].size(); ++j) {
      d = std::max(d, std::fabs(a.weights[i][j] - b.weights[i][j]));
    }
  }
  return d;
}

}  // namespace

NashResult enumerate_nash(const FiniteGame& game, const EnumerationOptions& options) {
  NashResult result;
  result.exact = options.exact && game.exact() && game.num_players() == 2;
  if (result.exact) {
    collect<Rational>(game, options, result);
  } else {
    collect<double>(game, options, result);
  }
  std::vector<EquilibriumCertificate> unique;
  for (auto& cert : result.equilibria) {
    const bool duplicate = std::any_of(unique.begin(), unique.end(), [&](const auto& u) {
      if (cert.exact_point && u.exact_point) return *cert.exact_point == *u.exact_point;
      return distance(cert.point, u.point) <= options.solver.dedup_distance;
    });
    if (!duplicate) unique.push_back(std::move(cert));
  }
  std::sort(unique.begin(), unique.end(), [](const auto& a, const auto& b) {
    if (lexicographically_less(a.point, b.point)) return true;
    if (lexicographically_less(b.point, a.point)) return false;
    return a.support < b.support;
  });
  result.equilibria = std::move(unique);
  return result;
}

}  // namespace mixext
