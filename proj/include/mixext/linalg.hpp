#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <limits>
#include <type_traits>
#include <vector>

#include "mixext/scalar.hpp"

namespace mixext {

template <class Scalar>
using DenseRows = std::vector<std::vector<Scalar>>;

/// Solution set of A x = b: x = particular + span(kernel).
template <class Scalar>
struct LinearSolution {
  bool consistent = false;
  std::size_t rank = 0;
  std::vector<Scalar> particular;
  DenseRows<Scalar> kernel;  // one basis vector per free variable
};

/// Gauss-Jordan elimination on [A | b]. Exact for Rational; for double a pivot
/// counts as zero when below `rel_tol` times the largest entry of A.
template <class Scalar>
LinearSolution<Scalar> solve_linear(DenseRows<Scalar> a, std::vector<Scalar> b,
                                    std::size_t cols, double rel_tol = 1e-12) {
  const std::size_t rows = a.size();
  double scale = 0.0;
  for (const auto& row : a) {
    for (const auto& x : row) scale = std::max(scale, to_double(abs_value(x)));
  }
  const double threshold = rel_tol * std::max(scale, 1e-300);
  auto negligible = [&](const Scalar& x) {
    if constexpr (std::is_same_v<Scalar, Rational>) {
      return is_zero(x);
    } else {
      return std::fabs(x) <= threshold;
    }
  };

  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t best = rows;
    for (std::size_t i = r; i < rows; ++i) {
      if (negligible(a[i][c])) continue;
      if (best == rows || to_double(abs_value(a[i][c])) > to_double(abs_value(a[best][c]))) {
        best = i;
        if constexpr (std::is_same_v<Scalar, Rational>) break;
      }
    }
    if (best == rows) continue;
    std::swap(a[r], a[best]);
    std::swap(b[r], b[best]);
    const Scalar pivot = a[r][c];
    for (std::size_t k = c; k < cols; ++k) a[r][k] /= pivot;
    b[r] /= pivot;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || is_zero(a[i][c])) continue;
      const Scalar factor = a[i][c];
      for (std::size_t k = c; k < cols; ++k) a[i][k] -= factor * a[r][k];
      b[i] -= factor * b[r];
    }
    pivot_cols.push_back(c);
    ++r;
  }

  LinearSolution<Scalar> out;
  out.rank = r;
  double b_scale = 0.0;
  for (const auto& x : b) b_scale = std::max(b_scale, to_double(abs_value(x)));
  out.consistent = true;
  for (std::size_t i = r; i < rows; ++i) {
    if constexpr (std::is_same_v<Scalar, Rational>) {
      if (!is_zero(b[i])) out.consistent = false;
    } else {
      if (std::fabs(b[i]) > rel_tol * std::max({scale, b_scale, 1.0}) * 16) {
        out.consistent = false;
      }
    }
  }
  out.particular.assign(cols, Scalar(0));
  for (std::size_t i = 0; i < r; ++i) out.particular[pivot_cols[i]] = b[i];

  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivot_cols) is_pivot[c] = true;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Scalar> v(cols, Scalar(0));
    v[f] = Scalar(1);
    for (std::size_t i = 0; i < r; ++i) v[pivot_cols[i]] = -a[i][f];
    out.kernel.push_back(std::move(v));
  }
  return out;
}

/// Singular values of `m` in descending order; empty matrices give none.
inline Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return Eigen::VectorXd(0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues();
}

/// Rank with singular values <= rel_tol * max(1, sigma_max) treated as zero.
inline std::size_t numerical_rank(const Eigen::VectorXd& sigma, double rel_tol) {
  if (sigma.size() == 0) return 0;
  const double threshold = rel_tol * std::max(1.0, sigma.maxCoeff());
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > threshold) ++r;
  }
  return r;
}

/// The `rows`-th singular value of a rows x cols matrix (zero when rows > cols),
/// i.e. the one that decides whether the rows are independent.
inline double smallest_row_singular_value(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return std::numeric_limits<double>::infinity();
  if (m.rows() > m.cols()) return 0.0;
  return singular_values(m)[m.rows() - 1];
}

/// Orthonormal basis of the null space of `m` as columns.
inline Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.rows() == 0) return Eigen::MatrixXd::Identity(m.cols(), m.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const std::size_t r = numerical_rank(svd.singularValues(), rel_tol);
  return svd.matrixV().rightCols(m.cols() - static_cast<Eigen::Index>(r));
}

}  // namespace mixext
