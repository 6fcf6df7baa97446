// Truncated SVD for small dense matrices.
//
// Route: eigendecomposition of the Gram matrix G = W^T W by cyclic Jacobi
// rotations (off-diagonal norm driven to 1e-10), then U_k = W V_k S_k^{-1}.
// Sized for the pivot-predictor weight matrices this library produces
// (columns = number of pivots, typically <= a few hundred), where Jacobi's
// O(p^3) per sweep is irrelevant and its accuracy is excellent.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "scl/error.hpp"
#include "scl/linalg.hpp"

namespace scl {

struct SymmetricEigen {
  std::vector<double> values;  // descending
  DenseMatrix vectors;         // column i pairs with values[i]
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix.
inline SymmetricEigen jacobi_eigen_symmetric(DenseMatrix a, double off_tol = 1e-10,
                                             int max_sweeps = 100) {
  const std::size_t n = a.rows();
  if (n != a.cols()) fail_arg("jacobi_eigen_symmetric: matrix is not square");

  DenseMatrix v(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  const auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < max_sweeps && off_norm() > off_tol; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = a(p, i) = c * aip - s * aiq;
          a(i, q) = a(q, i) = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  SymmetricEigen result;
  result.values.resize(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  result.vectors = DenseMatrix(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    result.values[col] = a(order[col], order[col]);
    for (std::size_t i = 0; i < n; ++i) result.vectors(i, col) = v(i, order[col]);
  }
  return result;
}

struct TruncatedSvd {
  DenseMatrix u;                        // rows(W) x kept, orthonormal columns
  std::vector<double> singular_values;  // non-increasing, parallel to u columns
  std::size_t requested_k = 0;
  std::size_t dropped = 0;  // columns dropped for (numerically) zero singular values
};

// Top-k left singular vectors of W. Columns whose singular value is
// numerically zero are dropped rather than fabricated, and the drop count is
// recorded. Sign convention: the largest-magnitude entry of each column is
// positive (first such entry wins ties).
inline TruncatedSvd truncated_svd(const DenseMatrix& w, std::size_t k) {
  const std::size_t n = w.rows();
  const std::size_t p = w.cols();
  if (k > std::min(n, p))
    fail_arg("truncated_svd: k = ", k, " exceeds min(", n, ", ", p, ")");

  DenseMatrix gram(p, p, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = w.row(r);
    for (std::size_t i = 0; i < p; ++i) {
      if (row[i] == 0.0) continue;
      for (std::size_t j = i; j < p; ++j) gram(i, j) += row[i] * row[j];
    }
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j) gram(i, j) = gram(j, i);

  const SymmetricEigen eig = jacobi_eigen_symmetric(std::move(gram));

  TruncatedSvd result;
  result.requested_k = k;
  // Rank test on the Gram eigenvalues: the Gram route squares the
  // conditioning, so a numerically-zero singular value shows up as an
  // eigenvalue at the eps * lambda_max noise floor.
  const double lambda_max = std::max(eig.values.empty() ? 0.0 : eig.values[0], 0.0);
  const double tol =
      static_cast<double>(std::max(n, p)) * std::numeric_limits<double>::epsilon() * lambda_max;

  for (std::size_t col = 0; col < k; ++col) {
    if (eig.values[col] <= tol) {
      ++result.dropped;
      continue;
    }
    result.singular_values.push_back(std::sqrt(eig.values[col]));
  }

  const std::size_t kept = result.singular_values.size();
  result.u = DenseMatrix(n, kept);
  std::size_t out_col = 0;
  for (std::size_t col = 0; col < k && out_col < kept; ++col) {
    if (eig.values[col] <= tol) continue;
    const double sigma = std::sqrt(eig.values[col]);
    for (std::size_t r = 0; r < n; ++r) {
      double acc = 0.0;
      const double* row = w.row(r);
      for (std::size_t j = 0; j < p; ++j) acc += row[j] * eig.vectors(j, col);
      result.u(r, out_col) = acc / sigma;
    }
    // sign convention
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      if (std::fabs(result.u(r, out_col)) > best) {
        best = std::fabs(result.u(r, out_col));
        arg = r;
      }
    }
    if (result.u(arg, out_col) < 0.0)
      for (std::size_t r = 0; r < n; ++r) result.u(r, out_col) = -result.u(r, out_col);
    ++out_col;
  }
  return result;
}

}  // namespace scl
