#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "scl/diagnostics.hpp"
#include "scl/rng.hpp"
#include "scl/svd.hpp"

namespace {

scl::DenseMatrix random_matrix(std::size_t rows, std::size_t cols, scl::rng::Engine& eng) {
  scl::DenseMatrix m(rows, cols);
  for (double& v : m.data()) v = scl::rng::next_symmetric(eng, 1.0);
  return m;
}

}  // namespace

TEST_CASE("jacobi eigendecomposition reconstructs symmetric matrices") {
  scl::rng::Engine eng = scl::rng::make_engine(17);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + scl::rng::next_below(eng, 9);
    scl::DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = scl::rng::next_symmetric(eng, 2.0);

    const scl::SymmetricEigen eig = scl::jacobi_eigen_symmetric(a);
    for (std::size_t i = 0; i + 1 < n; ++i) CHECK(eig.values[i] >= eig.values[i + 1]);

    // A v = lambda v for each pair
    for (std::size_t col = 0; col < n; ++col) {
      for (std::size_t r = 0; r < n; ++r) {
        double av = 0.0;
        for (std::size_t c = 0; c < n; ++c) av += a(r, c) * eig.vectors(c, col);
        CHECK(av == Catch::Approx(eig.values[col] * eig.vectors(r, col)).margin(1e-8));
      }
    }
  }
}

TEST_CASE("rank-1 truncated svd recovers the unit direction with fixed sign") {
  const std::size_t n = 7, p = 4;
  std::vector<double> u(n), v(p);
  scl::rng::Engine eng = scl::rng::make_engine(3);
  double norm = 0.0;
  for (double& x : u) {
    x = scl::rng::next_symmetric(eng, 1.0);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double& x : u) x /= norm;
  for (double& x : v) x = scl::rng::next_symmetric(eng, 1.0);

  scl::DenseMatrix w(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) w(i, j) = u[i] * v[j];

  const scl::TruncatedSvd svd = scl::truncated_svd(w, 1);
  REQUIRE(svd.u.cols() == 1);
  // the column equals +-u; the sign convention forces the largest-magnitude
  // entry positive
  double sign = 0.0;
  std::size_t arg = 0;
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::fabs(u[i]) > best) {
      best = std::fabs(u[i]);
      arg = i;
    }
  sign = u[arg] > 0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < n; ++i)
    CHECK(svd.u(i, 0) == Catch::Approx(sign * u[i]).margin(1e-9));
  CHECK(svd.u(arg, 0) > 0.0);
}

TEST_CASE("identity matrix svd yields orthonormal columns spanning the basis") {
  scl::DenseMatrix eye(3, 3, 0.0);
  for (int i = 0; i < 3; ++i) eye(i, i) = 1.0;
  const scl::TruncatedSvd svd = scl::truncated_svd(eye, 2);
  REQUIRE(svd.u.cols() == 2);
  CHECK(scl::diagnostics::orthonormality_residual(svd.u) < 1e-10);
  for (double s : svd.singular_values) CHECK(s == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("truncated svd matches the reference eigensolver subspace") {
  scl::rng::Engine eng = scl::rng::make_engine(20);
  for (int trial = 0; trial < 8; ++trial) {
    const scl::DenseMatrix w = random_matrix(20, 8, eng);
    const std::size_t k = 3;
    const scl::TruncatedSvd svd = scl::truncated_svd(w, k);
    REQUIRE(svd.u.cols() == k);
    CHECK(scl::diagnostics::orthonormality_residual(svd.u) < 1e-8);
    for (std::size_t i = 0; i + 1 < svd.singular_values.size(); ++i)
      CHECK(svd.singular_values[i] >= svd.singular_values[i + 1]);

    // oracle route: reference eigensolver on the Gram matrix
    scl::DenseMatrix gram(8, 8, 0.0);
    for (std::size_t r = 0; r < 20; ++r)
      for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) gram(i, j) += w(r, i) * w(r, j);
    const scl::SymmetricEigen eig = scl::diagnostics::eigen_reference(gram);
    scl::DenseMatrix u_ref(20, k);
    for (std::size_t col = 0; col < k; ++col) {
      const double sigma = std::sqrt(std::max(eig.values[col], 0.0));
      for (std::size_t r = 0; r < 20; ++r) {
        double acc = 0.0;
        for (std::size_t j = 0; j < 8; ++j) acc += w(r, j) * eig.vectors(j, col);
        u_ref(r, col) = acc / sigma;
      }
    }
    CHECK(scl::diagnostics::max_principal_angle(svd.u, u_ref) < 1e-6);
  }
}

TEST_CASE("zero singular values are dropped and recorded") {
  // rank-1 matrix, k = 2: the second column has sigma ~ 0
  scl::DenseMatrix w(5, 3, 0.0);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) w(i, j) = static_cast<double>(i + 1);

  const scl::TruncatedSvd svd = scl::truncated_svd(w, 2);
  CHECK(svd.u.cols() == 1);
  CHECK(svd.dropped == 1);
  CHECK(svd.requested_k == 2);

  CHECK_THROWS_AS(scl::truncated_svd(w, 4), scl::InvalidArgument);
}

TEST_CASE("svd of orthogonal columns preserves their span") {
  // orthogonal full-rank W: the k = p projection spans the same subspace
  scl::DenseMatrix w(6, 3, 0.0);
  w(0, 0) = 2.0;
  w(2, 1) = 1.5;
  w(5, 2) = 1.0;
  const scl::TruncatedSvd svd = scl::truncated_svd(w, 3);
  REQUIRE(svd.u.cols() == 3);
  scl::DenseMatrix basis(6, 3, 0.0);
  basis(0, 0) = 1.0;
  basis(2, 1) = 1.0;
  basis(5, 2) = 1.0;
  CHECK(scl::diagnostics::max_principal_angle(svd.u, basis) < 1e-9);
}
