// Independent reference implementations used to cross-check the production
// numerics. Everything here deliberately takes a different route from the
// code it validates:
//
//   * dense straight-line forward/loss reference vs. the sparse fused pass
//   * central finite differences vs. analytic gradients
//   * entropy-identity mutual information vs. the plugin-sum implementation
//   * Householder tridiagonalization + QL eigensolver vs. Jacobi SVD
//   * adaptive-Simpson t-distribution tail vs. the incomplete-beta CDF
//
// The `scl selfcheck` command runs compact versions of these suites; the
// acceptance tests run the full-size versions.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "scl/linalg.hpp"
#include "scl/neural.hpp"
#include "scl/pivot.hpp"
#include "scl/rng.hpp"
#include "scl/stats.hpp"
#include "scl/svd.hpp"

namespace scl::diagnostics {

// ---------------------------------------------------------------------------
// Dense reference model
// ---------------------------------------------------------------------------

struct DenseForwardReference {
  std::vector<double> hidden;
  double task_prob = 0.5;
  std::vector<double> pivot_probs;
};

// Plain dense matrix-vector evaluation of the model, written against the
// logical d x n weight orientation.
inline DenseForwardReference dense_forward_reference(const JointModelParams& params,
                                                     const std::vector<double>& x) {
  DenseForwardReference out;
  out.hidden.assign(params.d, 0.0);
  for (std::size_t i = 0; i < params.d; ++i) {
    double z = params.has_bias ? params.b_h[i] : 0.0;
    for (std::size_t j = 0; j < params.n; ++j) z += params.w_h(j, i) * x[j];
    if (params.hidden_activation == Activation::relu)
      out.hidden[i] = z > 0.0 ? z : 0.0;
    else
      out.hidden[i] = 1.0 / (1.0 + std::exp(-z));
  }
  double zt = params.b_t;
  for (std::size_t i = 0; i < params.d; ++i) zt += params.w_t[i] * out.hidden[i];
  out.task_prob = 1.0 / (1.0 + std::exp(-zt));
  out.pivot_probs.assign(params.p, 0.0);
  for (std::size_t k = 0; k < params.p; ++k) {
    double zp = params.has_bias ? params.b_p[k] : 0.0;
    for (std::size_t i = 0; i < params.d; ++i) zp += params.w_p(k, i) * out.hidden[i];
    out.pivot_probs[k] = 1.0 / (1.0 + std::exp(-zp));
  }
  return out;
}

// Scalar-by-scalar objective reference: dense forward, textbook BCE, explicit
// double loop over rows and pivots.
inline double dense_loss_reference(const JointModelParams& params, const Minibatch& batch,
                                   const PivotSet& pivots, double lambda, double rho) {
  double loss = 0.0;
  for (std::size_t r = 0; r < batch.rows.size(); ++r) {
    const SparseVector& sparse = *batch.rows[r];
    std::vector<double> x(params.n, 0.0);
    for (std::uint32_t j : sparse.indices) x[j] = 1.0;
    const DenseForwardReference fwd = dense_forward_reference(params, x);
    if (batch.labels[r].has_value()) {
      const double y = static_cast<double>(*batch.labels[r]);
      loss += -(y * std::log(fwd.task_prob) + (1.0 - y) * std::log(1.0 - fwd.task_prob));
    }
    for (std::size_t k = 0; k < params.p; ++k) {
      const double target = x[pivots.indices[k]];
      loss += lambda * -(target * std::log(fwd.pivot_probs[k]) +
                         (1.0 - target) * std::log(1.0 - fwd.pivot_probs[k]));
    }
  }
  double sq = 0.0;
  for (double v : params.w_h.data()) sq += v * v;
  for (double v : params.w_t) sq += v * v;
  for (double v : params.w_p.data()) sq += v * v;
  for (double v : params.b_h) sq += v * v;
  for (double v : params.b_p) sq += v * v;
  sq += params.b_t * params.b_t;
  return loss + rho * 0.5 * sq;
}

// ---------------------------------------------------------------------------
// Finite-difference gradient check
// ---------------------------------------------------------------------------

inline std::vector<double*> parameter_entries(JointModelParams& params) {
  std::vector<double*> entries;
  for (double& v : params.w_h.data()) entries.push_back(&v);
  for (double& v : params.w_t) entries.push_back(&v);
  for (double& v : params.w_p.data()) entries.push_back(&v);
  if (params.has_bias) {
    for (double& v : params.b_h) entries.push_back(&v);
    entries.push_back(&params.b_t);
    for (double& v : params.b_p) entries.push_back(&v);
  }
  return entries;
}

inline std::vector<double> gradient_entries(const JointGradients& grads, bool has_bias) {
  std::vector<double> entries;
  for (double v : grads.w_h.data()) entries.push_back(v);
  for (double v : grads.w_t) entries.push_back(v);
  for (double v : grads.w_p.data()) entries.push_back(v);
  if (has_bias) {
    for (double v : grads.b_h) entries.push_back(v);
    entries.push_back(grads.b_t);
    for (double v : grads.b_p) entries.push_back(v);
  }
  return entries;
}

struct GradientCheck {
  double worst_ratio = 0.0;  // |analytic - fd| / max(abs_floor, rel_tol*scale); <= 1 passes
  std::size_t entries = 0;
  bool pass() const { return worst_ratio <= 1.0; }
};

// Central finite differences of joint_loss against joint_gradients, entry by
// entry. Tolerance rule: |a - f| <= max(abs_floor, rel_tol * max(|a|, |f|)).
inline GradientCheck check_joint_gradients(JointModelParams params, const Minibatch& batch,
                                           const PivotSet& pivots, double lambda, double rho,
                                           bool mask_pivot_inputs = false, double step = 1e-5,
                                           double rel_tol = 1e-4, double abs_floor = 1e-7) {
  const JointGradients analytic =
      joint_gradients(params, batch, pivots, lambda, rho, mask_pivot_inputs);
  const std::vector<double> analytic_flat = gradient_entries(analytic, params.has_bias);
  const std::vector<double*> entries = parameter_entries(params);

  GradientCheck result;
  result.entries = entries.size();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double saved = *entries[i];
    *entries[i] = saved + step;
    const double up = joint_loss(params, batch, pivots, lambda, rho, mask_pivot_inputs);
    *entries[i] = saved - step;
    const double down = joint_loss(params, batch, pivots, lambda, rho, mask_pivot_inputs);
    *entries[i] = saved;
    const double fd = (up - down) / (2.0 * step);
    const double a = analytic_flat[i];
    const double allowed = std::max(abs_floor, rel_tol * std::max(std::fabs(a), std::fabs(fd)));
    result.worst_ratio = std::max(result.worst_ratio, std::fabs(a - fd) / allowed);
  }
  return result;
}

// Random instance generator shared by the gradient suites: small net, mixed
// labeled/unlabeled batch of random sparse rows.
struct RandomInstance {
  JointModelParams params;
  std::vector<SparseVector> rows;
  Minibatch batch;
  PivotSet pivots;
  double lambda = 0.0;
  double rho = 0.0;
};

inline RandomInstance random_joint_instance(rng::Engine& eng, bool allow_bias = true,
                                            bool allow_sigmoid = true) {
  RandomInstance inst;
  const std::size_t n = 2 + rng::next_below(eng, 9);   // 2..10
  const std::size_t d = 1 + rng::next_below(eng, 6);   // 1..6
  const std::size_t p = 1 + rng::next_below(eng, std::min<std::uint64_t>(3, n));
  const Activation act = (allow_sigmoid && rng::next_bernoulli(eng, 0.3)) ? Activation::sigmoid
                                                                          : Activation::relu;
  const bool bias = allow_bias && rng::next_bernoulli(eng, 0.3);
  inst.params = init_weights(n, d, p, eng(), act, bias);
  if (bias) {
    for (double& b : inst.params.b_h) b = rng::next_symmetric(eng, 0.5);
    for (double& b : inst.params.b_p) b = rng::next_symmetric(eng, 0.5);
    inst.params.b_t = rng::next_symmetric(eng, 0.5);
  }

  inst.pivots.strategy = PivotStrategy::mi_source;
  for (std::size_t j : rng::sample_without_replacement(n, p, eng))
    inst.pivots.indices.push_back(static_cast<std::uint32_t>(j));
  inst.pivots.scores.assign(p, 0.0);
  inst.pivots.requested = p;

  const double lambdas[] = {0.0, 1.0, 100.0};
  const double rhos[] = {0.0, 0.1};
  inst.lambda = lambdas[rng::next_below(eng, 3)];
  inst.rho = rhos[rng::next_below(eng, 2)];

  const std::size_t rows = 1 + rng::next_below(eng, 4);
  inst.rows.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    SparseVector x;
    x.dim = n;
    for (std::uint32_t j = 0; j < n; ++j)
      if (rng::next_bernoulli(eng, 0.4)) x.indices.push_back(j);
    inst.rows.push_back(std::move(x));
  }
  for (const SparseVector& x : inst.rows) {
    const bool labeled = rng::next_bernoulli(eng, 0.6);
    inst.batch.add(x, labeled ? std::optional<int>(static_cast<int>(rng::next_below(eng, 2)))
                              : std::nullopt);
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Mutual information, entropy route
// ---------------------------------------------------------------------------

inline double mi_reference_from_counts(std::uint64_t n11, std::uint64_t n10, std::uint64_t n01,
                                       std::uint64_t n00) {
  const double n = static_cast<double>(n11 + n10 + n01 + n00);
  if (n == 0.0) return 0.0;
  const auto h = [&](std::initializer_list<double> probs) {
    double s = 0.0;
    for (double p : probs)
      if (p > 0.0) s -= p * std::log(p);
    return s;
  };
  const double p11 = n11 / n, p10 = n10 / n, p01 = n01 / n, p00 = n00 / n;
  const double hf = h({p11 + p10, p01 + p00});
  const double hy = h({p11 + p01, p10 + p00});
  const double hfy = h({p11, p10, p01, p00});
  return hf + hy - hfy;
}

// ---------------------------------------------------------------------------
// Symmetric eigensolver (Householder + QL with implicit shifts)
// ---------------------------------------------------------------------------

namespace detail {

inline void tred2(DenseMatrix& a, std::vector<double>& d, std::vector<double>& e) {
  const int n = static_cast<int>(a.rows());
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (int i = n - 1; i >= 1; --i) {
    const int l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (int k = 0; k <= l; ++k) scale += std::fabs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          a(j, i) = a(i, j) / h;
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (int k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        const double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k) a(j, k) -= f * e[k] + g * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    const int l = i - 1;
    if (d[i] != 0.0) {
      for (int j = 0; j <= l; ++j) {
        double g = 0.0;
        for (int k = 0; k <= l; ++k) g += a(i, k) * a(k, j);
        for (int k = 0; k <= l; ++k) a(k, j) -= g * a(k, i);
      }
    }
    d[i] = a(i, i);
    a(i, i) = 1.0;
    for (int j = 0; j <= l; ++j) a(j, i) = a(i, j) = 0.0;
  }
}

inline void tqli(std::vector<double>& d, std::vector<double>& e, DenseMatrix& z) {
  const int n = static_cast<int>(d.size());
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (iter++ == 60) fail_arg("tqli: too many iterations");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::fabs(r) : -std::fabs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        int i = m - 1;
        bool underflow = false;
        for (; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
        if (underflow && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace detail

// Eigendecomposition of a symmetric matrix by a completely different route
// than the Jacobi solver the SVD uses. Values descending.
inline SymmetricEigen eigen_reference(DenseMatrix a) {
  const std::size_t n = a.rows();
  std::vector<double> d, e;
  detail::tred2(a, d, e);
  detail::tqli(d, e, a);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] > d[y]; });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    out.values[col] = d[order[col]];
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, col) = a(r, order[col]);
  }
  return out;
}

// Largest principal angle (radians) between the column spaces of two
// orthonormal n x k blocks, via the reference eigensolver.
inline double max_principal_angle(const DenseMatrix& u, const DenseMatrix& v) {
  const std::size_t k = u.cols();
  if (k != v.cols() || u.rows() != v.rows()) fail_arg("max_principal_angle: shape mismatch");
  if (k == 0) return 0.0;
  DenseMatrix m(k, k, 0.0);  // U^T V
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < u.rows(); ++r) s += u(r, i) * v(r, j);
      m(i, j) = s;
    }
  DenseMatrix mtm(k, k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < k; ++r) s += m(r, i) * m(r, j);
      mtm(i, j) = s;
    }
  const SymmetricEigen eig = eigen_reference(std::move(mtm));
  const double smallest = eig.values.back();
  const double cosine = std::sqrt(std::min(std::max(smallest, 0.0), 1.0));
  return std::acos(std::min(1.0, cosine));
}

inline double orthonormality_residual(const DenseMatrix& u) {
  double worst = 0.0;
  for (std::size_t i = 0; i < u.cols(); ++i)
    for (std::size_t j = 0; j < u.cols(); ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < u.rows(); ++r) s += u(r, i) * u(r, j);
      worst = std::max(worst, std::fabs(s - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Student t survival function by adaptive quadrature
// ---------------------------------------------------------------------------

namespace detail {

inline double t_pdf(double u, double df) {
  return std::exp(std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                  0.5 * std::log(df * 3.14159265358979323846) -
                  0.5 * (df + 1.0) * std::log1p(u * u / df));
}

inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fb, double fm, double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, fm, flm, left, 0.5 * eps, depth - 1) +
         simpson_rec(f, m, b, fm, fb, frm, right, 0.5 * eps, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double eps) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fb, fm, whole, eps, 48);
}

}  // namespace detail

inline double t_sf_reference(double t, double df) {
  if (t < 0.0) return 1.0 - t_sf_reference(-t, df);
  if (t == 0.0) return 0.5;
  const auto pdf = [df](double u) { return detail::t_pdf(u, df); };
  return 0.5 - detail::integrate(pdf, 0.0, t, 1e-12);
}

}  // namespace scl::diagnostics
