// Numerical core of the joint pivot-prediction model.
//
// The network is a single shared hidden layer with two sigmoid heads:
//
//   h(x)      = act(W_h x)            hidden representation, act = ReLU here
//                                     (sigmoid selectable for the baselines)
//   f_task(x) = sigmoid(W_t h(x))     binary task probability
//   f_pivot(x)= sigmoid(W_p h(x))     one probability per pivot feature
//
// and the batch objective is
//
//   sum_labeled BCE(f_task, y) + lambda * sum_all sum_j BCE(f_pivot_j, t_j)
//                              + rho * (1/2) ||theta||^2
//
// where t_j is the binary presence of pivot j in the input row and the
// regularizer is added once per batch. There are no bias terms by default;
// a flag enables them for ablation. Gradients are exact analytic derivatives
// of this objective (ReLU subgradient at 0 is taken as 0) and are checked
// against central finite differences in the test suite.
//
// Inputs are sparse binary rows, so W_h is stored input-major (n rows of d
// weights): the hidden pre-activation is the sum of the rows picked out by
// the input's feature indices, and the W_h gradient touches exactly those
// rows. Nothing ever materializes a dense n-vector.
#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "scl/error.hpp"
#include "scl/featurize.hpp"
#include "scl/linalg.hpp"
#include "scl/pivot.hpp"
#include "scl/rng.hpp"

namespace scl {

enum class Activation { relu, sigmoid };

inline const char* to_string(Activation a) {
  return a == Activation::relu ? "relu" : "sigmoid";
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Probabilities are kept strictly inside (0,1); this is the same clamp bce
// applies before its logs, so loss and gradients agree at saturation.
constexpr double kProbEps = 1e-12;

inline double clamp_prob(double p) {
  if (p < kProbEps) return kProbEps;
  if (p > 1.0 - kProbEps) return 1.0 - kProbEps;
  return p;
}

inline double bce(double prediction, double target) {
  if (!(target >= 0.0 && target <= 1.0))
    fail_arg("bce: target ", target, " outside [0,1]");
  const double p = clamp_prob(prediction);
  return -(target * std::log(p) + (1.0 - target) * std::log1p(-p));
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

struct AdamState {
  std::vector<double> m, v;
  std::uint64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double lr = 0.001;

  AdamState() = default;
  AdamState(std::size_t size, double learning_rate, double b1 = 0.9, double b2 = 0.999,
            double eps = 1e-8)
      : m(size, 0.0), v(size, 0.0), beta1(b1), beta2(b2), epsilon(eps), lr(learning_rate) {}
};

// Standard Adam update with bias correction. Fails fast on non-finite
// gradient entries rather than silently corrupting the moments.
inline void adam_step(std::span<double> params, std::span<const double> grads,
                      AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    fail_arg("adam_step: size mismatch");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    if (!std::isfinite(g)) fail_arg("adam_step: non-finite gradient at index ", i);
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

struct JointModelParams {
  std::size_t n = 0, d = 0, p = 0;
  Activation hidden_activation = Activation::relu;
  bool has_bias = false;

  DenseMatrix w_h;           // n x d, input-major (row j = hidden weights of feature j)
  std::vector<double> w_t;   // d
  DenseMatrix w_p;           // p x d
  std::vector<double> b_h;   // d, only when has_bias
  double b_t = 0.0;
  std::vector<double> b_p;   // p, only when has_bias

  double squared_norm() const {
    double s = w_h.squared_norm() + w_p.squared_norm();
    for (double x : w_t) s += x * x;
    for (double x : b_h) s += x * x;
    for (double x : b_p) s += x * x;
    s += b_t * b_t;
    return s;
  }

  friend bool operator==(const JointModelParams&, const JointModelParams&) = default;
};

// Glorot-uniform init, deterministic in the seed: each matrix is filled in
// storage order with i.i.d. draws from +-sqrt(6/(fan_in+fan_out)). Biases
// start at zero.
inline JointModelParams init_weights(std::size_t n, std::size_t d, std::size_t p,
                                     std::uint64_t seed, Activation act = Activation::relu,
                                     bool bias = false) {
  if (n == 0 || d == 0 || p == 0) fail_arg("init_weights: dimensions must be positive");
  JointModelParams params;
  params.n = n;
  params.d = d;
  params.p = p;
  params.hidden_activation = act;
  params.has_bias = bias;
  params.w_h = DenseMatrix(n, d);
  params.w_t.assign(d, 0.0);
  params.w_p = DenseMatrix(p, d);

  rng::Engine eng = rng::make_engine(seed);
  const double lim_h = std::sqrt(6.0 / static_cast<double>(n + d));
  const double lim_t = std::sqrt(6.0 / static_cast<double>(d + 1));
  const double lim_p = std::sqrt(6.0 / static_cast<double>(d + p));
  for (double& w : params.w_h.data()) w = rng::next_symmetric(eng, lim_h);
  for (double& w : params.w_t) w = rng::next_symmetric(eng, lim_t);
  for (double& w : params.w_p.data()) w = rng::next_symmetric(eng, lim_p);
  if (bias) {
    params.b_h.assign(d, 0.0);
    params.b_p.assign(p, 0.0);
  }
  return params;
}

// ---------------------------------------------------------------------------
// Pivot targets and input masking
// ---------------------------------------------------------------------------

// Maps a sparse row to its pivot-presence target vector (the pivots(x) of the
// objective) and, when pivots are masked out of the input, to the surviving
// feature indices. Targets are always computed from the unmasked row.
class PivotIndexer {
 public:
  PivotIndexer() = default;
  explicit PivotIndexer(const PivotSet& set) : count_(set.size()) {
    by_feature_.reserve(set.size());
    for (std::uint32_t slot = 0; slot < set.indices.size(); ++slot)
      by_feature_.push_back({set.indices[slot], slot});
    std::sort(by_feature_.begin(), by_feature_.end());
  }

  std::size_t size() const { return count_; }

  bool is_pivot(std::uint32_t feature) const {
    return std::binary_search(
        by_feature_.begin(), by_feature_.end(), std::pair<std::uint32_t, std::uint32_t>{feature, 0},
        [](const auto& a, const auto& b) { return a.first < b.first; });
  }

  // targets must have size() entries and be zeroed by the caller; nonpivot,
  // when given, receives the row's non-pivot feature indices.
  void row_targets(const SparseVector& row, std::span<double> targets,
                   std::vector<std::uint32_t>* nonpivot = nullptr) const {
    assert(targets.size() == count_);
    std::size_t k = 0;
    for (std::uint32_t feature : row.indices) {
      while (k < by_feature_.size() && by_feature_[k].first < feature) ++k;
      if (k < by_feature_.size() && by_feature_[k].first == feature) {
        targets[by_feature_[k].second] = 1.0;
      } else if (nonpivot != nullptr) {
        nonpivot->push_back(feature);
      }
    }
  }

 private:
  std::vector<std::pair<std::uint32_t, std::uint32_t>> by_feature_;  // (feature, slot)
  std::size_t count_ = 0;
};

// ---------------------------------------------------------------------------
// Forward pass
// ---------------------------------------------------------------------------

struct ForwardResult {
  std::vector<double> hidden;
  double task_prob = 0.5;
  std::vector<double> pivot_probs;
};

namespace detail {

inline void hidden_preactivation(const JointModelParams& params,
                                 std::span<const std::uint32_t> active,
                                 std::span<double> z) {
  if (params.has_bias)
    std::copy(params.b_h.begin(), params.b_h.end(), z.begin());
  else
    std::fill(z.begin(), z.end(), 0.0);
  for (std::uint32_t j : active) {
    if (j >= params.n) fail_arg("forward: feature index ", j, " out of range for n = ", params.n);
    vecops::axpy(1.0, params.w_h.row_span(j), z);
  }
}

inline double activate(double z, Activation act) {
  return act == Activation::relu ? (z > 0.0 ? z : 0.0) : sigmoid(z);
}

inline double activate_derivative(double z, double h, Activation act) {
  return act == Activation::relu ? (z > 0.0 ? 1.0 : 0.0) : h * (1.0 - h);
}

}  // namespace detail

// Forward pass over an explicit list of active features (already masked, if
// masking applies).
inline ForwardResult forward_active(const JointModelParams& params,
                                    std::span<const std::uint32_t> active) {
  ForwardResult out;
  std::vector<double> z(params.d);
  detail::hidden_preactivation(params, active, z);
  out.hidden.resize(params.d);
  for (std::size_t i = 0; i < params.d; ++i)
    out.hidden[i] = detail::activate(z[i], params.hidden_activation);
  out.task_prob = clamp_prob(sigmoid(vecops::dot(params.w_t, out.hidden) + params.b_t));
  out.pivot_probs.resize(params.p);
  for (std::size_t k = 0; k < params.p; ++k) {
    const double zp =
        vecops::dot(params.w_p.row_span(k), out.hidden) + (params.has_bias ? params.b_p[k] : 0.0);
    out.pivot_probs[k] = clamp_prob(sigmoid(zp));
  }
  return out;
}

inline ForwardResult forward(const JointModelParams& params, const SparseVector& x) {
  if (x.dim != params.n)
    fail_arg("forward: input dim ", x.dim, " does not match n = ", params.n);
  return forward_active(params, x.indices);
}

// ---------------------------------------------------------------------------
// Batches, loss, gradients
// ---------------------------------------------------------------------------

struct Minibatch {
  std::vector<const SparseVector*> rows;
  std::vector<std::optional<int>> labels;  // parallel to rows; nullopt = unlabeled

  void add(const SparseVector& row, std::optional<int> label) {
    rows.push_back(&row);
    labels.push_back(label);
  }
  std::size_t size() const { return rows.size(); }

  static Minibatch all_of(const DesignMatrix& matrix) {
    Minibatch b;
    for (std::size_t i = 0; i < matrix.rows.size(); ++i)
      b.add(matrix.rows[i], matrix.labels ? std::optional<int>((*matrix.labels)[i]) : std::nullopt);
    return b;
  }
};

struct JointGradients {
  DenseMatrix w_h;
  std::vector<double> w_t;
  DenseMatrix w_p;
  std::vector<double> b_h;
  double b_t = 0.0;
  std::vector<double> b_p;

  void shape_like(const JointModelParams& params) {
    w_h = DenseMatrix(params.n, params.d);
    w_t.assign(params.d, 0.0);
    w_p = DenseMatrix(params.p, params.d);
    if (params.has_bias) {
      b_h.assign(params.d, 0.0);
      b_p.assign(params.p, 0.0);
    }
    b_t = 0.0;
  }

  void zero() {
    w_h.fill(0.0);
    std::fill(w_t.begin(), w_t.end(), 0.0);
    w_p.fill(0.0);
    std::fill(b_h.begin(), b_h.end(), 0.0);
    std::fill(b_p.begin(), b_p.end(), 0.0);
    b_t = 0.0;
  }
};

struct JointScratch {
  std::vector<double> z, h, dh, dz, targets;
  std::vector<std::uint32_t> masked;
};

// Batch loss and exact gradients in one pass. `out` must be shaped for the
// parameters; it is zeroed here. Returns the batch objective (the same value
// joint_loss computes). Labeled rows contribute task + pivot terms, unlabeled
// rows only the pivot term; the L2 term enters once per batch.
inline double joint_batch_gradients(const JointModelParams& params, const Minibatch& batch,
                                    const PivotIndexer& pivots, double lambda, double rho,
                                    bool mask_pivot_inputs, JointGradients& out,
                                    JointScratch& scratch) {
  if (lambda < 0.0 || rho < 0.0) fail_arg("joint gradients: lambda and rho must be >= 0");
  if (pivots.size() != params.p)
    fail_arg("joint gradients: pivot count ", pivots.size(), " does not match p = ", params.p);
  out.zero();

  const std::size_t d = params.d;
  scratch.z.resize(d);
  scratch.h.resize(d);
  scratch.dh.resize(d);
  scratch.dz.resize(d);
  scratch.targets.resize(params.p);

  double loss = 0.0;
  for (std::size_t r = 0; r < batch.rows.size(); ++r) {
    const SparseVector& x = *batch.rows[r];
    if (x.dim != params.n)
      fail_arg("joint gradients: row dim ", x.dim, " does not match n = ", params.n);

    std::fill(scratch.targets.begin(), scratch.targets.end(), 0.0);
    scratch.masked.clear();
    pivots.row_targets(x, scratch.targets, mask_pivot_inputs ? &scratch.masked : nullptr);
    const std::span<const std::uint32_t> active =
        mask_pivot_inputs ? std::span<const std::uint32_t>(scratch.masked)
                          : std::span<const std::uint32_t>(x.indices);

    detail::hidden_preactivation(params, active, scratch.z);
    for (std::size_t i = 0; i < d; ++i)
      scratch.h[i] = detail::activate(scratch.z[i], params.hidden_activation);
    std::fill(scratch.dh.begin(), scratch.dh.end(), 0.0);

    if (batch.labels[r].has_value()) {
      const double y = static_cast<double>(*batch.labels[r]);
      const double prob = clamp_prob(sigmoid(vecops::dot(params.w_t, scratch.h) + params.b_t));
      loss += bce(prob, y);
      const double g = prob - y;  // d BCE(sigmoid(z)) / dz
      vecops::axpy(g, scratch.h, out.w_t);
      vecops::axpy(g, params.w_t, scratch.dh);
      if (params.has_bias) out.b_t += g;
    }

    if (lambda > 0.0) {
      for (std::size_t k = 0; k < params.p; ++k) {
        const std::span<const double> wp_row = params.w_p.row_span(k);
        const double zp = vecops::dot(wp_row, scratch.h) + (params.has_bias ? params.b_p[k] : 0.0);
        const double prob = clamp_prob(sigmoid(zp));
        const double target = scratch.targets[k];
        loss += lambda * bce(prob, target);
        const double g = lambda * (prob - target);
        vecops::axpy(g, scratch.h, out.w_p.row_span(k));
        vecops::axpy(g, wp_row, scratch.dh);
        if (params.has_bias) out.b_p[k] += g;
      }
    }

    for (std::size_t i = 0; i < d; ++i)
      scratch.dz[i] =
          scratch.dh[i] * detail::activate_derivative(scratch.z[i], scratch.h[i],
                                                      params.hidden_activation);
    for (std::uint32_t j : active) vecops::axpy(1.0, scratch.dz, out.w_h.row_span(j));
    if (params.has_bias) vecops::axpy(1.0, scratch.dz, out.b_h);
  }

  if (rho > 0.0) {
    loss += rho * 0.5 * params.squared_norm();
    vecops::axpy(rho, params.w_h.data(), out.w_h.data());
    vecops::axpy(rho, params.w_t, out.w_t);
    vecops::axpy(rho, params.w_p.data(), out.w_p.data());
    if (params.has_bias) {
      vecops::axpy(rho, params.b_h, out.b_h);
      vecops::axpy(rho, params.b_p, out.b_p);
      out.b_t += rho * params.b_t;
    }
  }
  return loss;
}

// The batch objective on its own (same clamping and summation order as the
// gradient pass).
inline double joint_loss(const JointModelParams& params, const Minibatch& batch,
                         const PivotSet& pivot_set, double lambda, double rho,
                         bool mask_pivot_inputs = false) {
  if (lambda < 0.0 || rho < 0.0) fail_arg("joint_loss: lambda and rho must be >= 0");
  const PivotIndexer pivots(pivot_set);
  if (pivots.size() != params.p)
    fail_arg("joint_loss: pivot count ", pivots.size(), " does not match p = ", params.p);

  std::vector<double> targets(params.p);
  std::vector<std::uint32_t> masked;
  double loss = 0.0;
  for (std::size_t r = 0; r < batch.rows.size(); ++r) {
    const SparseVector& x = *batch.rows[r];
    std::fill(targets.begin(), targets.end(), 0.0);
    masked.clear();
    pivots.row_targets(x, targets, mask_pivot_inputs ? &masked : nullptr);
    const ForwardResult fwd =
        mask_pivot_inputs
            ? forward_active(params, masked)
            : forward(params, x);
    if (batch.labels[r].has_value())
      loss += bce(fwd.task_prob, static_cast<double>(*batch.labels[r]));
    if (lambda > 0.0)
      for (std::size_t k = 0; k < params.p; ++k)
        loss += lambda * bce(fwd.pivot_probs[k], targets[k]);
  }
  if (rho > 0.0) loss += rho * 0.5 * params.squared_norm();
  return loss;
}

inline JointGradients joint_gradients(const JointModelParams& params, const Minibatch& batch,
                                      const PivotSet& pivot_set, double lambda, double rho,
                                      bool mask_pivot_inputs = false) {
  JointGradients out;
  out.shape_like(params);
  JointScratch scratch;
  const PivotIndexer pivots(pivot_set);
  joint_batch_gradients(params, batch, pivots, lambda, rho, mask_pivot_inputs, out, scratch);
  return out;
}

// One Adam state per parameter block; all blocks step together once per
// batch.
struct JointAdam {
  AdamState w_h, w_t, w_p, b_h, b_t, b_p;

  JointAdam(const JointModelParams& params, double lr, double beta1 = 0.9, double beta2 = 0.999,
            double eps = 1e-8)
      : w_h(params.n * params.d, lr, beta1, beta2, eps),
        w_t(params.d, lr, beta1, beta2, eps),
        w_p(params.p * params.d, lr, beta1, beta2, eps),
        b_h(params.has_bias ? params.d : 0, lr, beta1, beta2, eps),
        b_t(params.has_bias ? 1 : 0, lr, beta1, beta2, eps),
        b_p(params.has_bias ? params.p : 0, lr, beta1, beta2, eps) {}

  void step(JointModelParams& params, const JointGradients& grads) {
    adam_step(params.w_h.data(), grads.w_h.data(), w_h);
    adam_step(params.w_t, grads.w_t, w_t);
    adam_step(params.w_p.data(), grads.w_p.data(), w_p);
    if (params.has_bias) {
      adam_step(params.b_h, grads.b_h, b_h);
      adam_step({&params.b_t, 1}, {&grads.b_t, 1}, b_t);
      adam_step(params.b_p, grads.b_p, b_p);
    }
  }
};

}  // namespace scl
