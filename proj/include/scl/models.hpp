// The four trainable systems.
//
//   train_joint        shared hidden layer with task + pivot heads, trained
//                      jointly by alternating labeled and unlabeled batches
//   train_aescl        two-phase baseline: pivot-prediction MLP over non-pivot
//                      inputs, then logistic regression over original
//                      features + frozen hidden layer
//   train_classic_scl  per-pivot linear predictors -> SVD projection ->
//                      logistic regression over original + projected features
//   train_logreg       source-only logistic regression (no adaptation)
//
// All training is single-threaded and bit-deterministic given the config
// seed: weight init, batch shuffles and random pivot sampling all derive
// from it through fixed stream ids.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "scl/error.hpp"
#include "scl/featurize.hpp"
#include "scl/neural.hpp"
#include "scl/pivot.hpp"
#include "scl/rng.hpp"
#include "scl/svd.hpp"

namespace scl {

enum class ValidationMetric { task_bce, joint_objective };

struct TrainConfig {
  std::size_t d = 2000;       // hidden layer width
  std::size_t p = 100;        // pivot count (used by callers when selecting pivots)
  double lambda = 100.0;      // pivot-loss weight
  double rho = 0.1;           // L2 weight
  double lr = 0.001;
  std::size_t epochs = 30;
  std::size_t batch_size = 50;
  std::uint64_t seed = 0;
  bool mask_pivots_in_input = false;
  ValidationMetric validation_metric = ValidationMetric::task_bce;
  Activation hidden_activation = Activation::relu;
  bool use_bias = false;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  // baseline knobs
  std::size_t aescl_hidden = 100;
  Activation aescl_activation = Activation::sigmoid;
  std::size_t classic_k = 50;
  std::size_t classic_predictor_epochs = 10;

  // re-derive every batch loss through joint_loss and compare (slow; always
  // asserted in debug builds, opt-in elsewhere)
  bool verify_batch_loss = false;

  void validate() const {
    if (d == 0 || epochs == 0 || batch_size == 0) fail_arg("TrainConfig: counts must be positive");
    if (lambda < 0.0 || rho < 0.0) fail_arg("TrainConfig: lambda and rho must be >= 0");
    if (lr <= 0.0) fail_arg("TrainConfig: lr must be positive");
  }
};

// rng stream ids, fixed so that every consumer of a run seed is independent
namespace seed_stream {
constexpr std::uint64_t kInit = 1;
constexpr std::uint64_t kLabeledShuffle = 2;
constexpr std::uint64_t kUnlabeledShuffle = 3;
constexpr std::uint64_t kLogRegShuffle = 4;
constexpr std::uint64_t kAesclShuffle = 5;
}  // namespace seed_stream

struct Prediction {
  double probability = 0.5;
  int label = 1;  // 1 iff probability >= 0.5
};

inline Prediction make_prediction(double prob) {
  return {prob, prob >= 0.5 ? 1 : 0};
}

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

struct LogRegModel {
  std::vector<double> w;  // sparse_dim weights followed by dense_dim weights
  double b = 0.0;
  bool has_bias = false;
  std::size_t sparse_dim = 0;
  std::size_t dense_dim = 0;
  std::size_t best_epoch = 0;
  std::vector<double> validation_curve;

  double decision(const SparseVector& x, std::span<const double> dense) const {
    double z = b;
    for (std::uint32_t j : x.indices) z += w[j];
    for (std::size_t i = 0; i < dense.size(); ++i) z += w[sparse_dim + i] * dense[i];
    return z;
  }
  double probability(const SparseVector& x, std::span<const double> dense = {}) const {
    return clamp_prob(sigmoid(decision(x, dense)));
  }
};

namespace detail {

// BCE + L2 logistic regression over sparse rows with an optional dense
// augmentation block, trained with Adam. `extra` may be empty; otherwise its
// row count must match the matrix.
inline LogRegModel train_logreg_impl(const DesignMatrix& train, const DenseMatrix& train_extra,
                                     const DesignMatrix& val, const DenseMatrix& val_extra,
                                     const TrainConfig& cfg) {
  cfg.validate();
  if (train.rows.empty()) fail_arg("train_logreg: empty training data");
  if (!train.labels.has_value()) fail_arg("train_logreg: training matrix has no labels");
  const std::size_t dense_dim = train_extra.empty() ? 0 : train_extra.cols();
  if (!train_extra.empty() && train_extra.rows() != train.size())
    fail_arg("train_logreg: augmentation rows do not match matrix");
  if (!val.rows.empty() && !val.labels.has_value())
    fail_arg("train_logreg: validation matrix has no labels");

  LogRegModel model;
  model.sparse_dim = train.dim;
  model.dense_dim = dense_dim;
  model.has_bias = cfg.use_bias;
  model.w.assign(train.dim + dense_dim, 0.0);

  AdamState adam(model.w.size(), cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon);
  AdamState adam_bias(cfg.use_bias ? 1 : 0, cfg.lr, cfg.adam_beta1, cfg.adam_beta2,
                      cfg.adam_epsilon);
  std::vector<double> grad(model.w.size(), 0.0);

  rng::Engine shuffle_eng = rng::make_engine(cfg.seed, seed_stream::kLogRegShuffle);
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<double> best_w;
  double best_b = 0.0;
  double best_loss = std::numeric_limits<double>::infinity();

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng::shuffle(order, shuffle_eng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      double grad_b = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        const std::size_t r = order[i];
        const SparseVector& x = train.rows[r];
        const std::span<const double> dense =
            dense_dim ? train_extra.row_span(r) : std::span<const double>{};
        const double y = static_cast<double>((*train.labels)[r]);
        const double g = clamp_prob(sigmoid(model.decision(x, dense))) - y;
        for (std::uint32_t j : x.indices) grad[j] += g;
        for (std::size_t c = 0; c < dense_dim; ++c) grad[train.dim + c] += g * dense[c];
        grad_b += g;
      }
      if (cfg.rho > 0.0) vecops::axpy(cfg.rho, model.w, grad);
      adam_step(model.w, grad, adam);
      if (cfg.use_bias) adam_step({&model.b, 1}, {&grad_b, 1}, adam_bias);
    }

    if (!val.rows.empty()) {
      double loss = 0.0;
      for (std::size_t r = 0; r < val.size(); ++r) {
        const std::span<const double> dense =
            dense_dim ? val_extra.row_span(r) : std::span<const double>{};
        loss += bce(model.probability(val.rows[r], dense),
                    static_cast<double>((*val.labels)[r]));
      }
      loss /= static_cast<double>(val.size());
      model.validation_curve.push_back(loss);
      if (loss < best_loss) {
        best_loss = loss;
        model.best_epoch = epoch;
        best_w = model.w;
        best_b = model.b;
      }
    }
  }

  if (!val.rows.empty()) {
    model.w = std::move(best_w);
    model.b = best_b;
  } else {
    model.best_epoch = cfg.epochs - 1;
  }
  return model;
}

}  // namespace detail

inline LogRegModel train_logreg(const DesignMatrix& train, const DesignMatrix& val,
                                const TrainConfig& cfg) {
  return detail::train_logreg_impl(train, DenseMatrix(), val, DenseMatrix(), cfg);
}

inline LogRegModel train_logreg_augmented(const DesignMatrix& train,
                                          const DenseMatrix& train_extra,
                                          const DesignMatrix& val, const DenseMatrix& val_extra,
                                          const TrainConfig& cfg) {
  return detail::train_logreg_impl(train, train_extra, val, val_extra, cfg);
}

inline Prediction predict_logreg(const LogRegModel& model, const SparseVector& x,
                                 std::span<const double> dense = {}) {
  return make_prediction(model.probability(x, dense));
}

// ---------------------------------------------------------------------------
// Joint model
// ---------------------------------------------------------------------------

struct TrainedJointModel {
  JointModelParams params;
  PivotSet pivots;
  TrainConfig config;
  std::size_t best_epoch = 0;
  std::vector<double> validation_curve;  // one entry per epoch
  std::vector<std::string> warnings;
  std::string vocab_ref;  // vocabulary file reference, recorded by the CLI
};

namespace detail {

inline double validation_loss(const JointModelParams& params, const DesignMatrix& val,
                              const PivotSet& pivots, const TrainConfig& cfg) {
  if (cfg.validation_metric == ValidationMetric::joint_objective) {
    const Minibatch all = Minibatch::all_of(val);
    return joint_loss(params, all, pivots, cfg.lambda, cfg.rho, cfg.mask_pivots_in_input) /
           static_cast<double>(val.size());
  }
  const PivotIndexer indexer(pivots);
  std::vector<double> targets(indexer.size());
  std::vector<std::uint32_t> masked;
  double loss = 0.0;
  for (std::size_t r = 0; r < val.size(); ++r) {
    const SparseVector& x = val.rows[r];
    double prob;
    if (cfg.mask_pivots_in_input) {
      std::fill(targets.begin(), targets.end(), 0.0);
      masked.clear();
      indexer.row_targets(x, targets, &masked);
      prob = forward_active(params, masked).task_prob;
    } else {
      prob = forward(params, x).task_prob;
    }
    loss += bce(prob, static_cast<double>((*val.labels)[r]));
  }
  return loss / static_cast<double>(val.size());
}

}  // namespace detail

// Joint trainer. Per epoch, labeled and unlabeled rows are shuffled
// independently and mini-batches are interleaved strictly alternately
// (labeled, unlabeled, labeled, ...) until both streams are exhausted; the
// longer stream finishes unpaired. Labeled batches incur task + pivot +
// regularization loss, unlabeled batches pivot + regularization. The returned
// parameters are the snapshot from the epoch with the lowest validation loss
// (first epoch wins ties).
inline TrainedJointModel train_joint(const DesignMatrix& source_train,
                                     const DesignMatrix& source_val,
                                     const DesignMatrix& unlabeled, const PivotSet& pivots,
                                     const TrainConfig& cfg) {
  cfg.validate();
  if (source_train.rows.empty() || !source_train.labels.has_value())
    fail_arg("train_joint: labeled training data is required");
  if (!source_val.rows.empty() && !source_val.labels.has_value())
    fail_arg("train_joint: validation matrix has no labels");
  if (!unlabeled.rows.empty() && unlabeled.dim != source_train.dim)
    fail_arg("train_joint: unlabeled dim ", unlabeled.dim, " != train dim ", source_train.dim);
  if (!source_val.rows.empty() && source_val.dim != source_train.dim)
    fail_arg("train_joint: validation dim mismatch");
  if (pivots.size() == 0) fail_arg("train_joint: empty pivot set");
  for (std::uint32_t j : pivots.indices)
    if (j >= source_train.dim) fail_arg("train_joint: pivot index ", j, " out of range");

  TrainedJointModel model;
  model.pivots = pivots;
  model.config = cfg;
  if (unlabeled.rows.empty())
    model.warnings.push_back("no unlabeled data: joint training degrades to supervised training");
  if (source_val.rows.empty())
    model.warnings.push_back("no validation data: keeping the final epoch");

  const std::size_t n = source_train.dim;
  JointModelParams params = init_weights(n, cfg.d, pivots.size(),
                                         rng::mix(cfg.seed, seed_stream::kInit),
                                         cfg.hidden_activation, cfg.use_bias);
  JointAdam adam(params, cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon);
  const PivotIndexer indexer(pivots);

  JointGradients grads;
  grads.shape_like(params);
  JointScratch scratch;

  rng::Engine labeled_eng = rng::make_engine(cfg.seed, seed_stream::kLabeledShuffle);
  rng::Engine unlabeled_eng = rng::make_engine(cfg.seed, seed_stream::kUnlabeledShuffle);
  std::vector<std::size_t> labeled_order(source_train.size());
  std::vector<std::size_t> unlabeled_order(unlabeled.size());
  for (std::size_t i = 0; i < labeled_order.size(); ++i) labeled_order[i] = i;
  for (std::size_t i = 0; i < unlabeled_order.size(); ++i) unlabeled_order[i] = i;

  const auto batch_count = [&](std::size_t rows) {
    return (rows + cfg.batch_size - 1) / cfg.batch_size;
  };
  const std::size_t labeled_batches = batch_count(source_train.size());
  const std::size_t unlabeled_batches = batch_count(unlabeled.size());

  Minibatch batch;
  const auto run_batch = [&](const DesignMatrix& matrix, const std::vector<std::size_t>& order,
                             std::size_t index, bool labeled) {
    batch.rows.clear();
    batch.labels.clear();
    const std::size_t start = index * cfg.batch_size;
    const std::size_t end = std::min(order.size(), start + cfg.batch_size);
    for (std::size_t i = start; i < end; ++i) {
      const std::size_t r = order[i];
      batch.add(matrix.rows[r],
                labeled ? std::optional<int>((*matrix.labels)[r]) : std::nullopt);
    }
    const double loss = joint_batch_gradients(params, batch, indexer, cfg.lambda, cfg.rho,
                                              cfg.mask_pivots_in_input, grads, scratch);
    if (cfg.verify_batch_loss) {
      const double reference =
          joint_loss(params, batch, pivots, cfg.lambda, cfg.rho, cfg.mask_pivots_in_input);
      const double tol = 1e-9 * std::max(1.0, std::fabs(reference));
      if (std::fabs(loss - reference) > tol)
        fail_arg("train_joint: batch loss ", loss, " diverges from objective ", reference);
    }
    assert(std::fabs(loss - joint_loss(params, batch, pivots, cfg.lambda, cfg.rho,
                                       cfg.mask_pivots_in_input)) <=
           1e-9 * std::max(1.0, std::fabs(loss)));
    adam.step(params, grads);
  };

  double best_loss = std::numeric_limits<double>::infinity();
  JointModelParams best_params = params;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng::shuffle(labeled_order, labeled_eng);
    rng::shuffle(unlabeled_order, unlabeled_eng);
    const std::size_t steps = std::max(labeled_batches, unlabeled_batches);
    for (std::size_t s = 0; s < steps; ++s) {
      if (s < labeled_batches) run_batch(source_train, labeled_order, s, true);
      if (s < unlabeled_batches) run_batch(unlabeled, unlabeled_order, s, false);
    }

    if (!source_val.rows.empty()) {
      const double loss = detail::validation_loss(params, source_val, pivots, cfg);
      model.validation_curve.push_back(loss);
      if (loss < best_loss) {
        best_loss = loss;
        model.best_epoch = epoch;
        best_params = params;
      }
    }
  }

  model.params = source_val.rows.empty() ? std::move(params) : std::move(best_params);
  if (source_val.rows.empty()) model.best_epoch = cfg.epochs - 1;
  return model;
}

inline Prediction predict_joint(const TrainedJointModel& model, const SparseVector& x) {
  if (x.dim != model.params.n)
    fail_arg("predict_joint: input dim ", x.dim, " does not match model n = ", model.params.n);
  if (model.config.mask_pivots_in_input) {
    const PivotIndexer indexer(model.pivots);
    std::vector<double> targets(indexer.size());
    std::vector<std::uint32_t> masked;
    indexer.row_targets(x, targets, &masked);
    return make_prediction(forward_active(model.params, masked).task_prob);
  }
  return make_prediction(forward(model.params, x).task_prob);
}

inline std::vector<int> predict_joint_labels(const TrainedJointModel& model,
                                             const DesignMatrix& matrix) {
  const PivotIndexer indexer(model.pivots);
  std::vector<double> targets(indexer.size());
  std::vector<std::uint32_t> masked;
  std::vector<int> labels;
  labels.reserve(matrix.size());
  for (const SparseVector& x : matrix.rows) {
    double prob;
    if (model.config.mask_pivots_in_input) {
      std::fill(targets.begin(), targets.end(), 0.0);
      masked.clear();
      indexer.row_targets(x, targets, &masked);
      prob = forward_active(model.params, masked).task_prob;
    } else {
      prob = forward(model.params, x).task_prob;
    }
    labels.push_back(prob >= 0.5 ? 1 : 0);
  }
  return labels;
}

// ---------------------------------------------------------------------------
// AE-SCL baseline
// ---------------------------------------------------------------------------

struct AesclModel {
  JointModelParams rep;  // pivot-prediction net; inputs always exclude pivots
  PivotSet pivots;
  LogRegModel clf;  // over original features + rep hidden layer
  TrainConfig config;
  std::size_t rep_best_epoch = 0;
  std::vector<double> rep_validation_curve;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<double> aescl_hidden(const JointModelParams& rep, const PivotIndexer& indexer,
                                        const SparseVector& x) {
  std::vector<double> targets(indexer.size());
  std::vector<std::uint32_t> masked;
  indexer.row_targets(x, targets, &masked);
  return forward_active(rep, masked).hidden;
}

}  // namespace detail

// Phase 1 trains a single-hidden-layer pivot predictor on every available row
// (labeled source + unlabeled source/target pooled into one shuffled stream),
// selecting the epoch with the lowest held-out pivot-prediction loss on the
// validation rows. Phase 2 freezes it and trains logistic regression on
// original features concatenated with the hidden layer.
inline AesclModel train_aescl(const DesignMatrix& source_train, const DesignMatrix& source_val,
                              const DesignMatrix& unlabeled, const PivotSet& pivots,
                              const TrainConfig& cfg) {
  cfg.validate();
  if (source_train.rows.empty() || !source_train.labels.has_value())
    fail_arg("train_aescl: labeled training data is required");
  if (pivots.size() == 0) fail_arg("train_aescl: empty pivot set");

  AesclModel model;
  model.pivots = pivots;
  model.config = cfg;
  if (unlabeled.rows.empty())
    model.warnings.push_back("no unlabeled data: pivot predictor sees source rows only");

  const std::size_t n = source_train.dim;
  JointModelParams rep = init_weights(n, cfg.aescl_hidden, pivots.size(),
                                      rng::mix(cfg.seed, seed_stream::kInit),
                                      cfg.aescl_activation, cfg.use_bias);
  JointAdam adam(rep, cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon);
  const PivotIndexer indexer(pivots);

  // pooled phase-1 rows; labels are irrelevant to the pivot objective
  std::vector<const SparseVector*> pool;
  pool.reserve(source_train.size() + unlabeled.size());
  for (const SparseVector& x : source_train.rows) pool.push_back(&x);
  for (const SparseVector& x : unlabeled.rows) pool.push_back(&x);

  JointGradients grads;
  grads.shape_like(rep);
  JointScratch scratch;
  rng::Engine pool_eng = rng::make_engine(cfg.seed, seed_stream::kAesclShuffle);
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const Minibatch val_batch = Minibatch::all_of(source_val);
  Minibatch val_unlabeled;  // same rows, labels stripped: only the pivot loss matters
  for (const SparseVector* x : val_batch.rows) val_unlabeled.add(*x, std::nullopt);

  double best_loss = std::numeric_limits<double>::infinity();
  JointModelParams best_rep = rep;
  Minibatch batch;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng::shuffle(order, pool_eng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.rows.clear();
      batch.labels.clear();
      for (std::size_t i = start; i < end; ++i) batch.add(*pool[order[i]], std::nullopt);
      joint_batch_gradients(rep, batch, indexer, 1.0, 0.0, /*mask=*/true, grads, scratch);
      adam.step(rep, grads);
    }
    if (!val_unlabeled.rows.empty()) {
      const double loss =
          joint_loss(rep, val_unlabeled, pivots, 1.0, 0.0, /*mask=*/true) /
          static_cast<double>(val_unlabeled.size());
      model.rep_validation_curve.push_back(loss);
      if (loss < best_loss) {
        best_loss = loss;
        model.rep_best_epoch = epoch;
        best_rep = rep;
      }
    }
  }
  model.rep = val_unlabeled.rows.empty() ? std::move(rep) : std::move(best_rep);
  if (val_unlabeled.rows.empty()) model.rep_best_epoch = cfg.epochs - 1;

  // phase 2: original features + hidden layer
  const auto hidden_block = [&](const DesignMatrix& matrix) {
    DenseMatrix block(matrix.size(), cfg.aescl_hidden);
    for (std::size_t r = 0; r < matrix.size(); ++r) {
      const std::vector<double> h = detail::aescl_hidden(model.rep, indexer, matrix.rows[r]);
      std::copy(h.begin(), h.end(), block.row(r));
    }
    return block;
  };
  model.clf = train_logreg_augmented(source_train, hidden_block(source_train), source_val,
                                     source_val.rows.empty() ? DenseMatrix() : hidden_block(source_val),
                                     cfg);
  return model;
}

inline Prediction predict_aescl(const AesclModel& model, const SparseVector& x) {
  const PivotIndexer indexer(model.pivots);
  const std::vector<double> h = detail::aescl_hidden(model.rep, indexer, x);
  return make_prediction(model.clf.probability(x, h));
}

inline std::vector<int> predict_aescl_labels(const AesclModel& model, const DesignMatrix& matrix) {
  const PivotIndexer indexer(model.pivots);
  std::vector<int> labels;
  labels.reserve(matrix.size());
  for (const SparseVector& x : matrix.rows) {
    const std::vector<double> h = detail::aescl_hidden(model.rep, indexer, x);
    labels.push_back(model.clf.probability(x, h) >= 0.5 ? 1 : 0);
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Classic SVD-based SCL baseline
// ---------------------------------------------------------------------------

struct ClassicSclModel {
  PivotSet pivots;
  std::vector<std::uint32_t> nonpivot_features;  // ascending original indices
  DenseMatrix theta;                             // n_nonpivot x k
  std::vector<double> singular_values;
  LogRegModel clf;  // over original features + k projected features
  TrainConfig config;
};

namespace detail {

inline std::vector<double> classic_projection(const ClassicSclModel& model,
                                              const std::vector<std::int32_t>& slot_of,
                                              const SparseVector& x) {
  std::vector<double> proj(model.theta.cols(), 0.0);
  for (std::uint32_t j : x.indices) {
    const std::int32_t slot = slot_of[j];
    if (slot >= 0) vecops::axpy(1.0, model.theta.row_span(static_cast<std::size_t>(slot)), proj);
  }
  return proj;
}

inline std::vector<std::int32_t> classic_slot_map(const ClassicSclModel& model, std::size_t n) {
  std::vector<std::int32_t> slot_of(n, -1);
  for (std::size_t s = 0; s < model.nonpivot_features.size(); ++s)
    slot_of[model.nonpivot_features[s]] = static_cast<std::int32_t>(s);
  return slot_of;
}

}  // namespace detail

// Classic SCL: one linear pivot predictor per pivot (BCE + L2 via Adam, seeded
// seed+j so the p problems are independent), weights stacked as columns of W,
// truncated SVD of W, logistic regression over original + projected features.
inline ClassicSclModel train_classic_scl(const DesignMatrix& source_train,
                                         const DesignMatrix& unlabeled, const PivotSet& pivots,
                                         std::size_t k, const TrainConfig& cfg) {
  cfg.validate();
  if (source_train.rows.empty() || !source_train.labels.has_value())
    fail_arg("train_classic_scl: labeled training data is required");
  if (pivots.size() == 0) fail_arg("train_classic_scl: empty pivot set");
  if (k > pivots.size()) fail_arg("train_classic_scl: k = ", k, " exceeds pivot count");

  const std::size_t n = source_train.dim;
  ClassicSclModel model;
  model.pivots = pivots;
  model.config = cfg;

  const PivotIndexer indexer(pivots);
  for (std::uint32_t j = 0; j < n; ++j)
    if (!indexer.is_pivot(j)) model.nonpivot_features.push_back(j);
  const std::size_t n_np = model.nonpivot_features.size();
  if (n_np == 0) fail_arg("train_classic_scl: every feature is a pivot; nothing to project");
  if (k > n_np) fail_arg("train_classic_scl: k = ", k, " exceeds non-pivot feature count");
  const std::vector<std::int32_t> slot_of = detail::classic_slot_map(model, n);

  if (!unlabeled.rows.empty() && unlabeled.dim != source_train.dim)
    fail_arg("train_classic_scl: unlabeled dim mismatch");

  // all rows, remapped to the non-pivot feature space, with per-pivot targets
  const std::vector<const DesignMatrix*> sources = {&source_train, &unlabeled};
  DesignMatrix problem;
  problem.dim = n_np;
  std::vector<std::vector<double>> pivot_presence(pivots.size());
  for (const DesignMatrix* m : sources) {
    for (const SparseVector& x : m->rows) {
      SparseVector row;
      row.dim = n_np;
      std::vector<double> targets(pivots.size(), 0.0);
      for (std::uint32_t j : x.indices) {
        const std::int32_t slot = slot_of[j];
        if (slot >= 0) row.indices.push_back(static_cast<std::uint32_t>(slot));
      }
      indexer.row_targets(x, targets, nullptr);
      for (std::size_t t = 0; t < targets.size(); ++t) pivot_presence[t].push_back(targets[t]);
      problem.rows.push_back(std::move(row));
    }
  }

  DenseMatrix w(n_np, pivots.size(), 0.0);
  std::vector<std::uint32_t> dead_pivots;
  TrainConfig predictor_cfg = cfg;
  predictor_cfg.epochs = cfg.classic_predictor_epochs;
  for (std::size_t j = 0; j < pivots.size(); ++j) {
    std::vector<int> labels(pivot_presence[j].size());
    for (std::size_t r = 0; r < labels.size(); ++r)
      labels[r] = pivot_presence[j][r] > 0.5 ? 1 : 0;
    problem.labels = std::move(labels);
    predictor_cfg.seed = cfg.seed + j;
    const LogRegModel predictor = train_logreg(problem, DesignMatrix{}, predictor_cfg);
    bool any = false;
    for (std::size_t r = 0; r < n_np; ++r) {
      w(r, j) = predictor.w[r];
      if (predictor.w[r] != 0.0) any = true;
    }
    if (!any) dead_pivots.push_back(pivots.indices[j]);
  }
  if (dead_pivots.size() == pivots.size()) {
    std::string names;
    for (std::size_t i = 0; i < std::min<std::size_t>(dead_pivots.size(), 8); ++i)
      names += (i ? ", " : "") + std::to_string(dead_pivots[i]);
    fail_arg("train_classic_scl: predictor weight matrix is all zeros (pivot features ", names,
             dead_pivots.size() > 8 ? ", ..." : "", ")");
  }

  TruncatedSvd svd = truncated_svd(w, k);
  model.theta = std::move(svd.u);
  model.singular_values = std::move(svd.singular_values);

  DenseMatrix projected(source_train.size(), model.theta.cols());
  for (std::size_t r = 0; r < source_train.size(); ++r) {
    const std::vector<double> proj =
        detail::classic_projection(model, slot_of, source_train.rows[r]);
    std::copy(proj.begin(), proj.end(), projected.row(r));
  }
  model.clf = train_logreg_augmented(source_train, projected, DesignMatrix{}, DenseMatrix(), cfg);
  return model;
}

inline Prediction predict_classic_scl(const ClassicSclModel& model, const SparseVector& x) {
  const std::vector<std::int32_t> slot_of = detail::classic_slot_map(model, x.dim);
  return make_prediction(
      model.clf.probability(x, detail::classic_projection(model, slot_of, x)));
}

inline std::vector<int> predict_classic_scl_labels(const ClassicSclModel& model,
                                                   const DesignMatrix& matrix) {
  const std::vector<std::int32_t> slot_of = detail::classic_slot_map(model, matrix.dim);
  std::vector<int> labels;
  labels.reserve(matrix.size());
  for (const SparseVector& x : matrix.rows)
    labels.push_back(
        model.clf.probability(x, detail::classic_projection(model, slot_of, x)) >= 0.5 ? 1 : 0);
  return labels;
}

inline std::vector<int> predict_logreg_labels(const LogRegModel& model,
                                              const DesignMatrix& matrix) {
  std::vector<int> labels;
  labels.reserve(matrix.size());
  for (const SparseVector& x : matrix.rows)
    labels.push_back(model.probability(x) >= 0.5 ? 1 : 0);
  return labels;
}

}  // namespace scl
