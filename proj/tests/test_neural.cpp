#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "scl/diagnostics.hpp"
#include "scl/neural.hpp"

namespace {

scl::SparseVector row(std::initializer_list<std::uint32_t> indices, std::size_t dim) {
  scl::SparseVector x;
  x.indices = indices;
  x.dim = dim;
  return x;
}

scl::PivotSet pivots_of(std::initializer_list<std::uint32_t> indices) {
  scl::PivotSet set;
  set.indices = indices;
  set.scores.assign(set.indices.size(), 0.0);
  set.requested = set.indices.size();
  return set;
}

}  // namespace

TEST_CASE("bce analytic values and clamping") {
  CHECK(scl::bce(0.5, 1.0) == Catch::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(scl::bce(0.2, 0.0) == Catch::Approx(-std::log(0.8)).epsilon(1e-12));
  CHECK(scl::bce(1.0 - 1e-12, 1.0) <= 1e-11);
  CHECK(scl::bce(0.0, 0.0) <= 1e-11);   // clamped away from log(0)
  CHECK(scl::bce(1.5, 1.0) <= 1e-11);   // out-of-range prediction clamped
  CHECK_THROWS_AS(scl::bce(0.5, 1.5), scl::InvalidArgument);
  CHECK_THROWS_AS(scl::bce(0.5, -0.1), scl::InvalidArgument);
}

TEST_CASE("forward with zero weights gives 0.5 everywhere") {
  scl::JointModelParams params;
  params.n = 4;
  params.d = 3;
  params.p = 2;
  params.w_h = scl::DenseMatrix(4, 3, 0.0);
  params.w_t.assign(3, 0.0);
  params.w_p = scl::DenseMatrix(2, 3, 0.0);

  const scl::ForwardResult out = scl::forward(params, row({0, 2}, 4));
  CHECK(out.task_prob == 0.5);
  for (double h : out.hidden) CHECK(h == 0.0);
  for (double q : out.pivot_probs) CHECK(q == 0.5);

  // empty input: h = 0 regardless of weights
  scl::JointModelParams random = scl::init_weights(4, 3, 2, 99);
  const scl::ForwardResult empty = scl::forward(random, row({}, 4));
  for (double h : empty.hidden) CHECK(h == 0.0);
  CHECK(empty.task_prob == 0.5);

  CHECK_THROWS_AS(scl::forward(params, row({0}, 5)), scl::InvalidArgument);
}

TEST_CASE("forward matches the dense reference on random small nets") {
  scl::rng::Engine eng = scl::rng::make_engine(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const scl::JointModelParams params =
        scl::init_weights(6, 4, 2, eng(), trial % 2 ? scl::Activation::sigmoid
                                                    : scl::Activation::relu);
    scl::SparseVector x;
    x.dim = 6;
    for (std::uint32_t j = 0; j < 6; ++j)
      if (scl::rng::next_bernoulli(eng, 0.5)) x.indices.push_back(j);

    std::vector<double> dense(6, 0.0);
    for (std::uint32_t j : x.indices) dense[j] = 1.0;

    const scl::ForwardResult fast = scl::forward(params, x);
    const auto ref = scl::diagnostics::dense_forward_reference(params, dense);
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(fast.hidden[i] == Catch::Approx(ref.hidden[i]).margin(1e-12));
    CHECK(fast.task_prob == Catch::Approx(ref.task_prob).margin(1e-12));
    for (std::size_t k = 0; k < 2; ++k)
      CHECK(fast.pivot_probs[k] == Catch::Approx(ref.pivot_probs[k]).margin(1e-12));
    CHECK(fast.task_prob > 0.0);
    CHECK(fast.task_prob < 1.0);
    for (double h : fast.hidden)
      if (params.hidden_activation == scl::Activation::relu) CHECK(h >= 0.0);
  }
}

TEST_CASE("joint_loss on zero weights decomposes analytically") {
  scl::JointModelParams params;
  params.n = 3;
  params.d = 2;
  params.p = 1;
  params.w_h = scl::DenseMatrix(3, 2, 0.0);
  params.w_t.assign(2, 0.0);
  params.w_p = scl::DenseMatrix(1, 2, 0.0);

  scl::Minibatch batch;
  const scl::SparseVector x = row({0, 1}, 3);  // pivot 0 present
  batch.add(x, 1);

  const double lambda = 7.0;
  const double loss = scl::joint_loss(params, batch, pivots_of({0}), lambda, 0.0);
  CHECK(loss == Catch::Approx(std::log(2.0) * (1.0 + lambda)).epsilon(1e-12));
}

TEST_CASE("joint_loss reduces to the task term when lambda = rho = 0") {
  scl::rng::Engine eng = scl::rng::make_engine(5);
  const scl::JointModelParams params = scl::init_weights(5, 3, 2, eng());
  scl::Minibatch batch;
  const scl::SparseVector a = row({0, 3}, 5), b = row({1, 2, 4}, 5);
  batch.add(a, 1);
  batch.add(b, 0);

  const double loss = scl::joint_loss(params, batch, pivots_of({1, 4}), 0.0, 0.0);
  const double task = scl::bce(scl::forward(params, a).task_prob, 1.0) +
                      scl::bce(scl::forward(params, b).task_prob, 0.0);
  CHECK(loss == Catch::Approx(task).epsilon(1e-12));
}

TEST_CASE("joint_loss matches the straight-line dense reference") {
  scl::rng::Engine eng = scl::rng::make_engine(31);
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = scl::diagnostics::random_joint_instance(eng);
    const double mine =
        scl::joint_loss(inst.params, inst.batch, inst.pivots, inst.lambda, inst.rho);
    const double ref = scl::diagnostics::dense_loss_reference(inst.params, inst.batch,
                                                              inst.pivots, inst.lambda, inst.rho);
    CHECK(mine == Catch::Approx(ref).margin(1e-10));
  }
}

TEST_CASE("loss decomposition: task + lambda*pivot + rho*reg") {
  scl::rng::Engine eng = scl::rng::make_engine(67);
  for (int trial = 0; trial < 15; ++trial) {
    const auto inst = scl::diagnostics::random_joint_instance(eng);
    const double lambda = 3.5, rho = 0.2;
    const double full = scl::joint_loss(inst.params, inst.batch, inst.pivots, lambda, rho);
    const double task = scl::joint_loss(inst.params, inst.batch, inst.pivots, 0.0, 0.0);
    const double with_pivot = scl::joint_loss(inst.params, inst.batch, inst.pivots, 1.0, 0.0);
    const double pivot_term = with_pivot - task;
    const double reg = 0.5 * inst.params.squared_norm();
    CHECK(full == Catch::Approx(task + lambda * pivot_term + rho * reg).epsilon(1e-9));
  }
}

TEST_CASE("gradient of the task head on a single labeled row") {
  // lambda = rho = 0: dL/dW_t = (p - y) h
  scl::rng::Engine eng = scl::rng::make_engine(8);
  const scl::JointModelParams params = scl::init_weights(4, 3, 1, eng());
  const scl::SparseVector x = row({0, 2}, 4);
  scl::Minibatch batch;
  batch.add(x, 1);

  const scl::ForwardResult fwd = scl::forward(params, x);
  const scl::JointGradients grads =
      scl::joint_gradients(params, batch, pivots_of({1}), 0.0, 0.0);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(grads.w_t[i] == Catch::Approx((fwd.task_prob - 1.0) * fwd.hidden[i]).margin(1e-12));
}

TEST_CASE("zero input rows leave only the regularization gradient on w_h") {
  scl::rng::Engine eng = scl::rng::make_engine(9);
  const scl::JointModelParams params = scl::init_weights(4, 3, 1, eng());
  scl::Minibatch batch;
  const scl::SparseVector x = row({}, 4);
  batch.add(x, 0);
  const double rho = 0.3;
  const scl::JointGradients grads =
      scl::joint_gradients(params, batch, pivots_of({2}), 1.0, rho);
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(grads.w_h(j, i) == rho * params.w_h(j, i));  // exact
}

TEST_CASE("analytic gradients match finite differences") {
  scl::rng::Engine eng = scl::rng::make_engine(1234);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = scl::diagnostics::random_joint_instance(eng);
    const auto check = scl::diagnostics::check_joint_gradients(
        inst.params, inst.batch, inst.pivots, inst.lambda, inst.rho);
    INFO("trial " << trial << " worst ratio " << check.worst_ratio);
    CHECK(check.pass());
  }
}

TEST_CASE("gradients with pivot masking match finite differences") {
  scl::rng::Engine eng = scl::rng::make_engine(4321);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = scl::diagnostics::random_joint_instance(eng);
    const auto check = scl::diagnostics::check_joint_gradients(
        inst.params, inst.batch, inst.pivots, inst.lambda, inst.rho, /*mask=*/true);
    CHECK(check.pass());
  }
}

TEST_CASE("adam first step and zero-gradient behaviour") {
  std::vector<double> theta = {0.0};
  scl::AdamState state(1, 0.001);
  std::vector<double> g = {0.5};
  scl::adam_step(theta, g, state);
  CHECK(theta[0] == Catch::Approx(-0.001 * 0.5 / (0.5 + 1e-8)).epsilon(1e-12));
  CHECK(state.t == 1);

  std::vector<double> frozen = {1.25};
  scl::AdamState zero_state(1, 0.001);
  std::vector<double> zero = {0.0};
  scl::adam_step(frozen, zero, zero_state);
  CHECK(frozen[0] == 1.25);

  std::vector<double> bad = {std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(scl::adam_step(frozen, bad, zero_state), scl::InvalidArgument);
}

TEST_CASE("adam three-step sequence matches the hand-unrolled recurrence") {
  std::vector<double> theta = {0.0};
  scl::AdamState state(1, 0.1);
  const double g = 1.0, b1 = 0.9, b2 = 0.999, eps = 1e-8, lr = 0.1;

  double m = 0.0, v = 0.0, ref = 0.0;
  for (int t = 1; t <= 3; ++t) {
    std::vector<double> grad = {g};
    scl::adam_step(theta, grad, state);

    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mhat = m / (1 - std::pow(b1, t));
    const double vhat = v / (1 - std::pow(b2, t));
    ref -= lr * mhat / (std::sqrt(vhat) + eps);
    CHECK(theta[0] == Catch::Approx(ref).margin(1e-12));
  }
}

TEST_CASE("one small adam step on a fixed batch does not increase the loss") {
  scl::rng::Engine eng = scl::rng::make_engine(55);
  for (int trial = 0; trial < 15; ++trial) {
    auto inst = scl::diagnostics::random_joint_instance(eng);
    const double before =
        scl::joint_loss(inst.params, inst.batch, inst.pivots, inst.lambda, inst.rho);
    scl::JointGradients grads =
        scl::joint_gradients(inst.params, inst.batch, inst.pivots, inst.lambda, inst.rho);
    scl::JointAdam adam(inst.params, 1e-4);
    adam.step(inst.params, grads);
    const double after =
        scl::joint_loss(inst.params, inst.batch, inst.pivots, inst.lambda, inst.rho);
    CHECK(after <= before + 1e-12);
  }
}

TEST_CASE("init_weights is deterministic, bounded, and seed-sensitive") {
  const auto a = scl::init_weights(10, 5, 3, 42);
  const auto b = scl::init_weights(10, 5, 3, 42);
  const auto c = scl::init_weights(10, 5, 3, 43);
  CHECK(a == b);
  CHECK(a.w_h.data() != c.w_h.data());

  const double lim_h = std::sqrt(6.0 / 15.0);
  for (double w : a.w_h.data()) CHECK(std::fabs(w) <= lim_h);
  const double lim_t = std::sqrt(6.0 / 6.0);
  for (double w : a.w_t) CHECK(std::fabs(w) <= lim_t);
  const double lim_p = std::sqrt(6.0 / 8.0);
  for (double w : a.w_p.data()) CHECK(std::fabs(w) <= lim_p);

  CHECK_THROWS_AS(scl::init_weights(0, 5, 3, 1), scl::InvalidArgument);
}

TEST_CASE("pivot indexer computes targets and masks") {
  const scl::PivotSet set = pivots_of({4, 1});
  const scl::PivotIndexer indexer(set);
  REQUIRE(indexer.size() == 2);
  CHECK(indexer.is_pivot(1));
  CHECK(indexer.is_pivot(4));
  CHECK_FALSE(indexer.is_pivot(0));

  std::vector<double> targets(2, 0.0);
  std::vector<std::uint32_t> nonpivot;
  indexer.row_targets(row({0, 1, 3}, 6), targets, &nonpivot);
  CHECK(targets == std::vector<double>{0.0, 1.0});  // slot order follows the pivot set
  CHECK(nonpivot == std::vector<std::uint32_t>{0, 3});
}
