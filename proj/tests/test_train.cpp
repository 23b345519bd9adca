#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cartan/errors.hpp"
#include "cartan/random.hpp"
#include "cartan/train.hpp"
#include "oracles.hpp"

#include <cmath>
#include <algorithm>
#include <map>

using namespace cartan;

using oracle::gradient_gap;
using oracle::random_config;
using oracle::toy;

TEST_CASE("analytic gradient matches central differences on random networks") {
  auto rng = seeded(2024);
  for (int t = 0; t < 20; ++t) {
    NetworkConfig c = random_config(rng);
    CAPTURE(t);
    ParamSet p = oracle::random_params(c, t);
    Dataset d = toy(t, 6, c.input_dim, c.task, c.K);
    CHECK(gradient_gap(c, p, d) <= 1e-4);
  }
}

TEST_CASE("loss") {
  NetworkConfig c;
  c.input_dim = 3;
  c.layers = {{3}, {1}};
  c.task = Task::binary;
  Dataset d = toy(1, 40, 3, Task::binary, 2);
  const double l0 = loss(c, init_params(c, 3), d);
  CHECK(std::abs(l0 - 40 * std::log(2.0)) <= 0.2 * 40 * std::log(2.0));

  NetworkConfig r = c;
  r.task = Task::regression;
  ParamSet p = init_params(r, 1);
  Dataset exact = toy(2, 10, 3, Task::regression, 2);
  for (int i = 0; i < exact.size(); ++i) exact.labels[i] = predict_value(r, p, exact.features[i]);
  CHECK(loss(r, p, exact) == doctest::Approx(0.0).epsilon(1e-30));

  // One small full-batch step lowers the loss.
  for (Task task : {Task::binary, Task::multiclass, Task::regression}) {
    NetworkConfig k = c;
    k.task = task;
    k.K = 3;
    Dataset dd = toy(5, 30, 3, task, 3);
    ParamSet q = init_params(k, 9);
    Vec theta = flatten(k, q).values;
    Vec next = sgd_step(theta, gradient(k, q, dd), 1e-3);
    CHECK(loss(k, unflatten(k, next), dd) < loss(k, q, dd));
  }
  CHECK_THROWS_AS(loss(c, init_params(c, 1), Dataset{}), Error);
  Dataset badlab = d;
  badlab.labels[0] = 2;
  CHECK_THROWS_AS(loss(c, init_params(c, 1), badlab), Error);
}

TEST_CASE("gradient properties") {
  NetworkConfig c;
  c.input_dim = 2;
  c.layers = {{1}};
  c.task = Task::regression;
  // MSE gradient with respect to Q is linear in the residuals.
  ParamSet p = init_params(c, 4);
  Dataset d = toy(3, 8, 2, Task::regression, 2);
  for (int i = 0; i < d.size(); ++i) d.labels[i] = predict_value(c, p, d.features[i]);
  Dataset d2 = d, d3 = d;
  for (int i = 0; i < d.size(); ++i) {
    d2.labels[i] -= 0.1 * (i + 1);
    d3.labels[i] -= 0.2 * (i + 1);
  }
  Vec g2 = gradient(c, p, d2), g3 = gradient(c, p, d3);
  CHECK((g3 - 2 * g2).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(gradient(c, p, d).cwiseAbs().maxCoeff() <= 1e-14);

  // Saturated binary head: clamped probabilities carry no gradient.
  NetworkConfig b;
  b.input_dim = 2;
  b.layers = {{1}};
  b.task = Task::binary;
  ParamSet q = zero_params(b);
  q.Q = Mat::Identity(3, 2) * 1e13;
  q.separators[0] = {0.0, 0.0, (Vec(2) << 1, 0).finished()};
  Dataset sat;
  sat.features = {(Vec(2) << 0.0, 1.0).finished()};
  sat.labels = {1};
  CHECK(gradient(b, q, sat).norm() <= 1e-9);
}

TEST_CASE("sgd_step") {
  Vec th = (Vec(3) << 1, 2, 3).finished();
  CHECK(sgd_step(th, Vec::Zero(3), 0.5) == th);
  CHECK(sgd_step(th, Vec::Ones(3), 0.0) == th);
  // f = |theta|^2 / 2 contracts by (1 - eta) per step.
  Vec x = th;
  for (int i = 0; i < 20; ++i) x = sgd_step(x, x, 0.1);
  CHECK(x.norm() == doctest::Approx(std::pow(0.9, 20) * th.norm()).epsilon(1e-12));
  CHECK_THROWS_AS(sgd_step(th, Vec::Zero(2), 0.1), Error);
}

TEST_CASE("train_loop") {
  NetworkConfig c;
  c.input_dim = 4;
  c.layers = {{3}, {1}};
  c.task = Task::multiclass;
  c.K = 2;
  auto [tr, te] = split_dataset(gen_synthetic(SyntheticKind::blobs, 200, 4, 3, 2));
  TrainConfig t;
  t.seed = 5;
  t.epochs = 5;
  TrainResult a = train_loop(t, c, tr, te), b = train_loop(t, c, tr, te);
  REQUIRE(a.history.size() == 5);
  for (size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].train_loss == b.history[i].train_loss);
    CHECK(a.history[i].accuracy == b.history[i].accuracy);
  }
  CHECK(flatten(c, a.params).values == flatten(c, b.params).values);
  CHECK(a.history.back().accuracy >= 0.95);

  // Reordering rows inside each batch does not change the result: batches are reduced by index.
  TrainConfig full = t;
  full.batch_size = tr.size();
  full.epochs = 3;
  Dataset rev = tr;
  TrainResult fa = train_loop(full, c, tr, te);
  std::reverse(rev.features.begin(), rev.features.end());
  std::reverse(rev.labels.begin(), rev.labels.end());
  TrainResult fb = train_loop(full, c, rev, te);
  CHECK((flatten(c, fa.params).values - flatten(c, fb.params).values).cwiseAbs().maxCoeff() <= 1e-12);

  TrainConfig none = t;
  none.epochs = 0;
  TrainResult z = train_loop(none, c, tr, te);
  CHECK(z.history.empty());
  CHECK(flatten(c, z.params).values == flatten(c, init_params(c, t.seed)).values);

  // Clamped probabilities bound the classification loss, so provoke divergence through regression.
  NetworkConfig rc = c;
  rc.task = Task::regression;
  Dataset rd = toy(12, 40, 4, Task::regression, 2);
  for (auto& y : rd.labels) y *= 50;
  TrainConfig wild = t;
  wild.learning_rate = 1e4;
  TrainResult w = train_loop(wild, rc, rd, rd);
  CHECK(w.diverged);
  CHECK(flatten(rc, w.params).values.allFinite());

  TrainConfig bad = t;
  bad.batch_size = 0;
  CHECK_THROWS_AS(train_loop(bad, c, tr, te), Error);
  bad = t;
  bad.learning_rate = -1;
  CHECK_THROWS_AS(train_loop(bad, c, tr, te), Error);
}

TEST_CASE("linearly separated data in layer 1") {
  NetworkConfig c;
  c.input_dim = 2;
  c.layers = {{1}};
  c.task = Task::binary;
  auto rng = seeded(12);
  Dataset d;
  for (int i = 0; i < 120; ++i) {
    Vec x = uniform_vec(rng, 2, -1, 1);
    if (std::abs(x(0) + x(1)) < 0.1) continue;
    d.features.push_back(x);
    d.labels.push_back(x(0) + x(1) > 0 ? 1 : 0);
  }
  TrainConfig t;
  t.epochs = 40;
  t.batch_size = 8;
  t.learning_rate = 0.2;
  TrainResult r = train_loop(t, c, d, Dataset{});
  CHECK(evaluate(c, r.params, d).accuracy >= 0.95);
}

TEST_CASE("synthetic data") {
  Dataset a = gen_synthetic(SyntheticKind::blobs, 101, 3, 9, 4), b = gen_synthetic(SyntheticKind::blobs, 101, 3, 9, 4);
  CHECK(a.size() == 101);
  CHECK(a.dim() == 3);
  for (int i = 0; i < a.size(); ++i) {
    CHECK(a.features[i] == b.features[i]);
    CHECK(a.labels[i] == b.labels[i]);
  }
  std::map<double, int> count;
  for (double l : a.labels) count[l]++;
  CHECK(count.size() == 4);
  for (auto& [k, n] : count) CHECK(std::abs(n - 101.0 / 4) <= 1);
  Dataset arcs = gen_synthetic(SyntheticKind::arcs, 50, 2, 1);
  CHECK(arcs.size() == 50);
  CHECK_THROWS_AS(gen_synthetic(SyntheticKind::arcs, 50, 2, 1, 3), Error);
  CHECK_THROWS_AS(gen_synthetic(SyntheticKind::blobs, 1, 2, 1), Error);
  auto [tr, te] = split_dataset(a);
  CHECK(tr.size() == 81);
  CHECK(te.size() == 20);
  CHECK(te.split == Split::test);
  CHECK(te.features[0] == a.features[81]);
}

TEST_CASE("admissibility projection") {
  NetworkConfig c;
  c.input_dim = 2;
  c.layers = {{1}};
  c.task = Task::multiclass;
  c.K = 3;
  ParamSet p = zero_params(c);
  p.separators[0] = {2.0, 3.0, (Vec(2) << 1.0, 0.5).finished()};
  p.separators[1] = {-2.0, 3.0, (Vec(2) << 0.1, 0.0).finished()};
  p.separators[2] = {0.1, 0.1, (Vec(2) << 1.0, 1.0).finished()};
  ParamSet q = p;
  project_admissible(q);
  const auto& s = q.separators[0];
  CHECK(4 * s.alpha * s.beta == doctest::Approx((1 - kAdmissibleMargin) * s.w.squaredNorm()));
  CHECK(s.alpha / s.beta == doctest::Approx(2.0 / 3.0));
  CHECK(s.w == p.separators[0].w);
  for (int k : {1, 2}) {
    CHECK(q.separators[k].alpha == p.separators[k].alpha);
    CHECK(q.separators[k].beta == p.separators[k].beta);
  }
}
